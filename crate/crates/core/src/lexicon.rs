//! Identity-term and profane/non-profane word lists.
//!
//! A lexicon file is tab-delimited UTF-8 with two typed sections:
//!
//! ```text
//! version<TAB>sos-lexicon-1
//! [identity_terms]
//! woman<TAB>gender<TAB>marginalized
//! [word_pairs]
//! dumb<TAB>friendly
//! ```
//!
//! Blank lines and lines starting with `#` are ignored. Term order is file
//! order and is preserved through generation, so two datasets built from the
//! same file are byte-identical.

use std::collections::HashSet;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

const REFERENCE_LEXICON: &str = include_str!("../data/reference_lexicon.tsv");

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("failed to read lexicon {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: duplicate identity term ({surface:?}, {attribute})")]
    DuplicateTerm {
        line: usize,
        surface: String,
        attribute: SensitiveAttribute,
    },
    #[error("line {line}: duplicate word pair ({profane:?}, {non_profane:?})")]
    DuplicatePair {
        line: usize,
        profane: String,
        non_profane: String,
    },
    #[error("line {line}: empty attribute field")]
    EmptyAttribute { line: usize },
    #[error("line {line}: unknown sensitive attribute {value:?}")]
    UnknownAttribute { line: usize, value: String },
    #[error("line {line}: unknown group label {value:?} (expected marginalized or non_marginalized)")]
    UnknownGroup { line: usize, value: String },
    #[error("line {line}: {message}")]
    Invariant { line: usize, message: String },
    #[error("lexicon has no version line")]
    MissingVersion,
}

/// The six sensitive attributes covered by the identity lexicon.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SensitiveAttribute {
    Gender,
    Race,
    SexualOrientation,
    Religion,
    Disability,
    SocialClass,
}

impl SensitiveAttribute {
    pub const ALL: [SensitiveAttribute; 6] = [
        SensitiveAttribute::Gender,
        SensitiveAttribute::Race,
        SensitiveAttribute::SexualOrientation,
        SensitiveAttribute::Religion,
        SensitiveAttribute::Disability,
        SensitiveAttribute::SocialClass,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SensitiveAttribute::Gender => "gender",
            SensitiveAttribute::Race => "race",
            SensitiveAttribute::SexualOrientation => "sexual_orientation",
            SensitiveAttribute::Religion => "religion",
            SensitiveAttribute::Disability => "disability",
            SensitiveAttribute::SocialClass => "social_class",
        }
    }
}

impl fmt::Display for SensitiveAttribute {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SensitiveAttribute {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SensitiveAttribute::ALL
            .iter()
            .copied()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| format!("unknown sensitive attribute {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Group {
    Marginalized,
    NonMarginalized,
}

impl Group {
    pub fn as_str(self) -> &'static str {
        match self {
            Group::Marginalized => "marginalized",
            Group::NonMarginalized => "non_marginalized",
        }
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Group {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "marginalized" => Ok(Group::Marginalized),
            "non_marginalized" => Ok(Group::NonMarginalized),
            _ => Err(format!("unknown group label {s:?}")),
        }
    }
}

/// A non-offensive identity word or phrase.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IdentityTerm {
    pub surface: String,
    pub attribute: SensitiveAttribute,
    pub group: Group,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WordPair {
    pub profane: String,
    pub non_profane: String,
}

impl WordPair {
    pub fn new(profane: impl Into<String>, non_profane: impl Into<String>) -> Self {
        Self {
            profane: profane.into(),
            non_profane: non_profane.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lexicon {
    pub version: String,
    pub identity_terms: Vec<IdentityTerm>,
    pub word_pairs: Vec<WordPair>,
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    Preamble,
    Identity,
    Pairs,
}

/// Surfaces are lowercase, trimmed, non-empty, and free of characters that
/// would break the tab-delimited formats or template placeholders.
fn check_word(word: &str) -> Result<(), String> {
    if word.is_empty() {
        return Err("empty word".into());
    }
    if word.trim() != word {
        return Err(format!("{word:?} has surrounding whitespace"));
    }
    if word.to_lowercase() != word {
        return Err(format!("{word:?} is not lowercase"));
    }
    if word.contains(['\t', '\n', '\r', '{', '}']) {
        return Err(format!("{word:?} contains a reserved character"));
    }
    Ok(())
}

impl Lexicon {
    /// The bundled reference lexicon (78 identity terms, 21 word pairs).
    pub fn reference() -> Lexicon {
        Lexicon::parse(REFERENCE_LEXICON).expect("bundled reference lexicon is valid")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Lexicon, LexiconError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| LexiconError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Lexicon::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Lexicon, LexiconError> {
        let mut version = None;
        let mut section = Section::Preamble;
        let mut identity_terms = Vec::new();
        let mut word_pairs = Vec::new();
        let mut seen_terms = HashSet::new();
        let mut seen_pairs = HashSet::new();

        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim_end_matches('\r');
            if trimmed.trim().is_empty() || trimmed.starts_with('#') {
                continue;
            }
            match trimmed.trim() {
                "[identity_terms]" => {
                    section = Section::Identity;
                    continue;
                }
                "[word_pairs]" => {
                    section = Section::Pairs;
                    continue;
                }
                s if s.starts_with('[') => {
                    return Err(LexiconError::Parse {
                        line,
                        message: format!("unknown section {s}"),
                    })
                }
                _ => {}
            }
            let fields: Vec<&str> = trimmed.split('\t').collect();
            match section {
                Section::Preamble => match fields.as_slice() {
                    ["version", v] if !v.trim().is_empty() => {
                        version = Some(v.trim().to_string());
                    }
                    _ => {
                        return Err(LexiconError::Parse {
                            line,
                            message: format!("expected `version<TAB>id`, found {trimmed:?}"),
                        })
                    }
                },
                Section::Identity => {
                    let [surface, attribute, group] = fields.as_slice() else {
                        return Err(LexiconError::Parse {
                            line,
                            message: format!("identity term needs 3 tab-separated fields, found {}", fields.len()),
                        });
                    };
                    check_word(surface).map_err(|message| LexiconError::Invariant { line, message })?;
                    let attribute = attribute.trim();
                    if attribute.is_empty() {
                        return Err(LexiconError::EmptyAttribute { line });
                    }
                    let attribute: SensitiveAttribute =
                        attribute.parse().map_err(|_| LexiconError::UnknownAttribute {
                            line,
                            value: attribute.to_string(),
                        })?;
                    let group: Group = group.trim().parse().map_err(|_| LexiconError::UnknownGroup {
                        line,
                        value: group.trim().to_string(),
                    })?;
                    if attribute == SensitiveAttribute::Disability && group == Group::NonMarginalized {
                        return Err(LexiconError::Invariant {
                            line,
                            message: "disability terms must be marginalized".into(),
                        });
                    }
                    if !seen_terms.insert((surface.to_string(), attribute)) {
                        return Err(LexiconError::DuplicateTerm {
                            line,
                            surface: surface.to_string(),
                            attribute,
                        });
                    }
                    identity_terms.push(IdentityTerm {
                        surface: surface.to_string(),
                        attribute,
                        group,
                    });
                }
                Section::Pairs => {
                    let [profane, non_profane] = fields.as_slice() else {
                        return Err(LexiconError::Parse {
                            line,
                            message: format!("word pair needs 2 tab-separated fields, found {}", fields.len()),
                        });
                    };
                    check_word(profane).map_err(|message| LexiconError::Invariant { line, message })?;
                    check_word(non_profane).map_err(|message| LexiconError::Invariant { line, message })?;
                    if profane == non_profane {
                        return Err(LexiconError::Invariant {
                            line,
                            message: format!("pair sides are identical ({profane:?})"),
                        });
                    }
                    if !seen_pairs.insert((profane.to_string(), non_profane.to_string())) {
                        return Err(LexiconError::DuplicatePair {
                            line,
                            profane: profane.to_string(),
                            non_profane: non_profane.to_string(),
                        });
                    }
                    word_pairs.push(WordPair::new(*profane, *non_profane));
                }
            }
        }

        Ok(Lexicon {
            version: version.ok_or(LexiconError::MissingVersion)?,
            identity_terms,
            word_pairs,
        })
    }

    /// Canonical serialization; `parse(to_text(l)) == l`.
    pub fn to_text(&self) -> String {
        let mut out = format!("version\t{}\n\n[identity_terms]\n", self.version);
        for term in &self.identity_terms {
            out.push_str(&format!("{}\t{}\t{}\n", term.surface, term.attribute, term.group));
        }
        out.push_str("\n[word_pairs]\n");
        for pair in &self.word_pairs {
            out.push_str(&format!("{}\t{}\n", pair.profane, pair.non_profane));
        }
        out
    }

    /// Terms for one attribute in file order, optionally restricted to a group.
    pub fn terms_for(&self, attribute: SensitiveAttribute, group: Option<Group>) -> Vec<&IdentityTerm> {
        self.identity_terms
            .iter()
            .filter(|t| t.attribute == attribute && group.is_none_or(|g| t.group == g))
            .collect()
    }

    /// Attributes present in the lexicon, in canonical order.
    pub fn attributes(&self) -> Vec<SensitiveAttribute> {
        SensitiveAttribute::ALL
            .iter()
            .copied()
            .filter(|a| self.identity_terms.iter().any(|t| t.attribute == *a))
            .collect()
    }
}
