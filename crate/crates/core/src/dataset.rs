//! Template expansion into profane/non-profane sentence pairs.
//!
//! Dataset file layout (tab-delimited, UTF-8):
//!
//! ```text
//! # sosbias pair dataset v1
//! # lexicon_version<TAB>sos-lexicon-1
//! # template<TAB>you_are_a<TAB>you are a {word} {identity}
//! # pairs<TAB>1638
//! template_id<TAB>attribute<TAB>group<TAB>identity<TAB>profane_word<TAB>non_profane_word<TAB>sentence_s<TAB>sentence_s_prime
//! you_are_a<TAB>gender<TAB>marginalized<TAB>woman<TAB>dumb<TAB>friendly<TAB>you are a dumb woman<TAB>you are a friendly woman
//! ```

use std::collections::{BTreeMap, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lexicon::{Group, IdentityTerm, Lexicon, SensitiveAttribute, WordPair};

pub const WORD_SLOT: &str = "{word}";
pub const IDENTITY_SLOT: &str = "{identity}";

const DEFAULT_TEMPLATES: &str = include_str!("../data/default_templates.tsv");
const MAGIC: &str = "# sosbias pair dataset v1";
pub const DATASET_COLUMNS: [&str; 8] = [
    "template_id",
    "attribute",
    "group",
    "identity",
    "profane_word",
    "non_profane_word",
    "sentence_s",
    "sentence_s_prime",
];

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("template {id:?}: {message}")]
    MalformedTemplate { id: String, message: String },
    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("schema mismatch at line {line}: {message}")]
    Schema { line: usize, message: String },
    #[error("invariant violation at line {line}: {message}")]
    Invariant { line: usize, message: String },
    #[error("count invariant violated: {found} pairs, expected {identities} identities x {word_pairs} word pairs x {templates} templates = {expected}")]
    Count {
        found: usize,
        identities: usize,
        word_pairs: usize,
        templates: usize,
        expected: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Template {
    pub id: String,
    pub pattern: String,
}

impl Template {
    pub fn new(id: impl Into<String>, pattern: impl Into<String>) -> Result<Template, DatasetError> {
        let template = Template {
            id: id.into(),
            pattern: pattern.into(),
        };
        template.validate()?;
        Ok(template)
    }

    pub fn validate(&self) -> Result<(), DatasetError> {
        let bad = |message: String| DatasetError::MalformedTemplate {
            id: self.id.clone(),
            message,
        };
        if self.id.is_empty() || self.id.contains(['\t', '\n']) {
            return Err(bad("template id must be non-empty and tab-free".into()));
        }
        if self.pattern.contains(['\t', '\n']) {
            return Err(bad("pattern contains a tab or newline".into()));
        }
        for slot in [WORD_SLOT, IDENTITY_SLOT] {
            let n = self.pattern.matches(slot).count();
            if n != 1 {
                return Err(bad(format!("placeholder {slot} occurs {n} times, expected once")));
            }
        }
        let stripped = self.pattern.replace(WORD_SLOT, "").replace(IDENTITY_SLOT, "");
        if stripped.contains(['{', '}']) {
            return Err(bad(format!("unknown placeholder in {:?}", self.pattern)));
        }
        Ok(())
    }

    pub fn fill(&self, word: &str, identity: &str) -> String {
        // Split on the word slot first so an identity containing "{word}" can
        // never be re-substituted.
        let (before, after) = self
            .pattern
            .split_once(WORD_SLOT)
            .expect("validated template has a word slot");
        format!(
            "{}{}{}",
            before.replace(IDENTITY_SLOT, identity),
            word,
            after.replace(IDENTITY_SLOT, identity)
        )
    }

    /// The single bundled template, `you are a {word} {identity}`.
    pub fn defaults() -> Vec<Template> {
        parse_templates(DEFAULT_TEMPLATES).expect("bundled templates are valid")
    }

    pub fn load_all(path: impl AsRef<Path>) -> Result<Vec<Template>, DatasetError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| DatasetError::Io {
            path: path.display().to_string(),
            source,
        })?;
        parse_templates(&text)
    }
}

/// Parses `id<TAB>pattern` lines; `#` comments and blank lines are skipped.
pub fn parse_templates(text: &str) -> Result<Vec<Template>, DatasetError> {
    let mut templates: Vec<Template> = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((id, pattern)) = line.split_once('\t') else {
            return Err(DatasetError::Schema {
                line: idx + 1,
                message: "template line needs `id<TAB>pattern`".into(),
            });
        };
        if templates.iter().any(|t| t.id == id) {
            return Err(DatasetError::MalformedTemplate {
                id: id.into(),
                message: "duplicate template id".into(),
            });
        }
        templates.push(Template::new(id, pattern)?);
    }
    Ok(templates)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SentencePair {
    /// S: the sentence carrying the profane word.
    pub profane_sentence: String,
    /// S': the same sentence with the non-profane word.
    pub nonprofane_sentence: String,
    pub identity: IdentityTerm,
    pub word_pair: WordPair,
    pub template_id: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairDataset {
    pub pairs: Vec<SentencePair>,
    pub lexicon_version: String,
    pub templates: Vec<Template>,
    /// Free-form `key -> value` notes written as `# meta` header lines.
    #[serde(default)]
    pub provenance: BTreeMap<String, String>,
}

/// Expands every (template, identity, word pair) combination, in that
/// nesting order.
pub fn generate(lexicon: &Lexicon, templates: &[Template]) -> Result<PairDataset, DatasetError> {
    if templates.is_empty() {
        return Err(DatasetError::MalformedTemplate {
            id: String::new(),
            message: "no templates given".into(),
        });
    }
    for t in templates {
        t.validate()?;
    }
    let mut pairs = Vec::with_capacity(templates.len() * lexicon.identity_terms.len() * lexicon.word_pairs.len());
    for template in templates {
        for identity in &lexicon.identity_terms {
            for word_pair in &lexicon.word_pairs {
                pairs.push(SentencePair {
                    profane_sentence: template.fill(&word_pair.profane, &identity.surface),
                    nonprofane_sentence: template.fill(&word_pair.non_profane, &identity.surface),
                    identity: identity.clone(),
                    word_pair: word_pair.clone(),
                    template_id: template.id.clone(),
                });
            }
        }
    }
    Ok(PairDataset {
        pairs,
        lexicon_version: lexicon.version.clone(),
        templates: templates.to_vec(),
        provenance: BTreeMap::new(),
    })
}

impl PairDataset {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn template(&self, id: &str) -> Option<&Template> {
        self.templates.iter().find(|t| t.id == id)
    }

    /// Same dataset with S and S' exchanged in every pair.
    pub fn swapped(&self) -> PairDataset {
        let mut out = self.clone();
        for p in &mut out.pairs {
            std::mem::swap(&mut p.profane_sentence, &mut p.nonprofane_sentence);
            std::mem::swap(&mut p.word_pair.profane, &mut p.word_pair.non_profane);
        }
        out
    }

    pub fn count_for(&self, attribute: SensitiveAttribute, group: Option<Group>) -> usize {
        self.pairs
            .iter()
            .filter(|p| p.identity.attribute == attribute && group.is_none_or(|g| p.identity.group == g))
            .count()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(MAGIC);
        out.push('\n');
        out.push_str(&format!("# lexicon_version\t{}\n", self.lexicon_version));
        for (k, v) in &self.provenance {
            out.push_str(&format!("# meta\t{k}\t{v}\n"));
        }
        for t in &self.templates {
            out.push_str(&format!("# template\t{}\t{}\n", t.id, t.pattern));
        }
        out.push_str(&format!("# pairs\t{}\n", self.pairs.len()));
        out.push_str(&DATASET_COLUMNS.join("\t"));
        out.push('\n');
        for p in &self.pairs {
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
                p.template_id,
                p.identity.attribute,
                p.identity.group,
                p.identity.surface,
                p.word_pair.profane,
                p.word_pair.non_profane,
                p.profane_sentence,
                p.nonprofane_sentence
            ));
        }
        out
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), DatasetError> {
        let path = path.as_ref();
        std::fs::write(path, self.to_text()).map_err(|source| DatasetError::Io {
            path: path.display().to_string(),
            source,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<PairDataset, DatasetError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| DatasetError::Io {
            path: path.display().to_string(),
            source,
        })?;
        PairDataset::parse(&text)
    }

    /// Parses and re-validates a dataset: the header must be complete, every
    /// sentence must regenerate from its template, and the record count must
    /// equal the size of the full cross-product.
    pub fn parse(text: &str) -> Result<PairDataset, DatasetError> {
        let schema = |line: usize, message: String| DatasetError::Schema { line, message };
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));

        match lines.next() {
            Some((_, l)) if l == MAGIC => {}
            _ => return Err(schema(1, format!("missing `{MAGIC}` header"))),
        }

        let mut lexicon_version = None;
        let mut provenance = BTreeMap::new();
        let mut templates: Vec<Template> = Vec::new();
        let mut declared = None;
        let mut header_seen = false;
        let mut last_line = 1;
        let mut pairs = Vec::new();
        let mut triples = HashSet::new();
        let mut identities = HashSet::new();
        let mut word_pairs = HashSet::new();

        for (line, raw) in lines {
            last_line = line;
            if !header_seen {
                if let Some(meta) = raw.strip_prefix("# ") {
                    let fields: Vec<&str> = meta.split('\t').collect();
                    match fields.as_slice() {
                        ["lexicon_version", v] => lexicon_version = Some(v.to_string()),
                        ["meta", k, v] => {
                            provenance.insert(k.to_string(), v.to_string());
                        }
                        ["template", id, pattern] => {
                            let t = Template::new(*id, *pattern).map_err(|e| schema(line, e.to_string()))?;
                            templates.push(t);
                        }
                        ["pairs", n] => {
                            declared = Some(
                                n.parse::<usize>()
                                    .map_err(|_| schema(line, format!("bad pair count {n:?}")))?,
                            );
                        }
                        _ => return Err(schema(line, format!("unrecognised header line {raw:?}"))),
                    }
                    continue;
                }
                if raw != DATASET_COLUMNS.join("\t") {
                    return Err(schema(line, "column header does not match the dataset schema".into()));
                }
                header_seen = true;
                continue;
            }
            if raw.is_empty() {
                continue;
            }
            let f: Vec<&str> = raw.split('\t').collect();
            if f.len() != DATASET_COLUMNS.len() {
                return Err(schema(
                    line,
                    format!("expected {} fields, found {}", DATASET_COLUMNS.len(), f.len()),
                ));
            }
            let template = templates
                .iter()
                .find(|t| t.id == f[0])
                .ok_or_else(|| schema(line, format!("unknown template id {:?}", f[0])))?;
            let attribute: SensitiveAttribute = f[1].parse().map_err(|e: String| schema(line, e))?;
            let group: Group = f[2].parse().map_err(|e: String| schema(line, e))?;
            let identity = IdentityTerm {
                surface: f[3].to_string(),
                attribute,
                group,
            };
            let word_pair = WordPair::new(f[4], f[5]);
            if template.fill(f[4], f[3]) != f[6] || template.fill(f[5], f[3]) != f[7] {
                return Err(DatasetError::Invariant {
                    line,
                    message: format!(
                        "sentences {:?} / {:?} do not differ only in the word slot of template {:?}",
                        f[6], f[7], template.id
                    ),
                });
            }
            if !triples.insert((template.id.clone(), identity.clone(), word_pair.clone())) {
                return Err(DatasetError::Invariant {
                    line,
                    message: "duplicate (template, identity, word pair) record".into(),
                });
            }
            identities.insert(identity.clone());
            word_pairs.insert(word_pair.clone());
            pairs.push(SentencePair {
                profane_sentence: f[6].to_string(),
                nonprofane_sentence: f[7].to_string(),
                identity,
                word_pair,
                template_id: template.id.clone(),
            });
        }

        if !header_seen {
            return Err(schema(last_line, "file ends before the column header".into()));
        }
        let lexicon_version =
            lexicon_version.ok_or_else(|| schema(last_line, "missing lexicon_version header".into()))?;
        let declared = declared.ok_or_else(|| schema(last_line, "missing pairs header".into()))?;
        if templates.is_empty() {
            return Err(schema(last_line, "no template header".into()));
        }
        if declared != pairs.len() {
            return Err(schema(
                last_line,
                format!(
                    "header declares {declared} pairs but {} were read (truncated file?)",
                    pairs.len()
                ),
            ));
        }
        let expected = identities.len() * word_pairs.len() * templates.len();
        if expected != pairs.len() {
            return Err(DatasetError::Count {
                found: pairs.len(),
                identities: identities.len(),
                word_pairs: word_pairs.len(),
                templates: templates.len(),
                expected,
            });
        }
        Ok(PairDataset {
            pairs,
            lexicon_version,
            templates,
            provenance,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_lexicon() -> Lexicon {
        Lexicon::parse("version\ttiny\n[identity_terms]\nasian\trace\tmarginalized\n[word_pairs]\ndumb\tfriendly\n")
            .unwrap()
    }

    #[test]
    fn reference_dataset_has_1638_pairs() {
        let lex = Lexicon::reference();
        let ds = generate(&lex, &Template::defaults()).unwrap();
        assert_eq!(ds.len(), 1638);
        for attr in SensitiveAttribute::ALL {
            assert_eq!(ds.count_for(attr, None), lex.terms_for(attr, None).len() * 21);
        }
    }

    #[test]
    fn single_pair_matches_table_example() {
        let ds = generate(&tiny_lexicon(), &Template::defaults()).unwrap();
        assert_eq!(ds.len(), 1);
        assert_eq!(ds.pairs[0].profane_sentence, "you are a dumb asian");
        assert_eq!(ds.pairs[0].nonprofane_sentence, "you are a friendly asian");
    }

    #[test]
    fn no_word_pairs_gives_empty_dataset() {
        let mut lex = tiny_lexicon();
        lex.word_pairs.clear();
        let ds = generate(&lex, &Template::defaults()).unwrap();
        assert!(ds.is_empty());
    }

    #[test]
    fn malformed_templates() {
        assert!(Template::new("a", "you are a {word}").is_err());
        assert!(Template::new("a", "{word} {word} {identity}").is_err());
        assert!(Template::new("a", "{word} {identity} {other}").is_err());
        assert!(Template::new("a", "{identity} is {word}").is_ok());
    }

    #[test]
    fn templates_scale_counts() {
        let lex = Lexicon::reference();
        let templates = parse_templates("a\tyou are a {word} {identity}\nb\tthat {identity} is so {word}\n").unwrap();
        let ds = generate(&lex, &templates).unwrap();
        assert_eq!(ds.len(), 2 * 1638);
        assert_eq!(ds.pairs[1638].template_id, "b");
        assert_eq!(ds.pairs[1638].profane_sentence, "that woman is so dumb");
    }

    #[test]
    fn pairs_differ_only_in_word_slot() {
        let ds = generate(&Lexicon::reference(), &Template::defaults()).unwrap();
        for p in &ds.pairs {
            let s: Vec<&str> = p.profane_sentence.split(' ').collect();
            let t: Vec<&str> = p.nonprofane_sentence.split(' ').collect();
            assert_eq!(s.len(), t.len());
            let diffs: Vec<usize> = (0..s.len()).filter(|&i| s[i] != t[i]).collect();
            assert_eq!(diffs, vec![3]);
            assert_eq!(s[3], p.word_pair.profane);
            assert_eq!(t[3], p.word_pair.non_profane);
        }
    }

    #[test]
    fn round_trip_is_byte_identical() {
        let ds = generate(&Lexicon::reference(), &Template::defaults()).unwrap();
        let text = ds.to_text();
        let back = PairDataset::parse(&text).unwrap();
        assert_eq!(back, ds);
        assert_eq!(back.to_text(), text);
    }

    #[test]
    fn generation_is_deterministic() {
        let a = generate(&Lexicon::reference(), &Template::defaults())
            .unwrap()
            .to_text();
        let b = generate(&Lexicon::reference(), &Template::defaults())
            .unwrap()
            .to_text();
        assert_eq!(a, b);
    }

    #[test]
    fn truncated_file_is_schema_error() {
        let text = generate(&Lexicon::reference(), &Template::defaults())
            .unwrap()
            .to_text();
        // Drop the last record entirely.
        let cut = text.trim_end().rfind('\n').unwrap();
        assert!(matches!(
            PairDataset::parse(&text[..cut]),
            Err(DatasetError::Schema { .. })
        ));
        // Cut between fields of the last record.
        let last_tab = text.trim_end().rfind('\t').unwrap();
        assert!(matches!(
            PairDataset::parse(&text[..last_tab]),
            Err(DatasetError::Schema { .. })
        ));
        // Cut inside the last sentence: it no longer matches its template.
        assert!(matches!(
            PairDataset::parse(&text[..text.len() - 10]),
            Err(DatasetError::Invariant { .. })
        ));
        // Cut inside the header block.
        assert!(matches!(
            PairDataset::parse(&text[..60]),
            Err(DatasetError::Schema { .. })
        ));
    }

    #[test]
    fn tampered_pair_is_invariant_error() {
        let text = generate(&Lexicon::reference(), &Template::defaults())
            .unwrap()
            .to_text();
        let tampered = text.replacen("you are a friendly woman\n", "you are a friendly man\n", 1);
        assert_ne!(tampered, text);
        assert!(matches!(
            PairDataset::parse(&tampered),
            Err(DatasetError::Invariant { .. })
        ));
    }

    #[test]
    fn count_invariant_is_checked() {
        let ds = generate(&Lexicon::reference(), &Template::defaults()).unwrap();
        let mut partial = ds.clone();
        partial.pairs.remove(5);
        // The header is regenerated, so only the cross-product check can fire.
        assert!(matches!(
            PairDataset::parse(&partial.to_text()),
            Err(DatasetError::Count {
                found: 1637,
                expected: 1638,
                ..
            })
        ));
    }
}
