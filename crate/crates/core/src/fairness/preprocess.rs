use std::collections::BTreeMap;
use std::sync::OnceLock;

use regex::{Captures, Regex};

const CONTRACTIONS: &str = include_str!("../../data/contractions.tsv");

/// Switches for the fixed cleaning pipeline. Steps always run in field order;
/// a flag only disables its step. Whitespace is always collapsed at the end.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PreprocessConfig {
    pub strip_urls: bool,
    pub strip_mentions: bool,
    pub strip_non_ascii: bool,
    pub strip_retweet: bool,
    pub lowercase: bool,
    pub expand_contractions: bool,
    pub pad_punctuation: bool,
}

impl Default for PreprocessConfig {
    fn default() -> Self {
        Self {
            strip_urls: true,
            strip_mentions: true,
            strip_non_ascii: true,
            strip_retweet: true,
            lowercase: true,
            expand_contractions: true,
            pad_punctuation: true,
        }
    }
}

struct Patterns {
    url: Regex,
    mention: Regex,
    retweet: Regex,
    contraction: Regex,
    expansions: BTreeMap<String, String>,
    version: String,
}

fn patterns() -> &'static Patterns {
    static CELL: OnceLock<Patterns> = OnceLock::new();
    CELL.get_or_init(|| {
        let mut version = String::new();
        let mut expansions = BTreeMap::new();
        for line in CONTRACTIONS
            .lines()
            .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        {
            let (k, v) = line.split_once('\t').expect("contraction rows have two columns");
            if k == "version" {
                version = v.to_string();
            } else {
                expansions.insert(k.to_string(), v.to_string());
            }
        }
        let mut keys: Vec<&String> = expansions.keys().collect();
        keys.sort_by(|a, b| b.len().cmp(&a.len()).then(a.cmp(b)));
        let alternation = keys.iter().map(|k| regex::escape(k)).collect::<Vec<_>>().join("|");
        Patterns {
            url: Regex::new(r"(?i)(?:https?://|www\.)\S*").unwrap(),
            mention: Regex::new(r"@\w+").unwrap(),
            retweet: Regex::new(r"\bRT\b").unwrap(),
            contraction: Regex::new(&format!(r"\b(?:{alternation})\b")).unwrap(),
            expansions,
            version,
        }
    })
}

/// Version tag of the shipped contraction table.
pub fn contractions_version() -> &'static str {
    &patterns().version
}

fn pad(text: &str) -> String {
    let mut out = String::with_capacity(text.len() + 8);
    let mut prev: Option<char> = None;
    for c in text.chars() {
        if let Some(p) = prev {
            let boundary =
                (p.is_alphanumeric() && c.is_ascii_punctuation()) || (p.is_ascii_punctuation() && c.is_alphanumeric());
            if boundary {
                out.push(' ');
            }
        }
        out.push(c);
        prev = Some(c);
    }
    out
}

/// Cleans one text: URLs, user mentions, non-ASCII characters and the
/// retweet marker are removed, then the text is lowercased, contractions are
/// expanded and punctuation is split from adjacent words. Idempotent.
///
/// Removed non-ASCII characters become spaces so that removal never joins
/// fragments into a new URL, mention or contraction.
pub fn preprocess(text: &str, config: &PreprocessConfig) -> String {
    let p = patterns();
    let mut s = text.to_string();
    if config.strip_urls {
        s = p.url.replace_all(&s, " ").into_owned();
    }
    if config.strip_mentions {
        s = p.mention.replace_all(&s, " ").into_owned();
    }
    if config.strip_non_ascii {
        s = s.chars().map(|c| if c.is_ascii() { c } else { ' ' }).collect();
    }
    if config.strip_retweet {
        s = p.retweet.replace_all(&s, " ").into_owned();
    }
    if config.lowercase {
        s = s.to_lowercase();
    }
    if config.expand_contractions {
        s = p
            .contraction
            .replace_all(&s, |c: &Captures<'_>| p.expansions[&c[0]].clone())
            .into_owned();
    }
    if config.pad_punctuation {
        s = pad(&s);
    }
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}
