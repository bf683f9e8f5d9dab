use std::path::Path;

use regex::Regex;

use super::DebiasError;
use crate::lexicon::WordPair;

pub const DEFAULT_CAP_PER_WORD: usize = 1000;

/// A corpus sentence and its counterfactual with one list word swapped for
/// its partner.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CounterfactualPair {
    pub sentence_index: usize,
    /// The list word found in the corpus sentence.
    pub matched_word: String,
    pub partner_word: String,
    /// Whether the matched word is the profane side of its pair.
    pub matched_is_profane: bool,
    pub source: String,
    pub variant: String,
}

impl CounterfactualPair {
    /// The variant carrying the profane word.
    pub fn profane_text(&self) -> &str {
        if self.matched_is_profane {
            &self.source
        } else {
            &self.variant
        }
    }

    pub fn non_profane_text(&self) -> &str {
        if self.matched_is_profane {
            &self.variant
        } else {
            &self.source
        }
    }
}

/// One sentence per line; blank lines are skipped.
pub fn parse_corpus(text: &str) -> Vec<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(str::to_string)
        .collect()
}

pub fn load_corpus(path: impl AsRef<Path>) -> Result<Vec<String>, DebiasError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| DebiasError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(parse_corpus(&text))
}

/// Finds whole-word, case-insensitive occurrences of every pair word and
/// emits one counterfactual per occurrence, in corpus order and then list
/// order (pair by pair, profane side first). At most `cap_per_word`
/// occurrences are used for each list word.
pub fn contextualize(
    word_pairs: &[WordPair],
    corpus: &[String],
    cap_per_word: usize,
) -> Result<Vec<CounterfactualPair>, DebiasError> {
    if corpus.is_empty() {
        return Err(DebiasError::EmptyCorpus);
    }
    let words: Vec<(&str, &str, bool, Regex)> = word_pairs
        .iter()
        .flat_map(|p| {
            [
                (p.profane.as_str(), p.non_profane.as_str(), true),
                (p.non_profane.as_str(), p.profane.as_str(), false),
            ]
        })
        .map(|(w, partner, profane)| {
            let re = Regex::new(&format!(r"(?i)\b{}\b", regex::escape(w))).expect("escaped word is a valid pattern");
            (w, partner, profane, re)
        })
        .collect();

    let mut used = vec![0usize; words.len()];
    let mut out = Vec::new();
    for (sentence_index, sentence) in corpus.iter().enumerate() {
        for (k, (word, partner, profane, re)) in words.iter().enumerate() {
            for m in re.find_iter(sentence) {
                if used[k] >= cap_per_word {
                    break;
                }
                used[k] += 1;
                let variant = format!("{}{}{}", &sentence[..m.start()], partner, &sentence[m.end()..]);
                out.push(CounterfactualPair {
                    sentence_index,
                    matched_word: word.to_string(),
                    partner_word: partner.to_string(),
                    matched_is_profane: *profane,
                    source: sentence.clone(),
                    variant,
                });
            }
        }
    }
    if out.is_empty() {
        return Err(DebiasError::NoMatches(words.len()));
    }
    Ok(out)
}
