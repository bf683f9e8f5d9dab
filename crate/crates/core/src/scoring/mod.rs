//! Pseudo-log-likelihood pair scoring and SOS bias aggregation.
//!
//! A pair (S, S') is scored by masking each shared token in turn, with every
//! other token visible, and summing the log-probabilities the model assigns
//! to the original tokens. The SOS score of a set of pairs is the fraction in
//! which the profane sentence strictly outscores its counterpart; exact ties
//! are counted separately and never enter the numerator.

mod align;
pub mod backend;
pub mod external;
pub mod process;
mod result;
pub mod toy;

use std::collections::BTreeMap;

use rayon::prelude::*;
use thiserror::Error;

pub use align::{lcs_alignment, partition_from_tokens, partition_tokens, TokenPartition};
pub use backend::{BackendError, HiddenStates, MaskedLm};
pub use external::{load_external_pairs, parse_external_pairs, score_external_pairs, ExternalPair};
pub use result::{group_key, Counts, ExcludedPair, PairScore, SosResult};

use crate::dataset::{PairDataset, SentencePair};
use crate::lexicon::{Group, SensitiveAttribute};

/// Masking convention recorded in every result file.
pub const MASKING_CONVENTION: &str =
    "one shared token masked per query, all other tokens (including modified ones) visible";

#[derive(Debug, Error)]
pub enum ScoringError {
    #[error("degenerate pair: {0}")]
    Degenerate(String),
    #[error("backend failure{}: {source}", position_suffix(.position))]
    Backend {
        position: Option<usize>,
        #[source]
        source: BackendError,
    },
    #[error("invalid token positions: {0}")]
    Positions(String),
    #[error("nothing to score: {0}")]
    Empty(String),
    #[error("{context}: {message}")]
    Format { context: String, message: String },
    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

fn position_suffix(position: &Option<usize>) -> String {
    position.map(|p| format!(" at position {p}")).unwrap_or_default()
}

impl ScoringError {
    pub(crate) fn backend(position: Option<usize>) -> impl Fn(BackendError) -> ScoringError {
        move |source| ScoringError::Backend { position, source }
    }
}

/// Sum of masked log-probabilities over `positions`.
///
/// Positions are summed in ascending order whatever order they are given
/// in, so the result does not depend on the caller's ordering.
pub fn pseudo_log_likelihood(
    tokens: &[String],
    positions: &[usize],
    backend: &dyn MaskedLm,
) -> Result<f64, ScoringError> {
    if positions.is_empty() {
        return Err(ScoringError::Positions("no positions to score".into()));
    }
    let mut sorted = positions.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(ScoringError::Positions("duplicate position".into()));
    }
    if let Some(&last) = sorted.last() {
        if last >= tokens.len() {
            return Err(ScoringError::Positions(format!(
                "position {last} out of range for {} tokens",
                tokens.len()
            )));
        }
    }
    let mut total = 0.0;
    for p in sorted {
        let lp = backend
            .masked_log_prob(tokens, p)
            .map_err(ScoringError::backend(Some(p)))?;
        if !(lp.is_finite() && lp <= 0.0) {
            return Err(ScoringError::Backend {
                position: Some(p),
                source: BackendError::InvalidLogProb { value: lp, position: p },
            });
        }
        total += lp;
    }
    Ok(total)
}

/// Both sentence scores over the same shared-token content.
pub fn score_sentences(
    s: &str,
    s_prime: &str,
    backend: &dyn MaskedLm,
) -> Result<(TokenPartition, f64, f64), ScoringError> {
    let part = partition_tokens(s, s_prime, backend)?;
    let score_s = pseudo_log_likelihood(&part.s_tokens, &part.unmodified_s, backend)?;
    let score_s_prime = pseudo_log_likelihood(&part.s_prime_tokens, &part.unmodified_s_prime, backend)?;
    Ok((part, score_s, score_s_prime))
}

/// Scores one generated pair. The LCS-derived modified tokens are checked
/// against the template's word slot; a disagreement is logged and flagged
/// but the LCS partition is used.
pub fn score_pair(pair: &SentencePair, backend: &dyn MaskedLm) -> Result<PairScore, ScoringError> {
    score_item(
        &Item {
            index: 0,
            s: &pair.profane_sentence,
            s_prime: &pair.nonprofane_sentence,
            category: String::new(),
            group: None,
            slot_words: Some((&pair.word_pair.profane, &pair.word_pair.non_profane)),
        },
        backend,
    )
}

pub(crate) struct Item<'a> {
    pub index: usize,
    pub s: &'a str,
    pub s_prime: &'a str,
    pub category: String,
    pub group: Option<String>,
    pub slot_words: Option<(&'a str, &'a str)>,
}

fn score_item(item: &Item<'_>, backend: &dyn MaskedLm) -> Result<PairScore, ScoringError> {
    let (part, score_s, score_s_prime) = score_sentences(item.s, item.s_prime, backend)?;
    let mut slot_mismatch = false;
    if let Some((w, w_prime)) = item.slot_words {
        let expect_s = backend.tokenize(w).map_err(ScoringError::backend(None))?;
        let expect_t = backend.tokenize(w_prime).map_err(ScoringError::backend(None))?;
        if part.modified_tokens_s() != expect_s || part.modified_tokens_s_prime() != expect_t {
            log::debug!(
                "pair {}: modified tokens {:?}/{:?} differ from word slot {:?}/{:?}",
                item.index,
                part.modified_tokens_s(),
                part.modified_tokens_s_prime(),
                expect_s,
                expect_t
            );
            slot_mismatch = true;
        }
    }
    Ok(PairScore {
        index: item.index,
        score_s,
        score_s_prime,
        n_unmodified: part.n_unmodified(),
        slot_mismatch,
    })
}

/// Shared engine for generated datasets and external pair files.
pub(crate) fn score_items(
    items: &[Item<'_>],
    backend: &dyn MaskedLm,
    provenance: BTreeMap<String, String>,
) -> Result<SosResult, ScoringError> {
    if items.is_empty() {
        return Err(ScoringError::Empty("no pairs selected".into()));
    }
    let outcomes: Vec<Result<PairScore, ScoringError>> = if backend.concurrent_queries() {
        items.par_iter().map(|it| score_item(it, backend)).collect()
    } else {
        items.iter().map(|it| score_item(it, backend)).collect()
    };

    let mut result = SosResult::new(backend.model_id(), provenance);
    for (item, outcome) in items.iter().zip(outcomes) {
        match outcome {
            Ok(score) => {
                result.record(&item.category, item.group.as_deref(), &score);
                result.pairs.push(score);
            }
            Err(ScoringError::Degenerate(reason)) => {
                log::warn!("pair {} excluded: {reason}", item.index);
                result.excluded.push(ExcludedPair {
                    index: item.index,
                    reason,
                });
            }
            Err(e) => return Err(e),
        }
    }
    if result.overall.n() == 0 {
        return Err(ScoringError::Empty(format!(
            "all {} selected pairs were degenerate",
            items.len()
        )));
    }
    Ok(result)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ScoreFilter {
    pub attribute: Option<SensitiveAttribute>,
    pub group: Option<Group>,
}

impl ScoreFilter {
    pub fn accepts(&self, pair: &SentencePair) -> bool {
        self.attribute.is_none_or(|a| a == pair.identity.attribute)
            && self.group.is_none_or(|g| g == pair.identity.group)
    }
}

/// SOS score of a generated dataset, with per-attribute and
/// per-(attribute, group) breakdowns.
pub fn sos_score(
    dataset: &PairDataset,
    backend: &dyn MaskedLm,
    filter: ScoreFilter,
) -> Result<SosResult, ScoringError> {
    let items: Vec<Item<'_>> = dataset
        .pairs
        .iter()
        .enumerate()
        .filter(|(_, p)| filter.accepts(p))
        .map(|(index, p)| Item {
            index,
            s: &p.profane_sentence,
            s_prime: &p.nonprofane_sentence,
            category: p.identity.attribute.to_string(),
            group: Some(p.identity.group.to_string()),
            slot_words: Some((&p.word_pair.profane, &p.word_pair.non_profane)),
        })
        .collect();
    if items.is_empty() {
        return Err(ScoringError::Empty("dataset is empty after filtering".into()));
    }
    let mut provenance = BTreeMap::new();
    provenance.insert("source".into(), "pair_dataset".into());
    provenance.insert("lexicon_version".into(), dataset.lexicon_version.clone());
    provenance.insert(
        "templates".into(),
        dataset
            .templates
            .iter()
            .map(|t| t.id.as_str())
            .collect::<Vec<_>>()
            .join(","),
    );
    provenance.insert("dataset_pairs".into(), dataset.len().to_string());
    provenance.insert(
        "filter_attribute".into(),
        filter.attribute.map_or("all".into(), |a| a.to_string()),
    );
    provenance.insert(
        "filter_group".into(),
        filter.group.map_or("all".into(), |g| g.to_string()),
    );
    provenance.insert("masking".into(), MASKING_CONVENTION.into());
    score_items(&items, backend, provenance)
}
