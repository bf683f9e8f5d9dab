//! Profanity-subspace removal.
//!
//! Word pairs are placed in real sentences, both variants of each sentence
//! are embedded, and PCA over the centered representation differences gives
//! an orthonormal bias basis. Removal subtracts a vector's projection onto
//! that basis; [`DebiasedBackend`] applies it to the final hidden states of a
//! model before its output head.

mod contextualize;
mod subspace;
mod wrap;

use thiserror::Error;

pub use contextualize::{contextualize, load_corpus, parse_corpus, CounterfactualPair, DEFAULT_CAP_PER_WORD};
pub use subspace::{estimate_from_differences, estimate_subspace, remove, BiasSubspace, PROJECTION_SITE};
pub use wrap::{debiased_backend, embed, DebiasedBackend, PooledEncoder, Pooling, ProjectionSite, SentenceEncoder};

use crate::scoring::BackendError;

#[derive(Debug, Error)]
pub enum DebiasError {
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("no corpus sentence contains any of the {0} list words")]
    NoMatches(usize),
    #[error(transparent)]
    Backend(#[from] BackendError),
    #[error("backend {0} does not expose hidden states")]
    NoHiddenStates(String),
    #[error("requested {requested} components but the differences only have rank {achieved}")]
    RankDeficient { requested: usize, achieved: usize },
    #[error("component count {k} must be between 1 and the dimension {dim}")]
    InvalidK { k: usize, dim: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("representation contains non-finite values")]
    NonFinite,
    #[error("no representations given")]
    Empty,
    #[error("subspace file line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}
