//! Hate-speech classifier fairness: text cleaning, the train/validation/test
//! split, and FPR/TPR/AUC gaps between marginalized and non-marginalized
//! identity groups.

mod metrics;
mod preprocess;
mod split;

use thiserror::Error;

pub use metrics::{
    auc, gap_report, load_predictions, parse_predictions, predictions_to_text, rates, rational_to_f64, ConfusionCounts,
    GapReport, GapRow, Pairing, PairingTable, PredictionRecord, Rational, DEFAULT_THRESHOLD, GAP_COLUMNS,
};
pub use preprocess::{contractions_version, preprocess, PreprocessConfig};
pub use split::{split, split_indices, Split, SplitSpec};

#[derive(Debug, Error)]
pub enum FairnessError {
    #[error("invalid split fractions: {0}")]
    InvalidFractions(String),
    #[error("threshold {0} outside [0, 1]")]
    InvalidThreshold(f64),
    #[error("{0}")]
    Empty(String),
    #[error("undefined {0}")]
    Undefined(String),
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}
