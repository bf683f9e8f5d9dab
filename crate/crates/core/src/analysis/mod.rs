//! Correlation and significance testing over bias scores, bundled
//! online-hate survey data, correlation matrices and the text report.

mod bundled;
mod matrix;
mod report;
mod series;
mod stats;

use thiserror::Error;

pub use bundled::{BundledStats, CountryStats, SURVEY_GROUPS};
pub use matrix::{correlation_matrix, CorrelationMatrix};
pub use report::{render_report, ReportInputs};
pub use series::{aligned, Series, SeriesSource, SeriesTable, SosSlice};
pub use stats::{pearson, t_two_sided_p, ttest_independent, TTest, TTestVariant, ALPHA};

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("series lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("need at least 2 values, found {0}")]
    TooShort(usize),
    #[error("zero variance: statistic is undefined")]
    ZeroVariance,
    #[error("non-finite value in input")]
    NonFinite,
    #[error("numerical failure: {0}")]
    Numeric(String),
    #[error("cell ({row}, {col}): {source}")]
    Cell {
        row: String,
        col: String,
        #[source]
        source: Box<AnalysisError>,
    },
    #[error("no series in group {0:?}")]
    EmptyGroup(String),
    #[error("{0}")]
    Invariant(String),
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("image output failed: {0}")]
    Image(String),
    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}
