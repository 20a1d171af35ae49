use thiserror::Error;

use crate::symcore::{Chart, Space};

/// Every failure the library can report.
///
/// Variants are grouped by the module that raises them; the CLI maps parse
/// failures to exit code 3 and everything else to exit code 1.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("ChartMismatch: {0} vs {1}")]
    ChartMismatch(Chart, Chart),
    #[error("SpaceMismatch: expected {expected}, found {found}")]
    SpaceMismatch { expected: String, found: Space },

    #[error("SyntaxError at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("UnknownVariable: `{name}` at byte {offset}")]
    UnknownVariable { name: String, offset: usize },
    #[error("IndexOutOfRange: `{name}` at byte {offset} (chart {chart})")]
    IndexOutOfRange {
        name: String,
        offset: usize,
        chart: Chart,
    },
    #[error("InvalidChart: base_dim and fiber_rank must be >= 1 (got {0}, {1})")]
    InvalidChart(usize, usize),

    #[error("ZeroOperator: {0}")]
    ZeroOperator(&'static str),
    #[error("ArityMismatch: expected {expected} arguments, got {found}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("NotHomogeneous: {0}")]
    NotHomogeneous(String),
    #[error("NotFWL: {0}")]
    NotFwl(String),
    #[error("NotCore: {0}")]
    NotCore(String),
    #[error("NotLinearizable: {0}")]
    NotLinearizable(String),
    #[error("OrderExceeded: operator has order {order} > {limit}")]
    OrderExceeded { order: usize, limit: usize },
    #[error("IncompatiblePair: {0}")]
    IncompatiblePair(String),

    #[error("NonConstantDeterminant: det(g) = {0}")]
    NonConstantDeterminant(String),
    #[error("AsymmetricGamma: Gamma^{k}_{{{i}{j}}} != Gamma^{k}_{{{j}{i}}}")]
    AsymmetricGamma { k: usize, i: usize, j: usize },
    #[error("RankMismatch: {0}")]
    RankMismatch(String),

    #[error("DocumentError: {0}")]
    Document(String),
    #[error("UnknownSuite: {0}")]
    UnknownSuite(String),
}

impl Error {
    /// True for failures caused by malformed input text rather than by the math.
    pub fn is_parse_error(&self) -> bool {
        matches!(
            self,
            Error::Syntax { .. }
                | Error::UnknownVariable { .. }
                | Error::IndexOutOfRange { .. }
                | Error::Document(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
