use alloc::string::String;
use alloc::vec::Vec;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid interval [{lo}, {hi}]: bounds must be finite with lo < hi")]
    InvalidInterval { lo: f64, hi: f64 },

    #[error("{what} = {value} lies outside [{lo}, {hi}]")]
    OutOfDomain {
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("{what} has length {got}, expected {expected}")]
    DimensionMismatch {
        what: &'static str,
        got: usize,
        expected: usize,
    },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("invalid configuration `{field}`: {reason}")]
    Config { field: String, reason: String },

    #[error("operation needs {needed} cells, sample provenance is {found}")]
    UnsupportedProvenance { needed: &'static str, found: &'static str },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("sample is empty")]
    EmptySample,

    #[error("non-finite value encountered in {context} at {point:?}")]
    NonFinite { context: &'static str, point: Vec<f64> },

    #[error(
        "brute-force budget exceeded: {evaluations} utility evaluations per sweep \
         (limit {limit}) for type grid {type_points:?} and action grid {action_levels:?}"
    )]
    BudgetExceeded {
        evaluations: u128,
        limit: u128,
        type_points: Vec<usize>,
        action_levels: Vec<usize>,
    },
}
