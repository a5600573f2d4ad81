use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid instance: {}", .0.join("; "))]
    InvalidInstance(Vec<String>),

    #[error("numerical breakdown: {0}")]
    NumericalBreakdown(String),

    #[error("empty cluster")]
    EmptyCluster,

    #[error("scenario index {index} out of range (|S| = {count})")]
    ScenarioOutOfRange { index: usize, count: usize },

    #[error("missing dual vector for scenario {0}")]
    MissingDual(usize),

    #[error("partition universe mismatch: {0} vs {1} scenarios")]
    UniverseMismatch(usize, usize),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("refinement count must be at least 1")]
    ZeroRefinementCount,

    #[error("enumeration needs {needed} assignments, cap is {cap}")]
    EnumerationCap { needed: u128, cap: u128 },

    #[error("master problem is infeasible")]
    MasterInfeasible,

    #[error("master problem is unbounded")]
    MasterUnbounded,

    #[error("inner problem infeasible for cluster {0:?}")]
    InnerInfeasible(Vec<usize>),

    #[error("unknown builtin instance {name:?}; available: {available}")]
    UnknownBuiltin { name: String, available: String },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error(transparent)]
    Parse(#[from] crate::io::ParseError),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
