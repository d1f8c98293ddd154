use thiserror::Error;

/// Errors surfaced by state construction, operator algebra, and inference routines.
///
/// `Incompatible`, `Obstructed`, and `NoMatchingBranch` are *negative verdicts*:
/// the inputs were well-formed but the requested object does not exist. Everything
/// else indicates malformed input or a numerical precondition violation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("duplicate region id `{0}`")]
    DuplicateRegion(String),
    #[error("unknown region id `{0}`")]
    UnknownRegion(String),
    #[error("region `{id}` declared with dim {expected} but used with dim {found}")]
    RegionDimMismatch {
        id: String,
        expected: usize,
        found: usize,
    },
    #[error("region `{0}` declared with conflicting kinds")]
    RegionKindMismatch(String),
    #[error("matrix is {rows}x{cols} but factor dims require {expected}x{expected}")]
    MatrixShape {
        rows: usize,
        cols: usize,
        expected: usize,
    },
    #[error("operator is not Hermitian (deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },
    #[error("{what} is not positive semidefinite (min eigenvalue {min_eig:.3e})")]
    NotPositive { what: String, min_eig: f64 },
    #[error("{what} has trace {trace:.17} but must have trace one")]
    TraceNotOne { what: String, trace: f64 },
    #[error("{what} must be nonzero")]
    ZeroOperator { what: String },
    #[error("conditional must reduce to a projector on the conditioning factors (deviation {deviation:.3e})")]
    NotNormalizedConditional { deviation: f64 },
    #[error("operator is not block diagonal over classical factor values (off-block mass {mass:.3e})")]
    NotBlockDiagonal { mass: f64 },
    #[error("probabilities must be nonnegative and sum to one (got sum {sum:.17})")]
    NotADistribution { sum: f64 },
    #[error("map is not trace preserving (deviation {deviation:.3e})")]
    NotTracePreserving { deviation: f64 },
    #[error("map is not completely positive (min Choi eigenvalue {min_eig:.3e})")]
    NotCompletelyPositive { min_eig: f64 },
    #[error("outcome index {index} out of range for alphabet of size {size}")]
    OutcomeOutOfRange { index: usize, size: usize },
    #[error("conditioning event has probability {prob:.3e}, too small to condition on")]
    ZeroProbabilityEvent { prob: f64 },
    #[error("states are incompatible: support intersection is empty")]
    Incompatible,
    #[error("no branch of the model matches the announced state within tolerance")]
    NoMatchingBranch,
    #[error("multiplicative pooling undefined: {0}")]
    PoolingUndefined(String),
    #[error("weights must be strictly positive and sum to one")]
    BadWeights,
    #[error("{context}: expected {expected}, found {found}")]
    Mismatch {
        context: String,
        expected: String,
        found: String,
    },
    #[error("{0}")]
    Invalid(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse error: {0}")]
    Parse(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
