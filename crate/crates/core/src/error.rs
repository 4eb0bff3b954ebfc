use std::path::PathBuf;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by ingestion, validation, and the analysis stages.
///
/// Input-shaped problems (`Io`, `Parse`, `Invalid*`, `Duplicate*`,
/// `Unknown*`, `UrgencyMismatch`) indicate bad or inconsistent input files.
/// `InfeasibleBudget` means no requirement subset fits the effort window.
/// `Internal` marks a broken invariant inside the library itself.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{file}:{line}: {msg}")]
    Parse {
        file: String,
        line: u64,
        msg: String,
    },

    #[error("{file}: expected header {expected}, found {found}")]
    Header {
        file: String,
        expected: String,
        found: String,
    },

    #[error("{file}:{line}: duplicate id {id:?}")]
    DuplicateId {
        file: String,
        line: u64,
        id: String,
    },

    #[error("{file}:{line}: unknown {kind} id {id:?}")]
    UnknownId {
        file: String,
        line: u64,
        kind: &'static str,
        id: String,
    },

    #[error(
        "stakeholder {id:?}: urgency column says {declared} but votes sum to {computed}"
    )]
    UrgencyMismatch {
        id: String,
        declared: f64,
        computed: f64,
    },

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("{op}: need at least {needed} rows, got {got}")]
    TooFewRows {
        op: &'static str,
        needed: usize,
        got: usize,
    },

    #[error("k = {k} is out of range for {n} rows")]
    InvalidK { k: usize, n: usize },

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("no requirement subset fits the effort window [{b1}, {b2}]")]
    InfeasibleBudget { b1: f64, b2: f64 },

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl Error {
    /// Process exit code the CLI maps this error to.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InfeasibleBudget { .. } => 2,
            Error::Internal(_) => 3,
            _ => 1,
        }
    }
}
