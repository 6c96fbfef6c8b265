use thiserror::Error;

/// Failure modes of the recovery pipeline.
///
/// Algorithmic failures (`VerificationFailed`, `GraphStepDeficient`, ...) are
/// expected on a small fraction of random instances and are reported as
/// errors.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("measurement has empty support")]
    EmptyMeasurement,
    #[error("need at least two distances, got {0}")]
    TooFewDistances(usize),
    #[error("graph step found {found} neighbours of the largest distance, needed {needed}")]
    GraphStepDeficient { found: usize, needed: usize },
    #[error("verification failed: {0}")]
    VerificationFailed(String),
    #[error("oracle search too large: estimated sparsity {k_est} exceeds cap {cap}")]
    OracleTooLarge { k_est: usize, cap: usize },
    #[error("no anchor pair satisfies the pair-count condition")]
    NoAnchorPair,
    #[error("support incomplete at {stage}: found {found}, needed {needed}")]
    SupportIncomplete {
        stage: &'static str,
        found: usize,
        needed: usize,
    },
    #[error("diagonal completion infeasible: {0}")]
    CompletionInfeasible(String),
    #[error("solver did not converge after {iterations} iterations (residual {residual:.3e})")]
    NonConvergence { iterations: usize, residual: f64 },
    #[error("measurement infeasible for the given support: lag {lag} exceeds the noise budget by {excess:.3e}")]
    Infeasible { lag: usize, excess: f64 },
    #[error("leading eigenvalue {0:.3e} is not positive")]
    DegenerateMatrix(f64),
    #[error("recovered signal does not reproduce the measurement (relative residual {0:.3e})")]
    RecoveryFailed(f64),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
