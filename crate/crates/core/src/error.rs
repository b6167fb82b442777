use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("vector is not normalised (norm {norm})")]
    NotNormalized { norm: f64 },

    #[error("index {index} out of range (length {len})")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("eigensolver did not converge within its iteration budget")]
    ConvergenceFailure,

    #[error("total dimension exceeds the supported maximum of {max}")]
    SizeOverflow { max: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid ensemble: {0}")]
    InvalidEnsemble(String),

    #[error("invalid measurement: {0}")]
    InvalidMeasurement(String),

    #[error("invalid product-operator certificate: {0}")]
    InvalidCertificate(String),

    #[error("measurement carries no separable certificates")]
    CertificateMissing,

    #[error("precondition violated: {0}")]
    PreconditionViolation(String),

    #[error("trace mismatch: Tr H = {trace}, candidate = {candidate}")]
    TraceMismatch { trace: f64, candidate: f64 },
}
