use thiserror::Error;

/// Errors raised by the polynomial, tensor, engine and classification layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("operation requires exact (rational) coefficients")]
    ModeError,
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("conflicting assignment in symmetry orbit {orbit:?}: {first} vs {second}")]
    ConflictingAssignment {
        orbit: [usize; 4],
        first: String,
        second: String,
    },
    #[error("unknown corpus name `{0}`")]
    UnknownName(String),
    #[error("matrix is not positive semidefinite (smallest eigenvalue {0:e})")]
    NotPsd(f64),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("unsupported dimension d = {0}")]
    UnsupportedDimension(usize),
    #[error("input is not nonnegative (minimum {0:e})")]
    NotNonnegative(f64),
    #[error("no certificate found: {0}")]
    CertificateNotFound(String),
    #[error("quadratic form is not indefinite")]
    NotIndefinite,
    #[error("point is not a zero of the form (value {0:e})")]
    NotAZero(f64),
    #[error("pivot cofactor vanishes identically")]
    DegenerateCofactor,
    #[error("determinant does not vanish identically")]
    NonzeroDeterminant,
    #[error("semidefinite solver stalled")]
    SolverStalled,
    #[error("form is not quasiconvex: f(x⊗y) = {value} at x = {x:?}, y = {y:?}")]
    NotInCone { x: Vec<f64>, y: Vec<f64>, value: String },
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
