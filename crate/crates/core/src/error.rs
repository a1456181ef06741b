use thiserror::Error;

/// Errors raised by state, measurement and representation operations.
///
/// Variants that reject a numerical object carry the measured deviation so
/// callers can report how far outside tolerance the input was.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("Hilbert space dimension must be at least 2, got {0}")]
    InvalidDimension(usize),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("trace is not one (deviation {deviation:.3e})")]
    NotUnitTrace { deviation: f64 },

    #[error("matrix is not positive semidefinite (most negative eigenvalue -{deviation:.3e})")]
    NotPositive { deviation: f64 },

    #[error("matrix is not unitary (max |UU^dag - I| = {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("effects do not sum to the identity (max deviation {deviation:.3e})")]
    IncompletePovm { deviation: f64 },

    #[error("POVM must contain at least one effect")]
    EmptyPovm,

    #[error("effect {index} is invalid: {reason}")]
    InvalidEffect { index: usize, reason: String },

    #[error("outcome has vanishing probability {probability:.3e}")]
    ZeroProbabilityOutcome { probability: f64 },

    #[error("expected {expected} operators, found {found}")]
    WrongCount { expected: usize, found: usize },

    #[error("no built-in fiducial for dimension {0}")]
    NoBuiltinForDimension(usize),

    #[error("vector is not unit norm (|norm^2 - 1| = {deviation:.3e})")]
    NotNormalized { deviation: f64 },

    #[error("projector set is not a certified SIC (residual {residual:.3e})")]
    UncertifiedSic { residual: f64 },

    #[error(
        "probability vector is not a quantum state (most negative eigenvalue {min_eigenvalue:.3e})"
    )]
    NotAQuantumState { min_eigenvalue: f64 },

    #[error("invalid probability vector: {0}")]
    InvalidProbabilities(String),

    #[error(
        "effects are not informationally complete (scaled Gram determinant {determinant:.3e})"
    )]
    NotInformationallyComplete { determinant: f64 },

    #[error("invalid search configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),

    #[error("schema error: {0}")]
    Schema(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
