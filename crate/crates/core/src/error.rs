use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian (deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not unitary (deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("operator is not invertible (smallest singular value {smallest:.3e})")]
    NotInvertible { smallest: f64 },

    #[error("Kraus operators have inconsistent shapes")]
    RaggedKraus,

    #[error("channel has no Kraus operators")]
    EmptyChannel,

    #[error("operation is not trace preserving (deviation {deviation:.3e})")]
    NotTracePreserving { deviation: f64 },

    #[error("invalid basis: {0}")]
    InvalidBasis(String),

    #[error("state is not maximally entangled: {0}")]
    NotMaximallyEntangled(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("group closure exceeded maximum order {max_order}")]
    GroupOverflow { max_order: usize },

    #[error("generators {0} and {1} do not commute")]
    NonCommuting(usize, usize),

    #[error("stabilizer generators are not independent")]
    DependentGenerators,

    #[error("invalid Pauli string {0:?}")]
    InvalidPauli(String),

    #[error("invalid strategy: {0}")]
    InvalidStrategy(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    pub(crate) fn dims(expected: impl ToString, found: impl ToString) -> Self {
        Error::DimensionMismatch {
            expected: expected.to_string(),
            found: found.to_string(),
        }
    }
}
