use alloc::string::String;

/// Errors raised by state construction, channel application and protocol runs.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("amplitude vector has length {got}, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("state is not normalized (squared norm {0})")]
    NotNormalized(f64),

    #[error("zero vector cannot be normalized")]
    ZeroVector,

    #[error("{0} qubits exceeds the dense simulation cap of {max}", max = crate::hilbert::MAX_QUBITS)]
    TooManyQubits(usize),

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("dimension {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("operator is not unitary (deviation {0:e})")]
    NotUnitary(f64),

    #[error("matrix is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),

    #[error("trace is {0}, expected 1")]
    InvalidTrace(f64),

    #[error("matrix is not positive semidefinite (minimum eigenvalue {0:e})")]
    NotPositive(f64),

    #[error("qubit index {index} out of range for {n_qubits} qubits")]
    QubitOutOfRange { index: usize, n_qubits: usize },

    #[error("qubit {0} appears more than once in the target list")]
    DuplicateQubit(usize),

    #[error("qubit subset must be nonempty")]
    EmptySubset,

    #[error("cut must be a proper nonempty subset of the qubits")]
    InvalidCut,

    #[error("qubit {qubit} is not owned by the acting party")]
    ScopeViolation { qubit: usize },

    #[error("measurement family is incomplete (deviation {0:e})")]
    IncompleteMeasurement(f64),

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("resource {0} has no canonical shared state")]
    NoCanonicalState(&'static str),

    #[error("ledger overdraw on {0}")]
    Overdraw(&'static str),

    #[error("environment qubits are not allowed here")]
    EnvironmentPresent,

    #[error("unknown relation id {0}")]
    UnknownRelation(String),
}

pub type Result<T> = core::result::Result<T, Error>;
