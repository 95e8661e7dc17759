use thiserror::Error;

/// Errors raised by circuit construction, simulation and synthesis.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum SynthError {
    #[error("qubit index {index} out of range for a {num_qubits}-qubit circuit")]
    QubitOutOfRange { index: usize, num_qubits: usize },

    #[error("CNOT control and target coincide on qubit {0}")]
    CnotSelfLoop(usize),

    #[error("single-qubit matrix is not unitary (residual {residual:.3e})")]
    NonUnitaryGate { residual: f64 },

    #[error("matrix is not unitary (residual {residual:.3e})")]
    NonUnitary { residual: f64 },

    #[error("qubit count mismatch: {left} vs {right}")]
    QubitCountMismatch { left: usize, right: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("circuit has {requested} qubits, exceeding the simulator cap of {cap}")]
    QubitCapExceeded { requested: usize, cap: usize },

    #[error("ancilla qubits not restored to |0> (leaked probability {leaked:.3e})")]
    AncillaNotRestored { leaked: f64 },

    #[error("registers overlap on qubit {0}")]
    OverlappingRegisters(usize),

    #[error("need {needed} ancillas, only {available} available")]
    InsufficientAncillas { needed: usize, available: usize },

    #[error("state is not normalized (norm {norm:.12})")]
    Unnormalized { norm: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("eigendecomposition failed: {0}")]
    Eigendecomposition(String),

    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, SynthError>;
