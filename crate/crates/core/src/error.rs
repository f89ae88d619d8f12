use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("qubit count {0} outside supported range 1..={max}", max = crate::state::MAX_QUBITS)]
    QubitCount(usize),

    #[error("basis index {index} out of range for {num_qubits} qubits")]
    BasisIndex { index: usize, num_qubits: usize },

    #[error("qubit {qubit} out of range for a {num_qubits}-qubit register")]
    QubitOutOfRange { qubit: usize, num_qubits: usize },

    #[error("two-qubit gate needs distinct qubits, got {0} twice")]
    SameQubit(usize),

    #[error("state amplitudes are not normalized (|alpha|^2 + |beta|^2 = {0})")]
    Unnormalized(f64),

    #[error("jump on qubit {0} has zero weight in the current state")]
    ImpossibleJump(usize),

    #[error("invalid noise model: {0}")]
    NoiseModel(String),

    #[error("invalid experiment configuration: {0}")]
    Config(String),

    #[error("density-matrix oracle limited to {limit} qubits, requested {requested}")]
    OracleLimit { requested: usize, limit: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("RK4 step {step:.3e} unstable after {steps} steps (population {population:.3e}); use more steps")]
    Unstable { population: f64, steps: usize, step: f64 },

    #[error("trace drifted by {drift:.3e} after {steps} RK4 steps of size {step:.3e}; use more steps")]
    TraceDrift { drift: f64, steps: usize, step: f64 },
}
