use thiserror::Error;

/// Errors produced by the simulation library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("matrix is not Hermitian (max asymmetry {asymmetry:.3e})")]
    NotHermitian { asymmetry: f64 },

    #[error("matrix is not unitary (max deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("matrix is not orthogonal (max deviation {deviation:.3e})")]
    NotOrthogonal { deviation: f64 },

    #[error("invalid Pauli word {0:?}")]
    InvalidPauliWord(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("drive off resonance: {0}")]
    OffResonance(String),

    #[error("ambiguous RWA classification of bond ({bond}, {next}): |dw|/J = {ratio:.3}", next = bond + 1)]
    AmbiguousBond { bond: usize, ratio: f64 },

    #[error("matrix has an eigenvalue at -1 (distance {distance:.3e}); principal logarithm is ambiguous")]
    LogBranchAmbiguity { distance: f64 },

    #[error("logarithm is not real (max imaginary part {imag:.3e})")]
    ComplexLogarithm { imag: f64 },

    #[error("step budget exceeded: {required} steps required (dt bound {dt:.3e} s over {duration:.3e} s), cap is {cap}")]
    StepBudget {
        required: f64,
        cap: u64,
        dt: f64,
        duration: f64,
    },

    #[error("no feasible solution: {0}")]
    Infeasible(String),

    #[error("objective is flat on the bracket (max - min = {spread:.3e})")]
    FlatObjective { spread: f64 },

    #[error("exchange is zero: the idle operation is free for any duration")]
    ZeroExchange,

    #[error("unknown gate label {0:?}")]
    UnknownGate(String),

    #[error("unknown parameter {0:?}")]
    UnknownParameter(String),

    #[error("eigendecomposition failed to converge")]
    NoConvergence,
}

pub type Result<T> = std::result::Result<T, Error>;
