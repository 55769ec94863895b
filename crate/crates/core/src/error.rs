use thiserror::Error;

/// Errors raised by graph handling, synthesis and simulation.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum SynthError {
    #[error("coupling graph is disconnected; exact synthesis requires a connected graph")]
    DisconnectedGraph,
    #[error("index {index} out of range (bound {bound})")]
    IndexOutOfRange { index: usize, bound: usize },
    #[error("matrix is not unitary (max |UU^dagger - I| = {deviation:.3e})")]
    NotUnitary { deviation: f64 },
    #[error("matrix is not special unitary (det = {re:.6}{im:+.6}i)")]
    NotSpecialUnitary { re: f64, im: f64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("phase system is singular (rank {rank}, expected {expected})")]
    SingularSystem { rank: usize, expected: usize },
    #[error("invalid pulse: {0}")]
    InvalidPulse(String),
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
}

pub type Result<T> = std::result::Result<T, SynthError>;
