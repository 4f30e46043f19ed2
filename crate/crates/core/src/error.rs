use thiserror::Error;

/// Errors produced by state construction, gate application, measurement,
/// protocol execution, and the optical/statistics layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("amplitude vector length {got} does not match register dimension {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("state vector has zero norm")]
    ZeroNorm,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("subsystem index {index} out of range for {count} subsystems")]
    IndexOutOfRange { index: usize, count: usize },

    #[error("duplicate target subsystem {0}")]
    DuplicateTarget(usize),

    #[error("matrix is not unitary (max deviation {0:.3e})")]
    NotUnitary(f64),

    #[error("basis is not orthonormal (max deviation {0:.3e})")]
    NotOrthonormal(f64),

    #[error("invalid subspace partition: {0}")]
    InvalidPartition(String),

    #[error("matrix is not Hermitian (max asymmetry {0:.3e})")]
    NotHermitian(f64),

    #[error("matrix trace {0} differs from 1")]
    InvalidTrace(f64),

    #[error("matrix is not positive semidefinite (min eigenvalue {0:.3e})")]
    NotPositive(f64),

    #[error("state is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("invalid protocol input: {0}")]
    InvalidProtocolInput(String),

    #[error("invalid post-selection: {0}")]
    InvalidPostSelection(String),

    #[error("photonic register error: {0}")]
    Register(String),

    #[error("measurement plan cannot decompose the target: {0}")]
    InsufficientSettings(String),

    #[error("tomography settings are rank-deficient (rank {rank}, need {needed})")]
    RankDeficient { rank: usize, needed: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
