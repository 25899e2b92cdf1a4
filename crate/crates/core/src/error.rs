use thiserror::Error;

/// Errors raised by the simulator.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("{qubits} qubits exceeds the configured limit of {limit}")]
    DimensionGuard { qubits: usize, limit: usize },

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("matrix is not unitary (max deviation {0:e})")]
    NotUnitary(f64),

    #[error("operator is not an orthogonal projector (max deviation {0:e})")]
    NotProjector(f64),

    #[error("non-finite matrix entry at ({0}, {1})")]
    NonFinite(usize, usize),

    #[error("invalid Bloch axis ({x}, {y}, {z}): norm {norm}")]
    InvalidAxis { x: f64, y: f64, z: f64, norm: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("qubit index {index} out of range for {n_qubits} qubits")]
    QubitIndex { index: usize, n_qubits: usize },

    #[error("partial trace needs at least one kept qubit")]
    EmptyKeep,

    #[error("measurement branch has probability {0:e}")]
    DegenerateBranch(f64),

    #[error("imaginary residual {0:e} above tolerance")]
    NumericalConsistency(f64),

    #[error("eigendecomposition failed: {0}")]
    Eigen(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
