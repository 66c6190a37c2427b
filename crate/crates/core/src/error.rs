use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch for {what}: expected {expected}, got {got}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("qubit index {index} out of range for a {qubits}-qubit register")]
    QubitOutOfRange { index: usize, qubits: usize },

    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),

    #[error("invalid noise specification: {0}")]
    InvalidNoise(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("underdetermined Fourier fit: {required} samples required, {got} given")]
    Underdetermined { required: usize, got: usize },

    #[error("rank-deficient design matrix (rank {rank} of {unknowns}); try the RegularGrid sampling strategy")]
    RankDeficient { rank: usize, unknowns: usize },

    #[error("{n} features exceed the cap of {cap} for exhaustive enumeration; use sampled permutations instead")]
    TooManyFeatures { n: usize, cap: usize },

    #[error("matrix is not symmetric: |C[{i}][{j}] - C[{j}][{i}]| = {diff:e}")]
    AsymmetricMatrix { i: usize, j: usize, diff: f64 },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub(crate) fn check_dim(what: &'static str, expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { what, expected, got })
    }
}
