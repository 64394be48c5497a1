use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max |m - m^dagger| = {deviation:e})")]
    NotHermitian { deviation: f64 },
    #[error("Jacobi iteration did not converge within {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
    #[error("matrix is not positive semidefinite (eigenvalue {eigenvalue:e})")]
    NotPsd { eigenvalue: f64 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("wire {wire} out of range for a {num_qubits}-qubit register")]
    BadWire { wire: usize, num_qubits: usize },
    #[error("control and target are the same wire ({0})")]
    SameWire(usize),
    #[error("invalid wire set: {0}")]
    BadWireSet(String),
    #[error("postselection impossible (probability {probability:e})")]
    ZeroProbability { probability: f64 },
    #[error("evolved state has vanishing norm ({norm:e})")]
    VanishingNorm { norm: f64 },
    #[error("evolved density matrix has vanishing trace ({trace:e})")]
    VanishingTrace { trace: f64 },
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("training diverged at iteration {iteration} (cost {cost})")]
    Diverged { iteration: usize, cost: f64 },
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for errors caused by user-supplied configuration or files.
    pub fn is_config(&self) -> bool {
        matches!(self, Error::Config(_) | Error::Json(_) | Error::Io(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
