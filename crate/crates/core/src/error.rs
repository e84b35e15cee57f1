use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument outside the domain of the relation being evaluated.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("unit mismatch: {0}")]
    UnitMismatch(String),

    #[error("step size {step:e} exceeds the stability bound {bound:e}")]
    StepTooLarge { step: f64, bound: f64 },

    #[error("trace drifted to {trace:.12} at t = {time:e} (tolerance {tolerance:e})")]
    TraceDrift { time: f64, trace: f64, tolerance: f64 },

    /// Effective-Hamiltonian evolution cannot represent dephasing.
    #[error("pure dephasing is not representable by a non-Hermitian effective Hamiltonian on the single-excitation subspace; use the master equation instead")]
    DephasingUnsupported,

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// The normal matrix of a fit is singular along the named combination.
    #[error("singular normal matrix; degenerate parameter combination: {0}")]
    Singular(String),

    #[error("no detectable peak: {0}")]
    NoPeak(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: u64,
        message: String,
    },

    #[error("invalid input: {0}")]
    Input(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
