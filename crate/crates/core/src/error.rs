use thiserror::Error;

/// Process exit code for a clean pass.
pub const EXIT_PASS: i32 = 0;
/// Process exit code when a tolerance check fails.
pub const EXIT_TOLERANCE: i32 = 1;
/// Process exit code for usage or configuration errors.
pub const EXIT_CONFIG: i32 = 2;
/// Process exit code for numeric failures (singularities, blow-ups).
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug, Error)]
pub enum Error {
    #[error("config: {0}")]
    Config(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// The spec declared a Hermitian Hamiltonian but an evaluation disagreed.
    #[error("hermiticity violation at t = {t}: max |H - H^dagger| = {defect:.3e} exceeds 1e-12")]
    Hermiticity { t: f64, defect: f64 },

    #[error("singular matrix in {context}: condition ratio {rcond:.3e} below threshold")]
    Singular { context: String, rcond: f64 },

    #[error("non-finite values during {0} (step size too coarse for the spectral radius?)")]
    NonFinite(String),

    #[error("frequency assignment failed at port {port}: B[{port},{port}] = {value:.6e} is not positive")]
    FrequencyAssignment { port: usize, value: f64 },

    #[error("decoupled form unavailable: {0}; use the coupled evolution instead")]
    DecoupledUnavailable(String),

    #[error("admittance has a pole at s = 0")]
    AdmittancePole,

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Maps each failure class onto the CLI exit-code contract.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_)
            | Error::Dimension(_)
            | Error::GridMismatch(_)
            | Error::Hermiticity { .. }
            | Error::Io(_)
            | Error::Json(_) => EXIT_CONFIG,
            Error::Singular { .. }
            | Error::NonFinite(_)
            | Error::FrequencyAssignment { .. }
            | Error::DecoupledUnavailable(_)
            | Error::AdmittancePole => EXIT_NUMERIC,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
