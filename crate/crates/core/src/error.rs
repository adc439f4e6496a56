use thiserror::Error;

/// Errors raised anywhere in the simulator.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension {dim}: {reason}")]
    InvalidDimension { dim: usize, reason: &'static str },

    #[error("layout mismatch: expected {expected:?}, found {found:?}")]
    LayoutMismatch { expected: Vec<usize>, found: Vec<usize> },

    #[error("subsystem position {position} out of range for a layout with {len} subsystems")]
    PositionOutOfRange { position: usize, len: usize },

    #[error("invalid subsystem selection: {0}")]
    InvalidSelection(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("not a valid density matrix: {0}")]
    NotADensityMatrix(String),

    #[error("steady-state iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("resonant denominator: {0}")]
    Resonance(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("step size {dt} exceeds the limit {limit} set by the fastest frequency")]
    StepTooLarge { dt: f64, limit: f64 },

    #[error("numerical guard failed at t = {time}: {reason}")]
    NumericalGuard { time: f64, reason: String },

    #[error("truncation leakage {population:e} at top Fock level of subsystem {subsystem} exceeds {threshold:e}")]
    Leakage { subsystem: usize, population: f64, threshold: f64 },

    #[error("dimension cap exceeded: {dim} > {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn param(name: &str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name: name.to_string(), reason: reason.into() }
    }
}
