use thiserror::Error;

/// Errors produced by the estimation library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum DoaError {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("invalid direction: {0}")]
    InvalidDirection(String),

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("array too small: k0*r = {wavenumber_radius:.4} gives mode order below 1")]
    ArrayTooSmall { wavenumber_radius: f64 },

    #[error("mode order {mode} aliases for {n_sensors} sensors (|m| must not exceed N/2)")]
    AliasedMode { mode: i64, n_sensors: usize },

    #[error("{n_sensors} sensors cannot support mode order {mode_order}: at least {required} sensors are required")]
    TooFewSensors {
        n_sensors: usize,
        mode_order: usize,
        required: usize,
    },

    #[error("source count {k} out of range 1..={max}")]
    SourceCountOutOfRange { k: usize, max: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("empty grid: {0}")]
    EmptyGrid(String),

    #[error(
        "infeasible program: residual cannot go below {min_residual:.6e} but beta = {beta:.6e}"
    )]
    Infeasible { min_residual: f64, beta: f64 },

    #[error("no peaks: spectrum is identically zero")]
    NoPeaks,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("no successful runs to aggregate")]
    NoSuccessfulRuns,

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, DoaError>;

impl From<std::io::Error> for DoaError {
    fn from(e: std::io::Error) -> Self {
        DoaError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for DoaError {
    fn from(e: serde_json::Error) -> Self {
        DoaError::Config(e.to_string())
    }
}

impl From<csv::Error> for DoaError {
    fn from(e: csv::Error) -> Self {
        DoaError::Io(e.to_string())
    }
}
