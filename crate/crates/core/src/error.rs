use thiserror::Error;

/// Errors surfaced by state construction, the model, the integrator and the
/// engine strokes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not Hermitian (max deviation {max_dev:e})")]
    NotHermitian { max_dev: f64 },

    #[error("not a valid density matrix: {0}")]
    InvalidState(String),

    #[error(
        "integration accuracy failure after {steps} steps: \
         trace drift {trace_drift:e}, min eigenvalue {min_eigenvalue:e}"
    )]
    IntegrationAccuracy {
        trace_drift: f64,
        min_eigenvalue: f64,
        steps: u64,
    },

    #[error("measurement failed: ground-state probability {p_minus:e} too small to post-select")]
    MeasurementFailed { p_minus: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
