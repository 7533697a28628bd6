//! Error type shared across the library.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum JsArmaError {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("matrix is not symmetric (max asymmetry {max_asym:.3e} exceeds {tol:.3e})")]
    NotSymmetric { max_asym: f64, tol: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("pole of the ARMA frequency response at (lambda={lambda}, omega={omega}): |1 + a^H v| = {magnitude:.3e}")]
    Pole {
        lambda: f64,
        omega: f64,
        magnitude: f64,
    },

    #[error("unstable ARMA parameters: {0}")]
    Unstable(String),

    #[error("simulation diverged: signal norm {norm:.3e} exceeded the divergence threshold")]
    Diverged { norm: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degenerate model: {0}")]
    DegenerateModel(String),

    #[error("negative JPSD entry {value:.3e} at index {index}; clamp before reconstructing a covariance")]
    NegativeJpsd { index: usize, value: f64 },

    #[error("observed-block covariance is numerically singular (condition estimate {condition:.3e}); suggested ridge: {suggested_ridge:.3e}")]
    SingularCovariance {
        condition: f64,
        suggested_ridge: f64,
    },

    #[error("undefined metric: {0}")]
    UndefinedMetric(String),

    #[error("solver did not converge after {iterations} iterations (residual {residual:.3e} > tolerance {tolerance:.3e})")]
    NonConvergence {
        iterations: usize,
        residual: f64,
        tolerance: f64,
    },

    #[error("ingestion error at row {row}: {message}")]
    Ingestion { row: usize, message: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("pipeline stage `{stage}` failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<JsArmaError>,
    },
}

impl JsArmaError {
    /// Wrap an error with the name of the pipeline stage it occurred in.
    pub fn in_stage(self, stage: &'static str) -> Self {
        JsArmaError::Stage {
            stage,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, JsArmaError>;
