//! Library surface of the harness: configuration, graph construction from
//! dataset inputs, the end-to-end pipeline, hyperparameter tuning and the
//! experiment sweeps driven by the `jsarma` binary.

pub mod config;
pub mod graphio;
pub mod pipeline;
pub mod sweeps;
pub mod tune;

/// Exit code for configuration / input errors.
pub const EXIT_CONFIG: i32 = 2;
/// Exit code for numerical failures.
pub const EXIT_NUMERICAL: i32 = 3;

/// Classify an error into the harness exit code.
pub fn exit_code_for(err: &jsarma::JsArmaError) -> i32 {
    use jsarma::JsArmaError::*;
    match err {
        InvalidGraph(_) | DimensionMismatch(_) | InvalidParameter(_) | Ingestion { .. }
        | Config(_) | Io(_) | Csv(_) | Json(_) => EXIT_CONFIG,
        NotSymmetric { .. } | Pole { .. } | Unstable(_) | Diverged { .. }
        | DegenerateModel(_) | NegativeJpsd { .. } | SingularCovariance { .. }
        | UndefinedMetric(_) | NonConvergence { .. } => EXIT_NUMERICAL,
        Stage { source, .. } => exit_code_for(source),
    }
}
