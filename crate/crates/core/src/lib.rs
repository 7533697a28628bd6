//! Learning graph ARMA time-vertex process models from joint spectra.
//!
//! The pipeline: estimate the joint power spectral density (JPSD) of a
//! time-vertex process from partially observed realizations, fit ARMA filter
//! coefficients to that estimate through a PSD-constrained convex relaxation,
//! reconstruct the process covariance from the fitted model and impute missing
//! observations by MMSE estimation.

pub mod error;
pub mod estimation;
pub mod fit;
pub mod graph;
pub mod impute;
pub mod io;
pub mod sim;
pub mod spectral;
pub mod theory;

pub use error::{JsArmaError, Result};
pub use graph::{Graph, GraphSpectrum};
pub use sim::MaskedRealizations;
pub use spectral::{ArmaParams, Jpsd, ModelOrders, TimeBasis};
