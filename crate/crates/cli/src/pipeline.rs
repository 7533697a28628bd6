//! End-to-end pipeline: initial JPSD estimate, ARMA fit, model covariance,
//! MMSE imputation. Intermediate artifacts are kept for inspection.

use nalgebra::DMatrix;
use serde::Serialize;

use jsarma::estimation::{self, EstimationDiagnostics};
use jsarma::fit::{self, FitConfig, FitResult};
use jsarma::graph::GraphSpectrum;
use jsarma::impute::{self, ImputationResult};
use jsarma::spectral::{jpsd_of, Jpsd, ModelOrders, TimeBasis};
use jsarma::{JsArmaError, MaskedRealizations, Result};

/// Everything produced by one pipeline run.
pub struct PipelineOutput {
    pub h_tilde: Jpsd,
    pub estimation: EstimationDiagnostics,
    pub fit: FitResult,
    pub h_star: Jpsd,
    pub imputation: ImputationResult,
    /// Mean added back after imputation (0 when mean subtraction is off).
    pub mean: f64,
}

/// Summary record for JSON emission.
#[derive(Debug, Clone, Serialize)]
pub struct PipelineReport {
    pub estimation: EstimationDiagnostics,
    pub fit: jsarma::io::FitReport,
    pub regularization: f64,
    pub mean: f64,
    pub nme: Option<f64>,
}

/// Run the full model-learning + imputation pipeline on partially observed
/// realizations.
pub fn run_pipeline(
    obs: &MaskedRealizations,
    gs: &GraphSpectrum,
    tb: &TimeBasis,
    orders: &ModelOrders,
    fit_cfg: &FitConfig,
    ridge: Option<f64>,
    subtract_mean: bool,
) -> Result<PipelineOutput> {
    // Step 2: nonparametric JPSD estimate from lag sample covariances.
    let lc = estimation::lag_covariances(obs, subtract_mean);
    let mean = lc.mean_subtracted();
    let cov = estimation::assemble_block_toeplitz(&lc)
        .map_err(|e| e.in_stage("estimate"))?;
    let (h_tilde, imag_residual) =
        estimation::initial_jpsd(&cov, gs, tb).map_err(|e| e.in_stage("estimate"))?;
    let est_diag = estimation::diagnostics(&lc, imag_residual);

    // Steps 3-4: convex relaxation fit and rank-1 coefficient recovery.
    let fit_res =
        fit::fit_arma(&h_tilde, gs, tb, orders, fit_cfg).map_err(|e| e.in_stage("fit"))?;

    // Step 5: model JPSD from the recovered coefficients.
    let h_star = jpsd_of(&fit_res.zeta, gs, tb).map_err(|e| e.in_stage("model_jpsd"))?;

    // Step 6: model covariance.
    let cov_star =
        impute::covariance_from_jpsd(&h_star, gs, tb).map_err(|e| e.in_stage("covariance"))?;

    // Step 7: MMSE imputation on (centered) observations, mean added back.
    let centered = if subtract_mean && mean != 0.0 {
        let data = obs
            .data()
            .iter()
            .zip(obs.masks())
            .map(|(x, m)| {
                DMatrix::from_fn(x.nrows(), x.ncols(), |i, j| {
                    if m[(i, j)] {
                        x[(i, j)] - mean
                    } else {
                        f64::NAN
                    }
                })
            })
            .collect();
        MaskedRealizations::new(data, obs.masks().to_vec())?
    } else {
        obs.clone()
    };
    let mut imputation =
        impute::mmse_impute(&cov_star, &centered, ridge).map_err(|e| e.in_stage("impute"))?;
    if subtract_mean && mean != 0.0 {
        imputation.restore_observed(obs, mean)?;
    }

    Ok(PipelineOutput { h_tilde, estimation: est_diag, fit: fit_res, h_star, imputation, mean })
}

/// NME of a pipeline run against fully observed ground truth.
pub fn pipeline_nme(out: &PipelineOutput, truth: &MaskedRealizations) -> Result<f64> {
    if !truth.is_fully_observed() {
        return Err(JsArmaError::InvalidParameter(
            "ground truth must be fully observed".into(),
        ));
    }
    impute::nme(truth.data(), &out.imputation)
}
