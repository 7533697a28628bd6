//! Monte-Carlo oracles: the model covariance against the empirical
//! covariance of exact spectral-synthesis realizations, and the convergence
//! of the nonparametric JPSD estimator.

mod common;

use nalgebra::DMatrix;

use jsarma::estimation::{assemble_block_toeplitz, initial_jpsd, lag_covariances};
use jsarma::impute::covariance_from_jpsd;
use jsarma::sim::simulate_spectral;
use jsarma::spectral::jpsd_of;
use jsarma::theory::{rate_study, RateErrorKind, RateStudyConfig};
use jsarma::MaskedRealizations;

use common::{basis, ring_spectrum, vi_a1_params};

#[test]
fn model_covariance_matches_monte_carlo() {
    // 10^4 spectral-synthesis realizations at N = 8, T = 16: the lag-averaged
    // sample covariance must match the reconstructed model covariance within
    // 5% relative Frobenius error (lag averaging over T time pairs brings the
    // Monte-Carlo noise of the raw second-moment matrix well under that).
    let gs = ring_spectrum(8);
    let tb = basis(16);
    let zeta0 = vi_a1_params();
    let h = jpsd_of(&zeta0, &gs, &tb).unwrap();
    let sigma_model = covariance_from_jpsd(&h, &gs, &tb).unwrap();

    let l = 10_000usize;
    let data: Vec<_> =
        (0..l).map(|i| simulate_spectral(&zeta0, &gs, &tb, 1000 + i as u64).unwrap()).collect();
    let obs = MaskedRealizations::fully_observed(data).unwrap();
    let sigma_hat = assemble_block_toeplitz(&lag_covariances(&obs, false)).unwrap();

    let rel = (sigma_hat.matrix() - sigma_model.matrix()).norm() / sigma_model.matrix().norm();
    assert!(rel <= 0.05, "relative Frobenius error {rel}");
}

#[test]
fn initial_jpsd_converges_to_model_jpsd() {
    // h~ from L = 1024 fully observed realizations is within 20% of h.
    let gs = ring_spectrum(8);
    let tb = basis(16);
    let zeta0 = vi_a1_params();
    let h0 = jpsd_of(&zeta0, &gs, &tb).unwrap();

    let data: Vec<_> = (0..1024)
        .map(|i| simulate_spectral(&zeta0, &gs, &tb, 5000 + i as u64).unwrap())
        .collect();
    let obs = MaskedRealizations::fully_observed(data).unwrap();
    let lc = lag_covariances(&obs, false);
    let cov = assemble_block_toeplitz(&lc).unwrap();
    let (h_tilde, imag_rel) = initial_jpsd(&cov, &gs, &tb).unwrap();

    let rel = (h_tilde.values() - h0.values()).norm() / h0.values().norm();
    assert!(rel <= 0.2, "relative JPSD error {rel}");
    // sample estimates need not be exactly circulant, but the imaginary
    // residual should be modest
    assert!(imag_rel < 0.5, "imaginary residual {imag_rel}");
}

#[test]
fn estimator_consistency_rate() {
    // || h~ - h || versus L in {64, 256, 1024} decays with log-log slope
    // around -1/2 (accepted band [-0.7, -0.3]).
    let gs = ring_spectrum(8);
    let tb = basis(16);
    let cfg = RateStudyConfig {
        zeta0: vi_a1_params(),
        fit: jsarma::fit::FitConfig::default(),
        seed: 97,
        missing_ratio: 0.0,
    };
    let study = rate_study(
        RateErrorKind::InitialJpsd,
        &cfg,
        &gs,
        &tb,
        &[64, 256, 1024],
        6,
        0.1,
    )
    .unwrap();
    let slope = study.slope.unwrap();
    assert!(
        (-0.7..=-0.3).contains(&slope),
        "slope {slope} outside [-0.7, -0.3]; means {:?}",
        study.mean_err
    );
    // monotone decrease of the mean error
    assert!(study.mean_err.windows(2).all(|w| w[1] < w[0]), "means {:?}", study.mean_err);
}

#[test]
fn masked_estimation_agrees_with_dense_on_full_observation() {
    // With missing_ratio = 0 the pairwise-complete estimator must equal the
    // dense path exactly; compare against an entrywise naive reference.
    let gs = ring_spectrum(5);
    let tb = basis(6);
    let zeta0 = vi_a1_params();
    let data: Vec<_> =
        (0..4).map(|i| simulate_spectral(&zeta0, &gs, &tb, 31 + i as u64).unwrap()).collect();

    let full = MaskedRealizations::fully_observed(data.clone()).unwrap();
    // identical data with an explicit all-true mask goes down the masked path
    let masks = vec![DMatrix::from_element(5, 6, true); 4];
    let masked = MaskedRealizations::new(data, masks).unwrap();

    let lc_full = lag_covariances(&full, false);
    let lc_masked = lag_covariances(&masked, false);
    for delta in 0..6 {
        let d = (lc_full.sigma(delta) - lc_masked.sigma(delta)).abs().max();
        assert!(d <= 1e-12, "lag {delta} differs by {d}");
    }
}
