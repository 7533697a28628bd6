//! Numerical probes of the identifiability and convergence-rate theory:
//! closed-form JPSD gradients, tangent-norm and curvature estimates for the
//! model manifold, and empirical error-rate studies over the realization
//! count L.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{JsArmaError, Result};
use crate::estimation;
use crate::fit::{self, FitConfig, FitStatus};
use crate::graph::GraphSpectrum;
use crate::impute;
use crate::sim::{self, MaskedRealizations};
use crate::spectral::{
    jpsd_of, uv_vectors, ArmaParams, TimeBasis, UvForm, POLE_TOL,
};

/// Gradient and manifold-geometry summary at sampled parameter points.
#[derive(Debug, Clone)]
pub struct ManifoldProbe {
    pub zeta: ArmaParams,
    /// d x NT matrix of JPSD gradients, one column per (lambda_n, omega_tau)
    /// grid point (node-fastest).
    pub r: DMatrix<f64>,
    pub tangent_lower_estimate: f64,
    pub curvature_upper_estimate: f64,
}

/// Gradient of the JPSD h_zeta(lambda, omega) with respect to the
/// original-form parameter vector [a; b]:
///
/// ```text
///   a-block: -2 |b' u|^2 (Re v + Re{v v^H} a) / |1 + a' v|^4
///   b-block:  2 |1 + a' v|^2 Re{u u^H} b / |1 + a' v|^4
/// ```
pub fn jpsd_gradient(zeta: &ArmaParams, lambda: f64, omega: f64) -> Result<DVector<f64>> {
    let orders = &zeta.orders;
    let (u, v) = uv_vectors(lambda, omega, orders, UvForm::Original);
    let na = orders.a_len();
    let nb = orders.b_len();

    let mut denom_c = num_complex::Complex64::new(1.0, 0.0);
    for i in 0..na {
        denom_c += v[i] * zeta.a[i];
    }
    let denom2 = denom_c.norm_sqr();
    if denom2.sqrt() <= POLE_TOL {
        return Err(JsArmaError::Pole { lambda, omega, magnitude: denom2.sqrt() });
    }
    let mut num_c = num_complex::Complex64::new(0.0, 0.0);
    for i in 0..nb {
        num_c += u[i] * zeta.b[i];
    }
    let num2 = num_c.norm_sqr();

    let mut grad = DVector::zeros(orders.d());
    for i in 0..na {
        let mut s = v[i].re;
        for j in 0..na {
            s += (v[i] * v[j].conj()).re * zeta.a[j];
        }
        grad[i] = -2.0 * num2 * s / (denom2 * denom2);
    }
    for i in 0..nb {
        let mut s = 0.0;
        for j in 0..nb {
            s += (u[i] * u[j].conj()).re * zeta.b[j];
        }
        grad[na + i] = 2.0 * s / denom2;
    }
    Ok(grad)
}

/// Stack jpsd gradients over the full (lambda, omega) grid into the d x NT
/// matrix R (columns in node-fastest order).
pub fn gradient_matrix(
    zeta: &ArmaParams,
    gs: &GraphSpectrum,
    tb: &TimeBasis,
) -> Result<DMatrix<f64>> {
    let n = gs.n_nodes();
    let t = tb.length();
    let d = zeta.orders.d();
    let mut r = DMatrix::zeros(d, n * t);
    for tau in 0..t {
        let omega = tb.frequencies()[tau];
        for ni in 0..n {
            let g = jpsd_gradient(zeta, gs.eigenvalues()[ni], omega)?;
            r.column_mut(tau * n + ni).copy_from(&g);
        }
    }
    Ok(r)
}

/// Lower estimate of the manifold tangent-vector norm: the minimum over the
/// sampled parameter points of the smallest singular value of R^T.
pub fn tangent_lower_bound(
    zetas: &[ArmaParams],
    gs: &GraphSpectrum,
    tb: &TimeBasis,
) -> Result<f64> {
    if zetas.is_empty() {
        return Err(JsArmaError::InvalidParameter("no parameter samples given".into()));
    }
    let nt = gs.n_nodes() * tb.length();
    let d = zetas[0].orders.d();
    if nt <= d {
        log::warn!("NT = {nt} <= d = {d}: tangent bound is likely degenerate (underdetermined)");
    }
    let mut bound = f64::INFINITY;
    for zeta in zetas {
        let r = gradient_matrix(zeta, gs, tb)?;
        let svals = r.transpose().singular_values();
        let smin = svals.iter().fold(f64::INFINITY, |m, &s| m.min(s));
        bound = bound.min(smin);
    }
    Ok(bound)
}

/// Upper estimate of the manifold curvature: the maximum over
/// (parameter point, direction) samples of the Frobenius norm of the central
/// second finite difference of h_{zeta + t u} over the grid at t = 0.
///
/// Pole-hitting samples are skipped; the skip count is returned alongside.
pub fn curvature_upper_bound(
    zetas: &[ArmaParams],
    directions: &[DVector<f64>],
    gs: &GraphSpectrum,
    tb: &TimeBasis,
    step: f64,
) -> Result<(f64, usize)> {
    if !(step > 0.0) {
        return Err(JsArmaError::InvalidParameter("step must be positive".into()));
    }
    if zetas.is_empty() || directions.is_empty() {
        return Err(JsArmaError::InvalidParameter("no samples given".into()));
    }
    let mut best = 0.0f64;
    let mut skipped = 0usize;
    for zeta in zetas {
        let z0 = zeta.zeta();
        for dir in directions {
            if dir.len() != z0.len() {
                return Err(JsArmaError::DimensionMismatch(format!(
                    "direction has length {}, expected d = {}",
                    dir.len(),
                    z0.len()
                )));
            }
            let unit = dir / dir.norm();
            let eval = |t: f64| -> Result<DVector<f64>> {
                let z = &z0 + &unit * t;
                let zt = ArmaParams::from_zeta(zeta.orders, &z)?;
                Ok(jpsd_of(&zt, gs, tb)?.values().clone())
            };
            let (hp, h0, hm) = match (eval(step), eval(0.0), eval(-step)) {
                (Ok(a), Ok(b), Ok(c)) => (a, b, c),
                _ => {
                    skipped += 1;
                    continue;
                }
            };
            let second = (hp - &h0 * 2.0 + hm) / (step * step);
            best = best.max(second.norm());
        }
    }
    Ok((best, skipped))
}

/// Build a full manifold probe at one parameter point.
pub fn manifold_probe(
    zeta: &ArmaParams,
    directions: &[DVector<f64>],
    gs: &GraphSpectrum,
    tb: &TimeBasis,
    step: f64,
) -> Result<ManifoldProbe> {
    let r = gradient_matrix(zeta, gs, tb)?;
    let zetas = std::slice::from_ref(zeta);
    let tangent = tangent_lower_bound(zetas, gs, tb)?;
    let (curvature, _) = curvature_upper_bound(zetas, directions, gs, tb, step)?;
    Ok(ManifoldProbe {
        zeta: zeta.clone(),
        r,
        tangent_lower_estimate: tangent,
        curvature_upper_estimate: curvature,
    })
}

/// Which error a rate study tracks, as a function of the realization count L.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RateErrorKind {
    /// `||h~ - h0||`: nonparametric JPSD estimate error.
    InitialJpsd,
    /// `||zeta* - zeta0||`: fitted parameter error (b sign resolved).
    Params,
    /// `||h* - h0||`: fitted-model JPSD error.
    FittedJpsd,
    /// `||z* - z_oracle||`: deviation of the imputation from the true-model
    /// oracle imputation on a masked test realization.
    Imputation,
}

/// Configuration for a rate study on a synthetic process with known
/// ground-truth parameters.
#[derive(Debug, Clone)]
pub struct RateStudyConfig {
    pub zeta0: ArmaParams,
    pub fit: FitConfig,
    pub seed: u64,
    /// Missing ratio of the test mask (imputation studies only).
    pub missing_ratio: f64,
}

/// Empirical error decay over a grid of realization counts.
#[derive(Debug, Clone, Serialize)]
pub struct RateStudy {
    pub kind: RateErrorKind,
    pub l_grid: Vec<usize>,
    pub mean_err: Vec<f64>,
    pub std_err: Vec<f64>,
    /// (1 - delta) empirical quantile of the per-trial errors.
    pub quantile_err: Vec<f64>,
    pub delta: f64,
    /// Least-squares slope/intercept of log(mean_err) vs log(L); `None` when
    /// the grid has fewer than two points.
    pub slope: Option<f64>,
    pub intercept: Option<f64>,
    /// Trials excluded per L because the fit failed to converge.
    pub excluded: Vec<usize>,
}

fn trial_error(
    kind: RateErrorKind,
    cfg: &RateStudyConfig,
    gs: &GraphSpectrum,
    tb: &TimeBasis,
    l: usize,
    trial: usize,
) -> Result<Option<f64>> {
    let base = cfg
        .seed
        .wrapping_mul(0x9e37_79b9_7f4a_7c15)
        .wrapping_add((l as u64) << 20)
        .wrapping_add(trial as u64);
    let mut data = Vec::with_capacity(l);
    for i in 0..l {
        data.push(sim::simulate_spectral(&cfg.zeta0, gs, tb, base.wrapping_add(1 + i as u64))?);
    }
    let obs = MaskedRealizations::fully_observed(data)?;
    let lc = estimation::lag_covariances(&obs, false);
    let cov = estimation::assemble_block_toeplitz(&lc)?;
    let (h_tilde, _) = estimation::initial_jpsd(&cov, gs, tb)?;
    let h0 = jpsd_of(&cfg.zeta0, gs, tb)?;

    if kind == RateErrorKind::InitialJpsd {
        return Ok(Some((h_tilde.values() - h0.values()).norm()));
    }

    let fitres = fit::fit_arma(&h_tilde, gs, tb, &cfg.zeta0.orders, &cfg.fit)?;
    if fitres.diagnostics.status != FitStatus::Converged {
        return Ok(None);
    }
    match kind {
        RateErrorKind::InitialJpsd => unreachable!(),
        RateErrorKind::Params => {
            let a_err = (&fitres.zeta.a - &cfg.zeta0.a).norm_squared();
            // b and -b define the same model; take the closer sign
            let b_err = (&fitres.zeta.b - &cfg.zeta0.b)
                .norm_squared()
                .min((&fitres.zeta.b + &cfg.zeta0.b).norm_squared());
            Ok(Some((a_err + b_err).sqrt()))
        }
        RateErrorKind::FittedJpsd => {
            let h_star = jpsd_of(&fitres.zeta, gs, tb)?;
            Ok(Some((h_star.values() - h0.values()).norm()))
        }
        RateErrorKind::Imputation => {
            // deviation pooled over a batch of held-out realizations with
            // independent masks, for a stable estimate of the expected
            // deviation from the oracle imputation
            let n_test = 16;
            let tests: Vec<_> = (0..n_test)
                .map(|i| {
                    sim::simulate_spectral(&cfg.zeta0, gs, tb, base.wrapping_add(777 + i as u64))
                })
                .collect::<Result<_>>()?;
            let masks = sim::generate_mask(
                gs.n_nodes(),
                tb.length(),
                n_test,
                cfg.missing_ratio,
                base ^ 0x5a5a,
            )?;
            let masked = MaskedRealizations::new(tests, masks)?;

            let h_star = jpsd_of(&fitres.zeta, gs, tb)?;
            let cov_star = impute::covariance_from_jpsd(&h_star, gs, tb)?;
            let est = impute::mmse_impute(&cov_star, &masked, None)?;

            let cov_true = impute::covariance_from_jpsd(&h0, gs, tb)?;
            let oracle = impute::mmse_impute(&cov_true, &masked, None)?;

            let mut acc = 0.0;
            for (li, mask) in masked.masks().iter().enumerate() {
                for j in 0..mask.ncols() {
                    for i in 0..mask.nrows() {
                        if !mask[(i, j)] {
                            let d = est.filled()[li][(i, j)] - oracle.filled()[li][(i, j)];
                            acc += d * d;
                        }
                    }
                }
            }
            Ok(Some((acc / n_test as f64).sqrt()))
        }
    }
}

/// Run `trials` independent synthetic pipelines at each L and summarize the
/// chosen error's decay; trials whose fit fails to converge are excluded and
/// counted.
pub fn rate_study(
    kind: RateErrorKind,
    cfg: &RateStudyConfig,
    gs: &GraphSpectrum,
    tb: &TimeBasis,
    l_grid: &[usize],
    trials: usize,
    delta: f64,
) -> Result<RateStudy> {
    if l_grid.is_empty() || trials == 0 {
        return Err(JsArmaError::InvalidParameter("empty L grid or zero trials".into()));
    }
    if !l_grid.windows(2).all(|w| w[0] < w[1]) {
        return Err(JsArmaError::InvalidParameter("L grid must be strictly increasing".into()));
    }
    if !(0.0 < delta && delta < 1.0) {
        return Err(JsArmaError::InvalidParameter("delta must lie in (0, 1)".into()));
    }

    let mut mean_err = Vec::with_capacity(l_grid.len());
    let mut std_err = Vec::with_capacity(l_grid.len());
    let mut quantile_err = Vec::with_capacity(l_grid.len());
    let mut excluded = Vec::with_capacity(l_grid.len());
    for &l in l_grid {
        let results: Vec<Result<Option<f64>>> = (0..trials)
            .into_par_iter()
            .map(|trial| trial_error(kind, cfg, gs, tb, l, trial))
            .collect();
        let mut errs = Vec::with_capacity(trials);
        let mut skipped = 0usize;
        for r in results {
            match r? {
                Some(e) => errs.push(e),
                None => skipped += 1,
            }
        }
        if errs.is_empty() {
            return Err(JsArmaError::NonConvergence {
                iterations: trials,
                residual: f64::NAN,
                tolerance: f64::NAN,
            });
        }
        let mean = errs.iter().sum::<f64>() / errs.len() as f64;
        let var = errs.iter().map(|e| (e - mean) * (e - mean)).sum::<f64>()
            / errs.len() as f64;
        let mut sorted = errs.clone();
        sorted.sort_by(f64::total_cmp);
        let qidx = (((1.0 - delta) * sorted.len() as f64).ceil() as usize)
            .saturating_sub(1)
            .min(sorted.len() - 1);
        mean_err.push(mean);
        std_err.push(var.sqrt());
        quantile_err.push(sorted[qidx]);
        excluded.push(skipped);
    }

    let (slope, intercept) = if l_grid.len() >= 2 {
        let xs: Vec<f64> = l_grid.iter().map(|&l| (l as f64).ln()).collect();
        let ys: Vec<f64> = mean_err.iter().map(|&e| e.max(f64::MIN_POSITIVE).ln()).collect();
        let n = xs.len() as f64;
        let mx = xs.iter().sum::<f64>() / n;
        let my = ys.iter().sum::<f64>() / n;
        let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        (Some(sxy / sxx), Some(my - sxy / sxx * mx))
    } else {
        (None, None)
    };

    Ok(RateStudy {
        kind,
        l_grid: l_grid.to_vec(),
        mean_err,
        std_err,
        quantile_err,
        delta,
        slope,
        intercept,
        excluded,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{self, Graph};
    use crate::spectral::{dft_basis, ModelOrders};
    use approx::assert_abs_diff_eq;
    use nalgebra::dmatrix;

    fn vi_a1() -> ArmaParams {
        ArmaParams::new(
            ModelOrders::new(1, 1, 1, 0).unwrap(),
            DVector::from_row_slice(&[-0.5, 0.5]),
            DVector::from_row_slice(&[0.5, 0.5]),
        )
        .unwrap()
    }

    fn small_setup() -> (GraphSpectrum, TimeBasis) {
        let g = Graph::from_weights(dmatrix![0.0, 0.8; 0.8, 0.0]).unwrap();
        (graph::spectrum_of(&g).unwrap(), dft_basis(8).unwrap())
    }

    #[test]
    fn gradient_dimension_is_d() {
        let z = vi_a1();
        let g = jpsd_gradient(&z, 1.0, 0.7).unwrap();
        assert_eq!(g.len(), 4);
    }

    #[test]
    fn zero_b_zeroes_a_block() {
        let orders = ModelOrders::new(1, 1, 1, 0).unwrap();
        let z = ArmaParams::new(
            orders,
            DVector::from_row_slice(&[-0.3, 0.2]),
            DVector::zeros(2),
        )
        .unwrap();
        let g = jpsd_gradient(&z, 1.2, 0.4).unwrap();
        assert_eq!(g.rows(0, 2), DVector::zeros(2).rows(0, 2));
    }

    #[test]
    fn gradient_matches_finite_difference() {
        let z = vi_a1();
        let lambda = 1.0;
        let omega = std::f64::consts::PI / 3.0;
        let grad = jpsd_gradient(&z, lambda, omega).unwrap();
        let step = 1e-5;
        let h_at = |zv: &DVector<f64>| -> f64 {
            let zz = ArmaParams::from_zeta(z.orders, zv).unwrap();
            crate::spectral::arma_freq_response(&zz, lambda, omega).unwrap().norm_sqr()
        };
        let z0 = z.zeta();
        for i in 0..z0.len() {
            let mut zp = z0.clone();
            let mut zm = z0.clone();
            zp[i] += step;
            zm[i] -= step;
            let fd = (h_at(&zp) - h_at(&zm)) / (2.0 * step);
            let denom = grad[i].abs().max(1e-8);
            assert!(
                ((grad[i] - fd) / denom).abs() <= 1e-5,
                "component {i}: analytic {} vs fd {fd}",
                grad[i]
            );
        }
    }

    #[test]
    fn tangent_bound_positive_on_grid() {
        let (gs, tb) = small_setup();
        let t_hat = tangent_lower_bound(&[vi_a1()], &gs, &tb).unwrap();
        assert!(t_hat > 0.0, "tangent bound {t_hat}");
    }

    #[test]
    fn tangent_bound_at_most_any_column_norm() {
        let (gs, tb) = small_setup();
        let z = vi_a1();
        let r = gradient_matrix(&z, &gs, &tb).unwrap();
        let t_hat = tangent_lower_bound(std::slice::from_ref(&z), &gs, &tb).unwrap();
        // sigma_min of R^T is at most the norm of the full stacked matrix
        assert!(t_hat <= r.norm() + 1e-12);
    }

    #[test]
    fn curvature_nonnegative_and_step_stable() {
        let (gs, tb) = small_setup();
        let z = vi_a1();
        let dirs = vec![
            DVector::from_row_slice(&[1.0, 0.0, 0.0, 0.0]),
            DVector::from_row_slice(&[0.0, 0.5, -0.5, 0.25]),
        ];
        let (k1, s1) = curvature_upper_bound(&[z.clone()], &dirs, &gs, &tb, 1e-3).unwrap();
        let (k2, _) = curvature_upper_bound(&[z], &dirs, &gs, &tb, 5e-4).unwrap();
        assert_eq!(s1, 0);
        assert!(k1 >= 0.0);
        assert!(((k1 - k2) / k1.max(1e-12)).abs() <= 0.01, "k1 {k1} k2 {k2}");
    }

    #[test]
    fn pure_ma_curvature_matches_analytic() {
        // a = 0, orders Q=0, M=0: h(b) = b^2, second derivative along b is
        // exactly 2 at every grid point, so K = 2 sqrt(NT).
        let (gs, tb) = small_setup();
        let orders = ModelOrders::new(1, 0, 0, 0).unwrap();
        let z = ArmaParams::new(
            orders,
            DVector::zeros(1),
            DVector::from_row_slice(&[0.7]),
        )
        .unwrap();
        let dirs = vec![DVector::from_row_slice(&[0.0, 1.0])];
        let (k, _) = curvature_upper_bound(&[z], &dirs, &gs, &tb, 1e-3).unwrap();
        let nt = (gs.n_nodes() * tb.length()) as f64;
        assert_abs_diff_eq!(k, 2.0 * nt.sqrt(), epsilon = 1e-4 * nt.sqrt());
    }

    #[test]
    fn single_point_grid_has_no_slope() {
        let (gs, tb) = small_setup();
        let cfg = RateStudyConfig {
            zeta0: vi_a1(),
            fit: FitConfig::default(),
            seed: 7,
            missing_ratio: 0.3,
        };
        let study =
            rate_study(RateErrorKind::InitialJpsd, &cfg, &gs, &tb, &[16], 3, 0.1).unwrap();
        assert!(study.slope.is_none());
        assert_eq!(study.mean_err.len(), 1);
        assert!(study.mean_err[0] >= 0.0);
    }
}
