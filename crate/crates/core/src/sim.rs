//! Generation of ARMA time-vertex process realizations, observation masks and
//! measurement noise.
//!
//! Two generators are provided. `simulate_arma` runs the time recursion from a
//! zero initial state with a burn-in, which leaves a small boundary mismatch
//! against exact circular stationarity. `simulate_spectral` synthesizes an
//! exactly jointly stationary realization by shaping white noise in the joint
//! spectral domain and is used as the oracle generator in tests.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{JsArmaError, Result};
use crate::graph::GraphSpectrum;
use crate::spectral::{uv_vectors, ArmaParams, Jpsd, TimeBasis, UvForm};

/// Value stored at unobserved entries. Estimators must consult the mask and
/// never read these.
pub const UNOBSERVED: f64 = f64::NAN;

/// A collection of partially observed realizations of an N x T process.
#[derive(Debug, Clone)]
pub struct MaskedRealizations {
    data: Vec<DMatrix<f64>>,
    masks: Vec<DMatrix<bool>>,
    n_nodes: usize,
    n_times: usize,
}

impl MaskedRealizations {
    /// Pair data with observation masks; unobserved entries are replaced by a
    /// sentinel.
    pub fn new(data: Vec<DMatrix<f64>>, masks: Vec<DMatrix<bool>>) -> Result<Self> {
        if data.is_empty() || data.len() != masks.len() {
            return Err(JsArmaError::DimensionMismatch(format!(
                "{} data matrices vs {} masks",
                data.len(),
                masks.len()
            )));
        }
        let n = data[0].nrows();
        let t = data[0].ncols();
        let mut data = data;
        for (l, (x, m)) in data.iter_mut().zip(&masks).enumerate() {
            if x.nrows() != n || x.ncols() != t || m.nrows() != n || m.ncols() != t {
                return Err(JsArmaError::DimensionMismatch(format!(
                    "realization {l} has inconsistent shape"
                )));
            }
            let mut any_observed = false;
            for i in 0..n {
                for j in 0..t {
                    if m[(i, j)] {
                        any_observed = true;
                        if !x[(i, j)].is_finite() {
                            return Err(JsArmaError::InvalidParameter(format!(
                                "non-finite observed entry in realization {l} at ({i}, {j})"
                            )));
                        }
                    } else {
                        x[(i, j)] = UNOBSERVED;
                    }
                }
            }
            if !any_observed {
                return Err(JsArmaError::InvalidParameter(format!(
                    "realization {l} has no observed entries"
                )));
            }
        }
        Ok(Self { n_nodes: n, n_times: t, data, masks })
    }

    /// Fully observed realizations.
    pub fn fully_observed(data: Vec<DMatrix<f64>>) -> Result<Self> {
        let masks = data
            .iter()
            .map(|x| DMatrix::from_element(x.nrows(), x.ncols(), true))
            .collect();
        Self::new(data, masks)
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn n_times(&self) -> usize {
        self.n_times
    }

    pub fn n_realizations(&self) -> usize {
        self.data.len()
    }

    pub fn data(&self) -> &[DMatrix<f64>] {
        &self.data
    }

    pub fn masks(&self) -> &[DMatrix<bool>] {
        &self.masks
    }

    pub fn is_fully_observed(&self) -> bool {
        self.masks.iter().all(|m| m.iter().all(|&b| b))
    }

    /// Observed (node, time) pairs of realization `l` in column-stacked order.
    pub fn observed_indices(&self, l: usize) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for t in 0..self.n_times {
            for i in 0..self.n_nodes {
                if self.masks[l][(i, t)] {
                    out.push((i, t));
                }
            }
        }
        out
    }

    /// Missing (node, time) pairs of realization `l` in column-stacked order.
    pub fn missing_indices(&self, l: usize) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for t in 0..self.n_times {
            for i in 0..self.n_nodes {
                if !self.masks[l][(i, t)] {
                    out.push((i, t));
                }
            }
        }
        out
    }
}

fn standard_normal_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

/// Per-eigenvalue AR polynomial coefficients `alpha_p(lambda) = sum_k a_pk lambda^k`
/// and MA coefficients `beta_q(lambda) = sum_m b_qm lambda^m`.
fn lambda_polynomials(zeta: &ArmaParams, lambda: f64) -> (Vec<f64>, Vec<f64>) {
    let o = &zeta.orders;
    let pow = |e: usize| if e == 0 { 1.0 } else { lambda.powi(e as i32) };
    let alpha: Vec<f64> = (1..=o.p)
        .map(|p| (0..=o.k).map(|k| zeta.a_coef(p, k) * pow(k)).sum())
        .collect();
    let beta: Vec<f64> = (0..=o.q)
        .map(|q| (0..=o.m).map(|m| zeta.b_coef(q, m) * pow(m)).sum())
        .collect();
    (alpha, beta)
}

/// Largest root magnitude of `z^P + alpha_1 z^{P-1} + ... + alpha_P`,
/// computed from the companion matrix.
fn ar_spectral_radius(alpha: &[f64]) -> f64 {
    let p = alpha.len();
    if p == 0 || alpha.iter().all(|&a| a == 0.0) {
        return 0.0;
    }
    let mut companion = DMatrix::<f64>::zeros(p, p);
    for (j, &a) in alpha.iter().enumerate() {
        companion[(0, j)] = -a;
    }
    for i in 1..p {
        companion[(i, i - 1)] = 1.0;
    }
    companion
        .complex_eigenvalues()
        .iter()
        .map(|e| e.norm())
        .fold(0.0, f64::max)
}

/// Reject parameter vectors whose recursion is unstable or whose frequency
/// response denominator nearly vanishes on the evaluation grid (omega
/// oversampled 8x relative to the T-point grid).
pub fn stability_screen(zeta: &ArmaParams, gs: &GraphSpectrum, t_len: usize) -> Result<()> {
    let oversampled = 8 * t_len.max(1);
    for n in 0..gs.n_nodes() {
        let lambda = gs.eigenvalues()[n];
        let (alpha, _) = lambda_polynomials(zeta, lambda);
        let radius = ar_spectral_radius(&alpha);
        if radius >= 1.0 - 1e-9 {
            return Err(JsArmaError::Unstable(format!(
                "AR spectral radius {radius:.6} >= 1 at lambda = {lambda:.6}"
            )));
        }
        for s in 0..oversampled {
            let omega = 2.0 * std::f64::consts::PI * s as f64 / oversampled as f64;
            let (_, v) = uv_vectors(lambda, omega, &zeta.orders, UvForm::Original);
            let den = Complex64::new(1.0, 0.0)
                + zeta.a.iter().zip(v.iter()).map(|(&ai, &vi)| ai * vi).sum::<Complex64>();
            if den.norm() < 1e-6 {
                return Err(JsArmaError::Unstable(format!(
                    "denominator magnitude {:.3e} < 1e-6 at (lambda = {lambda:.6}, omega = {omega:.6})",
                    den.norm()
                )));
            }
        }
    }
    Ok(())
}

/// Simulate an N x T realization of the ARMA recursion
/// `x_t = -sum_{p,k} a_pk L^k x_{t-p} + sum_{q,m} b_qm L^m w_{t-q}`
/// with standard normal innovations, zero initial state and `burn_in`
/// discarded leading samples. Deterministic given the seed.
pub fn simulate_arma(
    zeta: &ArmaParams,
    gs: &GraphSpectrum,
    t_len: usize,
    burn_in: usize,
    seed: u64,
) -> Result<DMatrix<f64>> {
    stability_screen(zeta, gs, t_len)?;
    let n = gs.n_nodes();
    let total = burn_in + t_len;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w = standard_normal_matrix(&mut rng, n, total);
    // The recursion diagonalizes in the graph spectral domain: each Laplacian
    // eigenvalue carries an independent scalar ARMA recursion.
    let w_hat = gs.basis().transpose() * w;
    let divergence_threshold = 1e8 * zeta.b.norm().max(1.0);

    let mut x_hat = DMatrix::zeros(n, total);
    for ni in 0..n {
        let (alpha, beta) = lambda_polynomials(zeta, gs.eigenvalues()[ni]);
        for t in 0..total {
            let mut val = 0.0;
            for (p, &ap) in alpha.iter().enumerate() {
                let lag = p + 1;
                if t >= lag {
                    val -= ap * x_hat[(ni, t - lag)];
                }
            }
            for (q, &bq) in beta.iter().enumerate() {
                if t >= q {
                    val += bq * w_hat[(ni, t - q)];
                }
            }
            if !val.is_finite() || val.abs() > divergence_threshold {
                return Err(JsArmaError::Diverged { norm: val.abs() });
            }
            x_hat[(ni, t)] = val;
        }
    }
    let x = gs.basis() * x_hat.columns(burn_in, t_len);
    Ok(x)
}

/// Exact circular generator: shape white noise by `h^{1/2}` in the joint
/// spectral domain. The result is exactly jointly stationary with JPSD `h`.
pub fn simulate_spectral_from_jpsd(
    h: &Jpsd,
    gs: &GraphSpectrum,
    tb: &TimeBasis,
    seed: u64,
) -> Result<DMatrix<f64>> {
    let n = gs.n_nodes();
    let t = tb.length();
    if h.n_nodes() != n || h.n_times() != t {
        return Err(JsArmaError::DimensionMismatch("JPSD grid does not match bases".into()));
    }
    if let Some(i) = h.values().iter().position(|&v| v < 0.0) {
        return Err(JsArmaError::NegativeJpsd { index: i, value: h.values()[i] });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w = standard_normal_matrix(&mut rng, n, t);
    // w_hat = JFT(w), scaled entrywise by sqrt(h), transformed back.
    let w_hat = crate::spectral::jft(&w, gs, tb)?;
    let hm = h.as_matrix();
    let shaped = DMatrix::from_fn(n, t, |i, j| w_hat[(i, j)] * hm[(i, j)].sqrt());
    let back = gs.basis().map(|x| Complex64::new(x, 0.0)) * shaped * tb.basis().transpose();
    Ok(back.map(|c| c.re))
}

/// `simulate_spectral_from_jpsd` with the JPSD evaluated from ARMA parameters.
pub fn simulate_spectral(
    zeta: &ArmaParams,
    gs: &GraphSpectrum,
    tb: &TimeBasis,
    seed: u64,
) -> Result<DMatrix<f64>> {
    let h = crate::spectral::jpsd_of(zeta, gs, tb)?;
    simulate_spectral_from_jpsd(&h, gs, tb, seed)
}

/// Uniformly random observation masks with exactly
/// `round(missing_ratio * N * T)` unobserved entries per realization.
pub fn generate_mask(
    n: usize,
    t: usize,
    l: usize,
    missing_ratio: f64,
    seed: u64,
) -> Result<Vec<DMatrix<bool>>> {
    if !(0.0..1.0).contains(&missing_ratio) {
        return Err(JsArmaError::InvalidParameter(format!(
            "missing_ratio must be in [0, 1), got {missing_ratio}"
        )));
    }
    let total = n * t;
    let n_missing = (missing_ratio * total as f64).round() as usize;
    if n_missing >= total {
        return Err(JsArmaError::InvalidParameter(
            "missing_ratio would leave no observed entries".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut masks = Vec::with_capacity(l);
    for _ in 0..l {
        let mut indices: Vec<usize> = (0..total).collect();
        // partial Fisher-Yates: the first n_missing slots become the missing set
        for i in 0..n_missing {
            let j = rng.random_range(i..total);
            indices.swap(i, j);
        }
        let mut mask = DMatrix::from_element(n, t, true);
        for &idx in &indices[..n_missing] {
            mask[(idx % n, idx / n)] = false;
        }
        masks.push(mask);
    }
    Ok(masks)
}

/// Additive white Gaussian noise at the requested SNR. An infinite `snr_db`
/// returns the input unchanged.
pub fn add_noise(x: &DMatrix<f64>, snr_db: f64, seed: u64) -> Result<DMatrix<f64>> {
    if snr_db.is_infinite() && snr_db > 0.0 {
        return Ok(x.clone());
    }
    let signal_power = x.iter().map(|v| v * v).sum::<f64>() / (x.nrows() * x.ncols()) as f64;
    if signal_power == 0.0 {
        return Err(JsArmaError::InvalidParameter(
            "SNR is undefined for an all-zero signal".into(),
        ));
    }
    let noise_std = (signal_power / 10f64.powf(snr_db / 10.0)).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(x.map(|v| v + noise_std * rng.sample::<f64, _>(StandardNormal)))
}
