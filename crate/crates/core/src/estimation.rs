//! Initial nonparametric JPSD estimation from partially observed realizations:
//! lag-indexed sample covariances, block-Toeplitz assembly, and extraction of
//! the joint-spectral diagonal.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{JsArmaError, Result};
use crate::graph::GraphSpectrum;
use crate::sim::MaskedRealizations;
use crate::spectral::{Jpsd, TimeBasis};

/// Lag-indexed sample covariances `Sigma_Delta` for `Delta = 0..T-1`, with the
/// pair counts that produced each entry.
#[derive(Debug, Clone)]
pub struct LagCovariances {
    sigmas: Vec<DMatrix<f64>>,
    counts: Vec<DMatrix<f64>>,
    mean_subtracted: f64,
}

impl LagCovariances {
    pub fn n_lags(&self) -> usize {
        self.sigmas.len()
    }

    pub fn sigma(&self, delta: usize) -> &DMatrix<f64> {
        &self.sigmas[delta]
    }

    pub fn counts(&self, delta: usize) -> &DMatrix<f64> {
        &self.counts[delta]
    }

    /// Global sample mean removed from the observed entries before
    /// accumulation (0 when mean subtraction was disabled).
    pub fn mean_subtracted(&self) -> f64 {
        self.mean_subtracted
    }

    /// Fraction of entries of `Sigma_Delta` that had no observed pairs.
    pub fn zero_count_fraction(&self, delta: usize) -> f64 {
        let c = &self.counts[delta];
        let zeros = c.iter().filter(|&&v| v == 0.0).count();
        zeros as f64 / (c.nrows() * c.ncols()) as f64
    }
}

/// NT x NT covariance estimate and its provenance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CovSource {
    Sample,
    Model,
}

#[derive(Debug, Clone)]
pub struct CovEstimate {
    matrix: DMatrix<f64>,
    source: CovSource,
    n_nodes: usize,
    n_times: usize,
}

impl CovEstimate {
    pub fn new(matrix: DMatrix<f64>, source: CovSource, n_nodes: usize, n_times: usize) -> Result<Self> {
        let nt = n_nodes * n_times;
        if matrix.nrows() != nt || matrix.ncols() != nt {
            return Err(JsArmaError::DimensionMismatch(format!(
                "covariance is {}x{}, expected {nt}x{nt}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(Self { matrix, source, n_nodes, n_times })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn source(&self) -> CovSource {
        self.source
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn n_times(&self) -> usize {
        self.n_times
    }

    /// N x N block at time indices (t, u).
    pub fn block(&self, t: usize, u: usize) -> DMatrix<f64> {
        let n = self.n_nodes;
        self.matrix.view((t * n, u * n), (n, n)).clone_owned()
    }
}

/// Per-run estimation diagnostics, serialized to JSON by the harness.
#[derive(Debug, Clone, Serialize)]
pub struct EstimationDiagnostics {
    pub zero_count_fraction_per_lag: Vec<f64>,
    pub imag_residual_rel: f64,
    pub mean_subtracted: f64,
}

/// Pairwise-complete lag covariance estimation.
///
/// `[Sigma_Delta]_{ij}` averages `X_{it} X_{ju}` over all realizations and all
/// ordered time pairs with `|t - u| = Delta` where both entries are observed,
/// dividing by the per-entry pair count. Entries with zero pairs are set to 0
/// and flagged through the counts. The result is symmetrized.
pub fn lag_covariances(obs: &MaskedRealizations, subtract_mean: bool) -> LagCovariances {
    let n = obs.n_nodes();
    let t_len = obs.n_times();

    let mean = if subtract_mean {
        let mut sum = 0.0;
        let mut count = 0usize;
        for (x, m) in obs.data().iter().zip(obs.masks()) {
            for (v, &seen) in x.iter().zip(m.iter()) {
                if seen {
                    sum += v;
                    count += 1;
                }
            }
        }
        sum / count as f64
    } else {
        0.0
    };

    let mut sums = vec![DMatrix::<f64>::zeros(n, n); t_len];
    let mut counts = vec![DMatrix::<f64>::zeros(n, n); t_len];

    if obs.is_fully_observed() {
        // Dense path: accumulate A_Delta = sum_t x_t x_{t+Delta}^T with matrix
        // products; both time orderings contribute A and A^T.
        for x in obs.data() {
            let x = if mean != 0.0 { x.map(|v| v - mean) } else { x.clone() };
            for delta in 0..t_len {
                let span = t_len - delta;
                let a = x.columns(0, span) * x.columns(delta, span).transpose();
                if delta == 0 {
                    sums[0] += &a;
                } else {
                    sums[delta] += &a + a.transpose();
                }
            }
        }
        let l = obs.n_realizations() as f64;
        for delta in 0..t_len {
            let span = (t_len - delta) as f64;
            let c = if delta == 0 { span * l } else { 2.0 * span * l };
            counts[delta].fill(c);
            sums[delta] /= c;
        }
    } else {
        for (x, m) in obs.data().iter().zip(obs.masks()) {
            for delta in 0..t_len {
                for t in 0..t_len - delta {
                    let u = t + delta;
                    for i in 0..n {
                        if !m[(i, t)] && !m[(i, u)] {
                            continue;
                        }
                        for j in 0..n {
                            // ordered pair (t, u)
                            if m[(i, t)] && m[(j, u)] {
                                sums[delta][(i, j)] += (x[(i, t)] - mean) * (x[(j, u)] - mean);
                                counts[delta][(i, j)] += 1.0;
                            }
                            // ordered pair (u, t), distinct when delta > 0
                            if delta > 0 && m[(i, u)] && m[(j, t)] {
                                sums[delta][(i, j)] += (x[(i, u)] - mean) * (x[(j, t)] - mean);
                                counts[delta][(i, j)] += 1.0;
                            }
                        }
                    }
                }
            }
        }
        for delta in 0..t_len {
            for i in 0..n {
                for j in 0..n {
                    let c = counts[delta][(i, j)];
                    if c > 0.0 {
                        sums[delta][(i, j)] /= c;
                    }
                }
            }
            if counts[delta].iter().all(|&c| c == 0.0) {
                log::warn!("lag {delta}: no observed pairs anywhere; Sigma_{delta} left at zero");
            }
        }
    }

    for s in sums.iter_mut() {
        let sym = (&*s + s.transpose()) * 0.5;
        *s = sym;
    }

    LagCovariances { sigmas: sums, counts, mean_subtracted: mean }
}

/// Place `Sigma_{|t-u|}` at block (t, u) of an NT x NT matrix.
pub fn assemble_block_toeplitz(lc: &LagCovariances) -> Result<CovEstimate> {
    let t_len = lc.n_lags();
    let n = lc.sigma(0).nrows();
    let nt = n * t_len;
    let mut big = DMatrix::zeros(nt, nt);
    for t in 0..t_len {
        for u in 0..t_len {
            let delta = t.abs_diff(u);
            big.view_mut((t * n, u * n), (n, n)).copy_from(lc.sigma(delta));
        }
    }
    CovEstimate::new(big, CovSource::Sample, n, t_len)
}

/// Initial JPSD estimate: the real diagonal of `U_J^H Sigma U_J`, flagged as
/// possibly signed. The Kronecker structure of `U_J = U_T (x) U_G` lets the
/// conjugation run block-wise instead of over the full NT x NT product.
///
/// Returns the estimate together with the relative imaginary residual of the
/// extracted diagonal.
pub fn initial_jpsd(
    cov: &CovEstimate,
    gs: &GraphSpectrum,
    tb: &TimeBasis,
) -> Result<(Jpsd, f64)> {
    let n = cov.n_nodes();
    let t_len = cov.n_times();
    if gs.n_nodes() != n || tb.length() != t_len {
        return Err(JsArmaError::DimensionMismatch("bases do not match covariance shape".into()));
    }

    // Stage 1: graph-side conjugation of each N x N block.
    let ug = gs.basis();
    let mut blocks = vec![vec![DMatrix::<f64>::zeros(0, 0); t_len]; t_len];
    for t in 0..t_len {
        for u in 0..t_len {
            blocks[t][u] = ug.transpose() * cov.block(t, u) * ug;
        }
    }

    // Stage 2: per graph frequency, time-side quadratic forms.
    let ut = tb.basis();
    let mut values = DVector::zeros(n * t_len);
    let mut imag_sq = 0.0;
    let mut real_sq = 0.0;
    for ni in 0..n {
        let w = DMatrix::from_fn(t_len, t_len, |t, u| blocks[t][u][(ni, ni)]);
        for tau in 0..t_len {
            let col = ut.column(tau);
            let mut acc = Complex64::default();
            for t in 0..t_len {
                let mut row_acc = Complex64::default();
                for u in 0..t_len {
                    row_acc += w[(t, u)] * col[u];
                }
                acc += col[t].conj() * row_acc;
            }
            values[tau * n + ni] = acc.re;
            real_sq += acc.re * acc.re;
            imag_sq += acc.im * acc.im;
        }
    }
    let imag_residual_rel = if real_sq > 0.0 { (imag_sq / real_sq).sqrt() } else { 0.0 };
    let jpsd = Jpsd::from_samples(values, n, t_len)?;
    Ok((jpsd, imag_residual_rel))
}

/// Diagnostics bundle for one estimation run.
pub fn diagnostics(lc: &LagCovariances, imag_residual_rel: f64) -> EstimationDiagnostics {
    EstimationDiagnostics {
        zero_count_fraction_per_lag: (0..lc.n_lags()).map(|d| lc.zero_count_fraction(d)).collect(),
        imag_residual_rel,
        mean_subtracted: lc.mean_subtracted(),
    }
}
