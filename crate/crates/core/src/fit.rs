//! Fitting ARMA parameters to an initial JPSD estimate.
//!
//! The fit minimizes, over real symmetric PSD matrices A and B,
//!
//! ```text
//!   sum_{n,tau} mu(l_n, w_tau) | u^H B u - v^H A v * h~(l_n, w_tau) |^2
//!     + mu_A tr(A) + mu_B tr(B)
//! ```
//!
//! subject to A[0,0] = 1 and zeroed rows/columns at the a_0k slots
//! (extended-form v). The problem is a convex quadratic over the PSD cone
//! intersected with an affine subspace; it is solved by Douglas-Rachford
//! splitting: a quadratic prox step in the affine-constrained variables
//! alternating with projection onto the PSD cone, with over-relaxation and a
//! fixed step parameter. Coefficient vectors a and b are then recovered by
//! rank-1 extraction.

use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{JsArmaError, Result};
use crate::graph::GraphSpectrum;
use crate::spectral::{
    uv_vectors, wrapped_frequency, ArmaParams, Jpsd, ModelOrders, TimeBasis, UvForm,
};

/// Spectral weight function mu(lambda, omega).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum WeightFn {
    Uniform,
    /// `exp(-lambda^2 / sigma_lambda^2 - w^2 / sigma_omega^2)` with `w` the
    /// frequency wrapped into (-pi, pi]; emphasizes low frequencies.
    Gaussian { sigma_lambda: f64, sigma_omega: f64 },
}

/// A trace weight, either an absolute value or relative to the data-term
/// scale `sum_i mu_i h~_i^2` (the objective of the trivial B = 0 fit).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceWeight {
    Absolute(f64),
    RelativeToDataScale(f64),
}

impl TraceWeight {
    fn resolve(&self, data_scale: f64) -> f64 {
        match *self {
            TraceWeight::Absolute(v) => v,
            TraceWeight::RelativeToDataScale(r) => r * data_scale,
        }
    }
}

/// Solver controls for the splitting iteration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
pub struct SolverConfig {
    pub max_iters: usize,
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Step (prox) parameter; `None` selects `1 / (2 lambda_max(G))` from the
    /// quadratic form of the data term.
    pub step: Option<f64>,
    /// Over-relaxation factor in (0, 2).
    pub relaxation: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { max_iters: 50_000, abs_tol: 1e-12, rel_tol: 1e-11, step: None, relaxation: 1.7 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
pub struct FitConfig {
    pub mu_a: TraceWeight,
    pub mu_b: TraceWeight,
    pub weightfn: WeightFn,
    pub solver: SolverConfig,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            mu_a: TraceWeight::RelativeToDataScale(1e-3),
            mu_b: TraceWeight::RelativeToDataScale(1e-3),
            weightfn: WeightFn::Uniform,
            solver: SolverConfig::default(),
        }
    }
}

impl FitConfig {
    fn validate(&self) -> Result<()> {
        if self.solver.max_iters < 1 {
            return Err(JsArmaError::Config("max_iters must be >= 1".into()));
        }
        if !(self.solver.abs_tol > 0.0) || !(self.solver.rel_tol > 0.0) {
            return Err(JsArmaError::Config("tolerances must be positive".into()));
        }
        if !(self.solver.relaxation > 0.0 && self.solver.relaxation < 2.0) {
            return Err(JsArmaError::Config("relaxation must lie in (0, 2)".into()));
        }
        for w in [&self.mu_a, &self.mu_b] {
            let v = match *w {
                TraceWeight::Absolute(v) | TraceWeight::RelativeToDataScale(v) => v,
            };
            if v < 0.0 {
                return Err(JsArmaError::Config("trace weights must be nonnegative".into()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FitStatus {
    Converged,
    MaxIters,
    /// The fitted spectrum matrix B collapsed to zero (all-zero input
    /// spectrum); the recovered b is the zero vector.
    Degenerate,
}

/// Solver diagnostics for one fit.
#[derive(Debug, Clone, Serialize)]
pub struct FitDiagnostics {
    pub status: FitStatus,
    pub iterations: usize,
    pub objective: f64,
    /// Objective value sampled every `objective_stride` iterations.
    pub objective_history: Vec<f64>,
    pub objective_stride: usize,
    /// Fixed-point residual history (same stride); monotone non-increasing
    /// for the averaged splitting operator.
    pub residual_history: Vec<f64>,
    pub final_residual: f64,
    /// Frobenius distance between the affine-feasible and the PSD-projected
    /// iterates at exit.
    pub psd_gap: f64,
    pub eigenvalues_a: Vec<f64>,
    pub eigenvalues_b: Vec<f64>,
    pub dominance_a: f64,
    pub dominance_b: f64,
    pub mu_a_effective: f64,
    pub mu_b_effective: f64,
    /// Step (prox) parameter actually used.
    pub gamma: f64,
    pub wall_time_secs: f64,
}

/// Result of an ARMA fit: PSD matrices, recovered coefficients, diagnostics.
#[derive(Debug, Clone)]
pub struct FitResult {
    pub a_mat: DMatrix<f64>,
    pub b_mat: DMatrix<f64>,
    pub a_ext: DVector<f64>,
    pub zeta: ArmaParams,
    pub diagnostics: FitDiagnostics,
}

/// Spectral weight vector over the (lambda_n, omega_tau) grid, node-fastest.
pub fn spectral_weights(gs: &GraphSpectrum, tb: &TimeBasis, weightfn: &WeightFn) -> Result<DVector<f64>> {
    let n = gs.n_nodes();
    let t = tb.length();
    match *weightfn {
        WeightFn::Uniform => Ok(DVector::from_element(n * t, 1.0)),
        WeightFn::Gaussian { sigma_lambda, sigma_omega } => {
            if !(sigma_lambda > 0.0 && sigma_omega > 0.0) {
                return Err(JsArmaError::Config("gaussian weight sigmas must be positive".into()));
            }
            let mut w = DVector::zeros(n * t);
            for tau in 0..t {
                let om = wrapped_frequency(tb.frequencies()[tau]);
                for ni in 0..n {
                    let lam = gs.eigenvalues()[ni];
                    w[tau * n + ni] = (-lam * lam / (sigma_lambda * sigma_lambda)
                        - om * om / (sigma_omega * sigma_omega))
                        .exp();
                }
            }
            Ok(w)
        }
    }
}

// ---------------------------------------------------------------------------
// Symmetric-matrix vectorization (svec): diagonal entries as-is, off-diagonal
// scaled by sqrt(2) so the Euclidean norm equals the Frobenius norm.

pub(crate) struct SymIndex {
    dim: usize,
    pairs: Vec<(usize, usize)>,
}

impl SymIndex {
    pub(crate) fn new(dim: usize) -> Self {
        let mut pairs = Vec::with_capacity(dim * (dim + 1) / 2);
        for j in 0..dim {
            for i in 0..=j {
                pairs.push((i, j));
            }
        }
        Self { dim, pairs }
    }

    pub(crate) fn len(&self) -> usize {
        self.pairs.len()
    }

    pub(crate) fn to_svec(&self, m: &DMatrix<f64>, out: &mut [f64]) {
        let s2 = std::f64::consts::SQRT_2;
        for (idx, &(i, j)) in self.pairs.iter().enumerate() {
            out[idx] = if i == j { m[(i, i)] } else { s2 * m[(i, j)] };
        }
    }

    pub(crate) fn from_svec(&self, v: &[f64]) -> DMatrix<f64> {
        let s2 = std::f64::consts::FRAC_1_SQRT_2;
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (idx, &(i, j)) in self.pairs.iter().enumerate() {
            if i == j {
                m[(i, i)] = v[idx];
            } else {
                m[(i, j)] = s2 * v[idx];
                m[(j, i)] = s2 * v[idx];
            }
        }
        m
    }
}

/// Project a symmetric matrix onto the PSD cone by clipping negative
/// eigenvalues.
pub(crate) fn psd_project(m: &DMatrix<f64>) -> DMatrix<f64> {
    let sym = (m + m.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    let clipped = DVector::from_fn(eig.eigenvalues.len(), |i, _| eig.eigenvalues[i].max(0.0));
    &eig.eigenvectors * DMatrix::from_diagonal(&clipped) * eig.eigenvectors.transpose()
}

/// Per-grid-point coefficient data shared between the solver and the
/// reference oracle: quadratic-form matrices Re(u u^H), Re(v v^H), the weight
/// and the target spectrum value.
pub(crate) struct GridTerms {
    pub mu: Vec<f64>,
    pub h: Vec<f64>,
    pub m_u: Vec<DMatrix<f64>>,
    pub m_v: Vec<DMatrix<f64>>,
    pub na: usize,
    pub nb: usize,
}

pub(crate) fn grid_terms(
    h_init: &Jpsd,
    gs: &GraphSpectrum,
    tb: &TimeBasis,
    orders: &ModelOrders,
    weights: &DVector<f64>,
) -> GridTerms {
    let n = gs.n_nodes();
    let t = tb.length();
    let na = orders.a_ext_len();
    let nb = orders.b_len();
    let nt = n * t;
    let mut terms = GridTerms {
        mu: Vec::with_capacity(nt),
        h: Vec::with_capacity(nt),
        m_u: Vec::with_capacity(nt),
        m_v: Vec::with_capacity(nt),
        na,
        nb,
    };
    for tau in 0..t {
        let omega = tb.frequencies()[tau];
        for ni in 0..n {
            let lambda = gs.eigenvalues()[ni];
            let (u, v) = uv_vectors(lambda, omega, orders, UvForm::Extended);
            let m_u = DMatrix::from_fn(nb, nb, |i, j| (u[i] * u[j].conj()).re);
            let m_v = DMatrix::from_fn(na, na, |i, j| (v[i] * v[j].conj()).re);
            terms.mu.push(weights[tau * n + ni]);
            terms.h.push(h_init.values()[tau * n + ni]);
            terms.m_u.push(m_u);
            terms.m_v.push(m_v);
        }
    }
    terms
}

/// Data-term objective for explicit matrices, shared with the oracle:
/// `sum_i mu_i (<B, Mu_i> - h_i <A, Mv_i>)^2`.
pub(crate) fn data_objective(terms: &GridTerms, a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    let mut total = 0.0;
    for i in 0..terms.mu.len() {
        let r = b.dot(&terms.m_u[i]) - terms.h[i] * a.dot(&terms.m_v[i]);
        total += terms.mu[i] * r * r;
    }
    total
}

struct Problem {
    sym_a: SymIndex,
    sym_b: SymIndex,
    /// Total coordinate count (svec of A followed by svec of B).
    m: usize,
    /// Free coordinate indices and their complement with pinned values.
    free: Vec<usize>,
    fixed: Vec<(usize, f64)>,
    /// G over free coordinates, linear terms, constants.
    chol: nalgebra::Cholesky<f64, nalgebra::Dyn>,
    rhs_const: DVector<f64>,
    gamma: f64,
    /// Full-coordinate residual coefficients for objective evaluation.
    terms: GridTerms,
    mu_a: f64,
    mu_b: f64,
}

impl Problem {
    fn split(&self, x: &DVector<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
        let la = self.sym_a.len();
        let a = self.sym_a.from_svec(&x.as_slice()[..la]);
        let b = self.sym_b.from_svec(&x.as_slice()[la..]);
        (a, b)
    }

    fn join(&self, a: &DMatrix<f64>, b: &DMatrix<f64>) -> DVector<f64> {
        let la = self.sym_a.len();
        let mut x = DVector::zeros(self.m);
        self.sym_a.to_svec(a, &mut x.as_mut_slice()[..la]);
        self.sym_b.to_svec(b, &mut x.as_mut_slice()[la..]);
        x
    }

    fn objective(&self, x: &DVector<f64>) -> f64 {
        let (a, b) = self.split(x);
        data_objective(&self.terms, &a, &b) + self.mu_a * a.trace() + self.mu_b * b.trace()
    }

    /// prox of the quadratic objective restricted to the affine subspace.
    fn prox_quadratic(&self, s: &DVector<f64>) -> DVector<f64> {
        let nf = self.free.len();
        let mut rhs = DVector::zeros(nf);
        for (row, &f) in self.free.iter().enumerate() {
            rhs[row] = s[f] + self.rhs_const[row];
        }
        let sol = self.chol.solve(&rhs);
        let mut x = DVector::zeros(self.m);
        for (row, &f) in self.free.iter().enumerate() {
            x[f] = sol[row];
        }
        for &(idx, val) in &self.fixed {
            x[idx] = val;
        }
        x
    }

    /// Projection onto the PSD cone (both blocks).
    fn prox_psd(&self, s: &DVector<f64>) -> DVector<f64> {
        let (a, b) = self.split(s);
        self.join(&psd_project(&a), &psd_project(&b))
    }
}

fn build_problem(
    terms: GridTerms,
    orders: &ModelOrders,
    mu_a: f64,
    mu_b: f64,
    step: Option<f64>,
) -> Problem {
    let sym_a = SymIndex::new(terms.na);
    let sym_b = SymIndex::new(terms.nb);
    let la = sym_a.len();
    let m = la + sym_b.len();

    // Affine constraints on A: A[0,0] = 1; rows/columns at the a_0k slots
    // (indices 1..=K of the extended vector) pinned to zero.
    let zero_slots: Vec<usize> = (1..=orders.k).collect();
    let is_zero_slot = |i: usize| zero_slots.contains(&i);
    let mut free = Vec::new();
    let mut fixed = Vec::new();
    for (idx, &(i, j)) in sym_a.pairs.iter().enumerate() {
        if (i, j) == (0, 0) {
            fixed.push((idx, 1.0));
        } else if is_zero_slot(i) || is_zero_slot(j) {
            fixed.push((idx, 0.0));
        } else {
            free.push(idx);
        }
    }
    for idx in 0..sym_b.len() {
        free.push(la + idx);
    }

    // Residual coefficients in svec coordinates over the full space, then
    // restricted: r_i(x) = p_i . x_full = p_i,free . x_free + const_i.
    let s2 = std::f64::consts::SQRT_2;
    let nt = terms.mu.len();
    let nf = free.len();
    let mut p_free = DMatrix::<f64>::zeros(nt, nf);
    let mut consts = DVector::<f64>::zeros(nt);
    for gi in 0..nt {
        let mv = &terms.m_v[gi];
        let mu_mat = &terms.m_u[gi];
        let h = terms.h[gi];
        let mut p_full = vec![0.0; m];
        for (idx, &(i, j)) in sym_a.pairs.iter().enumerate() {
            p_full[idx] = if i == j { -h * mv[(i, i)] } else { -h * s2 * mv[(i, j)] };
        }
        for (idx, &(i, j)) in sym_b.pairs.iter().enumerate() {
            p_full[la + idx] = if i == j { mu_mat[(i, i)] } else { s2 * mu_mat[(i, j)] };
        }
        for (col, &f) in free.iter().enumerate() {
            p_free[(gi, col)] = p_full[f];
        }
        // fixed contributions: only A[0,0] = 1 is nonzero
        consts[gi] = -h * mv[(0, 0)];
    }

    // Quadratic form over free coordinates: G = P^T diag(mu) P.
    let mut g_mat = DMatrix::<f64>::zeros(nf, nf);
    let mut g_lin = DVector::<f64>::zeros(nf);
    for gi in 0..nt {
        let w = terms.mu[gi];
        let row = p_free.row(gi);
        for ci in 0..nf {
            let wi = w * row[ci];
            if wi == 0.0 {
                continue;
            }
            g_lin[ci] += wi * consts[gi];
            for cj in ci..nf {
                g_mat[(ci, cj)] += wi * row[cj];
            }
        }
    }
    for ci in 0..nf {
        for cj in 0..ci {
            g_mat[(ci, cj)] = g_mat[(cj, ci)];
        }
    }

    // Linear trace term over free coordinates (diagonal svec slots).
    let mut c_lin = DVector::<f64>::zeros(nf);
    for (col, &f) in free.iter().enumerate() {
        if f < la {
            let (i, j) = sym_a.pairs[f];
            if i == j {
                c_lin[col] = mu_a;
            }
        } else {
            let (i, j) = sym_b.pairs[f - la];
            if i == j {
                c_lin[col] = mu_b;
            }
        }
    }

    let lambda_max = power_iteration_lambda_max(&g_mat);
    let gamma = step.unwrap_or_else(|| {
        if lambda_max > 0.0 {
            1.0 / (2.0 * lambda_max)
        } else {
            1.0
        }
    });

    // prox solve matrix (I + 2 gamma G) and constant part of its rhs.
    let mut system = g_mat * (2.0 * gamma);
    for i in 0..nf {
        system[(i, i)] += 1.0;
    }
    let chol = nalgebra::Cholesky::new(system).expect("I + 2 gamma G is positive definite");
    let rhs_const = -(g_lin * 2.0 + c_lin) * gamma;

    Problem { sym_a, sym_b, m, free, fixed, chol, rhs_const, gamma, terms, mu_a, mu_b }
}

fn power_iteration_lambda_max(g: &DMatrix<f64>) -> f64 {
    let n = g.nrows();
    if n == 0 {
        return 0.0;
    }
    let mut v = DVector::from_element(n, 1.0 / (n as f64).sqrt());
    let mut lam = 0.0;
    for _ in 0..100 {
        let w = g * &v;
        let norm = w.norm();
        if norm == 0.0 {
            return 0.0;
        }
        v = w / norm;
        lam = norm;
    }
    lam
}

/// Fit PSD matrices A and B to an initial JPSD estimate and recover the ARMA
/// coefficient vectors.
pub fn fit_arma(
    h_init: &Jpsd,
    gs: &GraphSpectrum,
    tb: &TimeBasis,
    orders: &ModelOrders,
    cfg: &FitConfig,
) -> Result<FitResult> {
    cfg.validate()?;
    let n = gs.n_nodes();
    let t = tb.length();
    if h_init.values().len() != n * t {
        return Err(JsArmaError::DimensionMismatch(format!(
            "h_init has length {}, expected NT = {}",
            h_init.values().len(),
            n * t
        )));
    }
    if n * t <= orders.d() {
        log::warn!(
            "NT = {} <= d = {}: the fit is underdetermined; results may be unreliable",
            n * t,
            orders.d()
        );
    }
    let start = Instant::now();

    let weights = spectral_weights(gs, tb, &cfg.weightfn)?;
    let terms = grid_terms(h_init, gs, tb, orders, &weights);
    let data_scale: f64 =
        terms.mu.iter().zip(&terms.h).map(|(&mu, &h)| mu * h * h).sum();
    let mu_a = cfg.mu_a.resolve(data_scale);
    let mu_b = cfg.mu_b.resolve(data_scale);

    let problem = build_problem(terms, orders, mu_a, mu_b, cfg.solver.step);

    // Douglas-Rachford iteration on f (affine-constrained quadratic) and
    // g (PSD indicator): x = prox_f(s); y = prox_g(2x - s); s += alpha (y - x).
    let alpha = cfg.solver.relaxation;
    let mut s = {
        // start from the feasible point A = e0 e0^T, B = 0
        let mut a0 = DMatrix::zeros(problem.sym_a.dim, problem.sym_a.dim);
        a0[(0, 0)] = 1.0;
        problem.join(&a0, &DMatrix::zeros(problem.sym_b.dim, problem.sym_b.dim))
    };
    let stride = 50;
    let mut objective_history = Vec::new();
    let mut residual_history = Vec::new();
    let mut iterations = 0;
    let mut converged = false;
    let mut x = s.clone();
    let mut psd_gap = f64::INFINITY;
    for iter in 0..cfg.solver.max_iters {
        iterations = iter + 1;
        x = problem.prox_quadratic(&s);
        let reflected = &x * 2.0 - &s;
        let y = problem.prox_psd(&reflected);
        let diff = &y - &x;
        let residual = diff.norm();
        s += diff * alpha;
        if iter % stride == 0 {
            objective_history.push(problem.objective(&x));
            residual_history.push(residual);
        }
        psd_gap = residual;
        if residual <= cfg.solver.abs_tol + cfg.solver.rel_tol * x.norm() {
            converged = true;
            break;
        }
    }

    let (a_raw, b_raw) = problem.split(&x);
    // The exit iterate satisfies the affine constraints exactly; symmetrize
    // and report its PSD violation through the eigenvalue spectra.
    let a_mat = (&a_raw + a_raw.transpose()) * 0.5;
    let b_mat = (&b_raw + b_raw.transpose()) * 0.5;
    let eig_a = a_mat.clone().symmetric_eigen();
    let eig_b = b_mat.clone().symmetric_eigen();
    let mut eigenvalues_a: Vec<f64> = eig_a.eigenvalues.iter().copied().collect();
    let mut eigenvalues_b: Vec<f64> = eig_b.eigenvalues.iter().copied().collect();
    eigenvalues_a.sort_by(f64::total_cmp);
    eigenvalues_b.sort_by(f64::total_cmp);
    let dominance = |eigs: &[f64]| -> f64 {
        let total: f64 = eigs.iter().map(|&e| e.max(0.0)).sum();
        if total > 0.0 {
            eigs.iter().fold(0.0f64, |m, &e| m.max(e)) / total
        } else {
            0.0
        }
    };
    let dominance_a = dominance(&eigenvalues_a);
    let dominance_b = dominance(&eigenvalues_b);

    let b_trace = b_mat.trace();
    let degenerate = b_trace <= 1e-12 * (1.0 + a_mat.trace());

    let status = if degenerate {
        FitStatus::Degenerate
    } else if converged {
        FitStatus::Converged
    } else {
        log::warn!(
            "fit did not converge in {iterations} iterations (residual {psd_gap:.3e})"
        );
        FitStatus::MaxIters
    };

    let (a_ext, zeta) = if degenerate {
        let a_ext = extract_a_ext(&a_mat)?;
        let zeta = ArmaParams::new(
            *orders,
            strip_p0_block(&a_ext, orders),
            DVector::zeros(orders.b_len()),
        )?;
        (a_ext, zeta)
    } else {
        let (a_ext, _) = rank1_extract(&a_mat, Rank1Kind::A)?;
        let (b_vec, _) = rank1_extract(&b_mat, Rank1Kind::B)?;
        let zeta = ArmaParams::new(*orders, strip_p0_block(&a_ext, orders), b_vec)?;
        (a_ext, zeta)
    };

    let diagnostics = FitDiagnostics {
        status,
        iterations,
        objective: problem.objective(&x),
        objective_history,
        objective_stride: stride,
        residual_history,
        final_residual: psd_gap,
        psd_gap,
        eigenvalues_a,
        eigenvalues_b,
        dominance_a,
        dominance_b,
        mu_a_effective: mu_a,
        mu_b_effective: mu_b,
        gamma: problem.gamma,
        wall_time_secs: start.elapsed().as_secs_f64(),
    };

    Ok(FitResult { a_mat, b_mat, a_ext, zeta, diagnostics })
}

/// Which coefficient block a rank-1 extraction targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rank1Kind {
    /// Extended a: rescale so the a_00 slot equals 1.
    A,
    /// b: fix the sign so the largest-magnitude entry is positive (b and -b
    /// produce the same JPSD).
    B,
}

/// Recover a coefficient vector from a (near) rank-1 PSD matrix via its top
/// eigenpair. Returns the vector and the rank-1 dominance ratio
/// `sigma_1 / sum_i max(sigma_i, 0)`.
pub fn rank1_extract(mat: &DMatrix<f64>, kind: Rank1Kind) -> Result<(DVector<f64>, f64)> {
    let sym = (mat + mat.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    let mut top = 0;
    for i in 1..eig.eigenvalues.len() {
        if eig.eigenvalues[i] > eig.eigenvalues[top] {
            top = i;
        }
    }
    let sigma1 = eig.eigenvalues[top];
    if sigma1 <= 0.0 {
        return Err(JsArmaError::DegenerateModel(format!(
            "top eigenvalue {sigma1:.3e} is not positive"
        )));
    }
    let total: f64 = eig.eigenvalues.iter().map(|&e| e.max(0.0)).sum();
    let dominance = sigma1 / total;
    let mut vec = eig.eigenvectors.column(top) * sigma1.sqrt();
    match kind {
        Rank1Kind::A => {
            if vec[0].abs() <= 1e-10 * vec.norm() {
                return Err(JsArmaError::DegenerateModel(
                    "a_00 slot of the extracted vector is numerically zero".into(),
                ));
            }
            let scale = vec[0];
            vec /= scale;
        }
        Rank1Kind::B => {
            let mut pivot = 0;
            for i in 1..vec.len() {
                if vec[i].abs() > vec[pivot].abs() {
                    pivot = i;
                }
            }
            if vec[pivot] < 0.0 {
                vec.neg_mut();
            }
        }
    }
    Ok((vec, dominance))
}

fn extract_a_ext(a_mat: &DMatrix<f64>) -> Result<DVector<f64>> {
    let (a_ext, _) = rank1_extract(a_mat, Rank1Kind::A)?;
    Ok(a_ext)
}

/// Drop the p = 0 block (the first K+1 entries, pinned to (1, 0, ..., 0)) of
/// an extended a vector, leaving the original-form coefficients.
fn strip_p0_block(a_ext: &DVector<f64>, orders: &ModelOrders) -> DVector<f64> {
    a_ext.rows(orders.k + 1, orders.a_len()).clone_owned()
}

#[cfg(feature = "oracle")]
pub mod reference;
