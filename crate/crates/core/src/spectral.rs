//! Time Fourier basis, joint Fourier transform, joint Laplacian, ARMA joint
//! frequency response and JPSD evaluation.
//!
//! Conventions: the DFT matrix follows `U_T[t, tau] = e^{j w_tau t} / sqrt(T)`
//! with `t, tau` running from 1 (zero-based storage maps `t = index + 1`).
//! Vectorization of an N x T signal is column-stacking (node-fastest), so the
//! joint index is `i = (tau - 1) N + n` and `U_J = U_T (x) U_G`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{JsArmaError, Result};
use crate::graph::GraphSpectrum;

/// Normalized DFT basis for signals of length T.
#[derive(Debug, Clone)]
pub struct TimeBasis {
    length: usize,
    basis: DMatrix<Complex64>,
    frequencies: DVector<f64>,
}

impl TimeBasis {
    pub fn length(&self) -> usize {
        self.length
    }

    /// Unitary DFT matrix U_T.
    pub fn basis(&self) -> &DMatrix<Complex64> {
        &self.basis
    }

    /// Angular frequencies `w_tau = 2 pi (tau - 1) / T` in radians/sample.
    pub fn frequencies(&self) -> &DVector<f64> {
        &self.frequencies
    }
}

/// Build the normalized DFT basis of size T.
pub fn dft_basis(t_len: usize) -> Result<TimeBasis> {
    if t_len == 0 {
        return Err(JsArmaError::InvalidParameter("T must be >= 1".into()));
    }
    let scale = 1.0 / (t_len as f64).sqrt();
    let frequencies =
        DVector::from_fn(t_len, |tau, _| 2.0 * std::f64::consts::PI * tau as f64 / t_len as f64);
    let basis = DMatrix::from_fn(t_len, t_len, |ti, tau| {
        // one-based time index inside the exponent
        let t = (ti + 1) as f64;
        Complex64::from_polar(scale, frequencies[tau] * t)
    });
    Ok(TimeBasis { length: t_len, basis, frequencies })
}

/// Wrap a frequency into (-pi, pi].
pub fn wrapped_frequency(omega: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut w = omega % two_pi;
    if w > std::f64::consts::PI {
        w -= two_pi;
    } else if w <= -std::f64::consts::PI {
        w += two_pi;
    }
    w
}

/// ARMA model orders (P, K, Q, M).
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct ModelOrders {
    pub p: usize,
    pub k: usize,
    pub q: usize,
    pub m: usize,
}

impl ModelOrders {
    pub fn new(p: usize, k: usize, q: usize, m: usize) -> Result<Self> {
        if p < 1 {
            return Err(JsArmaError::InvalidParameter("P must be >= 1".into()));
        }
        Ok(Self { p, k, q, m })
    }

    /// Length of the original-form a vector, P(K+1).
    pub fn a_len(&self) -> usize {
        self.p * (self.k + 1)
    }

    /// Length of the extended a vector, (P+1)(K+1).
    pub fn a_ext_len(&self) -> usize {
        (self.p + 1) * (self.k + 1)
    }

    /// Length of the b vector, (Q+1)(M+1).
    pub fn b_len(&self) -> usize {
        (self.q + 1) * (self.m + 1)
    }

    /// Model order d = P(K+1) + (Q+1)(M+1).
    pub fn d(&self) -> usize {
        self.a_len() + self.b_len()
    }
}

/// ARMA filter coefficients in the original form: `a` holds a_pk for
/// p = 1..P, k = 0..K (p-major) and `b` holds b_qm for q = 0..Q, m = 0..M
/// (q-major).
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ArmaParams {
    pub orders: ModelOrders,
    pub a: DVector<f64>,
    pub b: DVector<f64>,
}

impl ArmaParams {
    pub fn new(orders: ModelOrders, a: DVector<f64>, b: DVector<f64>) -> Result<Self> {
        if a.len() != orders.a_len() {
            return Err(JsArmaError::DimensionMismatch(format!(
                "a has length {}, expected P(K+1) = {}",
                a.len(),
                orders.a_len()
            )));
        }
        if b.len() != orders.b_len() {
            return Err(JsArmaError::DimensionMismatch(format!(
                "b has length {}, expected (Q+1)(M+1) = {}",
                b.len(),
                orders.b_len()
            )));
        }
        if !a.iter().chain(b.iter()).all(|x| x.is_finite()) {
            return Err(JsArmaError::InvalidParameter("non-finite coefficient".into()));
        }
        Ok(Self { orders, a, b })
    }

    /// Coefficient a_pk (p in 1..=P, k in 0..=K).
    pub fn a_coef(&self, p: usize, k: usize) -> f64 {
        self.a[(p - 1) * (self.orders.k + 1) + k]
    }

    /// Coefficient b_qm (q in 0..=Q, m in 0..=M).
    pub fn b_coef(&self, q: usize, m: usize) -> f64 {
        self.b[q * (self.orders.m + 1) + m]
    }

    /// Stacked parameter vector zeta = [a; b] of length d.
    pub fn zeta(&self) -> DVector<f64> {
        let mut z = DVector::zeros(self.orders.d());
        z.rows_mut(0, self.a.len()).copy_from(&self.a);
        z.rows_mut(self.a.len(), self.b.len()).copy_from(&self.b);
        z
    }

    pub fn from_zeta(orders: ModelOrders, zeta: &DVector<f64>) -> Result<Self> {
        if zeta.len() != orders.d() {
            return Err(JsArmaError::DimensionMismatch(format!(
                "zeta has length {}, expected d = {}",
                zeta.len(),
                orders.d()
            )));
        }
        let a = zeta.rows(0, orders.a_len()).clone_owned();
        let b = zeta.rows(orders.a_len(), orders.b_len()).clone_owned();
        Self::new(orders, a, b)
    }
}

/// Joint power spectral density over the (lambda_n, omega_tau) grid,
/// stored node-fastest: `values[(tau-1) N + n] = h(lambda_n, omega_tau)`.
#[derive(Debug, Clone)]
pub struct Jpsd {
    values: DVector<f64>,
    n_nodes: usize,
    n_times: usize,
    /// True when the values come from sample estimation and may carry small
    /// negative entries.
    from_samples: bool,
}

impl Jpsd {
    pub fn from_model(values: DVector<f64>, n_nodes: usize, n_times: usize) -> Result<Self> {
        Self::build(values, n_nodes, n_times, false)
    }

    pub fn from_samples(values: DVector<f64>, n_nodes: usize, n_times: usize) -> Result<Self> {
        Self::build(values, n_nodes, n_times, true)
    }

    fn build(values: DVector<f64>, n_nodes: usize, n_times: usize, from_samples: bool) -> Result<Self> {
        if values.len() != n_nodes * n_times {
            return Err(JsArmaError::DimensionMismatch(format!(
                "JPSD vector has length {}, expected NT = {}",
                values.len(),
                n_nodes * n_times
            )));
        }
        if !from_samples {
            if let Some(i) = values.iter().position(|&v| v < 0.0) {
                return Err(JsArmaError::NegativeJpsd { index: i, value: values[i] });
            }
        }
        Ok(Self { values, n_nodes, n_times, from_samples })
    }

    pub fn values(&self) -> &DVector<f64> {
        &self.values
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn n_times(&self) -> usize {
        self.n_times
    }

    pub fn is_from_samples(&self) -> bool {
        self.from_samples
    }

    /// Value at graph frequency index n and time frequency index tau (zero-based).
    pub fn get(&self, n: usize, tau: usize) -> f64 {
        self.values[tau * self.n_nodes + n]
    }

    /// N x T matrix view of the JPSD (column tau holds the graph spectrum at
    /// frequency omega_tau).
    pub fn as_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_column_slice(self.n_nodes, self.n_times, self.values.as_slice())
    }

    /// Clamp all entries below `floor` up to `floor`, producing a model-grade
    /// (nonnegative) JPSD.
    pub fn clamped(&self, floor: f64) -> Jpsd {
        let values = self.values.map(|v| v.max(floor));
        Jpsd { values, n_nodes: self.n_nodes, n_times: self.n_times, from_samples: false }
    }
}

/// Joint Fourier basis U_J = U_T (x) U_G.
pub fn joint_basis(gs: &GraphSpectrum, tb: &TimeBasis) -> DMatrix<Complex64> {
    let ug_c = gs.basis().map(|x| Complex64::new(x, 0.0));
    tb.basis().kronecker(&ug_c)
}

/// Joint Fourier transform of an N x T signal: `U_G^T X conj(U_T)`.
pub fn jft(x: &DMatrix<f64>, gs: &GraphSpectrum, tb: &TimeBasis) -> Result<DMatrix<Complex64>> {
    if x.nrows() != gs.n_nodes() || x.ncols() != tb.length() {
        return Err(JsArmaError::DimensionMismatch(format!(
            "signal is {}x{}, expected {}x{}",
            x.nrows(),
            x.ncols(),
            gs.n_nodes(),
            tb.length()
        )));
    }
    let gft = gs.basis().transpose() * x;
    let gft_c = gft.map(|v| Complex64::new(v, 0.0));
    Ok(gft_c * tb.basis().conjugate())
}

/// Laplacian of the T-node cycle graph, whose eigenvector matrix is U_T.
pub fn ring_laplacian(t_len: usize) -> DMatrix<f64> {
    let mut lap = DMatrix::zeros(t_len, t_len);
    if t_len == 1 {
        return lap;
    }
    for t in 0..t_len {
        let prev = (t + t_len - 1) % t_len;
        let next = (t + 1) % t_len;
        lap[(t, t)] = 2.0;
        lap[(t, prev)] += -1.0;
        lap[(t, next)] += -1.0;
    }
    lap
}

/// Joint Laplacian `L_J = L_T (x) I_N + I_T (x) L_G`.
pub fn joint_laplacian(lap_g: &DMatrix<f64>, t_len: usize) -> DMatrix<f64> {
    let n = lap_g.nrows();
    let lap_t = ring_laplacian(t_len);
    let eye_n = DMatrix::<f64>::identity(n, n);
    let eye_t = DMatrix::<f64>::identity(t_len, t_len);
    lap_t.kronecker(&eye_n) + eye_t.kronecker(lap_g)
}

/// Which parameterization the (u, v) coefficient vectors target.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UvForm {
    /// v of length P(K+1), pairing with the original a (denominator 1 + a^H v).
    Original,
    /// v of length (P+1)(K+1) including the p = 0 block, pairing with the
    /// extended a (a_00 = 1, a_0k = 0).
    Extended,
}

/// Constant coefficient vectors (u, v) at a grid point: entries are
/// `conj(lambda^k e^{j omega p})` for v and `conj(lambda^m e^{j omega q})` for u,
/// in the same ordering as the a and b coefficient vectors.
pub fn uv_vectors(
    lambda: f64,
    omega: f64,
    orders: &ModelOrders,
    form: UvForm,
) -> (DVector<Complex64>, DVector<Complex64>) {
    let lam_pow = |k: usize| -> f64 {
        // 0^0 = 1 by the polynomial convention
        if k == 0 { 1.0 } else { lambda.powi(k as i32) }
    };
    let p_start = match form {
        UvForm::Original => 1,
        UvForm::Extended => 0,
    };
    let v_len = (orders.p + 1 - p_start) * (orders.k + 1);
    let mut v = DVector::from_element(v_len, Complex64::default());
    let mut idx = 0;
    for p in p_start..=orders.p {
        for k in 0..=orders.k {
            v[idx] = Complex64::from_polar(lam_pow(k), omega * p as f64).conj();
            idx += 1;
        }
    }
    let mut u = DVector::from_element(orders.b_len(), Complex64::default());
    idx = 0;
    for q in 0..=orders.q {
        for m in 0..=orders.m {
            u[idx] = Complex64::from_polar(lam_pow(m), omega * q as f64).conj();
            idx += 1;
        }
    }
    (u, v)
}

/// Magnitude below which the denominator `1 + a^H v` counts as a pole.
pub const POLE_TOL: f64 = 1e-12;

/// Joint frequency response `H(lambda, omega) = (b^H u) / (1 + a^H v)`.
pub fn arma_freq_response(zeta: &ArmaParams, lambda: f64, omega: f64) -> Result<Complex64> {
    let (u, v) = uv_vectors(lambda, omega, &zeta.orders, UvForm::Original);
    let num: Complex64 = zeta.b.iter().zip(u.iter()).map(|(&bi, &ui)| bi * ui).sum();
    let den: Complex64 = Complex64::new(1.0, 0.0)
        + zeta.a.iter().zip(v.iter()).map(|(&ai, &vi)| ai * vi).sum::<Complex64>();
    if den.norm() < POLE_TOL {
        return Err(JsArmaError::Pole { lambda, omega, magnitude: den.norm() });
    }
    Ok(num / den)
}

/// JPSD of the ARMA process on the (lambda_n, omega_tau) grid:
/// `h[i] = |H(lambda_n, omega_tau)|^2` with `i = (tau-1) N + n`.
pub fn jpsd_of(zeta: &ArmaParams, gs: &GraphSpectrum, tb: &TimeBasis) -> Result<Jpsd> {
    let n = gs.n_nodes();
    let t = tb.length();
    let mut values = DVector::zeros(n * t);
    for tau in 0..t {
        let omega = tb.frequencies()[tau];
        for ni in 0..n {
            let h = arma_freq_response(zeta, gs.eigenvalues()[ni], omega)?;
            values[tau * n + ni] = h.norm_sqr();
        }
    }
    Jpsd::from_model(values, n, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{self, Graph};
    use approx::assert_abs_diff_eq;
    use nalgebra::dmatrix;

    pub(crate) fn vi_a1_params() -> ArmaParams {
        let orders = ModelOrders::new(1, 1, 1, 0).unwrap();
        ArmaParams::new(
            orders,
            DVector::from_row_slice(&[-0.5, 0.5]),
            DVector::from_row_slice(&[0.5, 0.5]),
        )
        .unwrap()
    }

    fn random_spectrum(n: usize, seed: u64) -> GraphSpectrum {
        let mut state = seed;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        let pts: Vec<Vec<f64>> = (0..n).map(|_| vec![next(), next()]).collect();
        let g = graph::build_knn_graph(&pts, 2.min(n - 1).max(1), 0.5).unwrap();
        graph::spectrum_of(&g).unwrap()
    }

    #[test]
    fn dft_t1_is_scalar_one() {
        let tb = dft_basis(1).unwrap();
        assert_abs_diff_eq!(tb.basis()[(0, 0)].re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(tb.basis()[(0, 0)].im, 0.0, epsilon = 1e-15);
        assert_eq!(tb.frequencies()[0], 0.0);
    }

    #[test]
    fn dft_t2_columns() {
        // t = 1, 2; omega_2 = pi. Column 0: e^{j0}/sqrt2 = [1, 1]/sqrt2.
        // Column 1: [e^{j pi}, e^{j 2 pi}]/sqrt2 = [-1, 1]/sqrt2.
        let tb = dft_basis(2).unwrap();
        let s = 1.0 / 2f64.sqrt();
        let expected_re = [[s, -s], [s, s]]; // [t][tau]
        for ti in 0..2 {
            for tau in 0..2 {
                assert_abs_diff_eq!(tb.basis()[(ti, tau)].re, expected_re[ti][tau], epsilon = 1e-14);
                assert_abs_diff_eq!(tb.basis()[(ti, tau)].im, 0.0, epsilon = 1e-14);
            }
        }
        assert_abs_diff_eq!(tb.frequencies()[1], std::f64::consts::PI, epsilon = 1e-15);
    }

    #[test]
    fn dft_unitary_up_to_64() {
        for t in [3, 8, 17, 64] {
            let tb = dft_basis(t).unwrap();
            let gram = tb.basis().adjoint() * tb.basis();
            let eye = DMatrix::<Complex64>::identity(t, t);
            assert!((gram - eye).norm() <= 1e-10, "T = {t}");
        }
    }

    #[test]
    fn joint_basis_degenerate_factors() {
        let gs1 = graph::eigendecompose(&DMatrix::zeros(1, 1)).unwrap();
        let tb = dft_basis(4).unwrap();
        let uj = joint_basis(&gs1, &tb);
        assert!((uj - tb.basis()).norm() <= 1e-14);

        let gs = random_spectrum(3, 7);
        let tb1 = dft_basis(1).unwrap();
        let uj = joint_basis(&gs, &tb1);
        let ug_c = gs.basis().map(|x| Complex64::new(x, 0.0));
        assert!((uj - ug_c).norm() <= 1e-14);
    }

    #[test]
    fn joint_basis_unitary() {
        let gs = random_spectrum(3, 11);
        let tb = dft_basis(4).unwrap();
        let uj = joint_basis(&gs, &tb);
        let x = DVector::from_fn(12, |i, _| Complex64::new((i as f64 * 0.77).sin(), 0.0));
        let xf = uj.adjoint() * &x;
        assert_abs_diff_eq!(xf.norm(), x.norm(), epsilon = 1e-10);
    }

    #[test]
    fn jft_of_zero_is_zero() {
        let gs = random_spectrum(4, 3);
        let tb = dft_basis(8).unwrap();
        let xf = jft(&DMatrix::zeros(4, 8), &gs, &tb).unwrap();
        assert!(xf.norm() <= 1e-15);
    }

    #[test]
    fn jft_constant_concentrates_at_dc() {
        let n = 4;
        let t = 8;
        let pts: Vec<Vec<f64>> = (0..n).map(|i| vec![i as f64, 0.1 * i as f64]).collect();
        let g = graph::build_knn_graph(&pts, 2, 2.0).unwrap();
        let gs = graph::spectrum_of(&g).unwrap();
        let tb = dft_basis(t).unwrap();
        let c = 2.5;
        let x = DMatrix::from_element(n, t, c);
        let xf = jft(&x, &gs, &tb).unwrap();
        let dc = xf[(0, 0)];
        assert_abs_diff_eq!(dc.norm(), c * (n as f64 * t as f64).sqrt(), epsilon = 1e-9);
        let mut rest = 0.0;
        for tau in 0..t {
            for ni in 0..n {
                if (ni, tau) != (0, 0) {
                    rest += xf[(ni, tau)].norm_sqr();
                }
            }
        }
        assert!(rest.sqrt() <= 1e-9);
    }

    #[test]
    fn jft_parseval() {
        let gs = random_spectrum(4, 19);
        let tb = dft_basis(8).unwrap();
        let x = DMatrix::from_fn(4, 8, |i, j| ((i * 8 + j) as f64 * 0.37).sin());
        let xf = jft(&x, &gs, &tb).unwrap();
        assert_abs_diff_eq!(xf.norm(), x.norm(), epsilon = 1e-10);
    }

    #[test]
    fn jft_matches_vectorized_form() {
        let gs = random_spectrum(3, 23);
        let tb = dft_basis(4).unwrap();
        let x = DMatrix::from_fn(3, 4, |i, j| ((i + 2 * j) as f64 * 0.91).cos());
        let xf = jft(&x, &gs, &tb).unwrap();
        let uj = joint_basis(&gs, &tb);
        let xbar = DVector::from_column_slice(x.as_slice()).map(|v| Complex64::new(v, 0.0));
        let xf_vec = uj.adjoint() * xbar;
        for tau in 0..4 {
            for n in 0..3 {
                let d = xf[(n, tau)] - xf_vec[tau * 3 + n];
                assert!(d.norm() <= 1e-10);
            }
        }
    }

    #[test]
    fn joint_laplacian_degenerate_factors() {
        let gs = random_spectrum(3, 5);
        let lap_g = gs.basis() * DMatrix::from_diagonal(gs.eigenvalues()) * gs.basis().transpose();
        assert!((joint_laplacian(&lap_g, 1) - &lap_g).norm() <= 1e-12);
        let lap_1 = DMatrix::zeros(1, 1);
        assert!((joint_laplacian(&lap_1, 4) - ring_laplacian(4)).norm() <= 1e-12);
    }

    #[test]
    fn joint_laplacian_diagonalized_by_joint_basis() {
        let n = 3;
        let t = 4;
        let gs = random_spectrum(n, 13);
        let lap_g = gs.basis() * DMatrix::from_diagonal(gs.eigenvalues()) * gs.basis().transpose();
        let lj = joint_laplacian(&lap_g, t);
        let uj = joint_basis(&gs, &dft_basis(t).unwrap());
        let lj_c = lj.map(|x| Complex64::new(x, 0.0));
        let diag = uj.adjoint() * lj_c * &uj;
        let mut off = 0.0;
        let mut total = 0.0;
        for i in 0..n * t {
            for j in 0..n * t {
                let e = diag[(i, j)].norm_sqr();
                total += e;
                if i != j {
                    off += e;
                }
            }
        }
        assert!((off / total).sqrt() <= 1e-8);
    }

    #[test]
    fn uv_at_zero_frequency() {
        let orders = ModelOrders::new(1, 1, 0, 0).unwrap();
        let (_, v) = uv_vectors(0.0, 0.0, &orders, UvForm::Original);
        assert_abs_diff_eq!(v[0].re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(v[1].re, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn uv_hand_evaluated() {
        let orders = ModelOrders::new(1, 1, 1, 0).unwrap();
        let om = std::f64::consts::FRAC_PI_2;
        let (u, v) = uv_vectors(2.0, om, &orders, UvForm::Original);
        // v = (e^{-j pi/2}, 2 e^{-j pi/2})
        assert_abs_diff_eq!(v[0].re, 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(v[0].im, -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(v[1].re, 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(v[1].im, -2.0, epsilon = 1e-14);
        // u = (1, e^{-j pi/2})
        assert_abs_diff_eq!(u[0].re, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(u[1].im, -1.0, epsilon = 1e-14);
    }

    #[test]
    fn uv_extended_prepends_p0_block() {
        let orders = ModelOrders::new(1, 1, 0, 0).unwrap();
        let (_, v) = uv_vectors(1.7, 0.9, &orders, UvForm::Extended);
        assert_eq!(v.len(), 4);
        assert_abs_diff_eq!(v[0].re, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(v[0].im, 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(v[1].re, 1.7, epsilon = 1e-14);
        assert_abs_diff_eq!(v[1].im, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn pure_ma_response() {
        let orders = ModelOrders::new(1, 0, 1, 0).unwrap();
        let zeta = ArmaParams::new(
            orders,
            DVector::zeros(1),
            DVector::from_row_slice(&[0.3, 0.7]),
        )
        .unwrap();
        let om = 1.1;
        let h = arma_freq_response(&zeta, 0.4, om).unwrap();
        let expected = Complex64::new(0.3, 0.0) + 0.7 * Complex64::from_polar(1.0, -om);
        assert!((h - expected).norm() <= 1e-14);
    }

    #[test]
    fn vi_a1_response_at_dc() {
        let zeta = vi_a1_params();
        let h = arma_freq_response(&zeta, 0.0, 0.0).unwrap();
        assert_abs_diff_eq!(h.re, 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(h.im, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn response_conjugate_symmetry() {
        let zeta = vi_a1_params();
        for (lam, om) in [(0.7, 0.3), (1.9, 2.2), (0.1, -1.0)] {
            let h_pos = arma_freq_response(&zeta, lam, om).unwrap();
            let h_neg = arma_freq_response(&zeta, lam, -om).unwrap();
            assert!((h_neg - h_pos.conj()).norm() <= 1e-13);
        }
    }

    #[test]
    fn jpsd_vi_a1_at_dc_is_four() {
        let g = Graph::from_weights(dmatrix![0.0, 1.0; 1.0, 0.0]).unwrap();
        let gs = graph::spectrum_of(&g).unwrap();
        let tb = dft_basis(4).unwrap();
        let h = jpsd_of(&vi_a1_params(), &gs, &tb).unwrap();
        assert_abs_diff_eq!(h.get(0, 0), 4.0, epsilon = 1e-12);
    }

    #[test]
    fn zero_b_gives_zero_jpsd() {
        let orders = ModelOrders::new(1, 1, 1, 0).unwrap();
        let zeta = ArmaParams::new(
            orders,
            DVector::from_row_slice(&[-0.2, 0.1]),
            DVector::zeros(2),
        )
        .unwrap();
        let gs = random_spectrum(3, 31);
        let tb = dft_basis(4).unwrap();
        let h = jpsd_of(&zeta, &gs, &tb).unwrap();
        assert!(h.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn jpsd_layout_matches_entrywise_evaluation() {
        let zeta = vi_a1_params();
        let gs = random_spectrum(3, 41);
        let tb = dft_basis(5).unwrap();
        let h = jpsd_of(&zeta, &gs, &tb).unwrap();
        let hm = h.as_matrix();
        for tau in 0..5 {
            for n in 0..3 {
                let direct = arma_freq_response(&zeta, gs.eigenvalues()[n], tb.frequencies()[tau])
                    .unwrap()
                    .norm_sqr();
                assert_eq!(hm[(n, tau)], h.get(n, tau));
                assert_abs_diff_eq!(h.get(n, tau), direct, epsilon = 1e-14);
            }
        }
    }
}
