//! Graph construction, Laplacian assembly and the graph Fourier basis.

use nalgebra::{DMatrix, DVector};

use crate::error::{JsArmaError, Result};

/// Weighted undirected graph with nonnegative edge weights and zero diagonal.
#[derive(Debug, Clone)]
pub struct Graph {
    n_nodes: usize,
    weights: DMatrix<f64>,
}

impl Graph {
    /// Build a graph from a weight matrix, validating symmetry, nonnegativity
    /// and a zero diagonal.
    pub fn from_weights(weights: DMatrix<f64>) -> Result<Self> {
        let n = weights.nrows();
        if weights.ncols() != n || n == 0 {
            return Err(JsArmaError::InvalidGraph(format!(
                "weight matrix must be square and non-empty, got {}x{}",
                weights.nrows(),
                weights.ncols()
            )));
        }
        for i in 0..n {
            if weights[(i, i)] != 0.0 {
                return Err(JsArmaError::InvalidGraph(format!(
                    "nonzero diagonal entry W[{i},{i}] = {}",
                    weights[(i, i)]
                )));
            }
            for j in 0..i {
                let (wij, wji) = (weights[(i, j)], weights[(j, i)]);
                if wij != wji {
                    return Err(JsArmaError::InvalidGraph(format!(
                        "asymmetric weights W[{i},{j}] = {wij} vs W[{j},{i}] = {wji}"
                    )));
                }
                if wij < 0.0 || !wij.is_finite() {
                    return Err(JsArmaError::InvalidGraph(format!(
                        "invalid weight W[{i},{j}] = {wij}"
                    )));
                }
            }
        }
        Ok(Self { n_nodes: n, weights })
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn weights(&self) -> &DMatrix<f64> {
        &self.weights
    }
}

/// Orthonormal eigendecomposition of a graph Laplacian: the graph Fourier basis.
#[derive(Debug, Clone)]
pub struct GraphSpectrum {
    basis: DMatrix<f64>,
    eigenvalues: DVector<f64>,
}

impl GraphSpectrum {
    pub fn n_nodes(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Orthonormal basis U_G; column n is the eigenvector for `eigenvalues()[n]`.
    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    /// Laplacian eigenvalues, ascending.
    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.eigenvalues
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues[self.eigenvalues.len() - 1]
    }
}

/// Build a k-nearest-neighbor graph with Gaussian edge weights
/// `W[i,j] = exp(-||v_i - v_j||^2 / sigma^2)`.
///
/// Symmetrization is by union: an edge is present if either endpoint counts
/// the other among its k nearest neighbors.
pub fn build_knn_graph(points: &[Vec<f64>], k: usize, sigma: f64) -> Result<Graph> {
    let n = points.len();
    if n == 0 {
        return Err(JsArmaError::InvalidParameter("no points given".into()));
    }
    if k == 0 || k >= n {
        return Err(JsArmaError::InvalidParameter(format!(
            "k must satisfy 1 <= k < N, got k={k}, N={n}"
        )));
    }
    if !(sigma > 0.0) {
        return Err(JsArmaError::InvalidParameter(format!(
            "sigma must be positive, got {sigma}"
        )));
    }
    if k >= n - 1 {
        log::warn!("k = {k} >= N-1 = {}; k-NN graph degenerates to the complete graph", n - 1);
    }
    let dim = points[0].len();
    if points.iter().any(|p| p.len() != dim) {
        return Err(JsArmaError::DimensionMismatch(
            "points have inconsistent dimensions".into(),
        ));
    }

    let mut sq_dist = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let d2: f64 = points[i]
                .iter()
                .zip(&points[j])
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            sq_dist[(i, j)] = d2;
            sq_dist[(j, i)] = d2;
        }
    }
    knn_graph_from_sq_distances(&sq_dist, k, sigma)
}

/// Build a k-NN Gaussian-weight graph from a precomputed squared-distance
/// matrix. Used for datasets that ship a distance matrix instead of node
/// coordinates.
pub fn knn_graph_from_sq_distances(sq_dist: &DMatrix<f64>, k: usize, sigma: f64) -> Result<Graph> {
    let n = sq_dist.nrows();
    if sq_dist.ncols() != n {
        return Err(JsArmaError::DimensionMismatch(
            "distance matrix must be square".into(),
        ));
    }
    if k == 0 || k >= n {
        return Err(JsArmaError::InvalidParameter(format!(
            "k must satisfy 1 <= k < N, got k={k}, N={n}"
        )));
    }
    let mut weights = DMatrix::zeros(n, n);
    for i in 0..n {
        let mut order: Vec<usize> = (0..n).filter(|&j| j != i).collect();
        order.sort_by(|&a, &b| sq_dist[(i, a)].total_cmp(&sq_dist[(i, b)]));
        for &j in order.iter().take(k) {
            let w = (-sq_dist[(i, j)] / (sigma * sigma)).exp();
            weights[(i, j)] = w;
            weights[(j, i)] = w;
        }
    }
    Graph::from_weights(weights)
}

/// Combinatorial Laplacian L = D - W.
pub fn laplacian(g: &Graph) -> DMatrix<f64> {
    let n = g.n_nodes();
    let w = g.weights();
    let mut lap = -w.clone();
    for i in 0..n {
        lap[(i, i)] = w.row(i).sum();
    }
    lap
}

/// Symmetric eigendecomposition of a Laplacian with a deterministic sign
/// convention: each eigenvector is flipped so its largest-magnitude entry is
/// positive.
pub fn eigendecompose(lap: &DMatrix<f64>) -> Result<GraphSpectrum> {
    let n = lap.nrows();
    if lap.ncols() != n {
        return Err(JsArmaError::DimensionMismatch("Laplacian must be square".into()));
    }
    let mut max_asym: f64 = 0.0;
    for i in 0..n {
        for j in 0..i {
            max_asym = max_asym.max((lap[(i, j)] - lap[(j, i)]).abs());
        }
    }
    if max_asym > 1e-10 {
        return Err(JsArmaError::NotSymmetric { max_asym, tol: 1e-10 });
    }

    let sym = (lap + lap.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let mut basis = DMatrix::zeros(n, n);
    let mut eigenvalues = DVector::zeros(n);
    for (col, &idx) in order.iter().enumerate() {
        eigenvalues[col] = eig.eigenvalues[idx];
        let mut v = eig.eigenvectors.column(idx).clone_owned();
        let mut pivot = 0;
        for i in 1..n {
            if v[i].abs() > v[pivot].abs() {
                pivot = i;
            }
        }
        if v[pivot] < 0.0 {
            v.neg_mut();
        }
        basis.set_column(col, &v);
    }
    Ok(GraphSpectrum { basis, eigenvalues })
}

/// Convenience: Laplacian plus eigendecomposition of a graph.
pub fn spectrum_of(g: &Graph) -> Result<GraphSpectrum> {
    eigendecompose(&laplacian(g))
}
