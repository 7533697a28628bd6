//! Shared fixtures for the integration tests.

use nalgebra::{DMatrix, DVector};

use jsarma::graph::{self, GraphSpectrum};
use jsarma::spectral::{dft_basis, ArmaParams, ModelOrders, TimeBasis};

/// Ring graph with first/second-neighbor weights; keeps the Laplacian
/// spectrum well below the recursion pole of the standard test process
/// (lambda = 3 for `vi_a1_params`).
pub fn ring_spectrum(n: usize) -> GraphSpectrum {
    let mut w = DMatrix::zeros(n, n);
    for i in 0..n {
        let j = (i + 1) % n;
        w[(i, j)] = 0.45;
        w[(j, i)] = 0.45;
        if n > 4 {
            let k = (i + 2) % n;
            w[(i, k)] = 0.15;
            w[(k, i)] = 0.15;
        }
    }
    let g = graph::Graph::from_weights(w).expect("valid ring weights");
    graph::spectrum_of(&g).expect("symmetric Laplacian")
}

pub fn basis(t: usize) -> TimeBasis {
    dft_basis(t).expect("valid DFT length")
}

/// The standard ground-truth process: orders (P, K, Q, M) = (1, 1, 1, 0),
/// a = [-0.5, 0.5], b = [0.5, 0.5].
pub fn vi_a1_params() -> ArmaParams {
    ArmaParams::new(
        ModelOrders::new(1, 1, 1, 0).expect("valid orders"),
        DVector::from_row_slice(&[-0.5, 0.5]),
        DVector::from_row_slice(&[0.5, 0.5]),
    )
    .expect("valid parameters")
}
