//! Shared fixtures for the benchmarks.

use nalgebra::{DMatrix, DVector};

use jsarma::graph::{self, GraphSpectrum};
use jsarma::spectral::{dft_basis, ArmaParams, ModelOrders, TimeBasis};

/// Deterministic ring-of-cliques style weight matrix: a cycle with weight 0.9
/// plus second-neighbor edges with weight 0.3, scaled to keep the Laplacian
/// spectrum below the stability threshold of the benchmark process.
pub fn bench_graph(n: usize) -> GraphSpectrum {
    let mut w = DMatrix::zeros(n, n);
    for i in 0..n {
        let j = (i + 1) % n;
        w[(i, j)] = 0.45;
        w[(j, i)] = 0.45;
        let k = (i + 2) % n;
        if k != i {
            w[(i, k)] = 0.15;
            w[(k, i)] = 0.15;
        }
    }
    let g = graph::Graph::from_weights(w).expect("valid weights");
    graph::spectrum_of(&g).expect("symmetric Laplacian")
}

pub fn bench_basis(t: usize) -> TimeBasis {
    dft_basis(t).expect("valid length")
}

/// The standard synthetic test process.
pub fn bench_params() -> ArmaParams {
    ArmaParams::new(
        ModelOrders::new(1, 1, 1, 0).expect("valid orders"),
        DVector::from_row_slice(&[-0.5, 0.5]),
        DVector::from_row_slice(&[0.5, 0.5]),
    )
    .expect("valid parameters")
}
