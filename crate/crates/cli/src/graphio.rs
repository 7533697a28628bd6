//! Graph construction from the configured input source.

use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use jsarma::graph::{self, Graph};
use jsarma::{JsArmaError, Result};

use crate::config::GraphConfig;

/// Build the graph from coordinates, a distance matrix, or a synthetic
/// random-geometric layout, per the config.
pub fn build_graph(cfg: &GraphConfig) -> Result<Graph> {
    let sources = [cfg.coordinates.is_some(), cfg.distances.is_some(), cfg.synthetic_nodes.is_some()];
    if sources.iter().filter(|&&s| s).count() != 1 {
        return Err(JsArmaError::Config(
            "exactly one of graph.coordinates, graph.distances, graph.synthetic_nodes must be set"
                .into(),
        ));
    }
    if let Some(path) = &cfg.coordinates {
        let coords = jsarma::io::read_coordinates_csv(path)?;
        let points: Vec<Vec<f64>> =
            (0..coords.nrows()).map(|i| coords.row(i).iter().copied().collect()).collect();
        let sigma = cfg.sigma.map_or_else(|| sigma_heuristic_points(&points, cfg.knn_k), Ok)?;
        return graph::build_knn_graph(&points, cfg.knn_k, sigma);
    }
    if let Some(path) = &cfg.distances {
        let dist = jsarma::io::read_distance_matrix_csv(path)?;
        let sq = dist.map(|d| d * d);
        let sigma = cfg.sigma.map_or_else(|| sigma_heuristic_sq(&sq, cfg.knn_k), Ok)?;
        return graph::knn_graph_from_sq_distances(&sq, cfg.knn_k, sigma);
    }
    let n = cfg.synthetic_nodes.unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.synthetic_seed);
    let points: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            vec![
                rng.random_range(0.0..cfg.synthetic_scale),
                rng.random_range(0.0..cfg.synthetic_scale),
            ]
        })
        .collect();
    let sigma = cfg.sigma.map_or_else(|| sigma_heuristic_points(&points, cfg.knn_k), Ok)?;
    graph::build_knn_graph(&points, cfg.knn_k, sigma)
}

/// Mean k-NN distance over all nodes — a standard kernel-width heuristic.
fn sigma_heuristic_points(points: &[Vec<f64>], k: usize) -> Result<f64> {
    let n = points.len();
    let sq = DMatrix::from_fn(n, n, |i, j| {
        points[i]
            .iter()
            .zip(&points[j])
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
    });
    sigma_heuristic_sq(&sq, k)
}

fn sigma_heuristic_sq(sq: &DMatrix<f64>, k: usize) -> Result<f64> {
    let n = sq.nrows();
    if k == 0 || k >= n {
        return Err(JsArmaError::InvalidParameter(format!(
            "knn_k must be in [1, {}), got {k}",
            n
        )));
    }
    let mut acc = 0.0;
    for i in 0..n {
        let mut d: Vec<f64> = (0..n).filter(|&j| j != i).map(|j| sq[(i, j)].sqrt()).collect();
        d.sort_by(f64::total_cmp);
        acc += d[..k].iter().sum::<f64>() / k as f64;
    }
    let sigma = acc / n as f64;
    if sigma <= 0.0 {
        // all points coincide; any positive width yields weight-1 edges
        return Ok(1.0);
    }
    Ok(sigma)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn synthetic_graph_is_deterministic() {
        let cfg = GraphConfig { synthetic_nodes: Some(10), ..GraphConfig::default() };
        let g1 = build_graph(&cfg).unwrap();
        let g2 = build_graph(&cfg).unwrap();
        assert_eq!(g1.weights(), g2.weights());
        assert_eq!(g1.n_nodes(), 10);
    }

    #[test]
    fn exactly_one_source_required() {
        let none = GraphConfig::default();
        assert!(build_graph(&none).is_err());
        let both = GraphConfig {
            synthetic_nodes: Some(5),
            coordinates: Some("x.csv".into()),
            ..GraphConfig::default()
        };
        assert!(build_graph(&both).is_err());
    }
}
