//! Run configuration: JSON files with CLI `--set` overrides.
//!
//! Every command reads an optional JSON config, applies dotted-path overrides
//! (`--set fit.mu_a=0.01`), and echoes the fully resolved configuration into
//! its outputs for provenance.

use std::path::PathBuf;

use serde::{de::DeserializeOwned, Deserialize, Serialize};

use jsarma::fit::{FitConfig, SolverConfig, TraceWeight, WeightFn};
use jsarma::spectral::ModelOrders;
use jsarma::{JsArmaError, Result};

/// Graph input: exactly one of a coordinates CSV, a distance-matrix CSV, or a
/// synthetic random-geometric graph.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GraphConfig {
    pub coordinates: Option<PathBuf>,
    pub distances: Option<PathBuf>,
    /// Node count of a synthetic random-geometric graph (unit square).
    pub synthetic_nodes: Option<usize>,
    pub synthetic_seed: u64,
    /// k of the k-nearest-neighbor construction.
    pub knn_k: usize,
    /// Gaussian kernel width; `null` selects the mean k-NN distance.
    pub sigma: Option<f64>,
    /// Scale factor applied to synthetic coordinates (controls the Laplacian
    /// spectrum; larger scale = weaker weights = smaller eigenvalues).
    pub synthetic_scale: f64,
}

impl Default for GraphConfig {
    fn default() -> Self {
        Self {
            coordinates: None,
            distances: None,
            synthetic_nodes: None,
            synthetic_seed: 1,
            knn_k: 4,
            sigma: None,
            synthetic_scale: 1.0,
        }
    }
}

/// Ground-truth / model process parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProcessConfig {
    pub orders: [usize; 4],
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

impl Default for ProcessConfig {
    fn default() -> Self {
        // the AR(1)-in-time, order-(1,1,1,0) test process
        Self { orders: [1, 1, 1, 0], a: vec![-0.5, 0.5], b: vec![0.5, 0.5] }
    }
}

impl ProcessConfig {
    pub fn orders(&self) -> Result<ModelOrders> {
        ModelOrders::new(self.orders[0], self.orders[1], self.orders[2], self.orders[3])
    }

    pub fn params(&self) -> Result<jsarma::ArmaParams> {
        jsarma::ArmaParams::new(
            self.orders()?,
            nalgebra::DVector::from_vec(self.a.clone()),
            nalgebra::DVector::from_vec(self.b.clone()),
        )
    }
}

/// Fit hyperparameters; trace weights are data-scale-relative when the
/// `*_relative` flag is set.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FitSettings {
    pub mu_a: f64,
    pub mu_a_relative: bool,
    pub mu_b: f64,
    pub mu_b_relative: bool,
    /// "uniform" or "gaussian".
    pub weight: String,
    pub sigma_lambda: f64,
    pub sigma_omega: f64,
    pub max_iters: usize,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub step: Option<f64>,
    pub relaxation: f64,
}

impl Default for FitSettings {
    fn default() -> Self {
        let solver = SolverConfig::default();
        Self {
            mu_a: 1e-3,
            mu_a_relative: true,
            mu_b: 1e-3,
            mu_b_relative: true,
            weight: "uniform".into(),
            sigma_lambda: 1.0,
            sigma_omega: 1.0,
            max_iters: solver.max_iters,
            abs_tol: solver.abs_tol,
            rel_tol: solver.rel_tol,
            step: solver.step,
            relaxation: solver.relaxation,
        }
    }
}

impl FitSettings {
    pub fn to_fit_config(&self) -> Result<FitConfig> {
        let weightfn = match self.weight.as_str() {
            "uniform" => WeightFn::Uniform,
            "gaussian" => WeightFn::Gaussian {
                sigma_lambda: self.sigma_lambda,
                sigma_omega: self.sigma_omega,
            },
            other => {
                return Err(JsArmaError::Config(format!(
                    "unknown weight function `{other}` (expected uniform|gaussian)"
                )))
            }
        };
        let wrap = |v: f64, relative: bool| {
            if relative {
                TraceWeight::RelativeToDataScale(v)
            } else {
                TraceWeight::Absolute(v)
            }
        };
        Ok(FitConfig {
            mu_a: wrap(self.mu_a, self.mu_a_relative),
            mu_b: wrap(self.mu_b, self.mu_b_relative),
            weightfn,
            solver: SolverConfig {
                max_iters: self.max_iters,
                abs_tol: self.abs_tol,
                rel_tol: self.rel_tol,
                step: self.step,
                relaxation: self.relaxation,
            },
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateConfig {
    pub graph: GraphConfig,
    pub process: ProcessConfig,
    pub t: usize,
    pub l: usize,
    pub seed: u64,
    pub missing_ratio: f64,
    /// Signal-to-noise ratio in dB; `null` = noiseless.
    pub snr_db: Option<f64>,
    /// "spectral" (stationary exact synthesis) or "recursion".
    pub generator: String,
    pub burn_in: usize,
    pub out_data: PathBuf,
    pub out_truth: Option<PathBuf>,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        Self {
            graph: GraphConfig { synthetic_nodes: Some(20), ..GraphConfig::default() },
            process: ProcessConfig::default(),
            t: 32,
            l: 64,
            seed: 1,
            missing_ratio: 0.0,
            snr_db: None,
            generator: "spectral".into(),
            burn_in: 200,
            out_data: PathBuf::from("data.csv"),
            out_truth: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FitCmdConfig {
    pub graph: GraphConfig,
    pub data: PathBuf,
    pub orders: [usize; 4],
    pub fit: FitSettings,
    pub subtract_mean: bool,
    pub out_fit: PathBuf,
    /// Optional CSV dump of the initial and fitted JPSD over the grid.
    pub out_jpsd: Option<PathBuf>,
}

impl Default for FitCmdConfig {
    fn default() -> Self {
        Self {
            graph: GraphConfig::default(),
            data: PathBuf::from("data.csv"),
            orders: [1, 1, 1, 0],
            fit: FitSettings::default(),
            subtract_mean: false,
            out_fit: PathBuf::from("fit.json"),
            out_jpsd: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ImputeCmdConfig {
    pub graph: GraphConfig,
    pub data: PathBuf,
    pub orders: [usize; 4],
    pub fit: FitSettings,
    pub subtract_mean: bool,
    /// Absolute ridge; `null` = scaled default.
    pub ridge: Option<f64>,
    /// Ground truth for NME reporting (same long format, fully observed).
    pub truth: Option<PathBuf>,
    /// Also run the nonparametric JWSS baseline for comparison.
    pub baseline: bool,
    /// Preprocessing: moving-average window (1 = off).
    pub smooth_window: usize,
    pub out_filled: PathBuf,
    pub out_report: PathBuf,
}

impl Default for ImputeCmdConfig {
    fn default() -> Self {
        Self {
            graph: GraphConfig::default(),
            data: PathBuf::from("data.csv"),
            orders: [1, 1, 1, 0],
            fit: FitSettings::default(),
            subtract_mean: false,
            ridge: None,
            truth: None,
            baseline: false,
            smooth_window: 1,
            out_filled: PathBuf::from("filled.csv"),
            out_report: PathBuf::from("impute.json"),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepWeightsConfig {
    pub graph: GraphConfig,
    pub process: ProcessConfig,
    pub t: usize,
    pub l: usize,
    pub seed: u64,
    pub missing_ratios: Vec<f64>,
    pub repetitions: usize,
    /// Absolute trace-weight grids.
    pub mu_a_grid: Vec<f64>,
    pub mu_b_grid: Vec<f64>,
    pub fit: FitSettings,
    pub out_csv: PathBuf,
    pub out_json: PathBuf,
}

impl Default for SweepWeightsConfig {
    fn default() -> Self {
        Self {
            graph: GraphConfig { synthetic_nodes: Some(12), ..GraphConfig::default() },
            process: ProcessConfig::default(),
            t: 16,
            l: 16,
            seed: 1,
            missing_ratios: vec![0.3],
            repetitions: 3,
            mu_a_grid: vec![0.0, 1e-3, 1e-1],
            mu_b_grid: vec![0.0, 1e-3, 1e-1],
            fit: FitSettings::default(),
            out_csv: PathBuf::from("sweep_weights.csv"),
            out_json: PathBuf::from("sweep_weights.json"),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepOrdersConfig {
    pub graph: GraphConfig,
    pub data: PathBuf,
    pub p_grid: Vec<usize>,
    pub k_grid: Vec<usize>,
    pub q_grid: Vec<usize>,
    pub m_grid: Vec<usize>,
    pub split_fraction: f64,
    pub seed: u64,
    pub fit: FitSettings,
    pub subtract_mean: bool,
    pub out_json: PathBuf,
}

impl Default for SweepOrdersConfig {
    fn default() -> Self {
        Self {
            graph: GraphConfig::default(),
            data: PathBuf::from("data.csv"),
            p_grid: vec![1, 2],
            k_grid: vec![0, 1],
            q_grid: vec![0, 1],
            m_grid: vec![0, 1],
            split_fraction: 0.5,
            seed: 1,
            fit: FitSettings::default(),
            subtract_mean: false,
            out_json: PathBuf::from("sweep_orders.json"),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RatesConfig {
    pub graph: GraphConfig,
    pub process: ProcessConfig,
    pub t: usize,
    /// Which error to track: initial_jpsd | params | fitted_jpsd | imputation.
    pub kind: String,
    pub l_grid: Vec<usize>,
    pub trials: usize,
    pub delta: f64,
    pub missing_ratio: f64,
    pub seed: u64,
    pub fit: FitSettings,
    pub out_csv: PathBuf,
    pub out_json: PathBuf,
}

impl Default for RatesConfig {
    fn default() -> Self {
        Self {
            graph: GraphConfig { synthetic_nodes: Some(8), ..GraphConfig::default() },
            process: ProcessConfig::default(),
            t: 16,
            kind: "initial_jpsd".into(),
            l_grid: vec![32, 64, 128, 256, 512, 1024],
            trials: 10,
            delta: 0.1,
            missing_ratio: 0.3,
            seed: 1,
            fit: FitSettings::default(),
            out_csv: PathBuf::from("rates.csv"),
            out_json: PathBuf::from("rates.json"),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct IngestCheckConfig {
    pub data: PathBuf,
    pub coordinates: Option<PathBuf>,
    pub distances: Option<PathBuf>,
}

/// Load a config: start from defaults, overlay the JSON file (if any), then
/// apply dotted-path `--set` overrides.
pub fn load_config<T: Serialize + DeserializeOwned + Default>(
    path: Option<&std::path::Path>,
    overrides: &[String],
) -> Result<T> {
    let mut value = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p)?;
            serde_json::from_str::<serde_json::Value>(&text)?
        }
        None => serde_json::to_value(T::default())?,
    };
    for ov in overrides {
        let (key, raw) = ov.split_once('=').ok_or_else(|| {
            JsArmaError::Config(format!("override `{ov}` must have the form key.path=value"))
        })?;
        let parsed: serde_json::Value = serde_json::from_str(raw)
            .unwrap_or_else(|_| serde_json::Value::String(raw.to_string()));
        set_path(&mut value, key, parsed)?;
    }
    serde_json::from_value(value).map_err(|e| JsArmaError::Config(format!("invalid config: {e}")))
}

fn set_path(root: &mut serde_json::Value, key: &str, val: serde_json::Value) -> Result<()> {
    let mut cur = root;
    let parts: Vec<&str> = key.split('.').collect();
    for (i, part) in parts.iter().enumerate() {
        if !cur.is_object() {
            return Err(JsArmaError::Config(format!("override path `{key}` is not an object")));
        }
        let map = cur.as_object_mut().unwrap();
        if i + 1 == parts.len() {
            map.insert(part.to_string(), val);
            return Ok(());
        }
        cur = map
            .entry(part.to_string())
            .or_insert_with(|| serde_json::Value::Object(Default::default()));
    }
    unreachable!("empty override path")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides_apply_over_defaults() {
        let cfg: SimulateConfig =
            load_config(None, &["t=64".into(), "graph.knn_k=6".into()]).unwrap();
        assert_eq!(cfg.t, 64);
        assert_eq!(cfg.graph.knn_k, 6);
        // untouched defaults survive
        assert_eq!(cfg.l, 64);
    }

    #[test]
    fn string_override_without_quotes() {
        let cfg: SimulateConfig = load_config(None, &["generator=recursion".into()]).unwrap();
        assert_eq!(cfg.generator, "recursion");
    }

    #[test]
    fn bad_override_rejected() {
        assert!(load_config::<SimulateConfig>(None, &["no_equals_sign".into()]).is_err());
        assert!(load_config::<SimulateConfig>(None, &["nonexistent_field=1".into()]).is_err());
    }
}
