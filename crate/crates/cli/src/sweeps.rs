//! Experiment sweeps: trace-weight sensitivity tables and model-order
//! selection, plus the rate-study driver.

use rayon::prelude::*;
use serde::Serialize;

use jsarma::fit::TraceWeight;
use jsarma::graph::GraphSpectrum;
use jsarma::impute;
use jsarma::sim;
use jsarma::spectral::{dft_basis, ModelOrders, TimeBasis};
use jsarma::theory::{self, RateErrorKind, RateStudy, RateStudyConfig};
use jsarma::{JsArmaError, MaskedRealizations, Result};

use crate::config::{RatesConfig, SweepOrdersConfig, SweepWeightsConfig};
use crate::graphio::build_graph;
use crate::pipeline::run_pipeline;
use crate::tune::{tune_hyperparams, Candidate, TuneRecord};

/// One cell of the trace-weight sweep table.
#[derive(Debug, Clone, Serialize)]
pub struct WeightCell {
    pub mu_a: f64,
    pub mu_b: f64,
    /// Mean NME over repetitions x missing ratios; `None` when every run in
    /// the cell failed.
    pub nme: Option<f64>,
    pub failures: usize,
    pub failure_reason: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct WeightSweepResult {
    pub cells: Vec<WeightCell>,
    pub mu_a_grid: Vec<f64>,
    pub mu_b_grid: Vec<f64>,
}

/// NME table over the (mu_A, mu_B) grid on synthetic partially observed data,
/// averaged over repetitions and missing ratios. Cells run in a work pool and
/// are assembled by index, so the table is deterministic.
pub fn sweep_weights(cfg: &SweepWeightsConfig) -> Result<WeightSweepResult> {
    if cfg.mu_a_grid.is_empty() || cfg.mu_b_grid.is_empty() || cfg.missing_ratios.is_empty() {
        return Err(JsArmaError::Config("sweep grids must be non-empty".into()));
    }
    if cfg.repetitions == 0 {
        return Err(JsArmaError::Config("repetitions must be >= 1".into()));
    }
    let graph = build_graph(&cfg.graph)?;
    let gs = jsarma::graph::spectrum_of(&graph)?;
    let tb = dft_basis(cfg.t)?;
    let zeta0 = cfg.process.params()?;
    let orders = zeta0.orders;

    let cells: Vec<(f64, f64)> = cfg
        .mu_a_grid
        .iter()
        .flat_map(|&a| cfg.mu_b_grid.iter().map(move |&b| (a, b)))
        .collect();

    let results: Vec<WeightCell> = cells
        .par_iter()
        .map(|&(mu_a, mu_b)| {
            let mut fit_cfg = match cfg.fit.to_fit_config() {
                Ok(c) => c,
                Err(e) => {
                    return WeightCell {
                        mu_a,
                        mu_b,
                        nme: None,
                        failures: 1,
                        failure_reason: Some(e.to_string()),
                    }
                }
            };
            fit_cfg.mu_a = TraceWeight::Absolute(mu_a);
            fit_cfg.mu_b = TraceWeight::Absolute(mu_b);

            let mut nmes = Vec::new();
            let mut failures = 0usize;
            let mut reason = None;
            for rep in 0..cfg.repetitions {
                for (mi, &ratio) in cfg.missing_ratios.iter().enumerate() {
                    let seed = cfg
                        .seed
                        .wrapping_mul(1_000_003)
                        .wrapping_add((rep * cfg.missing_ratios.len() + mi) as u64);
                    match sweep_cell_nme(&zeta0, &orders, &gs, &tb, cfg, &fit_cfg, ratio, seed) {
                        Ok(v) => nmes.push(v),
                        Err(e) => {
                            failures += 1;
                            reason.get_or_insert_with(|| e.to_string());
                        }
                    }
                }
            }
            let nme = if nmes.is_empty() {
                None
            } else {
                Some(nmes.iter().sum::<f64>() / nmes.len() as f64)
            };
            WeightCell { mu_a, mu_b, nme, failures, failure_reason: reason }
        })
        .collect();

    Ok(WeightSweepResult {
        cells: results,
        mu_a_grid: cfg.mu_a_grid.clone(),
        mu_b_grid: cfg.mu_b_grid.clone(),
    })
}

#[allow(clippy::too_many_arguments)]
fn sweep_cell_nme(
    zeta0: &jsarma::ArmaParams,
    orders: &ModelOrders,
    gs: &GraphSpectrum,
    tb: &TimeBasis,
    cfg: &SweepWeightsConfig,
    fit_cfg: &jsarma::fit::FitConfig,
    missing_ratio: f64,
    seed: u64,
) -> Result<f64> {
    let mut truth = Vec::with_capacity(cfg.l);
    for i in 0..cfg.l {
        truth.push(sim::simulate_spectral(zeta0, gs, tb, seed.wrapping_add(i as u64))?);
    }
    let masks = sim::generate_mask(gs.n_nodes(), tb.length(), cfg.l, missing_ratio, seed ^ 0xa5a5)?;
    let obs = MaskedRealizations::new(truth.clone(), masks)?;
    let out = run_pipeline(&obs, gs, tb, orders, fit_cfg, None, false)?;
    impute::nme(&truth, &out.imputation)
}

/// Write the weight-sweep table as a Table-I-shaped CSV: rows = mu_A,
/// columns = mu_B.
pub fn write_weight_sweep_csv<P: AsRef<std::path::Path>>(
    path: P,
    res: &WeightSweepResult,
) -> Result<()> {
    let mut w = csv::Writer::from_path(path.as_ref())?;
    let mut header = vec!["mu_a\\mu_b".to_string()];
    header.extend(res.mu_b_grid.iter().map(|b| b.to_string()));
    w.write_record(&header)?;
    let nb = res.mu_b_grid.len();
    for (ai, a) in res.mu_a_grid.iter().enumerate() {
        let mut row = vec![a.to_string()];
        for bi in 0..nb {
            let cell = &res.cells[ai * nb + bi];
            row.push(cell.nme.map_or_else(|| "NaN".to_string(), |v| v.to_string()));
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct OrderSweepResult {
    pub records: Vec<TuneRecord>,
    pub chosen_orders: [usize; 4],
    pub chosen_validation_nme: f64,
}

/// Validation-split model-order selection over the configured grids.
pub fn sweep_orders(cfg: &SweepOrdersConfig) -> Result<OrderSweepResult> {
    if cfg.p_grid.is_empty() || cfg.k_grid.is_empty() || cfg.q_grid.is_empty() || cfg.m_grid.is_empty()
    {
        return Err(JsArmaError::Config("order grids must be non-empty".into()));
    }
    let graph = build_graph(&cfg.graph)?;
    let gs = jsarma::graph::spectrum_of(&graph)?;
    let obs = jsarma::io::read_realizations_csv(&cfg.data)?;
    let tb = dft_basis(obs.n_times())?;
    let fit_cfg = cfg.fit.to_fit_config()?;

    let mut candidates = Vec::new();
    for &p in &cfg.p_grid {
        for &k in &cfg.k_grid {
            for &q in &cfg.q_grid {
                for &m in &cfg.m_grid {
                    candidates.push(Candidate {
                        orders: ModelOrders::new(p, k, q, m)?,
                        fit: fit_cfg.clone(),
                    });
                }
            }
        }
    }
    let outcome = tune_hyperparams(
        &obs,
        &gs,
        &tb,
        &candidates,
        cfg.split_fraction,
        None,
        cfg.subtract_mean,
        cfg.seed,
    )?;
    let records = candidates
        .iter()
        .zip(&outcome.validation_nme)
        .map(|(c, v)| TuneRecord {
            orders: [c.orders.p, c.orders.k, c.orders.q, c.orders.m],
            validation_nme: *v,
        })
        .collect();
    let chosen = &candidates[outcome.best].orders;
    Ok(OrderSweepResult {
        records,
        chosen_orders: [chosen.p, chosen.k, chosen.q, chosen.m],
        chosen_validation_nme: outcome.validation_nme[outcome.best]
            .expect("winning candidate has a validation score"),
    })
}

/// Run the configured rate study.
pub fn run_rates(cfg: &RatesConfig) -> Result<RateStudy> {
    let graph = build_graph(&cfg.graph)?;
    let gs = jsarma::graph::spectrum_of(&graph)?;
    let tb = dft_basis(cfg.t)?;
    let kind = match cfg.kind.as_str() {
        "initial_jpsd" => RateErrorKind::InitialJpsd,
        "params" => RateErrorKind::Params,
        "fitted_jpsd" => RateErrorKind::FittedJpsd,
        "imputation" => RateErrorKind::Imputation,
        other => {
            return Err(JsArmaError::Config(format!(
                "unknown rate kind `{other}` (expected initial_jpsd|params|fitted_jpsd|imputation)"
            )))
        }
    };
    let study_cfg = RateStudyConfig {
        zeta0: cfg.process.params()?,
        fit: cfg.fit.to_fit_config()?,
        seed: cfg.seed,
        missing_ratio: cfg.missing_ratio,
    };
    theory::rate_study(kind, &study_cfg, &gs, &tb, &cfg.l_grid, cfg.trials, cfg.delta)
}
