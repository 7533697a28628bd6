//! Validation-split hyperparameter selection.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use jsarma::fit::FitConfig;
use jsarma::graph::GraphSpectrum;
use jsarma::spectral::{ModelOrders, TimeBasis};
use jsarma::{JsArmaError, MaskedRealizations, Result};

use crate::pipeline::{run_pipeline, PipelineOutput};

/// One grid point of the search.
#[derive(Debug, Clone)]
pub struct Candidate {
    pub orders: ModelOrders,
    pub fit: FitConfig,
}

/// Search outcome: the winning candidate index, per-candidate validation NME
/// (`None` = that candidate failed), and the final refit on all observed data.
pub struct TuneOutcome {
    pub best: usize,
    pub validation_nme: Vec<Option<f64>>,
    pub refit: PipelineOutput,
}

#[derive(Debug, Clone, Serialize)]
pub struct TuneRecord {
    pub orders: [usize; 4],
    pub validation_nme: Option<f64>,
}

/// Hold out `split_fraction` of the observed entries of each realization as
/// a validation set, select the candidate minimizing validation NME, then
/// refit it on all observed data.
pub fn tune_hyperparams(
    obs: &MaskedRealizations,
    gs: &GraphSpectrum,
    tb: &TimeBasis,
    candidates: &[Candidate],
    split_fraction: f64,
    ridge: Option<f64>,
    subtract_mean: bool,
    seed: u64,
) -> Result<TuneOutcome> {
    if candidates.is_empty() {
        return Err(JsArmaError::Config("candidate grid is empty".into()));
    }
    if !(0.0 < split_fraction && split_fraction < 1.0) {
        return Err(JsArmaError::Config("split_fraction must lie in (0, 1)".into()));
    }

    // Per-realization uniform split of the observed entries.
    let mut train_data = Vec::with_capacity(obs.n_realizations());
    let mut train_masks = Vec::with_capacity(obs.n_realizations());
    // validation entries: (l, node, time, true value)
    let mut holdout: Vec<(usize, usize, usize, f64)> = Vec::new();
    for l in 0..obs.n_realizations() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(l as u64));
        let mut observed = obs.observed_indices(l);
        observed.shuffle(&mut rng);
        let n_val = ((observed.len() as f64) * split_fraction).floor() as usize;
        if observed.len() - n_val == 0 {
            return Err(JsArmaError::Config(format!(
                "realization {l} has too few observed entries for the split"
            )));
        }
        let mut data = obs.data()[l].clone();
        let mut mask = obs.masks()[l].clone();
        for &(node, time) in &observed[..n_val] {
            holdout.push((l, node, time, data[(node, time)]));
            data[(node, time)] = f64::NAN;
            mask[(node, time)] = false;
        }
        train_data.push(data);
        train_masks.push(mask);
    }
    if holdout.is_empty() {
        return Err(JsArmaError::Config("validation split produced no held-out entries".into()));
    }
    let train = MaskedRealizations::new(train_data, train_masks)?;

    let mut validation_nme = Vec::with_capacity(candidates.len());
    let mut best: Option<(usize, f64)> = None;
    for (ci, cand) in candidates.iter().enumerate() {
        let nme = match run_pipeline(&train, gs, tb, &cand.orders, &cand.fit, ridge, subtract_mean)
        {
            Ok(out) => {
                let mut num = 0.0;
                let mut den = 0.0;
                for &(l, node, time, truth) in &holdout {
                    let d = truth - out.imputation.filled()[l][(node, time)];
                    num += d * d;
                    den += truth * truth;
                }
                if den > 0.0 {
                    Some((num / den).sqrt())
                } else {
                    None
                }
            }
            Err(e) => {
                log::warn!("candidate {ci} failed during tuning: {e}");
                None
            }
        };
        if let Some(v) = nme {
            if best.map_or(true, |(_, b)| v < b) {
                best = Some((ci, v));
            }
        }
        validation_nme.push(nme);
    }
    let (best, _) = best.ok_or_else(|| {
        JsArmaError::DegenerateModel("every candidate failed on the validation split".into())
    })?;

    let cand = &candidates[best];
    let refit = run_pipeline(obs, gs, tb, &cand.orders, &cand.fit, ridge, subtract_mean)?;
    Ok(TuneOutcome { best, validation_nme, refit })
}

/// Assert helper (used in tests): the training set of the split never
/// contains a held-out entry.
pub fn split_is_disjoint(train: &MaskedRealizations, holdout: &[(usize, usize, usize)]) -> bool {
    holdout.iter().all(|&(l, n, t)| !train.masks()[l][(n, t)])
}
