//! CSV/JSON import and export: long-format realization data, graph inputs
//! (coordinates or distance matrices), rate-study tables and fit reports.

use std::path::Path;

use nalgebra::DMatrix;
use serde::{de::DeserializeOwned, Serialize};

use crate::error::{JsArmaError, Result};
use crate::fit::FitResult;
use crate::impute::ImputationResult;
use crate::sim::{MaskedRealizations, UNOBSERVED};
use crate::theory::RateStudy;

/// Read realizations from long-format CSV with header
/// `realization,node,time,value[,observed]`.
///
/// Indices must be contiguous from 0 in each column; every (l, node, time)
/// triple must appear exactly once. A missing `observed` column means fully
/// observed; `observed = 0` masks the entry regardless of its value field.
pub fn read_realizations_csv<P: AsRef<Path>>(path: P) -> Result<MaskedRealizations> {
    let mut reader = csv::Reader::from_path(path.as_ref())?;
    let headers = reader.headers()?.clone();
    let col = |name: &str| headers.iter().position(|h| h == name);
    let (c_l, c_n, c_t, c_v) = match (col("realization"), col("node"), col("time"), col("value")) {
        (Some(a), Some(b), Some(c), Some(d)) => (a, b, c, d),
        _ => {
            return Err(JsArmaError::Ingestion {
                row: 0,
                message: "header must contain realization,node,time,value".into(),
            })
        }
    };
    let c_obs = col("observed");

    struct Row {
        l: usize,
        n: usize,
        t: usize,
        v: f64,
        obs: bool,
    }
    let mut rows = Vec::new();
    let (mut max_l, mut max_n, mut max_t) = (0usize, 0usize, 0usize);
    for (ri, rec) in reader.records().enumerate() {
        let rec = rec?;
        let row_no = ri + 2; // header is row 1
        let parse_idx = |c: usize, name: &str| -> Result<usize> {
            rec.get(c)
                .and_then(|s| s.trim().parse::<usize>().ok())
                .ok_or_else(|| JsArmaError::Ingestion {
                    row: row_no,
                    message: format!("bad {name} index"),
                })
        };
        let l = parse_idx(c_l, "realization")?;
        let n = parse_idx(c_n, "node")?;
        let t = parse_idx(c_t, "time")?;
        let obs = match c_obs {
            None => true,
            Some(c) => match rec.get(c).map(str::trim) {
                Some("0") | Some("false") => false,
                Some("1") | Some("true") | Some("") | None => true,
                Some(other) => {
                    return Err(JsArmaError::Ingestion {
                        row: row_no,
                        message: format!("bad observed flag `{other}`"),
                    })
                }
            },
        };
        let v = if obs {
            rec.get(c_v)
                .and_then(|s| s.trim().parse::<f64>().ok())
                .filter(|v| v.is_finite())
                .ok_or_else(|| JsArmaError::Ingestion {
                    row: row_no,
                    message: "bad value field".into(),
                })?
        } else {
            UNOBSERVED
        };
        max_l = max_l.max(l);
        max_n = max_n.max(n);
        max_t = max_t.max(t);
        rows.push(Row { l, n, t, v, obs });
    }
    if rows.is_empty() {
        return Err(JsArmaError::Ingestion { row: 0, message: "no data rows".into() });
    }
    let (nl, nn, nt) = (max_l + 1, max_n + 1, max_t + 1);
    if rows.len() != nl * nn * nt {
        return Err(JsArmaError::Ingestion {
            row: 0,
            message: format!(
                "expected {} rows for {}x{}x{} dense tensor, found {} (ragged, duplicate, or non-contiguous indices)",
                nl * nn * nt,
                nl,
                nn,
                nt,
                rows.len()
            ),
        });
    }
    let mut data = vec![DMatrix::from_element(nn, nt, f64::NAN); nl];
    let mut masks = vec![DMatrix::from_element(nn, nt, false); nl];
    let mut seen = vec![false; nl * nn * nt];
    for (ri, row) in rows.iter().enumerate() {
        let key = (row.l * nn + row.n) * nt + row.t;
        if seen[key] {
            return Err(JsArmaError::Ingestion {
                row: ri + 2,
                message: format!(
                    "duplicate key (realization={}, node={}, time={})",
                    row.l, row.n, row.t
                ),
            });
        }
        seen[key] = true;
        data[row.l][(row.n, row.t)] = row.v;
        masks[row.l][(row.n, row.t)] = row.obs;
    }
    MaskedRealizations::new(data, masks)
}

/// Write realizations in the ingestion long format (`observed` column
/// included; unobserved values are emitted as empty fields).
pub fn write_realizations_csv<P: AsRef<Path>>(path: P, obs: &MaskedRealizations) -> Result<()> {
    let mut w = csv::Writer::from_path(path.as_ref())?;
    w.write_record(["realization", "node", "time", "value", "observed"])?;
    for l in 0..obs.n_realizations() {
        for n in 0..obs.n_nodes() {
            for t in 0..obs.n_times() {
                let is_obs = obs.masks()[l][(n, t)];
                let value = if is_obs { obs.data()[l][(n, t)].to_string() } else { String::new() };
                w.write_record([
                    l.to_string(),
                    n.to_string(),
                    t.to_string(),
                    value,
                    (is_obs as u8).to_string(),
                ])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// Export completed realizations in the ingestion long format with an extra
/// `imputed` flag column (1 where the value was filled in).
pub fn write_filled_csv<P: AsRef<Path>>(path: P, est: &ImputationResult) -> Result<()> {
    let mut w = csv::Writer::from_path(path.as_ref())?;
    w.write_record(["realization", "node", "time", "value", "observed", "imputed"])?;
    for (l, filled) in est.filled().iter().enumerate() {
        let mask = &est.masks()[l];
        for n in 0..filled.nrows() {
            for t in 0..filled.ncols() {
                let obs = mask[(n, t)];
                w.write_record([
                    l.to_string(),
                    n.to_string(),
                    t.to_string(),
                    filled[(n, t)].to_string(),
                    (obs as u8).to_string(),
                    (!obs as u8).to_string(),
                ])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// Read node coordinates from CSV with header `node_id,coord_1,...,coord_D`;
/// node ids must be contiguous from 0. Returns an N x D matrix.
pub fn read_coordinates_csv<P: AsRef<Path>>(path: P) -> Result<DMatrix<f64>> {
    let mut reader = csv::Reader::from_path(path.as_ref())?;
    let headers = reader.headers()?.clone();
    if headers.get(0) != Some("node_id") || headers.len() < 2 {
        return Err(JsArmaError::Ingestion {
            row: 1,
            message: "coordinates header must be node_id,coord_1,...".into(),
        });
    }
    let dim = headers.len() - 1;
    let mut rows: Vec<(usize, Vec<f64>)> = Vec::new();
    for (ri, rec) in reader.records().enumerate() {
        let rec = rec?;
        let row_no = ri + 2;
        let id = rec
            .get(0)
            .and_then(|s| s.trim().parse::<usize>().ok())
            .ok_or_else(|| JsArmaError::Ingestion { row: row_no, message: "bad node_id".into() })?;
        let mut coords = Vec::with_capacity(dim);
        for c in 1..=dim {
            let v = rec
                .get(c)
                .and_then(|s| s.trim().parse::<f64>().ok())
                .filter(|v| v.is_finite())
                .ok_or_else(|| JsArmaError::Ingestion {
                    row: row_no,
                    message: format!("bad coordinate in column {c}"),
                })?;
            coords.push(v);
        }
        rows.push((id, coords));
    }
    let n = rows.len();
    let mut out = DMatrix::zeros(n, dim);
    let mut seen = vec![false; n];
    for (id, coords) in rows {
        if id >= n || seen[id] {
            return Err(JsArmaError::Ingestion {
                row: 0,
                message: format!("node ids must be contiguous from 0 (offending id {id})"),
            });
        }
        seen[id] = true;
        for (c, v) in coords.into_iter().enumerate() {
            out[(id, c)] = v;
        }
    }
    Ok(out)
}

/// Read a headerless square distance matrix from CSV (N rows of N values).
pub fn read_distance_matrix_csv<P: AsRef<Path>>(path: P) -> Result<DMatrix<f64>> {
    let mut reader =
        csv::ReaderBuilder::new().has_headers(false).from_path(path.as_ref())?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (ri, rec) in reader.records().enumerate() {
        let rec = rec?;
        let mut row = Vec::with_capacity(rec.len());
        for field in rec.iter() {
            let v = field.trim().parse::<f64>().map_err(|_| JsArmaError::Ingestion {
                row: ri + 1,
                message: format!("bad distance value `{field}`"),
            })?;
            row.push(v);
        }
        rows.push(row);
    }
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(JsArmaError::Ingestion {
            row: 0,
            message: "distance matrix must be square and non-empty".into(),
        });
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

/// Moving-average smoothing along time with window `w`, edge-truncated: each
/// output sample averages the available samples in the centered window, so a
/// unit impulse spreads to 1/w over w interior samples.
pub fn moving_average(x: &DMatrix<f64>, w: usize) -> Result<DMatrix<f64>> {
    if w == 0 {
        return Err(JsArmaError::InvalidParameter("window must be >= 1".into()));
    }
    let (n, t) = x.shape();
    let half_left = (w - 1) / 2;
    let half_right = w / 2;
    let mut out = DMatrix::zeros(n, t);
    for ti in 0..t {
        let lo = ti.saturating_sub(half_left);
        let hi = (ti + half_right).min(t - 1);
        let count = (hi - lo + 1) as f64;
        for ni in 0..n {
            let mut acc = 0.0;
            for u in lo..=hi {
                acc += x[(ni, u)];
            }
            out[(ni, ti)] = acc / count;
        }
    }
    Ok(out)
}

/// Write a rate study as CSV (`L,mean_err,quantile_err`).
pub fn write_rate_study_csv<P: AsRef<Path>>(path: P, study: &RateStudy) -> Result<()> {
    let mut w = csv::Writer::from_path(path.as_ref())?;
    w.write_record(["L", "mean_err", "quantile_err"])?;
    for i in 0..study.l_grid.len() {
        w.write_record([
            study.l_grid[i].to_string(),
            study.mean_err[i].to_string(),
            study.quantile_err[i].to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Serializable summary of a fit for JSON emission.
#[derive(Debug, Clone, Serialize, serde::Deserialize)]
pub struct FitReport {
    pub orders: [usize; 4],
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub a_ext: Vec<f64>,
    pub objective: f64,
    pub final_residual: f64,
    pub residual_history: Vec<f64>,
    pub dominance_a: f64,
    pub dominance_b: f64,
    pub iterations: usize,
    pub status: String,
    /// Kept for programmatic consumers but skipped in emitted JSON so that
    /// identical (config, seed) runs produce byte-identical output files.
    #[serde(skip_serializing, default)]
    pub wall_time_secs: f64,
}

impl FitReport {
    pub fn from_result(fit: &FitResult) -> Self {
        let o = fit.zeta.orders;
        FitReport {
            orders: [o.p, o.k, o.q, o.m],
            a: fit.zeta.a.iter().copied().collect(),
            b: fit.zeta.b.iter().copied().collect(),
            a_ext: fit.a_ext.iter().copied().collect(),
            objective: fit.diagnostics.objective,
            final_residual: fit.diagnostics.final_residual,
            residual_history: fit.diagnostics.residual_history.clone(),
            dominance_a: fit.diagnostics.dominance_a,
            dominance_b: fit.diagnostics.dominance_b,
            iterations: fit.diagnostics.iterations,
            status: format!("{:?}", fit.diagnostics.status),
            wall_time_secs: fit.diagnostics.wall_time_secs,
        }
    }
}

/// Write any serializable value as pretty-printed JSON.
pub fn write_json<P: AsRef<Path>, T: Serialize>(path: P, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    std::fs::write(path.as_ref(), text + "\n")?;
    Ok(())
}

/// Read a JSON value.
pub fn read_json<P: AsRef<Path>, T: DeserializeOwned>(path: P) -> Result<T> {
    let text = std::fs::read_to_string(path.as_ref())?;
    Ok(serde_json::from_str(&text)?)
}
