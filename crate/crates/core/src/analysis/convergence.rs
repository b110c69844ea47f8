//! Error norms and convergence-rate tables.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// `√(Σ pⱼ (aⱼ − bⱼ)²)`.
pub fn weighted_l2(p: &[f64], a: &[f64], b: &[f64]) -> f64 {
    p.iter()
        .zip(a.iter().zip(b))
        .map(|(w, (x, y))| w * (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// `q = log(eᵢ₋₁/eᵢ) / log(mᵢ/mᵢ₋₁)`.
pub fn rate(m_prev: usize, e_prev: f64, m: usize, e: f64) -> f64 {
    (e_prev / e).ln() / (m as f64 / m_prev as f64).ln()
}

/// Errors of one grid level; `err_v` only for 2D runs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelErrors {
    pub err_u: f64,
    pub err_h: f64,
    pub err_v: Option<f64>,
}

impl LevelErrors {
    pub fn new(err_u: f64, err_h: f64) -> Self {
        Self {
            err_u,
            err_h,
            err_v: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub m: usize,
    pub err_u: f64,
    pub err_h: f64,
    pub err_v: Option<f64>,
    pub q_u: Option<f64>,
    pub q_h: Option<f64>,
    pub q_v: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    /// Builds rows and rates; `levels` must be strictly increasing in `m`.
    pub fn from_levels(levels: &[(usize, LevelErrors)]) -> Result<Self> {
        if levels.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::InvalidArgument("grids must be strictly increasing".into()));
        }
        let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(levels.len());
        for (k, &(m, e)) in levels.iter().enumerate() {
            let (mut q_u, mut q_h, mut q_v) = (None, None, None);
            if k > 0 {
                let (mp, ep) = levels[k - 1];
                q_u = Some(rate(mp, ep.err_u, m, e.err_u));
                q_h = Some(rate(mp, ep.err_h, m, e.err_h));
                if let (Some(a), Some(b)) = (ep.err_v, e.err_v) {
                    q_v = Some(rate(mp, a, m, b));
                }
            }
            rows.push(ConvergenceRow {
                m,
                err_u: e.err_u,
                err_h: e.err_h,
                err_v: e.err_v,
                q_u,
                q_h,
                q_v,
            });
        }
        Ok(Self { rows })
    }

    pub fn last(&self) -> Option<&ConvergenceRow> {
        self.rows.last()
    }

    /// Columns `m, err_u, err_h, q_u, q_h` (plus `err_v, q_v` when present);
    /// missing rates are empty fields.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let has_v = self.rows.iter().any(|r| r.err_v.is_some());
        let mut out = csv::Writer::from_writer(w);
        let mut header = vec!["m", "err_u", "err_h", "q_u", "q_h"];
        if has_v {
            header.extend(["err_v", "q_v"]);
        }
        out.write_record(&header).map_err(io_err)?;
        let opt = |v: Option<f64>| v.map(|x| format!("{x:e}")).unwrap_or_default();
        for r in &self.rows {
            let mut rec = vec![
                r.m.to_string(),
                format!("{:e}", r.err_u),
                format!("{:e}", r.err_h),
                opt(r.q_u),
                opt(r.q_h),
            ];
            if has_v {
                rec.push(opt(r.err_v));
                rec.push(opt(r.q_v));
            }
            out.write_record(&rec).map_err(io_err)?;
        }
        out.flush().map_err(|e| Error::Io(e.to_string()))?;
        Ok(())
    }

    pub fn read_csv<R: std::io::Read>(r: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(r);
        let headers = rdr.headers().map_err(io_err)?.clone();
        let col = |name: &str| headers.iter().position(|h| h == name);
        let need = |name: &str| col(name).ok_or_else(|| Error::InvalidData(format!("missing column {name}")));
        let (im, iu, ih, iqu, iqh) = (need("m")?, need("err_u")?, need("err_h")?, need("q_u")?, need("q_h")?);
        let (iv, iqv) = (col("err_v"), col("q_v"));
        let num = |s: &str| -> Result<f64> { s.parse().map_err(|_| Error::InvalidData(format!("bad number {s:?}"))) };
        let opt = |s: Option<&str>| -> Result<Option<f64>> {
            match s {
                None | Some("") => Ok(None),
                Some(s) => num(s).map(Some),
            }
        };
        let mut rows = Vec::new();
        for rec in rdr.records() {
            let rec = rec.map_err(io_err)?;
            rows.push(ConvergenceRow {
                m: rec[im].parse().map_err(|_| Error::InvalidData(format!("bad m {:?}", &rec[im])))?,
                err_u: num(&rec[iu])?,
                err_h: num(&rec[ih])?,
                err_v: opt(iv.map(|i| &rec[i]))?,
                q_u: opt(Some(&rec[iqu]))?,
                q_h: opt(Some(&rec[iqh]))?,
                q_v: opt(iqv.map(|i| &rec[i]))?,
            });
        }
        Ok(Self { rows })
    }
}

fn io_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

/// Runs `runner` on every grid and tabulates rates. A failing level is
/// reported as [`Error::RunnerFailure`].
pub fn convergence_study<F>(grids: &[usize], mut runner: F) -> Result<ConvergenceTable>
where
    F: FnMut(usize) -> Result<LevelErrors>,
{
    let mut levels = Vec::with_capacity(grids.len());
    for &m in grids {
        let e = runner(m).map_err(|e| Error::RunnerFailure(format!("m = {m}: {e}")))?;
        levels.push((m, e));
    }
    ConvergenceTable::from_levels(&levels)
}
