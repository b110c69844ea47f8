//! Executes a [`Plan`] and writes its artifacts.

use std::fs;
use std::path::Path;

use dpsbp::analysis::convergence::ConvergenceTable;
use dpsbp::analysis::eigen::eigenvalues;
use dpsbp::analysis::experiments::*;
use dpsbp::analysis::spectra::{energy_enstrophy_spectra, loglog_slope};
use dpsbp::io::{self, ProfileRow, RunMetadata, SnapshotHeader, SCHEMA_VERSION};
use dpsbp::operators::{build_operator_pair, verify_pair, Grid1D};
use dpsbp::swe2d::{vorticity, Ops2D};
use dpsbp::{Result, State2D};
use serde_json::{json, Value};

use crate::config::Plan;

struct Artifacts<'a> {
    dir: &'a Path,
    files: Vec<String>,
}

impl<'a> Artifacts<'a> {
    fn path(&mut self, name: &str) -> std::path::PathBuf {
        self.files.push(name.to_string());
        self.dir.join(name)
    }

    fn convergence(&mut self, name: &str, table: &ConvergenceTable) -> Result<()> {
        let f = fs::File::create(self.path(name))?;
        table.write_csv(f)
    }

    fn profile(&mut self, rows: &[ProfileRow]) -> Result<()> {
        io::write_csv_rows(&self.path("profile.csv"), rows)
    }

    fn snapshot(&mut self, header: &SnapshotHeader, fields: &[&[f64]]) -> Result<()> {
        io::write_snapshot(self.dir, "state", header, fields)?;
        self.files.push("state.bin".into());
        self.files.push("state.json".into());
        Ok(())
    }

    fn state_2d(&mut self, state: &State2D, dx: f64, t: f64, ops: &Ops2D, f_c: f64) -> Result<Value> {
        let n = state.n;
        let w = vorticity(state, f_c, ops)?;
        let header = SnapshotHeader::new(vec![n, n], dx, t, &["h", "u", "v", "vorticity"]);
        self.snapshot(&header, &[&state.h, &state.u, &state.v, &w])?;
        let sp = energy_enstrophy_spectra(state)?;
        io::write_spectra_csv(&self.path("spectra.csv"), &sp)?;
        let hi = (n / 2).clamp(5, 30);
        Ok(json!({ "ke_slope_4_30": loglog_slope(&sp.shell, &sp.energy, 4, hi) }))
    }
}

fn table_summary(t: &ConvergenceTable) -> Value {
    let last = t.last();
    json!({
        "levels": t.rows.len(),
        "err_u": last.map(|r| r.err_u),
        "err_h": last.map(|r| r.err_h),
        "q_u": last.and_then(|r| r.q_u),
        "q_h": last.and_then(|r| r.q_h),
    })
}

fn final_drift(series: &[dpsbp::DiagnosticsRecord]) -> Value {
    let max = |f: fn(&dpsbp::DiagnosticsRecord) -> f64| series.iter().map(|r| f(r).abs()).fold(0.0, f64::max);
    let last = series.last();
    json!({
        "t": last.map(|r| r.t),
        "rel_energy": last.map(|r| r.rel_energy),
        "rel_enstrophy": last.map(|r| r.rel_enstrophy),
        "max_abs_rel_mass": max(|r| r.rel_mass),
        "max_abs_rel_vorticity": max(|r| r.rel_vorticity),
    })
}

/// Runs `plan`, writing every artifact and `metadata.json` into `dir`.
/// Returns the metadata.
pub fn execute(plan: &Plan, dir: &Path) -> Result<RunMetadata> {
    fs::create_dir_all(dir)?;
    let mut a = Artifacts { dir, files: Vec::new() };
    let summary = match plan {
        Plan::Mms1d { run, sizes } => {
            let t = mms1d_study(run, sizes)?;
            a.convergence("convergence.csv", &t)?;
            table_summary(&t)
        }
        Plan::Mms2d { run, sizes } => {
            let t = mms2d_study(run, sizes)?;
            a.convergence("convergence.csv", &t)?;
            table_summary(&t)
        }
        Plan::LakeAtRest { family, order, n, cfl, t_end, sample_stride } => {
            let tr = trace_lake_at_rest(*family, *order, *n, *cfl, *t_end, *sample_stride)?;
            io::write_csv_rows(&a.path("diagnostics.csv"), &tr.series)?;
            let rows: Vec<ProfileRow> = (0..tr.coords.len())
                .map(|i| ProfileRow {
                    x: tr.coords[i],
                    h: tr.state.h[i],
                    u: tr.state.u[i],
                    h_exact: Some(0.5 - tr.b[i]),
                    u_exact: Some(0.0),
                    b: Some(tr.b[i]),
                })
                .collect();
            a.profile(&rows)?;
            let dx = tr.coords.get(1).map_or(0.0, |x| x - tr.coords[0]);
            a.snapshot(&SnapshotHeader::new(vec![*n], dx, tr.result.t, &["h", "u", "b"]), &[&tr.state.h, &tr.state.u, &tr.b])?;
            serde_json::to_value(tr.result).unwrap_or(Value::Null)
        }
        Plan::LakePerturbed { family, order, sizes, cfl, t_end } => {
            let t = lake_perturbed_study(*family, *order, sizes, *cfl, *t_end)?;
            a.convergence("convergence.csv", &t)?;
            let finest = run_lake_perturbed(*family, *order, *sizes.last().unwrap_or(&101), *cfl, *t_end)?;
            let mut s = table_summary(&t);
            s["max_u"] = json!(finest.max_u);
            s["t"] = json!(finest.t);
            s
        }
        Plan::DamBreak { family, order, n, delta, cfl, n_steps } => {
            let r = run_dam_break(*family, *order, *n, *delta, *cfl, *n_steps)?;
            let rows: Vec<ProfileRow> = (0..r.coords.len())
                .map(|i| ProfileRow {
                    x: r.coords[i],
                    h: r.state.h[i],
                    u: r.state.u[i],
                    h_exact: Some(r.exact_h[i]),
                    u_exact: Some(r.exact_u[i]),
                    b: None,
                })
                .collect();
            a.profile(&rows)?;
            let dx = r.coords[1] - r.coords[0];
            a.snapshot(&SnapshotHeader::new(vec![r.coords.len()], dx, r.t, &["h", "u"]), &[&r.state.h, &r.state.u])?;
            json!({ "t": r.t, "dt": r.dt, "steps": r.steps, "err_h": r.err_h, "tail_power": r.tail_power })
        }
        Plan::MergingVortex { run } => {
            let r = run_merging_vortex(run)?;
            io::write_diagnostics_csv(&a.path("diagnostics.csv"), &r.series)?;
            let (grid, ops) = ops_2d(run.family, run.order, run.m, 2.0 * std::f64::consts::PI)?;
            let extra = a.state_2d(&r.state, grid.dx, r.series.last().map_or(0.0, |x| x.t), &ops, run.params.f_c)?;
            let mut s = final_drift(&r.series);
            s["steps"] = json!(r.steps);
            s["dt"] = json!(r.dt);
            s["ke_slope_4_30"] = extra["ke_slope_4_30"].clone();
            s
        }
        Plan::BarotropicJet { run } => {
            let r = run_barotropic_jet(run)?;
            io::write_diagnostics_csv(&a.path("diagnostics.csv"), &r.series)?;
            let (grid, ops) = ops_2d(run.family, run.order, run.m, run.params.length)?;
            let extra = a.state_2d(&r.state, grid.dx, r.series.last().map_or(0.0, |x| x.t), &ops, run.params.f_c)?;
            let mut s = final_drift(&r.series);
            s["steps"] = json!(r.steps);
            s["dt"] = json!(r.dt);
            s["ke_slope_4_30"] = extra["ke_slope_4_30"].clone();
            s
        }
        Plan::Eigenspectrum { setup, nonlinear, eps } => {
            let m = if *nonlinear {
                nonlinear_jacobian(setup, *eps)?
            } else {
                linear_evolution_matrix(setup)?
            };
            let r = eigenvalues(&m)?;
            io::write_eigen_csv(&a.path("eigenvalues.csv"), &r.eigenvalues)?;
            json!({
                "n": r.n,
                "norm": r.norm,
                "max_real": r.max_real,
                "min_real": r.min_real(),
                "max_abs_real": r.max_abs_real(),
                "max_real_over_norm": r.max_real / r.norm,
            })
        }
        Plan::OperatorReport { operators, n } => {
            let mut reports = Vec::new();
            for &(f, o, periodic) in operators {
                let grid = if periodic { Grid1D::periodic(*n, 1.0)? } else { Grid1D::bounded(*n, 1.0)? };
                reports.push(verify_pair(&build_operator_pair(f, o, periodic, &grid)?));
            }
            io::write_json(&a.path("operator_report.json"), &reports)?;
            let failing: Vec<&str> = reports.iter().filter(|r| !r.all_pass).map(|r| r.label.as_str()).collect();
            json!({ "pairs": reports.len(), "all_pass": failing.is_empty(), "failing": failing })
        }
        Plan::Convergence { runs, sizes, .. } => {
            let mut s = serde_json::Map::new();
            for (label, run) in runs {
                let t = mms1d_study(run, sizes)?;
                a.convergence(&format!("convergence_{label}.csv"), &t)?;
                s.insert(label.clone(), table_summary(&t));
            }
            Value::Object(s)
        }
    };
    let meta = RunMetadata {
        schema_version: SCHEMA_VERSION,
        experiment: plan.experiment().name().to_string(),
        operator: plan.operator_label(),
        config: serde_json::to_value(plan).unwrap_or(Value::Null),
        summary,
        files: a.files,
    };
    io::write_json(&dir.join("metadata.json"), &meta)?;
    Ok(meta)
}
