//! Ready-made runs of the verification problems. Each returns plain numbers
//! (errors, final states, invariant series) so the CLI and the test-suite
//! share one implementation.

use std::sync::Arc;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::convergence::{convergence_study, weighted_l2, ConvergenceTable, LevelErrors};
use super::dam_break::DamBreak;
use super::eigen::{assemble_linear_matrix, fd_jacobian};
use super::mms::{Mms1d, Mms2d, MmsFlux};
use super::setups::{
    barotropic_jet_setup, lake_at_rest_setup, merging_vortex_setup, Grid2D, JetParams, VortexParams,
    LAKE_LENGTH, LAKE_STAGE,
};
use super::spectra::high_frequency_power;
use crate::hyperviscosity::{HvOrder, HyperViscosity};
use crate::operators::{build_operator_pair, Family, Grid1D, SbpOperatorPair};
use crate::swe1d::{BcKind, BoundaryData, BoundarySpec, FluxForm, Rhs1D, State1D};
use crate::swe2d::{invariants, DiagnosticsRecord, Ops2D, Rhs2D, State2D};
use crate::timestep::{compute_dt, compute_dt_2d, integrate, TimeControl};
use crate::Result;

/// Ramp width of the boxcar used by every bounded run.
pub const DEFAULT_RAMP: f64 = 0.1;

/// Order-4 dissipation for operators up to order 4, order 6 above.
pub fn default_hv_order(order: usize) -> HvOrder {
    if order >= 5 {
        HvOrder::Six
    } else {
        HvOrder::Four
    }
}

pub fn bounded_pair(family: Family, order: usize, n_cells: usize, length: f64) -> Result<(Grid1D, Arc<SbpOperatorPair>)> {
    let grid = Grid1D::bounded(n_cells, length)?;
    let pair = build_operator_pair(family, order, false, &grid)?;
    Ok((grid, Arc::new(pair)))
}

pub fn periodic_pair(family: Family, order: usize, n: usize, length: f64) -> Result<(Grid1D, Arc<SbpOperatorPair>)> {
    let grid = Grid1D::periodic(n, length)?;
    let pair = build_operator_pair(family, order, true, &grid)?;
    Ok((grid, Arc::new(pair)))
}

fn attach_hv(rhs: Rhs1D, grid: &Grid1D, order: usize, delta: f64) -> Result<Rhs1D> {
    if delta > 0.0 {
        let hv = HyperViscosity::new(rhs.pair.clone(), grid, default_hv_order(order), delta, DEFAULT_RAMP)?;
        Ok(rhs.with_hv(hv))
    } else {
        Ok(rhs)
    }
}

fn run_1d(rhs: &Rhs1D, q0: State1D, dt: f64, t_end: f64) -> Result<(State1D, f64)> {
    let control = TimeControl::new(0.0, dt, t_end, usize::MAX)?;
    let out = integrate(|q: &State1D, t| rhs.eval(q, t), q0, &control, |_, _, _| {})?;
    Ok((out.state, out.t))
}

// ---------------------------------------------------------------- 1D MMS

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mms1dRun {
    pub family: Family,
    pub order: usize,
    pub n_cells: usize,
    pub flux: MmsFlux,
    pub delta: f64,
    pub cfl: f64,
    pub t_end: f64,
    pub params: Mms1d,
}

impl Mms1dRun {
    pub fn new(family: Family, order: usize, n_cells: usize, nonlinear: bool) -> Self {
        let params = Mms1d::default();
        let flux = if nonlinear {
            MmsFlux::Nonlinear
        } else {
            MmsFlux::Linear {
                u_mean: 0.0,
                h_mean: params.offset,
            }
        };
        Self {
            family,
            order,
            n_cells,
            flux,
            delta: 0.0,
            cfl: 0.3,
            t_end: 0.5,
            params,
        }
    }
}

/// Mass-flux boundaries fed with the exact flux, forcing in closed form.
pub fn run_mms1d(run: &Mms1dRun) -> Result<LevelErrors> {
    let p = run.params;
    let (grid, pair) = bounded_pair(run.family, run.order, run.n_cells, p.length)?;
    let n = grid.n_points;
    let form = match run.flux {
        MmsFlux::Nonlinear => FluxForm::nonlinear(p.g),
        MmsFlux::Linear { u_mean, h_mean } => FluxForm::linear_uniform(u_mean, h_mean, n, p.g)?,
    };
    let flux = run.flux;
    let length = p.length;
    let bc = BoundarySpec::uniform(BcKind::MassFlux).with_data(
        BoundaryData::Flux(Arc::new(move |t| p.flux(0.0, t, flux))),
        BoundaryData::Flux(Arc::new(move |t| p.flux(length, t, flux))),
    );
    let forcing = Arc::new(move |t: f64, x: &[f64]| {
        x.iter().map(|&x| p.forcing(x, t, flux)).unzip::<f64, f64, Vec<f64>, Vec<f64>>()
    });
    let rhs = Rhs1D::new(pair.clone(), form, bc, grid.coords.clone())?.with_forcing(forcing);
    let rhs = attach_hv(rhs, &grid, run.order, run.delta)?;

    let (h0, u0): (Vec<f64>, Vec<f64>) = grid.coords.iter().map(|&x| p.exact(x, 0.0)).unzip();
    let dt = compute_dt(&u0, &h0, grid.dx, p.g, run.cfl)?;
    let (q, t) = run_1d(&rhs, State1D { h: h0, u: u0 }, dt, run.t_end)?;
    let (he, ue): (Vec<f64>, Vec<f64>) = grid.coords.iter().map(|&x| p.exact(x, t)).unzip();
    let w = pair.p_weights();
    Ok(LevelErrors::new(weighted_l2(w, &q.u, &ue), weighted_l2(w, &q.h, &he)))
}

pub fn mms1d_study(base: &Mms1dRun, grids: &[usize]) -> Result<ConvergenceTable> {
    convergence_study(grids, |m| run_mms1d(&Mms1dRun { n_cells: m, ..*base }))
}

// ---------------------------------------------------------- lake at rest

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LakeRestResult {
    pub t: f64,
    pub steps: usize,
    pub l2_u: f64,
    pub max_u: f64,
    /// `max |h + b − 0.5|`
    pub stage_error: f64,
}

/// Periodic lake with the parabolic bump, `n` points on `[0, 25)`.
pub fn run_lake_at_rest(family: Family, order: usize, n: usize, cfl: f64, t_end: f64) -> Result<LakeRestResult> {
    Ok(trace_lake_at_rest(family, order, n, cfl, t_end, usize::MAX)?.result)
}

/// Lake at rest with the sampled series and the final profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LakeRestTrace {
    pub result: LakeRestResult,
    /// Initial record plus one every `stride` steps and at the end.
    pub series: Vec<LakeRestResult>,
    pub coords: Vec<f64>,
    pub state: State1DData,
    pub b: Vec<f64>,
}

pub fn trace_lake_at_rest(family: Family, order: usize, n: usize, cfl: f64, t_end: f64, stride: usize) -> Result<LakeRestTrace> {
    let g = 9.81;
    let (grid, pair) = periodic_pair(family, order, n, LAKE_LENGTH)?;
    let (q0, b) = lake_at_rest_setup(&grid, false);
    let rhs = Rhs1D::new(pair.clone(), FluxForm::nonlinear(g), BoundarySpec::periodic(), grid.coords.clone())?
        .with_bathymetry(b.clone());
    let dt = compute_dt(&q0.u, &q0.h, grid.dx, g, cfl)?;
    let zero = vec![0.0; n];
    let record = |step: usize, t: f64, q: &State1D| LakeRestResult {
        t,
        steps: step,
        l2_u: weighted_l2(pair.p_weights(), &q.u, &zero),
        max_u: q.u.iter().fold(0.0f64, |m, v| m.max(v.abs())),
        stage_error: q.h.iter().zip(&b).fold(0.0f64, |m, (h, b)| m.max((h + b - LAKE_STAGE).abs())),
    };
    let mut series = vec![record(0, 0.0, &q0)];
    let control = TimeControl::new(cfl, dt, t_end, stride)?;
    let out = integrate(|q: &State1D, t| rhs.eval(q, t), q0, &control, |step, t, q| series.push(record(step, t, q)))?;
    let result = record(out.steps, out.t, &out.state);
    Ok(LakeRestTrace {
        result,
        series,
        coords: grid.coords.clone(),
        state: State1DData { h: out.state.h, u: out.state.u },
        b,
    })
}

/// `800 Δt` of the coarsest (101-cell) grid at rest, `Δt = 0.3Δx/√(g·0.5)`.
pub fn lake_perturbed_t_end() -> f64 {
    800.0 * 0.3 * (LAKE_LENGTH / 101.0) / (9.81f64 * LAKE_STAGE).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LakePerturbedResult {
    pub errors: LevelErrors,
    pub max_u: f64,
    pub t: f64,
}

/// Perturbed lake on `n_cells` cells with nonlinear transmissive boundaries
/// whose data is the unperturbed lake; errors are against that rest state.
pub fn run_lake_perturbed(family: Family, order: usize, n_cells: usize, cfl: f64, t_end: f64) -> Result<LakePerturbedResult> {
    let g = 9.81;
    let (grid, pair) = bounded_pair(family, order, n_cells, LAKE_LENGTH)?;
    let (q0, b) = lake_at_rest_setup(&grid, true);
    let n = grid.n_points;
    let (h_l, h_r) = (LAKE_STAGE - b[0], LAKE_STAGE - b[n - 1]);
    let bc = BoundarySpec::uniform(BcKind::Transmissive).with_data(
        BoundaryData::Flux(Arc::new(move |_| (0.0, g * h_l))),
        BoundaryData::Flux(Arc::new(move |_| (0.0, g * h_r))),
    );
    let rhs = Rhs1D::new(pair.clone(), FluxForm::nonlinear(g), bc, grid.coords.clone())?.with_bathymetry(b.clone());
    let dt = compute_dt(&q0.u, &q0.h, grid.dx, g, cfl)?;
    let (q, t) = run_1d(&rhs, q0, dt, t_end)?;
    let rest: Vec<f64> = b.iter().map(|b| LAKE_STAGE - b).collect();
    let w = pair.p_weights();
    Ok(LakePerturbedResult {
        errors: LevelErrors::new(weighted_l2(w, &q.u, &vec![0.0; n]), weighted_l2(w, &q.h, &rest)),
        max_u: q.u.iter().fold(0.0f64, |m, v| m.max(v.abs())),
        t,
    })
}

pub fn lake_perturbed_study(family: Family, order: usize, grids: &[usize], cfl: f64, t_end: f64) -> Result<ConvergenceTable> {
    convergence_study(grids, |m| Ok(run_lake_perturbed(family, order, m, cfl, t_end)?.errors))
}

// ------------------------------------------------------------ dam break

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DamBreakResult {
    pub t: f64,
    pub dt: f64,
    pub steps: usize,
    pub coords: Vec<f64>,
    pub state: State1DData,
    pub exact_h: Vec<f64>,
    pub exact_u: Vec<f64>,
    /// P-weighted L2 error of `h`.
    pub err_h: f64,
    /// Power of `h − h_exact` in the upper half of the resolved wavenumbers.
    pub tail_power: f64,
}

/// Serializable copy of a 1D state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct State1DData {
    pub h: Vec<f64>,
    pub u: Vec<f64>,
}

/// Transmissive boundaries with the undisturbed left/right states as data;
/// runs `n_steps` frozen steps.
pub fn run_dam_break(family: Family, order: usize, n_cells: usize, delta: f64, cfl: f64, n_steps: usize) -> Result<DamBreakResult> {
    let d = DamBreak::default();
    let (grid, pair) = bounded_pair(family, order, n_cells, d.length)?;
    let (h_l, h_r, g) = (d.h_l, d.h_r, d.g);
    let bc = BoundarySpec::uniform(BcKind::Transmissive).with_data(
        BoundaryData::Flux(Arc::new(move |_| (0.0, g * h_l))),
        BoundaryData::Flux(Arc::new(move |_| (0.0, g * h_r))),
    );
    let rhs = Rhs1D::new(pair.clone(), FluxForm::nonlinear(g), bc, grid.coords.clone())?;
    let rhs = attach_hv(rhs, &grid, order, delta)?;
    let (h0, u0) = d.exact_on(&grid.coords, 0.0)?;
    let dt = compute_dt(&u0, &h0, grid.dx, g, cfl)?;
    let control = TimeControl::steps(cfl, dt, n_steps, usize::MAX)?;
    let out = integrate(|q: &State1D, t| rhs.eval(q, t), State1D { h: h0, u: u0 }, &control, |_, _, _| {})?;
    let (eh, eu) = d.exact_on(&grid.coords, out.t)?;
    let q = out.state;
    let diff: Vec<f64> = q.h.iter().zip(&eh).map(|(a, b)| a - b).collect();
    Ok(DamBreakResult {
        t: out.t,
        dt,
        steps: out.steps,
        coords: grid.coords.clone(),
        err_h: weighted_l2(pair.p_weights(), &q.h, &eh),
        tail_power: high_frequency_power(&diff, 0.5),
        state: State1DData { h: q.h, u: q.u },
        exact_h: eh,
        exact_u: eu,
    })
}

// ------------------------------------------------------------------- 2D

pub fn ops_2d(family: Family, order: usize, n: usize, length: f64) -> Result<(Grid1D, Ops2D)> {
    let (grid, pair) = periodic_pair(family, order, n, length)?;
    Ok((grid, Ops2D::new(pair)?))
}

fn rhs_2d(family: Family, order: usize, n: usize, length: f64, g: f64, f_c: f64, delta: f64) -> Result<Rhs2D> {
    let (grid, ops) = ops_2d(family, order, n, length)?;
    let pair = ops.pair.clone();
    let rhs = Rhs2D::new(ops, g, f_c);
    if delta > 0.0 {
        let hv = HyperViscosity::new(pair, &grid, default_hv_order(order), delta, DEFAULT_RAMP)?;
        Ok(rhs.with_hv(hv))
    } else {
        Ok(rhs)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mms2dRun {
    pub family: Family,
    pub order: usize,
    pub m: usize,
    pub delta: f64,
    pub cfl: f64,
    pub t_end: f64,
    pub params: Mms2d,
}

impl Mms2dRun {
    pub fn new(family: Family, order: usize, m: usize) -> Self {
        Self {
            family,
            order,
            m,
            delta: 0.1,
            cfl: 0.3,
            t_end: 0.5,
            params: Mms2d::default(),
        }
    }
}

pub fn run_mms2d(run: &Mms2dRun) -> Result<LevelErrors> {
    let p = run.params;
    let grid = Grid2D::new(run.m, 1.0);
    let rhs = rhs_2d(run.family, run.order, run.m, 1.0, p.g, p.f_c, run.delta)?;
    let g2 = grid.clone();
    let rhs = rhs.with_forcing(Arc::new(move |t| {
        let s = g2.sample(|x, y| p.forcing(x, y, t));
        (s.h, s.u, s.v)
    }));
    let q0 = grid.sample(|x, y| p.exact(x, y, 0.0));
    let dt = compute_dt_2d(&q0, grid.dx(), p.g, run.cfl)?;
    let control = TimeControl::new(run.cfl, dt, run.t_end, usize::MAX)?;
    let out = integrate(|q: &State2D, t| rhs.eval(q, t), q0, &control, |_, _, _| {})?;
    let e = grid.sample(|x, y| p.exact(x, y, out.t));
    let w = vec![grid.dx() * grid.dx(); run.m * run.m];
    Ok(LevelErrors {
        err_u: weighted_l2(&w, &out.state.u, &e.u),
        err_h: weighted_l2(&w, &out.state.h, &e.h),
        err_v: Some(weighted_l2(&w, &out.state.v, &e.v)),
    })
}

pub fn mms2d_study(base: &Mms2dRun, grids: &[usize]) -> Result<ConvergenceTable> {
    convergence_study(grids, |m| run_mms2d(&Mms2dRun { m, ..*base }))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Run2dResult {
    pub series: Vec<DiagnosticsRecord>,
    pub state: State2D,
    pub dt: f64,
    pub steps: usize,
}

fn run_2d_with_diagnostics(rhs: &Rhs2D, q0: State2D, dt: f64, t_end: f64, stride: usize) -> Result<Run2dResult> {
    let (f_c, g) = (rhs.f_c, rhs.g);
    let initial = invariants(&q0, f_c, g, &rhs.ops, 0.0)?;
    let mut series = vec![initial];
    let mut failure = None;
    let control = TimeControl::new(0.0, dt, t_end, stride)?;
    let out = integrate(|q: &State2D, t| rhs.eval(q, t), q0, &control, |_, t, q| {
        match invariants(q, f_c, g, &rhs.ops, t) {
            Ok(r) => series.push(r.relative_to(&initial)),
            Err(e) => failure = failure.take().or(Some(e)),
        }
    })?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(Run2dResult {
        series,
        state: out.state,
        dt,
        steps: out.steps,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VortexRun {
    pub family: Family,
    pub order: usize,
    pub m: usize,
    pub delta: f64,
    pub cfl: f64,
    pub t_end: f64,
    pub stride: usize,
    pub params: VortexParams,
}

impl VortexRun {
    pub fn new(family: Family, order: usize, m: usize, delta: f64, t_end: f64) -> Self {
        Self {
            family,
            order,
            m,
            delta,
            cfl: 0.1,
            t_end,
            stride: 10,
            params: VortexParams::default(),
        }
    }
}

/// Merging vortex on `(0, 2π]²`.
pub fn run_merging_vortex(run: &VortexRun) -> Result<Run2dResult> {
    let length = 2.0 * std::f64::consts::PI;
    let p = run.params;
    let grid = Grid2D::new(run.m, length);
    let rhs = rhs_2d(run.family, run.order, run.m, length, p.g, p.f_c, run.delta)?;
    let q0 = merging_vortex_setup(&grid, p);
    let dt = compute_dt_2d(&q0, grid.dx(), p.g, run.cfl)?;
    run_2d_with_diagnostics(&rhs, q0, dt, run.t_end, run.stride)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JetRun {
    pub family: Family,
    pub order: usize,
    pub m: usize,
    pub delta: f64,
    pub cfl: f64,
    pub t_end: f64,
    pub stride: usize,
    pub params: JetParams,
}

impl JetRun {
    pub fn new(family: Family, order: usize, m: usize, t_end: f64) -> Self {
        Self {
            family,
            order,
            m,
            delta: 10.0,
            cfl: 0.3,
            t_end,
            stride: 100,
            params: JetParams::default(),
        }
    }
}

pub fn run_barotropic_jet(run: &JetRun) -> Result<Run2dResult> {
    let p = run.params;
    let grid = Grid2D::new(run.m, p.length);
    let rhs = rhs_2d(run.family, run.order, run.m, p.length, p.g, p.f_c, run.delta)?;
    let q0 = barotropic_jet_setup(&grid, p);
    let dt = compute_dt_2d(&q0, grid.dx(), p.g, run.cfl)?;
    run_2d_with_diagnostics(&rhs, q0, dt, run.t_end, run.stride)
}

// ---------------------------------------------------------- eigenspectra

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenSetup {
    pub family: Family,
    pub order: usize,
    pub n_cells: usize,
    pub length: f64,
    pub bc: BcKind,
    pub delta: f64,
    pub g: f64,
    pub h_mean: f64,
    pub u_mean: f64,
    /// Amplitude θ of the sinusoidal background; only used by the
    /// linearised nonlinear operator.
    pub theta: f64,
}

impl EigenSetup {
    pub fn new(family: Family, order: usize, n_cells: usize, bc: BcKind, delta: f64) -> Self {
        Self {
            family,
            order,
            n_cells,
            length: 1.0,
            bc,
            delta,
            g: 1.0,
            h_mean: 1.0,
            u_mean: 0.0,
            theta: 0.1,
        }
    }

    fn rhs(&self, form: FluxForm) -> Result<Rhs1D> {
        let (grid, pair) = bounded_pair(self.family, self.order, self.n_cells, self.length)?;
        let rhs = Rhs1D::new(pair, form, BoundarySpec::uniform(self.bc), grid.coords.clone())?;
        attach_hv(rhs, &grid, self.order, self.delta)
    }

    /// `H(x) = θ sin(2π(x + 0.7)) + 2`, `U(x) = θ cos(2π(x − 0.7))`.
    pub fn background(&self) -> Result<State1D> {
        let grid = Grid1D::bounded(self.n_cells, self.length)?;
        let tau = 2.0 * std::f64::consts::PI;
        let h = grid.coords.iter().map(|x| self.theta * (tau * (x + 0.7)).sin() + 2.0).collect();
        let u = grid.coords.iter().map(|x| self.theta * (tau * (x - 0.7)).cos()).collect();
        Ok(State1D { h, u })
    }
}

fn flat_rhs(rhs: &Rhs1D) -> impl FnMut(&[f64]) -> Result<Vec<f64>> + '_ {
    let n = rhs.len();
    move |q: &[f64]| {
        let s = State1D {
            h: q[..n].to_vec(),
            u: q[n..].to_vec(),
        };
        let d = rhs.eval(&s, 0.0)?;
        let mut out = d.h;
        out.extend(d.u);
        Ok(out)
    }
}

/// Evolution matrix of the linear scheme with constant means.
pub fn linear_evolution_matrix(setup: &EigenSetup) -> Result<DMatrix<f64>> {
    let n = setup.n_cells + 1;
    let form = FluxForm::linear_uniform(setup.u_mean, setup.h_mean, n, setup.g)?;
    let rhs = setup.rhs(form)?;
    assemble_linear_matrix(2 * n, flat_rhs(&rhs))
}

/// Centred-difference Jacobian of the nonlinear scheme about the sinusoidal
/// background.
pub fn nonlinear_jacobian(setup: &EigenSetup, eps: f64) -> Result<DMatrix<f64>> {
    let rhs = setup.rhs(FluxForm::nonlinear(setup.g))?;
    let bg = setup.background()?;
    let mut base = bg.h.clone();
    base.extend(&bg.u);
    fd_jacobian(flat_rhs(&rhs), &base, eps)
}
