//! Semi-discrete 1D shallow water equations in vector-invariant form.
//!
//! ```text
//! dh/dt = −D₊F₁ + G_h + SAT₁ (+ 𝒦 row)
//! du/dt = −D₋(F₂ + g b) + G_u + SAT₂ (+ 𝒦 row)
//! ```
//!
//! Multiplying by `qᵀ(W ⊗ P)` with `Wq = (F₂, F₁)` turns the flux terms into
//! the boundary values `F₁₀F₂₀ − F₁ₙF₂ₙ` by the SBP identity; the SATs add
//! the penalty terms of [`boundary_term`].

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::hyperviscosity::{dissipation_tendency_1d, HyperViscosity};
use crate::operators::{Direction, SbpOperatorPair};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Default)]
pub struct State1D {
    pub h: Vec<f64>,
    pub u: Vec<f64>,
}

impl State1D {
    pub fn new(h: Vec<f64>, u: Vec<f64>) -> Result<Self> {
        if h.len() != u.len() {
            return Err(Error::LengthMismatch {
                expected: h.len(),
                got: u.len(),
            });
        }
        Ok(Self { h, u })
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            h: vec![0.0; n],
            u: vec![0.0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.h.len()
    }

    pub fn is_empty(&self) -> bool {
        self.h.is_empty()
    }

    pub fn check_len(&self, n: usize) -> Result<()> {
        for got in [self.h.len(), self.u.len()] {
            if got != n {
                return Err(Error::LengthMismatch { expected: n, got });
            }
        }
        Ok(())
    }

    pub fn check_positive(&self) -> Result<()> {
        match self.h.iter().position(|&h| !(h > 0.0)) {
            Some(index) => Err(Error::NonPositiveDepth {
                index,
                value: self.h[index],
            }),
            None => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FluxKind {
    /// Linearised about the mean flow `(U, H)`, given per node.
    Linear { u_mean: Vec<f64>, h_mean: Vec<f64> },
    Nonlinear,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FluxForm {
    pub kind: FluxKind,
    pub g: f64,
}

impl FluxForm {
    pub fn nonlinear(g: f64) -> Self {
        Self {
            kind: FluxKind::Nonlinear,
            g,
        }
    }

    pub fn linear(u_mean: Vec<f64>, h_mean: Vec<f64>, g: f64) -> Result<Self> {
        if u_mean.len() != h_mean.len() {
            return Err(Error::LengthMismatch {
                expected: u_mean.len(),
                got: h_mean.len(),
            });
        }
        if let Some(index) = h_mean.iter().position(|&h| !(h > 0.0)) {
            return Err(Error::NonPositiveDepth {
                index,
                value: h_mean[index],
            });
        }
        Ok(Self {
            kind: FluxKind::Linear { u_mean, h_mean },
            g,
        })
    }

    pub fn linear_uniform(u: f64, h: f64, n: usize, g: f64) -> Result<Self> {
        Self::linear(vec![u; n], vec![h; n], g)
    }

    pub fn is_nonlinear(&self) -> bool {
        matches!(self.kind, FluxKind::Nonlinear)
    }

    /// Largest `|U|/√(gH)` of the linear means (`None` for the nonlinear form).
    pub fn froude(&self) -> Option<f64> {
        match &self.kind {
            FluxKind::Linear { u_mean, h_mean } => Some(
                u_mean
                    .iter()
                    .zip(h_mean)
                    .map(|(u, h)| u.abs() / (self.g * h).sqrt())
                    .fold(0.0, f64::max),
            ),
            FluxKind::Nonlinear => None,
        }
    }

    pub fn is_subcritical(&self) -> bool {
        self.froude().map_or(true, |fr| fr < 1.0)
    }

    /// Symmetric weight `[w11, w12, w22]` at node `j`, chosen so `Wq = (F₂, F₁)`.
    pub fn weight(&self, j: usize, h: f64, u: f64) -> [f64; 3] {
        match &self.kind {
            FluxKind::Nonlinear => [self.g, 0.5 * u, 0.5 * h],
            FluxKind::Linear { u_mean, h_mean } => [self.g, u_mean[j], h_mean[j]],
        }
    }

    /// Point fluxes at node `j`.
    #[inline]
    pub fn point_flux(&self, j: usize, h: f64, u: f64) -> (f64, f64) {
        match &self.kind {
            FluxKind::Nonlinear => (u * h, 0.5 * u * u + self.g * h),
            FluxKind::Linear { u_mean, h_mean } => (
                u_mean[j] * h + h_mean[j] * u,
                u_mean[j] * u + self.g * h,
            ),
        }
    }
}

/// `(F₁, F₂)` for the whole grid.
pub fn flux(form: &FluxForm, state: &State1D) -> (Vec<f64>, Vec<f64>) {
    let n = state.len();
    let mut f1 = vec![0.0; n];
    let mut f2 = vec![0.0; n];
    for j in 0..n {
        (f1[j], f2[j]) = form.point_flux(j, state.h[j], state.u[j]);
    }
    (f1, f2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
}

/// Nonlinear transmissive coefficients `(1, α₂)` / `(1, β₂)`; they zero the
/// incoming Riemann invariant.
pub fn transmissive_coefficients(h: f64, u: f64, g: f64, side: Side) -> Result<(f64, f64)> {
    if !(h > 0.0) {
        return Err(Error::NonPositiveDepth { index: 0, value: h });
    }
    let c = (g * h).sqrt();
    if !(u.abs() < c) {
        return Err(Error::NotSubcritical {
            speed: u.abs(),
            celerity: c,
        });
    }
    let s = (h / g).sqrt();
    let c2 = match side {
        Side::Left => s * (c - 0.5 * u) / (c - u),
        Side::Right => s * (c + 0.5 * u) / (c + u),
    };
    Ok((1.0, c2))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BcKind {
    MassFlux,
    VelocityFlux,
    Transmissive,
    Periodic,
}

/// Time-dependent boundary data.
#[derive(Clone, Default)]
pub enum BoundaryData {
    /// `g(t) = 0`.
    #[default]
    Homogeneous,
    /// Explicit `g(t)` entering `α₁F₁ + α₂F₂ − g(t)` (left) or
    /// `β₁F₁ − β₂F₂ − g(t)` (right).
    Value(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
    /// Target fluxes `(F₁*, F₂*)(t)`; the data is the boundary operator applied
    /// to them, so it follows state-dependent coefficients.
    Flux(Arc<dyn Fn(f64) -> (f64, f64) + Send + Sync>),
}

impl fmt::Debug for BoundaryData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundaryData::Homogeneous => write!(f, "Homogeneous"),
            BoundaryData::Value(_) => write!(f, "Value(..)"),
            BoundaryData::Flux(_) => write!(f, "Flux(..)"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct BoundarySide {
    pub kind: BcKind,
    /// Free penalty of the `α₁ = 0` row of the stability table: `τ₁₁ ≥ 0` left, `τ₁₂ ≤ 0` right.
    pub free_tau: f64,
    pub data: BoundaryData,
}

impl BoundarySide {
    pub fn new(kind: BcKind) -> Self {
        Self {
            kind,
            free_tau: 0.0,
            data: BoundaryData::Homogeneous,
        }
    }
}

#[derive(Debug, Clone)]
pub struct BoundarySpec {
    pub left: BoundarySide,
    pub right: BoundarySide,
}

impl BoundarySpec {
    pub fn uniform(kind: BcKind) -> Self {
        Self {
            left: BoundarySide::new(kind),
            right: BoundarySide::new(kind),
        }
    }

    pub fn periodic() -> Self {
        Self::uniform(BcKind::Periodic)
    }

    pub fn is_periodic(&self) -> bool {
        self.left.kind == BcKind::Periodic
    }

    pub fn with_data(mut self, left: BoundaryData, right: BoundaryData) -> Self {
        self.left.data = left;
        self.right.data = right;
        self
    }

    fn side(&self, side: Side) -> &BoundarySide {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if (self.left.kind == BcKind::Periodic) != (self.right.kind == BcKind::Periodic) {
            return Err(Error::InvalidArgument(
                "periodic boundaries must be periodic on both sides".into(),
            ));
        }
        if self.left.free_tau < 0.0 || !self.left.free_tau.is_finite() {
            return Err(Error::BadPenalty(format!("left tau11 = {} < 0", self.left.free_tau)));
        }
        if self.right.free_tau > 0.0 || !self.right.free_tau.is_finite() {
            return Err(Error::BadPenalty(format!("right tau12 = {} > 0", self.right.free_tau)));
        }
        Ok(())
    }

    /// Boundary coefficients `(α₁, α₂)` or `(β₁, β₂)` at the current state.
    pub fn coefficients(&self, side: Side, form: &FluxForm, h: f64, u: f64, j: usize) -> Result<(f64, f64)> {
        match self.side(side).kind {
            BcKind::MassFlux => Ok((1.0, 0.0)),
            BcKind::VelocityFlux => Ok((0.0, 1.0)),
            BcKind::Transmissive => match &form.kind {
                FluxKind::Nonlinear => transmissive_coefficients(h, u, form.g, side),
                FluxKind::Linear { h_mean, .. } => Ok((1.0, (h_mean[j] / form.g).sqrt())),
            },
            BcKind::Periodic => Err(Error::InvalidArgument("no coefficients for periodic side".into())),
        }
    }

    /// Penalties `(τ₁ⱼ, τ₂ⱼ)` from the stability table for coefficients `c`.
    pub fn penalties(&self, side: Side, c: (f64, f64)) -> Result<(f64, f64)> {
        default_penalties(side, c, self.side(side).free_tau)
    }

    fn data(&self, side: Side, t: f64, c: (f64, f64)) -> f64 {
        let sign = match side {
            Side::Left => 1.0,
            Side::Right => -1.0,
        };
        match &self.side(side).data {
            BoundaryData::Homogeneous => 0.0,
            BoundaryData::Value(g) => g(t),
            BoundaryData::Flux(f) => {
                let (f1, f2) = f(t);
                c.0 * f1 + sign * c.1 * f2
            }
        }
    }
}

/// Stable penalties: `α₁ > 0 ⇒ (1/α₁, 0)`; `α₁ = 0, α₂ > 0 ⇒ (free ≥ 0, 1/α₂)`;
/// right side `β₁ > 0 ⇒ (−1/β₁, 0)`; `β₁ = 0, β₂ > 0 ⇒ (free ≤ 0, 1/β₂)`.
pub fn default_penalties(side: Side, c: (f64, f64), free: f64) -> Result<(f64, f64)> {
    let (c1, c2) = c;
    if c1 < 0.0 || c2 < 0.0 || (c1 == 0.0 && c2 == 0.0) {
        return Err(Error::BadPenalty(format!(
            "boundary coefficients ({c1}, {c2}) must be >= 0 and not both zero"
        )));
    }
    match side {
        Side::Left if c1 > 0.0 => Ok((1.0 / c1, 0.0)),
        Side::Left if free >= 0.0 => Ok((free, 1.0 / c2)),
        Side::Right if c1 > 0.0 => Ok((-1.0 / c1, 0.0)),
        Side::Right if free <= 0.0 => Ok((free, 1.0 / c2)),
        _ => Err(Error::BadPenalty(format!("free penalty {free} has the wrong sign"))),
    }
}

/// Checks explicit penalties against the table.
pub fn check_penalties(side: Side, c: (f64, f64), tau: (f64, f64)) -> Result<()> {
    let free = tau.0;
    let expect = default_penalties(side, c, free)?;
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-14 * (1.0 + a.abs().max(b.abs()));
    if close(expect.0, tau.0) && close(expect.1, tau.1) {
        Ok(())
    } else {
        Err(Error::BadPenalty(format!(
            "{side:?} penalties {tau:?} for coefficients {c:?}, expected {expect:?}"
        )))
    }
}

/// Everything needed at one boundary node.
#[derive(Debug, Clone, Copy)]
pub struct BoundaryEval {
    pub coeffs: (f64, f64),
    pub tau: (f64, f64),
    /// BC residual `α₁F₁ + α₂F₂ − g` (left) or `β₁F₁ − β₂F₂ − g` (right)
    pub residual: f64,
    pub f1: f64,
    pub f2: f64,
}

pub fn boundary_eval(
    state: &State1D,
    form: &FluxForm,
    bc: &BoundarySpec,
    side: Side,
    t: f64,
) -> Result<BoundaryEval> {
    let j = match side {
        Side::Left => 0,
        Side::Right => state.len() - 1,
    };
    let (h, u) = (state.h[j], state.u[j]);
    let coeffs = bc.coefficients(side, form, h, u, j)?;
    let tau = bc.penalties(side, coeffs)?;
    let (f1, f2) = form.point_flux(j, h, u);
    let data = bc.data(side, t, coeffs);
    let residual = match side {
        Side::Left => coeffs.0 * f1 + coeffs.1 * f2 - data,
        Side::Right => coeffs.0 * f1 - coeffs.1 * f2 - data,
    };
    Ok(BoundaryEval {
        coeffs,
        tau,
        residual,
        f1,
        f2,
    })
}

/// SAT contributions; only the first and last node are touched.
pub fn sat_tendency(
    state: &State1D,
    form: &FluxForm,
    bc: &BoundarySpec,
    t: f64,
    pair: &SbpOperatorPair,
) -> Result<State1D> {
    let mut out = State1D::zeros(state.len());
    add_sat(state, form, bc, t, pair, &mut out)?;
    Ok(out)
}

fn add_sat(
    state: &State1D,
    form: &FluxForm,
    bc: &BoundarySpec,
    t: f64,
    pair: &SbpOperatorPair,
    out: &mut State1D,
) -> Result<()> {
    if bc.is_periodic() {
        return Ok(());
    }
    bc.validate()?;
    let p = pair.p_weights();
    let n = state.len();
    for (side, j) in [(Side::Left, 0), (Side::Right, n - 1)] {
        let e = boundary_eval(state, form, bc, side, t)?;
        out.h[j] -= e.tau.0 * e.residual / p[j];
        out.u[j] -= e.tau.1 * e.residual / p[j];
    }
    Ok(())
}

/// `BT = F₁₀F₂₀ − F₁ₙF₂ₙ − Σ τ-weighted residuals`; equals `qᵀ(W⊗P)(−D_xF + SAT)`.
pub fn boundary_term(state: &State1D, form: &FluxForm, bc: &BoundarySpec, t: f64) -> Result<f64> {
    if bc.is_periodic() {
        return Ok(0.0);
    }
    let l = boundary_eval(state, form, bc, Side::Left, t)?;
    let r = boundary_eval(state, form, bc, Side::Right, t)?;
    Ok(l.f1 * l.f2 - r.f1 * r.f2
        - l.tau.0 * l.f2 * l.residual
        - r.tau.0 * r.f2 * r.residual
        - l.tau.1 * l.f1 * l.residual
        - r.tau.1 * r.f1 * r.residual)
}

/// `(qᵀ(W'⊗P)q, BT)` for the nonlinear form, `(qᵀ(W⊗P)q, BT)` for the linear one.
pub fn energy_and_bt(
    state: &State1D,
    form: &FluxForm,
    bc: &BoundarySpec,
    pair: &SbpOperatorPair,
    t: f64,
) -> Result<(f64, f64)> {
    let energy = energy(state, form, pair)?;
    Ok((energy, boundary_term(state, form, bc, t)?))
}

pub fn energy(state: &State1D, form: &FluxForm, pair: &SbpOperatorPair) -> Result<f64> {
    state.check_len(pair.len())?;
    let p = pair.p_weights();
    let g = form.g;
    let mut e = 0.0;
    for j in 0..state.len() {
        let (h, u) = (state.h[j], state.u[j]);
        match &form.kind {
            FluxKind::Nonlinear => {
                if !(h > 0.0) {
                    return Err(Error::NonPositiveDepth { index: j, value: h });
                }
                let c = (g * h).sqrt();
                if u.abs() >= c {
                    return Err(Error::NotSubcritical {
                        speed: u.abs(),
                        celerity: c,
                    });
                }
                e += p[j] * (g * h * h + h * u * u);
            }
            FluxKind::Linear { u_mean, h_mean } => {
                let c = (g * h_mean[j]).sqrt();
                if u_mean[j].abs() >= c {
                    return Err(Error::NotSubcritical {
                        speed: u_mean[j].abs(),
                        celerity: c,
                    });
                }
                e += p[j] * (g * h * h + 2.0 * u_mean[j] * h * u + h_mean[j] * u * u);
            }
        }
    }
    Ok(e)
}

/// `qᵀ(W⊗P) dq` — the semi-discrete rate `½ dE/dt` for a tendency `dq`.
pub fn energy_rate(state: &State1D, form: &FluxForm, pair: &SbpOperatorPair, dq: &State1D) -> f64 {
    let p = pair.p_weights();
    (0..state.len())
        .map(|j| {
            let (f1, f2) = form.point_flux(j, state.h[j], state.u[j]);
            p[j] * (f2 * dq.h[j] + f1 * dq.u[j])
        })
        .sum()
}

/// Manufactured forcing `(G_h, G_u)` evaluated on the grid at time `t`.
pub type Forcing1D = Arc<dyn Fn(f64, &[f64]) -> (Vec<f64>, Vec<f64>) + Send + Sync>;

/// Right-hand side of the semi-discrete system.
#[derive(Clone)]
pub struct Rhs1D {
    pub pair: Arc<SbpOperatorPair>,
    pub form: FluxForm,
    pub bc: BoundarySpec,
    pub hv: Option<HyperViscosity>,
    /// Bed elevation `b(x)`, folded into the momentum flux.
    pub bathymetry: Option<Vec<f64>>,
    pub forcing: Option<Forcing1D>,
    /// Swap the roles of `D₊` and `D₋`.
    pub reversed_split: bool,
    pub coords: Vec<f64>,
}

impl fmt::Debug for Rhs1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Rhs1D")
            .field("pair", &self.pair.label())
            .field("form", &self.form.is_nonlinear())
            .field("bc", &self.bc)
            .field("hv", &self.hv.as_ref().map(|h| (h.order, h.delta)))
            .field("bathymetry", &self.bathymetry.is_some())
            .field("forcing", &self.forcing.is_some())
            .field("reversed_split", &self.reversed_split)
            .finish()
    }
}

impl Rhs1D {
    pub fn new(pair: Arc<SbpOperatorPair>, form: FluxForm, bc: BoundarySpec, coords: Vec<f64>) -> Result<Self> {
        if coords.len() != pair.len() {
            return Err(Error::LengthMismatch {
                expected: pair.len(),
                got: coords.len(),
            });
        }
        if bc.is_periodic() != pair.is_periodic() {
            return Err(Error::InvalidArgument(
                "periodic boundary conditions need a periodic operator pair and vice versa".into(),
            ));
        }
        bc.validate()?;
        if let FluxKind::Linear { u_mean, .. } = &form.kind {
            if u_mean.len() != pair.len() {
                return Err(Error::LengthMismatch {
                    expected: pair.len(),
                    got: u_mean.len(),
                });
            }
        }
        Ok(Self {
            pair,
            form,
            bc,
            hv: None,
            bathymetry: None,
            forcing: None,
            reversed_split: false,
            coords,
        })
    }

    pub fn with_hv(mut self, hv: HyperViscosity) -> Self {
        self.hv = Some(hv);
        self
    }

    pub fn with_bathymetry(mut self, b: Vec<f64>) -> Self {
        self.bathymetry = Some(b);
        self
    }

    pub fn with_forcing(mut self, forcing: Forcing1D) -> Self {
        self.forcing = Some(forcing);
        self
    }

    pub fn reversed(mut self, on: bool) -> Self {
        self.reversed_split = on;
        self
    }

    pub fn len(&self) -> usize {
        self.pair.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pair.is_empty()
    }

    /// Tendency `dq/dt` at time `t`.
    pub fn eval(&self, state: &State1D, t: f64) -> Result<State1D> {
        let n = self.len();
        state.check_len(n)?;
        if self.form.is_nonlinear() {
            state.check_positive()?;
        }
        let (f1, mut f2) = flux(&self.form, state);
        if let Some(b) = &self.bathymetry {
            for (f, b) in f2.iter_mut().zip(b) {
                *f += self.form.g * b;
            }
        }
        let (dc, dm) = if self.reversed_split {
            (Direction::Minus, Direction::Plus)
        } else {
            (Direction::Plus, Direction::Minus)
        };
        let mut out = State1D::zeros(n);
        self.pair.apply_into(dc, &f1, &mut out.h);
        self.pair.apply_into(dm, &f2, &mut out.u);
        for v in out.h.iter_mut().chain(out.u.iter_mut()) {
            *v = -*v;
        }
        add_sat(state, &self.form, &self.bc, t, &self.pair, &mut out)?;
        if let Some(hv) = &self.hv {
            if hv.delta > 0.0 {
                let k = dissipation_tendency_1d(hv, state, &self.form)?;
                for j in 0..n {
                    out.h[j] += k.h[j];
                    out.u[j] += k.u[j];
                }
            }
        }
        if let Some(forcing) = &self.forcing {
            let (gh, gu) = forcing(t, &self.coords);
            for j in 0..n {
                out.h[j] += gh[j];
                out.u[j] += gu[j];
            }
        }
        Ok(out)
    }
}
