//! Rotating shallow water equations on a doubly periodic square grid.
//!
//! ```text
//! dh/dt = −D₊ₓ(uh) − D₊ᵧ(vh) + G_h
//! du/dt = +ω v − D₋ₓK + G_u
//! dv/dt = −ω u − D₋ᵧK + G_v
//! ω = D₋ₓv − D₋ᵧu + f_c,   K = (u² + v²)/2 + g h
//! ```
//!
//! Fields are `n × n`, row-major with `index = i·n + j`, `i` along x.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::hyperviscosity::{dissipation_tendency_2d, HyperViscosity};
use crate::operators::{BandedOperator, SbpOperatorPair};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Default)]
pub struct State2D {
    pub n: usize,
    pub h: Vec<f64>,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

impl State2D {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            h: vec![0.0; n * n],
            u: vec![0.0; n * n],
            v: vec![0.0; n * n],
        }
    }

    pub fn new(n: usize, h: Vec<f64>, u: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        let s = Self { n, h, u, v };
        s.check_shape(n)?;
        Ok(s)
    }

    pub fn check_shape(&self, n: usize) -> Result<()> {
        for f in [&self.h, &self.u, &self.v] {
            if self.n != n || f.len() != n * n {
                return Err(Error::ShapeMismatch {
                    expected: (n, n),
                    got: (self.n, f.len() / self.n.max(1)),
                });
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

/// Periodic 1D pair used along both axes.
#[derive(Debug, Clone)]
pub struct Ops2D {
    pub pair: Arc<SbpOperatorPair>,
}

impl Ops2D {
    pub fn new(pair: Arc<SbpOperatorPair>) -> Result<Self> {
        if !pair.is_periodic() {
            return Err(Error::InvalidArgument(
                "the 2D solver needs a periodic operator pair".into(),
            ));
        }
        Ok(Self { pair })
    }

    pub fn n(&self) -> usize {
        self.pair.len()
    }

    pub fn dx(&self) -> f64 {
        self.pair.dx()
    }

    /// `(D ⊗ I) f`: differentiates along x by combining whole rows.
    pub fn apply_x(&self, op: &BandedOperator, f: &[f64], out: &mut [f64]) {
        let n = self.n();
        let (c, off) = op.stencil();
        out.iter_mut().for_each(|o| *o = 0.0);
        for i in 0..n {
            let row = &mut out[i * n..(i + 1) * n];
            for (k, &ck) in c.iter().enumerate() {
                let src = (i as isize + off + k as isize).rem_euclid(n as isize) as usize;
                for (o, s) in row.iter_mut().zip(&f[src * n..(src + 1) * n]) {
                    *o += ck * s;
                }
            }
        }
    }

    /// `(I ⊗ D) f`: differentiates each contiguous row.
    pub fn apply_y(&self, op: &BandedOperator, f: &[f64], out: &mut [f64]) {
        let n = self.n();
        for (src, dst) in f.chunks_exact(n).zip(out.chunks_exact_mut(n)) {
            op.apply_into(src, dst);
        }
    }
}

/// Absolute vorticity `ω = D₋ₓv − D₋ᵧu + f_c`.
pub fn vorticity(state: &State2D, f_c: f64, ops: &Ops2D) -> Result<Vec<f64>> {
    let n = ops.n();
    state.check_shape(n)?;
    let dm = ops.pair.d_minus();
    let mut w = vec![0.0; n * n];
    let mut tmp = vec![0.0; n * n];
    ops.apply_x(dm, &state.v, &mut w);
    ops.apply_y(dm, &state.u, &mut tmp);
    for (a, b) in w.iter_mut().zip(&tmp) {
        *a += f_c - b;
    }
    Ok(w)
}

pub type Forcing2D = Arc<dyn Fn(f64) -> (Vec<f64>, Vec<f64>, Vec<f64>) + Send + Sync>;

#[derive(Clone)]
pub struct Rhs2D {
    pub ops: Ops2D,
    pub g: f64,
    pub f_c: f64,
    pub hv: Option<(HyperViscosity, HyperViscosity)>,
    pub forcing: Option<Forcing2D>,
}

impl fmt::Debug for Rhs2D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Rhs2D")
            .field("pair", &self.ops.pair.label())
            .field("g", &self.g)
            .field("f_c", &self.f_c)
            .field("hv", &self.hv.as_ref().map(|h| (h.0.order, h.0.delta)))
            .field("forcing", &self.forcing.is_some())
            .finish()
    }
}

impl Rhs2D {
    pub fn new(ops: Ops2D, g: f64, f_c: f64) -> Self {
        Self {
            ops,
            g,
            f_c,
            hv: None,
            forcing: None,
        }
    }

    pub fn with_hv(mut self, hv: HyperViscosity) -> Self {
        self.hv = Some((hv.clone(), hv));
        self
    }

    pub fn with_forcing(mut self, forcing: Forcing2D) -> Self {
        self.forcing = Some(forcing);
        self
    }

    pub fn eval(&self, state: &State2D, t: f64) -> Result<State2D> {
        let n = self.ops.n();
        state.check_shape(n)?;
        state.check_positive()?;
        let dp = self.ops.pair.d_plus();
        let dm = self.ops.pair.d_minus();
        let nn = n * n;
        let mut out = State2D::zeros(n);
        let mut a = vec![0.0; nn];
        let mut b = vec![0.0; nn];

        // continuity
        for k in 0..nn {
            a[k] = state.u[k] * state.h[k];
            b[k] = state.v[k] * state.h[k];
        }
        let mut t1 = vec![0.0; nn];
        self.ops.apply_x(dp, &a, &mut out.h);
        self.ops.apply_y(dp, &b, &mut t1);
        for k in 0..nn {
            out.h[k] = -(out.h[k] + t1[k]);
        }

        // momentum
        let w = vorticity(state, self.f_c, &self.ops)?;
        for k in 0..nn {
            let (u, v) = (state.u[k], state.v[k]);
            a[k] = 0.5 * (u * u + v * v) + self.g * state.h[k];
        }
        self.ops.apply_x(dm, &a, &mut out.u);
        self.ops.apply_y(dm, &a, &mut out.v);
        for k in 0..nn {
            out.u[k] = w[k] * state.v[k] - out.u[k];
            out.v[k] = -w[k] * state.u[k] - out.v[k];
        }

        if let Some((hx, hy)) = &self.hv {
            if hx.delta > 0.0 || hy.delta > 0.0 {
                let k = dissipation_tendency_2d(hx, hy, state, self.g)?;
                add(&mut out, &k);
            }
        }
        if let Some(forcing) = &self.forcing {
            let (gh, gu, gv) = forcing(t);
            for k in 0..nn {
                out.h[k] += gh[k];
                out.u[k] += gu[k];
                out.v[k] += gv[k];
            }
        }
        Ok(out)
    }
}

fn add(a: &mut State2D, b: &State2D) {
    for (x, y) in a
        .h
        .iter_mut()
        .chain(a.u.iter_mut())
        .chain(a.v.iter_mut())
        .zip(b.h.iter().chain(&b.u).chain(&b.v))
    {
        *x += y;
    }
}

/// `qᵀ(P W) dq` with `Wq = (K, uh, vh)`: half the semi-discrete energy rate.
pub fn energy_rate(state: &State2D, g: f64, dx: f64, dq: &State2D) -> f64 {
    let area = dx * dx;
    let mut acc = 0.0;
    for k in 0..state.h.len() {
        let (h, u, v) = (state.h[k], state.u[k], state.v[k]);
        let kin = 0.5 * (u * u + v * v) + g * h;
        acc += kin * dq.h[k] + u * h * dq.u[k] + v * h * dq.v[k];
    }
    area * acc
}

/// Discrete invariants at one instant, with changes relative to a reference.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub energy: f64,
    pub enstrophy: f64,
    pub vorticity: f64,
    pub mass: f64,
    pub rel_energy: f64,
    pub rel_enstrophy: f64,
    pub rel_vorticity: f64,
    pub rel_mass: f64,
}

impl DiagnosticsRecord {
    /// Fills the relative changes `(X(t) − X(0))/X(0)`.
    pub fn relative_to(mut self, initial: &DiagnosticsRecord) -> Self {
        let rel = |x: f64, x0: f64| if x0 == 0.0 { x - x0 } else { (x - x0) / x0 };
        self.rel_energy = rel(self.energy, initial.energy);
        self.rel_enstrophy = rel(self.enstrophy, initial.enstrophy);
        self.rel_vorticity = rel(self.vorticity, initial.vorticity);
        self.rel_mass = rel(self.mass, initial.mass);
        self
    }
}

/// Energy, enstrophy `Σ ω²/h`, total vorticity and mass, summed serially.
pub fn invariants(state: &State2D, f_c: f64, g: f64, ops: &Ops2D, t: f64) -> Result<DiagnosticsRecord> {
    state.check_positive()?;
    let w = vorticity(state, f_c, ops)?;
    let area = ops.dx() * ops.dx();
    let (mut e, mut es, mut wt, mut m) = (0.0, 0.0, 0.0, 0.0);
    for k in 0..state.h.len() {
        let (h, u, v) = (state.h[k], state.u[k], state.v[k]);
        e += 0.5 * (g * h * h + h * u * u + h * v * v);
        es += w[k] * w[k] / h;
        wt += w[k];
        m += h;
    }
    Ok(DiagnosticsRecord {
        t,
        energy: e * area,
        enstrophy: es * area,
        vorticity: wt * area,
        mass: m * area,
        rel_energy: 0.0,
        rel_enstrophy: 0.0,
        rel_vorticity: 0.0,
        rel_mass: 0.0,
    })
}
