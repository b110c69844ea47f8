//! High-order hyper-viscosity built from the operator pair.
//!
//! With `T₋ = P⁻¹D₋ᵀP = P⁻¹B − D₊` and `T₊ = P⁻¹D₊ᵀP = P⁻¹B − D₋`,
//!
//! ```text
//! order 4:  P⁻¹𝒜 f = −α T₋D₋ (c ∘ T₋D₋ f)               ≈ −α D₊D₋ c D₊D₋ f
//! order 6:  P⁻¹𝒜 f = −α T₊D₊ T₊ (c ∘ D₊ T₊D₊ f)          ≈ +α D₋D₊D₋ c D₊D₋D₊ f
//! ```
//!
//! The left forms are what gets evaluated; they make `𝒜` exactly symmetric
//! and negative semi-definite for any `c ≥ 0`. When `c` and its low
//! derivatives vanish at the boundary the `P⁻¹B` corrections are tiny and the
//! right forms are recovered.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::operators::{Grid1D, SbpOperatorPair};
use crate::swe1d::{FluxForm, State1D};
use crate::swe2d::State2D;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HvOrder {
    #[serde(rename = "4")]
    Four,
    #[serde(rename = "6")]
    Six,
}

impl HvOrder {
    pub fn from_int(p: usize) -> Result<Self> {
        match p {
            4 => Ok(HvOrder::Four),
            6 => Ok(HvOrder::Six),
            _ => Err(Error::InvalidArgument(format!(
                "hyper-viscosity order must be 4 or 6, got {p}"
            ))),
        }
    }

    pub fn as_int(self) -> usize {
        match self {
            HvOrder::Four => 4,
            HvOrder::Six => 6,
        }
    }
}

/// Quintic smootherstep clamped to `[0, 1]`.
fn smootherstep(r: f64) -> f64 {
    let r = r.clamp(0.0, 1.0);
    r * r * r * (r * (6.0 * r - 15.0) + 10.0)
}

/// `c(x) = s(x/(wL)) · s((L−x)/(wL))`: zero with vanishing first and second
/// derivatives at both ends, one on the plateau.
pub fn smooth_boxcar(grid: &Grid1D, ramp_fraction: f64) -> Result<Vec<f64>> {
    if !(ramp_fraction > 0.0 && ramp_fraction <= 0.5) {
        return Err(Error::BadRamp(ramp_fraction));
    }
    let w = ramp_fraction * grid.length;
    Ok(grid
        .coords
        .iter()
        .map(|&x| smootherstep(x / w) * smootherstep((grid.length - x) / w))
        .collect())
}

#[derive(Debug, Clone)]
pub struct HyperViscosity {
    pub order: HvOrder,
    pub delta: f64,
    pub alpha: f64,
    pub c: Vec<f64>,
    pair: Arc<SbpOperatorPair>,
}

impl HyperViscosity {
    /// Boxcar profile on bounded grids, `c ≡ 1` on periodic ones.
    pub fn new(
        pair: Arc<SbpOperatorPair>,
        grid: &Grid1D,
        order: HvOrder,
        delta: f64,
        ramp_fraction: f64,
    ) -> Result<Self> {
        let c = if pair.is_periodic() {
            vec![1.0; pair.len()]
        } else {
            smooth_boxcar(grid, ramp_fraction)?
        };
        Self::with_profile(pair, order, delta, c)
    }

    pub fn with_profile(
        pair: Arc<SbpOperatorPair>,
        order: HvOrder,
        delta: f64,
        c: Vec<f64>,
    ) -> Result<Self> {
        if !(delta >= 0.0) {
            return Err(Error::InvalidArgument(format!("delta = {delta} must be >= 0")));
        }
        if c.len() != pair.len() {
            return Err(Error::LengthMismatch {
                expected: pair.len(),
                got: c.len(),
            });
        }
        if c.iter().any(|&v| !(v >= 0.0)) {
            return Err(Error::InvalidArgument("negative viscosity profile".into()));
        }
        let dx = pair.dx();
        let alpha = match order {
            HvOrder::Four => delta * dx.powi(3),
            HvOrder::Six => delta * dx.powi(5),
        };
        Ok(Self {
            order,
            delta,
            alpha,
            c,
            pair,
        })
    }

    pub fn pair(&self) -> &SbpOperatorPair {
        &self.pair
    }

    pub fn len(&self) -> usize {
        self.c.len()
    }

    pub fn is_empty(&self) -> bool {
        self.c.is_empty()
    }

    /// `P⁻¹𝒜 f`.
    pub fn apply(&self, f: &[f64]) -> Result<Vec<f64>> {
        if f.len() != self.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                got: f.len(),
            });
        }
        let mut out = vec![0.0; f.len()];
        let mut scratch = Scratch::new(f.len());
        self.apply_into(f, &mut out, &mut scratch);
        Ok(out)
    }

    /// `P⁻¹𝒜 f` into `out` using caller-owned work space.
    pub fn apply_into(&self, f: &[f64], out: &mut [f64], s: &mut Scratch) {
        let pair = &*self.pair;
        let dp = pair.d_plus();
        let dm = pair.d_minus();
        let Scratch { a, b } = s;
        match self.order {
            HvOrder::Four => {
                // a = T₋D₋ f
                dm.apply_into(f, b);
                dp.apply_into(b, a);
                self.transpose_fix(a, b, -1.0);
                for (x, c) in a.iter_mut().zip(&self.c) {
                    *x *= c;
                }
                // out = −α T₋D₋ a
                dm.apply_into(a, b);
                dp.apply_into(b, out);
                self.transpose_fix(out, b, -1.0);
                for o in out.iter_mut() {
                    *o *= -self.alpha;
                }
            }
            HvOrder::Six => {
                // a = T₊D₊ f
                dp.apply_into(f, b);
                dm.apply_into(b, a);
                self.transpose_fix(a, b, -1.0);
                // b = c ∘ D₊ a
                dp.apply_into(a, b);
                for (x, c) in b.iter_mut().zip(&self.c) {
                    *x *= c;
                }
                // a = T₊ b
                dm.apply_into(b, a);
                self.transpose_fix(a, b, -1.0);
                // out = −α T₊D₊ a
                dp.apply_into(a, b);
                dm.apply_into(b, out);
                self.transpose_fix(out, b, -1.0);
                for o in out.iter_mut() {
                    *o *= -self.alpha;
                }
            }
        }
    }

    /// Given `y = D v` in `target`, forms `sign·y + P⁻¹B v`.
    fn transpose_fix(&self, target: &mut [f64], v: &[f64], sign: f64) {
        for t in target.iter_mut() {
            *t *= sign;
        }
        if self.pair.is_periodic() {
            return;
        }
        let n = target.len();
        let p = self.pair.p_weights();
        target[0] -= v[0] / p[0];
        target[n - 1] += v[n - 1] / p[n - 1];
    }
}

/// Work space for [`HyperViscosity::apply_into`].
#[derive(Debug, Clone)]
pub struct Scratch {
    a: Vec<f64>,
    b: Vec<f64>,
}

impl Scratch {
    pub fn new(n: usize) -> Self {
        Self {
            a: vec![0.0; n],
            b: vec![0.0; n],
        }
    }
}

/// Free-function form of [`HyperViscosity::apply`].
pub fn apply_hv(hv: &HyperViscosity, f: &[f64]) -> Result<Vec<f64>> {
    hv.apply(f)
}

/// `𝒦q = W⁻¹ (P⁻¹𝒜h, P⁻¹𝒜u)` node by node.
pub fn dissipation_tendency_1d(
    hv: &HyperViscosity,
    state: &State1D,
    form: &FluxForm,
) -> Result<State1D> {
    let n = hv.len();
    state.check_len(n)?;
    let rh = hv.apply(&state.h)?;
    let ru = hv.apply(&state.u)?;
    let mut out = State1D::zeros(n);
    for j in 0..n {
        let h = state.h[j];
        if form.is_nonlinear() && !(h > 0.0) {
            return Err(Error::NonPositiveDepth { index: j, value: h });
        }
        let [a, b, c] = form.weight(j, h, state.u[j]);
        let det = a * c - b * b;
        let scale = a.abs().max(b.abs()).max(c.abs());
        if !(det.abs() >= 1e-14 * scale * scale) {
            return Err(Error::SingularWeight { index: j });
        }
        out.h[j] = (c * rh[j] - b * ru[j]) / det;
        out.u[j] = (a * ru[j] - b * rh[j]) / det;
    }
    Ok(out)
}

/// Applies a 1D operator along x (stride `n`) for every y index.
pub(crate) fn sweep_x(
    n: usize,
    f: &[f64],
    out: &mut [f64],
    mut op: impl FnMut(&[f64], &mut [f64]),
) {
    let mut col = vec![0.0; n];
    let mut res = vec![0.0; n];
    for j in 0..n {
        for i in 0..n {
            col[i] = f[i * n + j];
        }
        op(&col, &mut res);
        for i in 0..n {
            out[i * n + j] = res[i];
        }
    }
}

/// Applies a 1D operator along y (contiguous) for every x index.
pub(crate) fn sweep_y(n: usize, f: &[f64], out: &mut [f64], mut op: impl FnMut(&[f64], &mut [f64])) {
    for (src, dst) in f.chunks_exact(n).zip(out.chunks_exact_mut(n)) {
        op(src, dst);
    }
}

/// `(P⁻¹𝒜 ⊗ I + I ⊗ P⁻¹𝒜) f` by row and column sweeps.
pub fn apply_hv_2d(hv_x: &HyperViscosity, hv_y: &HyperViscosity, n: usize, f: &[f64]) -> Vec<f64> {
    let mut ax = vec![0.0; n * n];
    let mut ay = vec![0.0; n * n];
    let mut sx = Scratch::new(n);
    let mut sy = Scratch::new(n);
    sweep_x(n, f, &mut ax, |a, b| hv_x.apply_into(a, b, &mut sx));
    sweep_y(n, f, &mut ay, |a, b| hv_y.apply_into(a, b, &mut sy));
    for (x, y) in ax.iter_mut().zip(&ay) {
        *x += y;
    }
    ax
}

/// 2D dissipation `W⁻¹ r` with `W = [[g, u/2, v/2], [u/2, h/2, 0], [v/2, 0, h/2]]`.
pub fn dissipation_tendency_2d(
    hv_x: &HyperViscosity,
    hv_y: &HyperViscosity,
    state: &State2D,
    g: f64,
) -> Result<State2D> {
    let n = state.n;
    if hv_x.len() != n || hv_y.len() != n {
        return Err(Error::ShapeMismatch {
            expected: (n, n),
            got: (hv_x.len(), hv_y.len()),
        });
    }
    let rh = apply_hv_2d(hv_x, hv_y, n, &state.h);
    let ru = apply_hv_2d(hv_x, hv_y, n, &state.u);
    let rv = apply_hv_2d(hv_x, hv_y, n, &state.v);
    let mut out = State2D::zeros(n);
    for k in 0..n * n {
        let (h, u, v) = (state.h[k], state.u[k], state.v[k]);
        if !(h > 0.0) {
            return Err(Error::NonPositiveDepth { index: k, value: h });
        }
        // Schur complement on the diagonal (u, v) block
        let s = g - (u * u + v * v) / (2.0 * h);
        let th = (rh[k] - (u * ru[k] + v * rv[k]) / h) / s;
        out.h[k] = th;
        out.u[k] = (2.0 * ru[k] - u * th) / h;
        out.v[k] = (2.0 * rv[k] - v * th) / h;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boxcar_values() {
        let grid = Grid1D::bounded(200, 10.0).unwrap();
        let c = smooth_boxcar(&grid, 0.1).unwrap();
        assert_eq!(c[0], 0.0);
        assert_eq!(c[200], 0.0);
        assert_eq!(c[100], 1.0);
        // x = 0.05 L sits half way up the ramp
        assert!((c[10] - 0.5).abs() < 1e-15);
        assert!(smooth_boxcar(&grid, 0.0).is_err());
        assert!(smooth_boxcar(&grid, 0.6).is_err());
    }

    #[test]
    fn smootherstep_midpoint() {
        assert_eq!(smootherstep(0.5), 0.5);
        assert_eq!(smootherstep(-1.0), 0.0);
        assert_eq!(smootherstep(2.0), 1.0);
    }

    #[test]
    fn hv_order_parse() {
        assert_eq!(HvOrder::from_int(4).unwrap(), HvOrder::Four);
        assert!(HvOrder::from_int(5).is_err());
        assert_eq!(HvOrder::Six.as_int(), 6);
    }
}
