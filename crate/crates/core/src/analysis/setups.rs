//! Initial conditions: lake at rest, merging vortex, barotropic jet.

use serde::{Deserialize, Serialize};

use crate::operators::Grid1D;
use crate::swe1d::State1D;
use crate::swe2d::State2D;

/// Parabolic bump `0.2 − 0.05(x − 10)²` on `(8, 12)`; its derivative jumps
/// at both ends.
pub fn bump(x: f64) -> f64 {
    if x > 8.0 && x < 12.0 {
        0.2 - 0.05 * (x - 10.0) * (x - 10.0)
    } else {
        0.0
    }
}

pub const LAKE_LENGTH: f64 = 25.0;
pub const LAKE_STAGE: f64 = 0.5;

/// Returns `(state, bathymetry)`; the perturbed variant adds
/// `0.1·max|b|·exp(−(x − 10)²/0.3)` to `h`.
pub fn lake_at_rest_setup(grid: &Grid1D, perturbed: bool) -> (State1D, Vec<f64>) {
    let b: Vec<f64> = grid.coords.iter().map(|&x| bump(x)).collect();
    let bmax = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let h = grid
        .coords
        .iter()
        .zip(&b)
        .map(|(&x, &bx)| {
            let mut h = LAKE_STAGE - bx;
            if perturbed {
                h += 0.1 * bmax * (-(x - 10.0) * (x - 10.0) / 0.3).exp();
            }
            h
        })
        .collect();
    let n = grid.n_points;
    (
        State1D {
            h,
            u: vec![0.0; n],
        },
        b,
    )
}

/// Square periodic 2D grid of `n × n` points with spacing `L/n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid2D {
    pub n: usize,
    pub length: f64,
}

impl Grid2D {
    pub fn new(n: usize, length: f64) -> Self {
        Self { n, length }
    }

    pub fn dx(&self) -> f64 {
        self.length / self.n as f64
    }

    pub fn coord(&self, i: usize) -> f64 {
        i as f64 * self.dx()
    }

    /// Samples `f(x, y)` into row-major fields.
    pub fn sample<F>(&self, mut f: F) -> State2D
    where
        F: FnMut(f64, f64) -> (f64, f64, f64),
    {
        let n = self.n;
        let mut s = State2D::zeros(n);
        for i in 0..n {
            let x = self.coord(i);
            for j in 0..n {
                let (h, u, v) = f(x, self.coord(j));
                s.h[i * n + j] = h;
                s.u[i * n + j] = u;
                s.v[i * n + j] = v;
            }
        }
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VortexParams {
    pub f_c: f64,
    pub g: f64,
    pub h_mean: f64,
}

impl Default for VortexParams {
    fn default() -> Self {
        Self {
            f_c: 8.0,
            g: 8.0,
            h_mean: 8.0,
        }
    }
}

const VORTEX_X: [f64; 2] = [2.6 * std::f64::consts::PI / 3.0, 3.5 * std::f64::consts::PI / 3.0];

/// Stream function and its gradient `(ψ, ψ_x, ψ_y)`.
pub fn vortex_stream(x: f64, y: f64) -> (f64, f64, f64) {
    let pi = std::f64::consts::PI;
    let (mut psi, mut px, mut py) = (0.0, 0.0, 0.0);
    for xc in VORTEX_X {
        let e = (-5.0 * ((y - pi).powi(2) + (x - xc).powi(2))).exp();
        psi += e;
        px += -10.0 * (x - xc) * e;
        py += -10.0 * (y - pi) * e;
    }
    (psi, px, py)
}

/// `u = −ψ_y`, `v = ψ_x`, `h = H + (f/g)ψ` on `(0, 2π]²`.
pub fn merging_vortex_setup(grid: &Grid2D, p: VortexParams) -> State2D {
    grid.sample(|x, y| {
        let (psi, px, py) = vortex_stream(x, y);
        (p.h_mean + p.f_c / p.g * psi, -py, px)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JetParams {
    pub u0: f64,
    pub y_plus: f64,
    pub y_minus: f64,
    pub length: f64,
    pub h_mean: f64,
    pub f_c: f64,
    pub kv: f64,
    pub g: f64,
    pub k: f64,
}

impl Default for JetParams {
    fn default() -> Self {
        Self {
            u0: 50.0,
            y_plus: 3e7,
            y_minus: 1e7,
            length: 4e7,
            h_mean: 1e4,
            f_c: 2.0 * 7.292e-5,
            kv: 1e-7,
            g: 1.0,
            k: 1.0,
        }
    }
}

/// `∫ sech(a s) ds = (2/a)·atan(tanh(a s/2))`.
pub fn sech_antiderivative(a: f64, s: f64) -> f64 {
    2.0 / a * (0.5 * a * s).tanh().atan()
}

fn sech(x: f64) -> f64 {
    1.0 / x.cosh()
}

impl JetParams {
    pub fn u(&self, y: f64) -> f64 {
        self.u0 * (sech(self.kv * (y - self.y_plus)) - sech(self.kv * (y - self.y_minus)))
    }

    /// `−(f/g)∫₀^y u ds`.
    pub fn balanced_height(&self, y: f64) -> f64 {
        let a = self.kv;
        let jet = |y0: f64| sech_antiderivative(a, y - y0) - sech_antiderivative(a, -y0);
        -self.f_c / self.g * self.u0 * (jet(self.y_plus) - jet(self.y_minus))
    }

    pub fn perturbation(&self, x: f64, y: f64) -> f64 {
        let l = self.length;
        let p = [(0.75 * l, 0.95 * l), (0.25 * l, 0.2375 * l)];
        let d = |(xi, yi): (f64, f64)| ((x - xi) / l).powi(2) + ((y - yi) / l).powi(2);
        0.02 * self.h_mean * ((-self.k * d(p[0])).exp() + (-self.k * d(p[1])).exp())
    }
}

/// Two opposite sech jets in geostrophic balance plus two Gaussian bumps.
pub fn barotropic_jet_setup(grid: &Grid2D, p: JetParams) -> State2D {
    grid.sample(|x, y| {
        (
            p.h_mean + p.balanced_height(y) + p.perturbation(x, y),
            p.u(y),
            0.0,
        )
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bump_vertex_and_edges() {
        assert_eq!(bump(10.0), 0.2);
        assert_eq!(bump(8.0), 0.0);
        assert_eq!(bump(12.0), 0.0);
        assert!((bump(8.0 + 1e-9) - 0.0).abs() < 1e-9);
    }

    #[test]
    fn vortex_centre() {
        let pi = std::f64::consts::PI;
        let (psi, px, py) = vortex_stream(2.6 * pi / 3.0, pi);
        assert!((psi - (1.0 + (-5.0 * (0.9 * pi / 3.0).powi(2)).exp())).abs() < 1e-15);
        assert_eq!(py, 0.0);
        // only the neighbouring vortex contributes to the gradient
        let d = 0.9 * pi / 3.0;
        assert!((px - 10.0 * d * (-5.0 * d * d).exp()).abs() < 1e-14);
    }

    #[test]
    fn jet_peak_speed() {
        let p = JetParams::default();
        assert!((p.u0 * sech(0.0) - 50.0).abs() < 1e-15);
        assert!((p.u(p.y_plus) - 50.0 * (1.0 - sech(2.0))).abs() < 1e-12);
        // height returns to its start value over the full period
        assert!(p.balanced_height(p.length).abs() < 1e-6 * p.h_mean);
    }
}
