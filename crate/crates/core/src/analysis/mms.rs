//! Manufactured solutions in 1D and 2D, with closed-form forcings.

use serde::{Deserialize, Serialize};

/// Travelling Gaussian `u = exp(−(x − x₀ − c t)²)`, `h = u + offset`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mms1d {
    pub g: f64,
    pub length: f64,
    pub x0: f64,
    pub speed: f64,
    pub offset: f64,
}

impl Default for Mms1d {
    /// `L = 10`, `x₀ = L/2`, `c = √(g·10)` (the mean depth of `h`).
    fn default() -> Self {
        let g = 9.81;
        Self {
            g,
            length: 10.0,
            x0: 5.0,
            speed: (g * 10.0f64).sqrt(),
            offset: 10.0,
        }
    }
}

/// Which flux the forcing is manufactured for.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum MmsFlux {
    /// `F = (U h + H u, U u + g h)` with constant means.
    Linear { u_mean: f64, h_mean: f64 },
    Nonlinear,
}

struct Jet1d {
    h: f64,
    u: f64,
    ux: f64,
    ut: f64,
}

impl Mms1d {
    fn eval(&self, x: f64, t: f64) -> Jet1d {
        let phi = x - self.x0 - self.speed * t;
        let u = (-phi * phi).exp();
        Jet1d {
            h: u + self.offset,
            u,
            ux: -2.0 * phi * u,
            ut: 2.0 * self.speed * phi * u,
        }
    }

    pub fn exact(&self, x: f64, t: f64) -> (f64, f64) {
        let e = self.eval(x, t);
        (e.h, e.u)
    }

    /// `(G_h, G_u) = ∂ₜq + ∂ₓF(q)` at the exact solution (`h_x = u_x`).
    pub fn forcing(&self, x: f64, t: f64, flux: MmsFlux) -> (f64, f64) {
        let e = self.eval(x, t);
        match flux {
            MmsFlux::Nonlinear => (e.ut + e.ux * (e.h + e.u), e.ut + e.ux * (e.u + self.g)),
            MmsFlux::Linear { u_mean, h_mean } => (
                e.ut + (u_mean + h_mean) * e.ux,
                e.ut + (u_mean + self.g) * e.ux,
            ),
        }
    }

    /// Exact fluxes `(F₁, F₂)`; used as boundary data.
    pub fn flux(&self, x: f64, t: f64, flux: MmsFlux) -> (f64, f64) {
        let (h, u) = self.exact(x, t);
        match flux {
            MmsFlux::Nonlinear => (u * h, 0.5 * u * u + self.g * h),
            MmsFlux::Linear { u_mean, h_mean } => (u_mean * h + h_mean * u, u_mean * u + self.g * h),
        }
    }
}

/// Doubly periodic sinusoid on `[0, 1]²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mms2d {
    pub g: f64,
    pub h_mean: f64,
    pub f_c: f64,
    pub x0: f64,
    pub y0: f64,
    pub kx: f64,
    pub ky: f64,
    pub omega: f64,
    pub amplitude: f64,
}

impl Default for Mms2d {
    fn default() -> Self {
        let tau = 2.0 * std::f64::consts::PI;
        Self {
            g: 9.81,
            h_mean: 10.0,
            f_c: 0.0,
            x0: 0.5,
            y0: 0.5,
            kx: tau,
            ky: tau,
            omega: tau,
            amplitude: 0.1,
        }
    }
}

impl Mms2d {
    pub fn exact(&self, x: f64, y: f64, t: f64) -> (f64, f64, f64) {
        let (sx, cx) = (self.kx * (x - self.x0)).sin_cos();
        let (sy, cy) = (self.ky * (y - self.y0)).sin_cos();
        let (st, ct) = (self.omega * t).sin_cos();
        (self.h_mean + self.amplitude * cx * cy * ct, ct * sy * cx, st * cy * sx)
    }

    /// Residual of the rotating equations at the exact fields, including the
    /// `ω u^⊥` term with relative vorticity.
    pub fn forcing(&self, x: f64, y: f64, t: f64) -> (f64, f64, f64) {
        let (kx, ky, a, w) = (self.kx, self.ky, self.amplitude, self.omega);
        let (sx, cx) = (kx * (x - self.x0)).sin_cos();
        let (sy, cy) = (ky * (y - self.y0)).sin_cos();
        let (st, ct) = (w * t).sin_cos();

        let h = self.h_mean + a * cx * cy * ct;
        let hx = -a * kx * sx * cy * ct;
        let hy = -a * ky * cx * sy * ct;
        let ht = -a * w * cx * cy * st;

        let u = ct * sy * cx;
        let ux = -kx * ct * sy * sx;
        let uy = ky * ct * cy * cx;
        let ut = -w * st * sy * cx;

        let v = st * cy * sx;
        let vx = kx * st * cy * cx;
        let vy = -ky * st * sy * sx;
        let vt = w * ct * cy * sx;

        let vort = vx - uy + self.f_c;
        let gh = ht + ux * h + u * hx + vy * h + v * hy;
        let gu = ut - vort * v + u * ux + v * vx + self.g * hx;
        let gv = vt + vort * u + u * uy + v * vy + self.g * hy;
        (gh, gu, gv)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn peak_values() {
        let m = Mms1d::default();
        assert_eq!(m.exact(5.0, 0.0), (11.0, 1.0));
        let (h, u, v) = Mms2d::default().exact(0.5, 0.5, 0.0);
        assert!((h - 10.1).abs() < 1e-15 && u == 0.0 && v == 0.0);
    }

    #[test]
    fn quarter_period_flattens_height() {
        let m = Mms2d::default();
        for k in 0..10 {
            let (h, _, _) = m.exact(0.1 * k as f64, 0.37, 0.25);
            assert!((h - 10.0).abs() < 1e-15);
        }
    }
}
