//! Exact wet dam break: left rarefaction, right shock.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DamBreak {
    pub g: f64,
    pub h_l: f64,
    pub h_r: f64,
    pub x0: f64,
    pub length: f64,
}

impl Default for DamBreak {
    fn default() -> Self {
        Self {
            g: 9.81,
            h_l: 1.0,
            h_r: 0.5,
            x0: 5.0,
            length: 10.0,
        }
    }
}

/// `−8 g h_r c²(√(g h_l) − c)² + (c² − g h_r)²(c² + g h_r)`.
pub fn cm_residual(g: f64, h_l: f64, h_r: f64, c: f64) -> f64 {
    let a = (g * h_l).sqrt();
    let b = g * h_r;
    -8.0 * b * c * c * (a - c).powi(2) + (c * c - b).powi(2) * (c * c + b)
}

/// Root of [`cm_residual`] in `(√(g h_r), √(g h_l))` by bisection.
pub fn dam_break_cm(g: f64, h_l: f64, h_r: f64) -> Result<f64> {
    if !(0.0 < h_r && h_r < h_l) || !(g > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "dam break needs 0 < h_r < h_l, got h_l = {h_l}, h_r = {h_r}"
        )));
    }
    let (mut lo, mut hi) = ((g * h_r).sqrt(), (g * h_l).sqrt());
    let mut f_lo = cm_residual(g, h_l, h_r, lo);
    let f_hi = cm_residual(g, h_l, h_r, hi);
    if f_lo * f_hi > 0.0 {
        return Err(Error::NoRoot(format!("c_m in [{lo}, {hi}]")));
    }
    while hi - lo > 1e-12 * hi {
        let mid = 0.5 * (lo + hi);
        let f = cm_residual(g, h_l, h_r, mid);
        if f == 0.0 {
            return Ok(mid);
        }
        if (f < 0.0) == (f_lo < 0.0) {
            lo = mid;
            f_lo = f;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

impl DamBreak {
    pub fn cm(&self) -> Result<f64> {
        dam_break_cm(self.g, self.h_l, self.h_r)
    }

    /// Middle state `(h_m, u_m)`.
    pub fn middle_state(&self) -> Result<(f64, f64)> {
        let c = self.cm()?;
        Ok((c * c / self.g, 2.0 * ((self.g * self.h_l).sqrt() - c)))
    }

    pub fn froude(&self) -> Result<f64> {
        let (h, u) = self.middle_state()?;
        Ok(u / (self.g * h).sqrt())
    }

    /// Wave positions `(x_A, x_B, x_C)` at time `t`.
    pub fn fronts(&self, t: f64) -> Result<(f64, f64, f64)> {
        let c = self.cm()?;
        let a = (self.g * self.h_l).sqrt();
        let b = self.g * self.h_r;
        Ok((
            self.x0 - t * a,
            self.x0 + t * (2.0 * a - 3.0 * c),
            self.x0 + t * 2.0 * c * c * (a - c) / (c * c - b),
        ))
    }

    pub fn exact(&self, x: f64, t: f64) -> Result<(f64, f64)> {
        if t <= 0.0 {
            return Ok((if x <= self.x0 { self.h_l } else { self.h_r }, 0.0));
        }
        let c = self.cm()?;
        let a = (self.g * self.h_l).sqrt();
        let (xa, xb, xc) = self.fronts(t)?;
        Ok(if x <= xa {
            (self.h_l, 0.0)
        } else if x <= xb {
            let s = a - (x - self.x0) / (2.0 * t);
            (4.0 / (9.0 * self.g) * s * s, 2.0 / 3.0 * ((x - self.x0) / t + a))
        } else if x <= xc {
            (c * c / self.g, 2.0 * (a - c))
        } else {
            (self.h_r, 0.0)
        })
    }

    pub fn exact_on(&self, xs: &[f64], t: f64) -> Result<(Vec<f64>, Vec<f64>)> {
        let mut h = Vec::with_capacity(xs.len());
        let mut u = Vec::with_capacity(xs.len());
        for &x in xs {
            let (a, b) = self.exact(x, t)?;
            h.push(a);
            u.push(b);
        }
        Ok((h, u))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn froude_of_middle_state() {
        let d = DamBreak::default();
        let c = d.cm().unwrap();
        assert!(cm_residual(d.g, d.h_l, d.h_r, c).abs() <= 1e-9 * (d.g * d.h_l).powi(3));
        assert!((d.froude().unwrap() - 0.3458).abs() < 1e-3);
    }

    #[test]
    fn initial_step() {
        let d = DamBreak::default();
        assert_eq!(d.exact(5.0, 0.0).unwrap(), (1.0, 0.0));
        assert_eq!(d.exact(5.01, 0.0).unwrap(), (0.5, 0.0));
    }

    #[test]
    fn rarefaction_joins_continuously() {
        let d = DamBreak::default();
        let t = 0.4;
        let (xa, xb, xc) = d.fronts(t).unwrap();
        assert!(xa < xb && xb < xc);
        let (h, u) = d.exact(xa + 1e-12, t).unwrap();
        assert!((h - 1.0).abs() < 1e-9 && u.abs() < 1e-9);
        let (hb, ub) = d.exact(xb, t).unwrap();
        let (hm, um) = d.middle_state().unwrap();
        assert!((hb - hm).abs() < 1e-9 && (ub - um).abs() < 1e-9);
    }

    #[test]
    fn bad_depths() {
        assert!(dam_break_cm(9.81, 0.5, 1.0).is_err());
    }
}
