//! Classical four-stage Runge–Kutta with a time step frozen from the
//! initial data.

use serde::{Deserialize, Serialize};

use crate::swe1d::State1D;
use crate::swe2d::State2D;
use crate::{Error, Result};

/// Vector-space operations the integrator needs.
pub trait OdeState: Clone {
    /// `self += a·x`
    fn axpy(&mut self, a: f64, x: &Self);
    fn all_finite(&self) -> bool;
}

impl OdeState for Vec<f64> {
    fn axpy(&mut self, a: f64, x: &Self) {
        for (s, v) in self.iter_mut().zip(x) {
            *s += a * v;
        }
    }
    fn all_finite(&self) -> bool {
        self.iter().all(|v| v.is_finite())
    }
}

impl OdeState for State1D {
    fn axpy(&mut self, a: f64, x: &Self) {
        self.h.axpy(a, &x.h);
        self.u.axpy(a, &x.u);
    }
    fn all_finite(&self) -> bool {
        self.h.all_finite() && self.u.all_finite()
    }
}

impl OdeState for State2D {
    fn axpy(&mut self, a: f64, x: &Self) {
        self.h.axpy(a, &x.h);
        self.u.axpy(a, &x.u);
        self.v.axpy(a, &x.v);
    }
    fn all_finite(&self) -> bool {
        self.h.all_finite() && self.u.all_finite() && self.v.all_finite()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeControl {
    pub cfl: f64,
    pub dt: f64,
    pub t_end: f64,
    pub callback_stride: usize,
}

impl TimeControl {
    pub fn new(cfl: f64, dt: f64, t_end: f64, callback_stride: usize) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::InvalidArgument(format!("time step {dt} must be positive")));
        }
        if !(t_end >= 0.0) || !t_end.is_finite() {
            return Err(Error::InvalidArgument(format!("end time {t_end} must be >= 0")));
        }
        Ok(Self {
            cfl,
            dt,
            t_end,
            callback_stride: callback_stride.max(1),
        })
    }

    /// Exactly `n` full steps.
    pub fn steps(cfl: f64, dt: f64, n: usize, callback_stride: usize) -> Result<Self> {
        Self::new(cfl, dt, dt * n as f64, callback_stride)
    }

    /// Number of steps needed to reach `t_end` (the last one possibly short).
    pub fn n_steps(&self) -> usize {
        let r = self.t_end / self.dt;
        let k = r.round();
        if (r - k).abs() <= 1e-9 * r.max(1.0) {
            k as usize
        } else {
            r.ceil() as usize
        }
    }
}

fn max_speed(u: &[f64], v: Option<&[f64]>, h: &[f64], g: f64) -> Result<f64> {
    let mut s: f64 = 0.0;
    for (k, &hk) in h.iter().enumerate() {
        if !(hk > 0.0) {
            return Err(Error::NonPositiveDepth { index: k, value: hk });
        }
        let speed = match v {
            Some(v) => (u[k] * u[k] + v[k] * v[k]).sqrt(),
            None => u[k].abs(),
        };
        s = s.max(speed + (g * hk).sqrt());
    }
    Ok(s)
}

/// `dt = cfl·Δx / max(|u| + √(gh))`.
pub fn compute_dt(u: &[f64], h: &[f64], dx: f64, g: f64, cfl: f64) -> Result<f64> {
    if u.len() != h.len() {
        return Err(Error::LengthMismatch {
            expected: h.len(),
            got: u.len(),
        });
    }
    Ok(cfl * dx / max_speed(u, None, h, g)?)
}

/// 2D variant with `|U| = √(u² + v²)`.
pub fn compute_dt_2d(state: &State2D, dx: f64, g: f64, cfl: f64) -> Result<f64> {
    Ok(cfl * dx / max_speed(&state.u, Some(&state.v), &state.h, g)?)
}

/// One classical RK4 step: exactly four right-hand-side evaluations.
pub fn rk4_step<S, F>(rhs: &mut F, state: &S, t: f64, dt: f64) -> Result<S>
where
    S: OdeState,
    F: FnMut(&S, f64) -> Result<S>,
{
    let k1 = rhs(state, t)?;
    let mut y = state.clone();
    y.axpy(0.5 * dt, &k1);
    let k2 = rhs(&y, t + 0.5 * dt)?;
    let mut y = state.clone();
    y.axpy(0.5 * dt, &k2);
    let k3 = rhs(&y, t + 0.5 * dt)?;
    let mut y = state.clone();
    y.axpy(dt, &k3);
    let k4 = rhs(&y, t + dt)?;
    let mut out = state.clone();
    out.axpy(dt / 6.0, &k1);
    out.axpy(dt / 3.0, &k2);
    out.axpy(dt / 3.0, &k3);
    out.axpy(dt / 6.0, &k4);
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct Integration<S> {
    pub state: S,
    pub t: f64,
    pub steps: usize,
}

/// Fixed-step loop from `t = 0` to `t_end`; the last step is shortened to
/// land on `t_end`. `on_sample(step, t, state)` runs every
/// `callback_stride` steps and after the final one.
pub fn integrate<S, F, C>(mut rhs: F, state0: S, control: &TimeControl, mut on_sample: C) -> Result<Integration<S>>
where
    S: OdeState,
    F: FnMut(&S, f64) -> Result<S>,
    C: FnMut(usize, f64, &S),
{
    let n = control.n_steps();
    let mut state = state0;
    let mut t = 0.0;
    for step in 1..=n {
        let dt = if step == n {
            control.t_end - t
        } else {
            control.dt
        };
        state = rk4_step(&mut rhs, &state, t, dt)?;
        t = if step == n {
            control.t_end
        } else {
            step as f64 * control.dt
        };
        if !state.all_finite() {
            return Err(Error::NonFinite { step });
        }
        if step % control.callback_stride == 0 || step == n {
            on_sample(step, t, &state);
        }
    }
    Ok(Integration { state, t, steps: n })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rk4_amplification_factor() {
        let mut f = |y: &Vec<f64>, _t: f64| Ok(vec![-y[0]]);
        let y = rk4_step(&mut f, &vec![1.0], 0.0, 0.1).unwrap();
        let z: f64 = -0.1;
        let expect = 1.0 + z + z * z / 2.0 + z.powi(3) / 6.0 + z.powi(4) / 24.0;
        assert!((y[0] - expect).abs() < 1e-16);
        assert!((expect - (1.0 - 0.1 + 0.005 - 1.6667e-4 + 4.1667e-6)).abs() < 1e-8);
    }

    #[test]
    fn zero_rhs_keeps_state() {
        let mut f = |y: &Vec<f64>, _t: f64| Ok(vec![0.0; y.len()]);
        let y0 = vec![1.0, -2.0, 3.5];
        assert_eq!(rk4_step(&mut f, &y0, 0.0, 0.3).unwrap(), y0);
    }

    #[test]
    fn step_count_and_last_step() {
        let c = TimeControl::new(0.3, 0.3, 1.0, 1).unwrap();
        assert_eq!(c.n_steps(), 4);
        let mut times = Vec::new();
        let out = integrate(
            |y: &Vec<f64>, _t| Ok(vec![1.0; y.len()]),
            vec![0.0],
            &c,
            |_, t, _| times.push(t),
        )
        .unwrap();
        assert_eq!(out.t, 1.0);
        assert!((out.state[0] - 1.0).abs() < 1e-15);
        assert_eq!(times.len(), 4);
        let c = TimeControl::steps(0.3, 0.1, 10, 5).unwrap();
        assert_eq!(c.n_steps(), 10);
    }

    #[test]
    fn zero_end_time_is_a_no_op() {
        let c = TimeControl::new(0.3, 0.1, 0.0, 1).unwrap();
        let mut calls = 0;
        let out = integrate(|y: &Vec<f64>, _| Ok(y.clone()), vec![2.0], &c, |_, _, _| calls += 1).unwrap();
        assert_eq!(out.state, vec![2.0]);
        assert_eq!(calls, 0);
    }

    #[test]
    fn non_finite_is_reported_with_step() {
        let c = TimeControl::new(0.3, 1.0, 10.0, 1).unwrap();
        let r = integrate(
            |y: &Vec<f64>, _| Ok(vec![if y[0] > 2.0 { f64::NAN } else { 1.0 }]),
            vec![0.0],
            &c,
            |_, _, _| {},
        );
        assert_eq!(r.unwrap_err(), Error::NonFinite { step: 3 });
    }

    #[test]
    fn dt_rule() {
        let g = 9.81f64;
        let u = vec![-0.3 * g.sqrt(); 4];
        let h = vec![1.0; 4];
        let dt = compute_dt(&u, &h, 0.01, g, 0.3).unwrap();
        assert!((dt - 0.3 * 0.01 / (1.3 * g.sqrt())).abs() < 1e-18);
        assert!((dt - 7.368e-4).abs() < 1e-6);
        assert!(compute_dt(&u, &[1.0, 0.0, 1.0, 1.0], 0.01, g, 0.3).is_err());
    }
}
