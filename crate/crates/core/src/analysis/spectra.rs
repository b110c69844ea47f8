//! Shell-summed kinetic energy and enstrophy spectra of periodic fields.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::swe2d::State2D;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectra {
    /// Shell index `n`: modes with `n ≤ ‖k‖ < n + 1`.
    pub shell: Vec<usize>,
    pub energy: Vec<f64>,
    pub enstrophy: Vec<f64>,
}

/// Forward 2D DFT of a row-major `n × n` field, scaled by `1/n²`.
pub fn fft2(field: &[f64], n: usize) -> Vec<Complex<f64>> {
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(n);
    let mut data: Vec<Complex<f64>> = field.iter().map(|&v| Complex::new(v, 0.0)).collect();
    for row in data.chunks_exact_mut(n) {
        fft.process(row);
    }
    let mut col = vec![Complex::new(0.0, 0.0); n];
    for j in 0..n {
        for i in 0..n {
            col[i] = data[i * n + j];
        }
        fft.process(&mut col);
        for i in 0..n {
            data[i * n + j] = col[i];
        }
    }
    let scale = 1.0 / (n * n) as f64;
    for v in data.iter_mut() {
        *v *= scale;
    }
    data
}

fn wavenumber(i: usize, n: usize) -> f64 {
    if i <= n / 2 {
        i as f64
    } else {
        i as f64 - n as f64
    }
}

/// `E_k = ½(|û|² + |v̂|²)` summed over integer annuli; `E_ω` sums `‖k‖²E_k`.
/// With the `1/n²` transform, `Σ E_n = ½·mean(u² + v²)`.
pub fn energy_enstrophy_spectra(state: &State2D) -> Result<Spectra> {
    let n = state.n;
    if n == 0 || state.u.len() != n * n || state.v.len() != n * n {
        return Err(Error::NonSquareGrid(n, state.u.len() / n.max(1)));
    }
    let uh = fft2(&state.u, n);
    let vh = fft2(&state.v, n);
    let shells = (std::f64::consts::SQRT_2 * (n / 2) as f64).floor() as usize + 1;
    let mut energy = vec![0.0; shells];
    let mut enstrophy = vec![0.0; shells];
    for i in 0..n {
        let k1 = wavenumber(i, n);
        for j in 0..n {
            let k2 = wavenumber(j, n);
            let k = (k1 * k1 + k2 * k2).sqrt();
            let e = 0.5 * (uh[i * n + j].norm_sqr() + vh[i * n + j].norm_sqr());
            let s = k.floor() as usize;
            energy[s] += e;
            enstrophy[s] += k * k * e;
        }
    }
    Ok(Spectra {
        shell: (0..shells).collect(),
        energy,
        enstrophy,
    })
}

/// Least-squares slope of `log E_n` against `log n` for `lo ≤ n ≤ hi`.
pub fn loglog_slope(shell: &[usize], e: &[f64], lo: usize, hi: usize) -> Option<f64> {
    let pts: Vec<(f64, f64)> = shell
        .iter()
        .zip(e)
        .filter(|(&n, &v)| n >= lo && n <= hi && n > 0 && v > 0.0)
        .map(|(&n, &v)| ((n as f64).ln(), v.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let m = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0, a.1 + p.1));
    let (mx, my) = (sx / m, sy / m);
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (x, y) in &pts {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    Some(sxy / sxx)
}

/// Power of a 1D signal in wavenumbers `≥ cutoff·(n/2)`, `1/n` normalised.
pub fn high_frequency_power(signal: &[f64], cutoff: f64) -> f64 {
    let n = signal.len();
    if n == 0 {
        return 0.0;
    }
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(n);
    let mut data: Vec<Complex<f64>> = signal.iter().map(|&v| Complex::new(v, 0.0)).collect();
    fft.process(&mut data);
    let kmin = cutoff * (n / 2) as f64;
    data.iter()
        .enumerate()
        .filter(|(i, _)| wavenumber(*i, n).abs() >= kmin)
        .map(|(_, c)| c.norm_sqr() / (n * n) as f64)
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_mode_lands_in_first_shell() {
        let n = 16;
        let mut s = State2D::zeros(n);
        for i in 0..n {
            for j in 0..n {
                s.u[i * n + j] = (2.0 * std::f64::consts::PI * i as f64 / n as f64).cos();
            }
        }
        let sp = energy_enstrophy_spectra(&s).unwrap();
        assert!((sp.energy[1] - 0.25).abs() < 1e-14);
        let rest: f64 = sp.energy.iter().enumerate().filter(|(k, _)| *k != 1).map(|(_, v)| v).sum();
        assert!(rest < 1e-28);
        assert!((sp.enstrophy[1] - 0.25).abs() < 1e-14);
    }

    #[test]
    fn slope_of_power_law() {
        let shell: Vec<usize> = (0..40).collect();
        let e: Vec<f64> = shell.iter().map(|&n| (n.max(1) as f64).powf(-3.0)).collect();
        assert!((loglog_slope(&shell, &e, 4, 30).unwrap() + 3.0).abs() < 1e-12);
    }

    #[test]
    fn high_frequency_of_nyquist() {
        let s: Vec<f64> = (0..32).map(|j| if j % 2 == 0 { 1.0 } else { -1.0 }).collect();
        assert!((high_frequency_power(&s, 0.5) - 1.0).abs() < 1e-14);
        assert!(high_frequency_power(&vec![1.0; 32], 0.5) < 1e-30);
    }
}
