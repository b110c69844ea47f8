use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::SbpOperatorPair;

pub const IDENTITY_TOL: f64 = 1e-11;
pub const EIGEN_TOL: f64 = 1e-10;
pub const ACCURACY_TOL: f64 = 1e-10;
pub const Q_TOL: f64 = 1e-12;

/// Residuals of the SBP invariants for one pair.
#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub label: String,
    pub n_points: usize,
    pub periodic: bool,
    /// max over random pairs of |gᵀPD₊f + fᵀPD₋g − (f_N g_N − f_0 g_0)| / (‖f‖‖g‖)
    pub sbp_identity: f64,
    /// ‖Q₊ + Q₋ᵀ − B‖_max
    pub q_residual: f64,
    pub q_tolerance: f64,
    pub s_plus_max: f64,
    pub s_minus_min: f64,
    /// interior moment residual for i = 0..=q
    pub interior_accuracy: Vec<f64>,
    /// closure moment residual for i = 0..=γ (empty when periodic)
    pub boundary_accuracy: Vec<f64>,
    /// relative quadrature error for ∫xⁱ, i = 0..=γ
    pub quadrature: Vec<f64>,
    pub all_pass: bool,
}

impl VerificationReport {
    pub fn summary(&self) -> String {
        let worst = |v: &[f64]| v.iter().copied().fold(0.0, f64::max);
        format!(
            "identity {:.2e}, Q {:.2e}, S+ max {:.2e}, S- min {:.2e}, interior {:.2e}, boundary {:.2e}, quadrature {:.2e}",
            self.sbp_identity,
            self.q_residual,
            self.s_plus_max,
            self.s_minus_min,
            worst(&self.interior_accuracy),
            worst(&self.boundary_accuracy),
            worst(&self.quadrature)
        )
    }
}

/// Runs the full invariant suite on dense copies of the operators.
pub fn verify_pair(pair: &SbpOperatorPair) -> VerificationReport {
    verify_pair_with(pair, 20, 0x5eed)
}

pub fn verify_pair_with(pair: &SbpOperatorPair, samples: usize, seed: u64) -> VerificationReport {
    let n = pair.len();
    let p = pair.p_weights();
    let dp = pair.d_plus().to_dense();
    let dm = pair.d_minus().to_dense();
    let bvec = |i: usize| -> f64 {
        if pair.is_periodic() {
            0.0
        } else if i == 0 {
            -1.0
        } else if i == n - 1 {
            1.0
        } else {
            0.0
        }
    };

    // (i) identity on random vectors
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sbp_identity: f64 = 0.0;
    let mut fp = vec![0.0; n];
    let mut gm = vec![0.0; n];
    for _ in 0..samples {
        let f: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let g: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        pair.d_plus().apply_into(&f, &mut fp);
        pair.d_minus().apply_into(&g, &mut gm);
        let lhs: f64 = (0..n).map(|j| p[j] * (g[j] * fp[j] + f[j] * gm[j])).sum();
        let rhs = if pair.is_periodic() {
            0.0
        } else {
            f[n - 1] * g[n - 1] - f[0] * g[0]
        };
        let norm = (f.iter().map(|v| v * v).sum::<f64>() * g.iter().map(|v| v * v).sum::<f64>())
            .sqrt();
        sbp_identity = sbp_identity.max((lhs - rhs).abs() / norm);
    }

    // (ii) Q₊ + Q₋ᵀ = B and (iii) definiteness of S±
    let mut q_residual: f64 = 0.0;
    let mut s_plus = DMatrix::<f64>::zeros(n, n);
    let mut s_minus = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let b = if i == j { bvec(i) } else { 0.0 };
            q_residual = q_residual.max((p[i] * dp[i][j] + p[j] * dm[j][i] - b).abs());
            s_plus[(i, j)] = p[i] * dp[i][j] + p[j] * dp[j][i] - b;
            s_minus[(i, j)] = p[i] * dm[i][j] + p[j] * dm[j][i] - b;
        }
    }
    let ev_plus = SymmetricEigen::new(s_plus).eigenvalues;
    let ev_minus = SymmetricEigen::new(s_minus).eigenvalues;
    let s_plus_max = ev_plus.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let s_minus_min = ev_minus.iter().copied().fold(f64::INFINITY, f64::min);

    // (iv) moment conditions in local coordinates ξ = (x - x_j)/Δx
    let q = pair.interior_order();
    let gamma = pair.boundary_order();
    let nb = pair.boundary_width();
    let dx = pair.dx();
    let moment = |rows: &[Vec<f64>], row: usize, i: usize| -> f64 {
        let mut acc = 0.0;
        let mut scale = 0.0;
        for (k, &d) in rows[row].iter().enumerate() {
            if d == 0.0 {
                continue;
            }
            let mut xi = k as f64 - row as f64;
            if pair.is_periodic() {
                // nearest periodic image
                let nf = n as f64;
                xi -= nf * (xi / nf).round();
            }
            let t = d * dx * xi.powi(i as i32);
            acc += t;
            scale += t.abs();
        }
        let exact = if i == 1 { 1.0 } else { 0.0 };
        (acc - exact).abs() / scale.max(1.0)
    };
    let interior_rows: Vec<usize> = (nb..n - nb).collect();
    let interior_accuracy: Vec<f64> = (0..=q)
        .map(|i| {
            interior_rows
                .iter()
                .flat_map(|&r| [moment(&dp, r, i), moment(&dm, r, i)])
                .fold(0.0, f64::max)
        })
        .collect();
    let boundary_accuracy: Vec<f64> = if pair.is_periodic() {
        Vec::new()
    } else {
        (0..=gamma)
            .map(|i| {
                (0..nb)
                    .chain(n - nb..n)
                    .flat_map(|r| [moment(&dp, r, i), moment(&dm, r, i)])
                    .fold(0.0, f64::max)
            })
            .collect()
    };

    // (v) quadrature
    let x: Vec<f64> = (0..n).map(|j| j as f64 * dx).collect();
    let length = if pair.is_periodic() {
        n as f64 * dx
    } else {
        (n - 1) as f64 * dx
    };
    let top = if pair.is_periodic() { 0 } else { gamma };
    let quadrature: Vec<f64> = (0..=top)
        .map(|i| {
            let exact = length.powi(i as i32 + 1) / (i as f64 + 1.0);
            let sum: f64 = x.iter().zip(p).map(|(x, w)| w * x.powi(i as i32)).sum();
            (sum - exact).abs() / exact
        })
        .collect();

    let q_tolerance = Q_TOL / dx;
    let all_pass = sbp_identity <= IDENTITY_TOL
        && q_residual <= q_tolerance
        && s_plus_max <= EIGEN_TOL
        && s_minus_min >= -EIGEN_TOL
        && interior_accuracy.iter().all(|&r| r <= ACCURACY_TOL)
        && boundary_accuracy.iter().all(|&r| r <= ACCURACY_TOL)
        && quadrature.iter().all(|&r| r <= ACCURACY_TOL)
        && p.iter().all(|&w| w > 0.0);

    VerificationReport {
        label: pair.label(),
        n_points: n,
        periodic: pair.is_periodic(),
        sbp_identity,
        q_residual,
        q_tolerance,
        s_plus_max,
        s_minus_min,
        interior_accuracy,
        boundary_accuracy,
        quadrature,
        all_pass,
    }
}
