mod common;

use common::*;
use dpsbp::hyperviscosity::{
    apply_hv, apply_hv_2d, dissipation_tendency_1d, dissipation_tendency_2d, smooth_boxcar,
};
use dpsbp::operators::{shipped, Family};
use dpsbp::swe1d::{FluxForm, State1D};
use dpsbp::swe2d::State2D;
use dpsbp::{Error, HvOrder, HyperViscosity};
use nalgebra::DMatrix;
use proptest::prelude::*;

const G: f64 = 9.81;

fn hv(family: Family, order: usize, periodic: bool, n: usize, hv_order: HvOrder, delta: f64) -> HyperViscosity {
    let p = pair(family, order, periodic, n, 1.0);
    HyperViscosity::new(p, &grid(n, 1.0, periodic), hv_order, delta, 0.1).unwrap()
}

/// Dense `𝒜` written out from the operator matrices.
fn dense_a(h: &HyperViscosity) -> DMatrix<f64> {
    let pr = h.pair();
    let dp = to_mat(&pr.d_plus().to_dense());
    let dm = to_mat(&pr.d_minus().to_dense());
    let p = diag(pr.p_weights());
    let pinv = diag(&pr.p_weights().iter().map(|w| 1.0 / w).collect::<Vec<_>>());
    let c = diag(&h.c);
    match h.order {
        HvOrder::Four => {
            let m = dm.transpose() * &p * &dm;
            -(h.alpha) * &m * c * &pinv * &m
        }
        HvOrder::Six => {
            let m = &dp * &pinv * dp.transpose() * &p * &dp;
            -(h.alpha) * m.transpose() * &p * c * &m
        }
    }
}

#[test]
fn dense_assembly_is_symmetric_and_semidefinite() {
    for (family, order, periodic) in shipped() {
        for hv_order in [HvOrder::Four, HvOrder::Six] {
            let h = hv(family, order, periodic, 32, hv_order, 1.0);
            let n = h.len();
            let pa = assemble(n, |f| h.apply(f).unwrap());
            let a = diag(h.pair().p_weights()) * pa;
            let scale = a.amax();
            let asym = (&a - a.transpose()).amax();
            assert!(asym <= 1e-13 * scale, "{family:?}{order} {periodic} {hv_order:?}: asym {asym:e}");
            let sym = (&a + a.transpose()) * 0.5;
            let lmax = sym.symmetric_eigenvalues().max();
            assert!(lmax <= 1e-10, "{family:?}{order} {periodic} {hv_order:?}: λmax {lmax:e}");
            // independent dense formula
            let d = (&a - dense_a(&h)).amax();
            assert!(d <= 1e-12 * scale, "dense formula mismatch {d:e}");
        }
    }
}

#[test]
fn periodic_order4_equals_plain_product() {
    let p = pair(Family::DP, 4, true, 20, 1.0);
    let mut r = rng(3);
    let c = random_vec(&mut r, 20, 0.2, 1.5);
    let h = HyperViscosity::with_profile(p.clone(), HvOrder::Four, 0.7, c.clone()).unwrap();
    let dp = to_mat(&p.d_plus().to_dense());
    let dm = to_mat(&p.d_minus().to_dense());
    let dense = -h.alpha * &dp * &dm * diag(&c) * &dp * &dm;
    let f = random_vec(&mut r, 20, -1.0, 1.0);
    let got = apply_hv(&h, &f).unwrap();
    let want = mat_vec(&dense, &f);
    assert!(max_diff(&got, &want) <= 1e-13 * max_abs(&want).max(1.0));
}

#[test]
fn periodic_order6_equals_plain_product() {
    let p = pair(Family::DP, 6, true, 24, 1.0);
    let h = HyperViscosity::new(p.clone(), &grid(24, 1.0, true), HvOrder::Six, 1.0, 0.1).unwrap();
    let dp = to_mat(&p.d_plus().to_dense());
    let dm = to_mat(&p.d_minus().to_dense());
    let dense = h.alpha * &dm * &dp * &dm * &dp * &dm * &dp;
    let f = random_vec(&mut rng(4), 24, -1.0, 1.0);
    let want = mat_vec(&dense, &f);
    assert!(max_diff(&h.apply(&f).unwrap(), &want) <= 1e-13 * max_abs(&want).max(1.0));
}

#[test]
fn constants_are_annihilated() {
    for (family, order, periodic) in shipped() {
        for o in [HvOrder::Four, HvOrder::Six] {
            let h = hv(family, order, periodic, 40, o, 1.0);
            let out = h.apply(&vec![3.25; h.len()]).unwrap();
            assert!(max_abs(&out) < 1e-9, "{family:?}{order}: {}", max_abs(&out));
        }
    }
}

#[test]
fn length_mismatch_is_reported() {
    let h = hv(Family::DP, 4, false, 20, HvOrder::Four, 0.1);
    assert!(matches!(h.apply(&[1.0; 5]), Err(Error::LengthMismatch { .. })));
    assert!(HyperViscosity::with_profile(h.pair().clone().into(), HvOrder::Four, -1.0, h.c.clone()).is_err());
}

#[test]
fn alpha_tracks_grid_spacing() {
    let h4 = hv(Family::DP, 4, false, 50, HvOrder::Four, 0.3);
    assert!((h4.alpha - 0.3 * 0.02f64.powi(3)).abs() < 1e-18);
    let h6 = hv(Family::DP, 6, false, 50, HvOrder::Six, 0.3);
    assert!((h6.alpha - 0.3 * 0.02f64.powi(5)).abs() < 1e-22);
}

#[test]
fn refinement_scales_by_order_minus_one() {
    // smooth periodic f: ‖P⁻¹𝒜f‖∞ ∝ Δx^{p−1}
    for (order, o, p) in [(4, HvOrder::Four, 4), (6, HvOrder::Six, 6)] {
        let norm = |n: usize| {
            let g = grid(n, 1.0, true);
            let pr = pair(Family::DP, order, true, n, 1.0);
            let h = HyperViscosity::new(pr, &g, o, 1.0, 0.1).unwrap();
            let f: Vec<f64> = g.coords.iter().map(|x| (2.0 * std::f64::consts::PI * x).sin()).collect();
            max_abs(&h.apply(&f).unwrap())
        };
        let ratio = norm(128) / norm(64);
        let want = 2f64.powi(-(p - 1));
        assert!((ratio / want - 1.0).abs() <= 0.3, "order {p}: ratio {ratio}");
    }
    // bounded, with the boxcar in play
    let norm = |n: usize| {
        let g = grid(n, 1.0, false);
        let h = HyperViscosity::new(pair(Family::DP, 4, false, n, 1.0), &g, HvOrder::Four, 1.0, 0.1).unwrap();
        let f: Vec<f64> = g.coords.iter().map(|x| (3.0 * x).cos()).collect();
        max_abs(&h.apply(&f).unwrap())
    };
    let ratio = norm(200) / norm(100);
    assert!((ratio / 0.125 - 1.0).abs() <= 0.3, "bounded ratio {ratio}");
}

#[test]
fn boxcar_derivatives_vanish_at_ends() {
    // one-sided FD estimates of c′, c″ at x = 0 must shrink like Δx², Δx
    let est = |n: usize| {
        let g = grid(n, 5.0, false);
        let c = smooth_boxcar(&g, 0.1).unwrap();
        assert_eq!(c[0], 0.0);
        assert_eq!(c[n], 0.0);
        assert_eq!(c[n / 2], 1.0);
        let dx = g.dx;
        let d1 = (-3.0 * c[0] + 4.0 * c[1] - c[2]) / (2.0 * dx);
        let d2 = (2.0 * c[0] - 5.0 * c[1] + 4.0 * c[2] - c[3]) / (dx * dx);
        // right end mirrors the left
        assert!((c[n - 1] - c[1]).abs() < 1e-15 && (c[n - 2] - c[2]).abs() < 1e-15);
        (d1.abs(), d2.abs())
    };
    let (a1, a2) = est(400);
    let (b1, b2) = est(800);
    assert!(a1 / b1 > 3.5 && a2 / b2 > 1.8, "{a1:e}/{b1:e}, {a2:e}/{b2:e}");
    let h = hv(Family::DP, 4, true, 30, HvOrder::Four, 1.0);
    assert!(h.c.iter().all(|&v| v == 1.0));
}

#[test]
fn tendency_1d_rest_and_still_water() {
    let h = hv(Family::DP, 6, false, 60, HvOrder::Six, 0.1);
    let n = h.len();
    let form = FluxForm::nonlinear(G);
    let rest = State1D::new(vec![2.0; n], vec![0.0; n]).unwrap();
    let t = dissipation_tendency_1d(&h, &rest, &form).unwrap();
    assert!(max_abs(&t.h) < 1e-10 && max_abs(&t.u) < 1e-10);

    let depth: Vec<f64> = (0..n).map(|j| 1.0 + 0.3 * (0.2 * j as f64).sin()).collect();
    let s = State1D::new(depth.clone(), vec![0.0; n]).unwrap();
    let t = dissipation_tendency_1d(&h, &s, &form).unwrap();
    let ah = h.apply(&depth).unwrap();
    for j in 0..n {
        assert!((t.h[j] - ah[j] / G).abs() <= 1e-14 * ah[j].abs().max(1.0));
        assert_eq!(t.u[j], 0.0);
    }

    let mut bad = s.clone();
    bad.h[5] = 0.0;
    assert!(matches!(
        dissipation_tendency_1d(&h, &bad, &form),
        Err(Error::NonPositiveDepth { index: 5, .. })
    ));
}

#[test]
fn tendency_1d_matches_dense_oracle() {
    let h = hv(Family::DP, 4, false, 19, HvOrder::Four, 0.5);
    let n = h.len();
    assert_eq!(n, 20);
    let mut r = rng(11);
    let depth = random_vec(&mut r, n, 0.8, 1.2);
    let vel = random_vec(&mut r, n, -0.5, 0.5);
    let s = State1D::new(depth.clone(), vel.clone()).unwrap();
    let got = dissipation_tendency_1d(&h, &s, &FluxForm::nonlinear(G)).unwrap();

    // 𝒦 = W⁻¹(I₂ ⊗ P⁻¹𝒜) with the block weight
    let pa = assemble(n, |f| h.apply(f).unwrap());
    let mut w = DMatrix::zeros(2 * n, 2 * n);
    for j in 0..n {
        w[(j, j)] = G;
        w[(j, n + j)] = 0.5 * vel[j];
        w[(n + j, j)] = 0.5 * vel[j];
        w[(n + j, n + j)] = 0.5 * depth[j];
    }
    let mut blk = DMatrix::zeros(2 * n, 2 * n);
    blk.view_mut((0, 0), (n, n)).copy_from(&pa);
    blk.view_mut((n, n), (n, n)).copy_from(&pa);
    let k = w.try_inverse().unwrap() * blk;
    let q: Vec<f64> = depth.iter().chain(&vel).copied().collect();
    let want = mat_vec(&k, &q);
    let scale = max_abs(&want).max(1e-300);
    assert!(max_diff(&got.h, &want[..n]) <= 1e-12 * scale);
    assert!(max_diff(&got.u, &want[n..]) <= 1e-12 * scale);
}

#[test]
fn sweeps_match_kronecker_products() {
    let n = 16;
    let p = pair(Family::DP, 4, true, n, 1.0);
    let h = HyperViscosity::new(p, &grid(n, 1.0, true), HvOrder::Four, 1.0, 0.1).unwrap();
    let a = assemble(n, |f| h.apply(f).unwrap());
    let id = DMatrix::<f64>::identity(n, n);
    let full = kron(&a, &id) + kron(&id, &a);
    let mut r = rng(5);
    let fx = random_vec(&mut r, n, -1.0, 1.0);
    let gy = random_vec(&mut r, n, -1.0, 1.0);
    let sep: Vec<f64> = (0..n * n).map(|k| fx[k / n] * gy[k % n]).collect();
    let rand2d = random_vec(&mut r, n * n, -1.0, 1.0);
    for f in [sep, rand2d] {
        let got = apply_hv_2d(&h, &h, n, &f);
        let want = mat_vec(&full, &f);
        assert!(max_diff(&got, &want) <= 1e-12 * max_abs(&want).max(1.0));
    }
}

fn random_state_2d(seed: u64, n: usize) -> State2D {
    let mut r = rng(seed);
    State2D::new(
        n,
        random_vec(&mut r, n * n, 0.5, 1.5),
        random_vec(&mut r, n * n, -0.5, 0.5),
        random_vec(&mut r, n * n, -0.5, 0.5),
    )
    .unwrap()
}

/// `(Wq)ᵀP t` with `Wq = (gh + |U|²/2, hu, hv)`.
fn entropy_rate_2d(s: &State2D, t: &State2D, g: f64, w: f64) -> f64 {
    (0..s.h.len())
        .map(|k| {
            let (h, u, v) = (s.h[k], s.u[k], s.v[k]);
            w * ((g * h + 0.5 * (u * u + v * v)) * t.h[k] + h * u * t.u[k] + h * v * t.v[k])
        })
        .sum()
}

#[test]
fn tendency_2d_dissipates_and_kills_constants() {
    let n = 24;
    for (family, order, o) in [(Family::DP, 4, HvOrder::Four), (Family::DRP, 6, HvOrder::Six)] {
        let p = pair(family, order, true, n, 2.0);
        let h = HyperViscosity::new(p.clone(), &grid(n, 2.0, true), o, 0.5, 0.1).unwrap();
        let w = p.dx() * p.dx();
        for seed in 0..10 {
            let s = random_state_2d(seed, n);
            let t = dissipation_tendency_2d(&h, &h, &s, G).unwrap();
            let q2 = norm2(&s.h) + norm2(&s.u) + norm2(&s.v);
            let rate = entropy_rate_2d(&s, &t, G, w);
            assert!(rate <= 1e-11 * q2, "{family:?}{order} seed {seed}: {rate:e}");
        }
        let c = State2D::new(n, vec![1.3; n * n], vec![0.2; n * n], vec![-0.1; n * n]).unwrap();
        let t = dissipation_tendency_2d(&h, &h, &c, G).unwrap();
        assert!(max_abs(&t.h).max(max_abs(&t.u)).max(max_abs(&t.v)) < 1e-9);
    }
}

#[test]
fn tendency_2d_solves_the_weight_system() {
    let n = 12;
    let p = pair(Family::DP, 4, true, n, 1.0);
    let h = HyperViscosity::new(p, &grid(n, 1.0, true), HvOrder::Four, 1.0, 0.1).unwrap();
    let s = random_state_2d(9, n);
    let t = dissipation_tendency_2d(&h, &h, &s, G).unwrap();
    let rh = apply_hv_2d(&h, &h, n, &s.h);
    let ru = apply_hv_2d(&h, &h, n, &s.u);
    let rv = apply_hv_2d(&h, &h, n, &s.v);
    for k in 0..n * n {
        let (hh, u, v) = (s.h[k], s.u[k], s.v[k]);
        let w = nalgebra::Matrix3::new(G, u / 2.0, v / 2.0, u / 2.0, hh / 2.0, 0.0, v / 2.0, 0.0, hh / 2.0);
        let x = w.lu().solve(&nalgebra::Vector3::new(rh[k], ru[k], rv[k])).unwrap();
        let scale = x.amax().max(1e-300);
        assert!((x[0] - t.h[k]).abs() <= 1e-12 * scale);
        assert!((x[1] - t.u[k]).abs() <= 1e-12 * scale);
        assert!((x[2] - t.v[k]).abs() <= 1e-12 * scale);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn quadratic_form_is_nonpositive(
        f in proptest::collection::vec(-1.0f64..1.0, 41),
        six in any::<bool>(),
        periodic in any::<bool>(),
    ) {
        let (order, o) = if six { (6, HvOrder::Six) } else { (4, HvOrder::Four) };
        let n = if periodic { 41 } else { 40 };
        let h = hv(Family::DP, order, periodic, n, o, 1.0);
        let af = h.apply(&f).unwrap();
        let q = weighted(h.pair().p_weights(), &f, &af);
        prop_assert!(q <= 1e-12 * norm2(&f), "fᵀ𝒜f = {q:e}");
    }

    #[test]
    fn tendency_1d_is_entropy_dissipative(
        seed in 0u64..10_000,
        six in any::<bool>(),
    ) {
        let (order, o) = if six { (6, HvOrder::Six) } else { (4, HvOrder::Four) };
        let h = hv(Family::DP, order, false, 40, o, 1.0);
        let n = h.len();
        let mut r = rng(seed);
        let s = State1D::new(random_vec(&mut r, n, 0.5, 1.5), random_vec(&mut r, n, -0.8, 0.8)).unwrap();
        let t = dissipation_tendency_1d(&h, &s, &FluxForm::nonlinear(G)).unwrap();
        // (Wq)ᵀP t with Wq = (g h + u²/2, h u)
        let p = h.pair().p_weights();
        let rate: f64 = (0..n)
            .map(|j| p[j] * ((G * s.h[j] + 0.5 * s.u[j] * s.u[j]) * t.h[j] + s.h[j] * s.u[j] * t.u[j]))
            .sum();
        prop_assert!(rate <= 1e-11 * (norm2(&s.h) + norm2(&s.u)));
    }
}
