use approx::assert_abs_diff_eq;
use dpsbp::operators::{
    self, apply, build_operator_pair, integrate, load, shipped, stencil, verify_pair, Direction,
    Family, Grid1D, SbpOperatorPair,
};
use proptest::prelude::*;

fn pair(family: Family, order: usize, periodic: bool, n: usize, length: f64) -> SbpOperatorPair {
    let grid = if periodic {
        Grid1D::periodic(n, length).unwrap()
    } else {
        Grid1D::bounded(n, length).unwrap()
    };
    build_operator_pair(family, order, periodic, &grid).unwrap()
}

fn dense_mul(m: &[Vec<f64>], f: &[f64]) -> Vec<f64> {
    m.iter()
        .map(|r| r.iter().zip(f).map(|(a, b)| a * b).sum())
        .collect()
}

#[test]
fn every_shipped_pair_passes_the_suite() {
    for (family, order, periodic) in shipped() {
        for n in [40, 73] {
            let p = pair(family, order, periodic, n, 10.0);
            let report = verify_pair(&p);
            assert!(report.all_pass, "{} periodic={periodic}: {}", p.label(), report.summary());
        }
    }
}

#[test]
fn dp6_bounded_501_all_pass() {
    let p = pair(Family::DP, 6, false, 500, 1.0);
    assert_eq!(p.len(), 501);
    assert!(verify_pair(&p).all_pass);
}

#[test]
fn traditional_sbp4_has_zero_symmetric_part() {
    let p = pair(Family::Traditional, 4, false, 30, 1.0);
    let r = verify_pair(&p);
    assert!(r.all_pass);
    assert!(r.s_plus_max.abs() < 1e-13 && r.s_minus_min.abs() < 1e-13);
    assert_eq!(p.d_plus(), p.d_minus());
}

#[test]
fn dp4_symmetric_parts_are_semidefinite() {
    let p = pair(Family::DP, 4, false, 50, 1.0);
    let r = verify_pair(&p);
    assert!(r.s_plus_max <= 1e-10);
    assert!(r.s_minus_min >= -1e-10);
    // strictly upwind: S₊ has a genuinely negative eigenvalue
    let n = p.len();
    let f: Vec<f64> = (0..n).map(|j| if j % 2 == 0 { 1.0 } else { -1.0 }).collect();
    let df = apply(&p, Direction::Plus, &f).unwrap();
    let quad: f64 = (0..n).map(|j| p.p_weights()[j] * f[j] * df[j]).sum();
    assert!(quad < -1.0);
}

#[test]
fn dp6_cubic_exact_in_interior() {
    let p = pair(Family::DP, 6, false, 100, 3.0);
    let x: Vec<f64> = (0..=100).map(|j| 0.03 * j as f64).collect();
    let x3: Vec<f64> = x.iter().map(|v| v * v * v).collect();
    let d = apply(&p, Direction::Plus, &x3).unwrap();
    let xmax = 3.0f64;
    for j in p.boundary_width()..101 - p.boundary_width() {
        assert!((d[j] - 3.0 * x[j] * x[j]).abs() <= 1e-10 * xmax * xmax, "row {j}");
    }
}

#[test]
fn linear_function_differentiates_to_one() {
    for (family, order, periodic) in shipped().into_iter().filter(|s| !s.2) {
        let p = pair(family, order, periodic, 60, 2.0);
        let x: Vec<f64> = (0..=60).map(|j| j as f64 * 2.0 / 60.0).collect();
        for dir in [Direction::Plus, Direction::Minus] {
            let d = apply(&p, dir, &x).unwrap();
            for v in d {
                assert_abs_diff_eq!(v, 1.0, epsilon = 1e-11);
            }
        }
    }
}

#[test]
fn matrix_free_equals_dense_product() {
    let p = pair(Family::DRP, 5, false, 30, 1.0);
    let f: Vec<f64> = (0..31).map(|j| ((j * 37 % 11) as f64 - 5.0) / 3.0).collect();
    for dir in [Direction::Plus, Direction::Minus] {
        let a = apply(&p, dir, &f).unwrap();
        let b = dense_mul(&p.operator(dir).to_dense(), &f);
        for (x, y) in a.iter().zip(&b) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-13 * 30.0);
        }
    }
    assert!(apply(&p, Direction::Plus, &f[1..]).is_err());
}

#[test]
fn quadrature_integrals() {
    let p = pair(Family::DP, 4, false, 80, 10.0);
    let one = vec![1.0; 81];
    assert_abs_diff_eq!(integrate(&p, &one).unwrap(), 10.0, epsilon = 1e-12);
    let x: Vec<f64> = (0..=80).map(|j| j as f64 / 8.0).collect();
    assert_abs_diff_eq!(integrate(&p, &x).unwrap(), 50.0, epsilon = 1e-10);

    let q = pair(Family::DP, 6, true, 64, 3.0);
    let s: Vec<f64> = (0..64)
        .map(|j| (2.0 * std::f64::consts::PI * j as f64 / 64.0).sin())
        .collect();
    assert_abs_diff_eq!(integrate(&q, &s).unwrap(), 0.0, epsilon = 1e-12);
}

#[test]
fn periodic_minus_is_negated_transpose() {
    for (family, order, _) in shipped().into_iter().filter(|s| s.2) {
        let p = pair(family, order, true, 24, 1.0);
        let a = p.d_plus().to_dense();
        let b = p.d_minus().to_dense();
        for i in 0..24 {
            for j in 0..24 {
                assert_eq!(a[i][j], -b[j][i]);
            }
        }
    }
}

#[test]
fn generated_stencils_match_shipped_files() {
    for order in 4..=6 {
        let (c, off) = stencil::upwind_stencil(order).unwrap();
        let file = load(Family::DP, order, true).unwrap();
        assert_eq!(off, file.interior.offset);
        for (a, b) in c.iter().zip(&file.interior.coefficients) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-13);
        }
        // bounded interior agrees with the periodic one
        let bounded = load(Family::DP, order, false).unwrap();
        assert_eq!(bounded.interior.coefficients, file.interior.coefficients);
    }
    for order in [4, 6] {
        let (c, off) = stencil::central_stencil(order).unwrap();
        let file = load(Family::Traditional, order, true).unwrap();
        assert_eq!(off, file.interior.offset);
        for (a, b) in c.iter().zip(&file.interior.coefficients) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-13);
        }
    }
}

#[test]
fn dp4_interior_stencil_values() {
    let (c, off) = stencil::upwind_stencil(4).unwrap();
    assert_eq!(off, -1);
    let expect = [-1.0 / 4.0, -5.0 / 6.0, 3.0 / 2.0, -1.0 / 2.0, 1.0 / 12.0];
    for (a, b) in c.iter().zip(expect) {
        assert_abs_diff_eq!(*a, b, epsilon = 1e-14);
    }
}

#[test]
fn constant_is_annihilated_everywhere() {
    for (family, order, periodic) in shipped() {
        let p = pair(family, order, periodic, 50, 1.0);
        let one = vec![1.0; p.len()];
        for dir in [Direction::Plus, Direction::Minus] {
            let d = apply(&p, dir, &one).unwrap();
            assert!(d.iter().all(|v| v.abs() < 1e-10), "{}", p.label());
        }
    }
}

#[test]
fn boundary_rows_exact_to_declared_order() {
    let p = pair(Family::DP, 6, false, 60, 1.0);
    assert_eq!(p.boundary_order(), 3);
    let x: Vec<f64> = (0..=60).map(|j| j as f64 / 60.0).collect();
    let x3: Vec<f64> = x.iter().map(|v| v.powi(3)).collect();
    let d = apply(&p, Direction::Minus, &x3).unwrap();
    for j in 0..61 {
        assert!((d[j] - 3.0 * x[j] * x[j]).abs() < 1e-10, "row {j}");
    }
}

#[test]
fn corrupt_file_is_rejected() {
    let bad = r#"{"family":"DP","order":4,"boundary_order":2,"periodic":false,"interior":{"offset":-1,"coefficients":[1.0]},"quadrature":[1.0],"boundary_plus":[[0.0]],"boundary_minus":[[0.0]],"extra":1}"#;
    assert!(operators::CoefficientFile::parse(bad).is_err());
    let neg = bad.replace(",\"extra\":1", "").replace("\"quadrature\":[1.0]", "\"quadrature\":[-1.0]");
    assert!(operators::CoefficientFile::parse(&neg).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn sbp_identity_holds_for_random_vectors(
        which in 0usize..16,
        seed in proptest::collection::vec(-1.0f64..1.0, 2 * 47),
    ) {
        let (family, order, periodic) = shipped()[which];
        let n = 47;
        let p = pair(family, order, periodic, if periodic { n } else { n - 1 }, 2.0);
        let (f, g) = seed.split_at(n);
        let df = apply(&p, Direction::Plus, f).unwrap();
        let dg = apply(&p, Direction::Minus, g).unwrap();
        let w = p.p_weights();
        let lhs: f64 = (0..n).map(|j| w[j] * (g[j] * df[j] + f[j] * dg[j])).sum();
        let rhs = if periodic { 0.0 } else { f[n - 1] * g[n - 1] - f[0] * g[0] };
        let nf = f.iter().map(|v| v * v).sum::<f64>().sqrt();
        let ng = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        prop_assert!((lhs - rhs).abs() <= 1e-11 * nf * ng);
    }
}
