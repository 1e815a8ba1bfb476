mod common;

use folia::cfun::{parse, Expr};
use folia::tester::{test_at_point, test_function, wirtinger_from_arms, Thresholds, Verdict};
use folia::{BuildParams, Domain, Error, FoliationManifest};
use num_complex::Complex;
use proptest::prelude::*;

fn unit(theta: f64) -> Complex<f64> {
    Complex::from_polar(1.0, theta)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn two_arms_recover_the_wirtinger_pair(
        th1 in 0.0..6.28f64, gap in 0.05..3.09f64,
        a in (-3.0..3.0f64, -3.0..3.0f64), b in (-3.0..3.0f64, -3.0..3.0f64),
    ) {
        let (t1, t2) = (unit(th1), unit(th1 + gap));
        let (a, b) = (Complex::new(a.0, a.1), Complex::new(b.0, b.1));
        let w = wirtinger_from_arms(t1, t2, a * t1 + b * t1.conj(), a * t2 + b * t2.conj()).unwrap();
        let tol = 1e-13 / gap.sin().abs();
        prop_assert!((w.a - a).norm() <= tol && (w.b - b).norm() <= tol);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn holomorphic_functions_are_never_flagged(e in common::expr(2, true)) {
        let m = common::bidisc_manifest();
        let r = test_function(&e, m, &Thresholds::default(), true, "bidisc").unwrap();
        prop_assert_ne!(r.verdict, Verdict::Violated, "{}", e);
        for p in &r.points {
            let gap = p.oracle_gap.unwrap();
            prop_assert!(gap <= 1e-5f64.max(10.0 * p.fd_error_est), "{e} stage {}: gap {gap:e}", p.stage);
        }
    }

    #[test]
    fn residuals_scale_with_the_function(e in common::expr(2, false), c in (-3.0..3.0f64, -3.0..3.0f64)) {
        let m = common::bidisc_manifest();
        let c = Complex::new(c.0, c.1);
        let scaled = Expr::Mul(Box::new(Expr::Lit(c)), Box::new(e.clone()));
        let th = Thresholds::default();
        for k in [1, 2, 7, 20] {
            let (p, q) = (test_at_point(&e, m, k, &th, false).unwrap(), test_at_point(&scaled, m, k, &th, false).unwrap());
            let tol = 10.0 * (q.fd_error_est + c.norm() * p.fd_error_est) + 1e-12;
            prop_assert!((q.residual - c.norm() * p.residual).abs() <= tol, "{e} at {k}");
        }
    }
}

#[test]
fn conjugates_are_flagged_exactly_at_their_class() {
    let m = common::bidisc_manifest();
    for l in 1..=2 {
        let r = test_function(&parse(&format!("conj(z{l})")).unwrap(), m, &Thresholds::default(), true, "bidisc").unwrap();
        assert_eq!(r.verdict, Verdict::Violated);
        for p in &r.points {
            let want = if p.l == l { 1.0 } else { 0.0 };
            assert!((p.residual - want).abs() <= 1e-6, "conj(z{l}) stage {}: {}", p.stage, p.residual);
        }
    }
}

#[test]
fn worked_examples() {
    let m = common::bidisc_manifest();
    let th = Thresholds::default();
    let r = test_function(&parse("z1^2 + exp(z2)").unwrap(), m, &th, false, "").unwrap();
    assert!(r.points.iter().all(|p| p.residual <= 1e-6));
    let r = test_function(&parse("z1*z2").unwrap(), m, &th, false, "").unwrap();
    assert_eq!(r.verdict, Verdict::Consistent);
    let r = test_function(&parse("re(z1)").unwrap(), m, &th, true, "").unwrap();
    assert_eq!(r.verdict, Verdict::Violated);
    assert!(r.points.iter().filter(|p| p.l == 1).all(|p| (p.residual - 0.5).abs() <= 1e-4));
    assert_eq!(r.per_coordinate_max.len(), 2);
}

#[test]
fn report_errors() {
    let empty = FoliationManifest::<f64>::empty(Domain::polydisc(1, 1.0), 1, BuildParams::new(1));
    let f = parse("z1").unwrap();
    assert!(matches!(test_function(&f, &empty, &Thresholds::default(), false, ""), Err(Error::NoAngularPoints)));
    let m = common::disc_manifest();
    let f = parse("z2").unwrap();
    assert!(matches!(
        test_function(&f, m, &Thresholds::default(), false, ""),
        Err(Error::UnboundVariable { index: 2, n: 1 })
    ));
}

#[test]
fn report_json_shape() {
    let m = common::disc_manifest();
    let r = test_function(&parse("conj(z1)").unwrap(), m, &Thresholds::default(), false, "disc").unwrap();
    let v: serde_json::Value = serde_json::to_value(&r).unwrap();
    for key in ["function", "manifest", "points", "per_coordinate_max", "verdict", "thresholds", "disclaimer"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["verdict"], "violated");
    assert_eq!(v["points"].as_array().unwrap().len(), 10);
    assert!(v["points"][0].get("fd_error_est").is_some());
}
