mod common;

use folia::cfun::{eval, parse, wirtinger_ad, Expr};
use folia::Dd;
use num_complex::Complex;
use num_traits::Float;
use proptest::prelude::*;

fn dd(x: &[f64]) -> Vec<Dd> {
    x.iter().map(|&v| Dd::of_f64(v)).collect()
}

fn c64(z: Complex<Dd>) -> Complex<f64> {
    Complex::new(z.re.hi(), z.im.hi())
}

/// Wirtinger pair from central differences in the real and imaginary directions of `z_l`.
fn central_wirtinger(e: &Expr, p: &[f64], l: usize) -> (Complex<f64>, Complex<f64>) {
    let h = Dd::of_f64(1e-9);
    let x = dd(p);
    let diff = |axis: usize| {
        let mut a = x.clone();
        let mut b = x.clone();
        a[axis] = a[axis] + h;
        b[axis] = b[axis] - h;
        let d = (eval(e, &a).unwrap() - eval(e, &b).unwrap()) / Complex::new(h + h, Dd::of_f64(0.0));
        c64(d)
    };
    let fx = diff(2 * l - 2);
    let fy = diff(2 * l - 1);
    let i = Complex::new(0.0, 1.0);
    ((fx - i * fy) / 2.0, (fx + i * fy) / 2.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn holomorphic_expressions_have_zero_conjugate_derivative(e in common::expr(2, true), p in common::point(4, 1.0), l in 1..=2usize) {
        let w = wirtinger_ad(&e, &p, l).unwrap();
        prop_assert_eq!(w.b, Complex::new(0.0, 0.0));
    }

    #[test]
    fn autodiff_matches_central_differences(e in common::expr(2, false), p in common::point(4, 1.0), l in 1..=2usize) {
        let w = wirtinger_ad(&e, &dd(&p), l).unwrap();
        let (a, b) = central_wirtinger(&e, &p, l);
        let scale = 1.0 + c64(w.a).norm() + c64(w.b).norm();
        prop_assert!((c64(w.a) - a).norm() <= 1e-7 * scale, "a: {} vs {}", c64(w.a), a);
        prop_assert!((c64(w.b) - b).norm() <= 1e-7 * scale, "b: {} vs {}", c64(w.b), b);
    }

    #[test]
    fn printed_expressions_reparse_to_the_same_function(e in common::expr(2, false), p in common::point(4, 1.0)) {
        let text = e.to_string();
        let back = parse(&text).unwrap();
        let (u, v) = (eval(&e, &p).unwrap(), eval(&back, &p).unwrap());
        prop_assert!((u - v).norm() <= 1e-12 * (1.0 + u.norm()), "{text}: {u} vs {v}");
    }

    #[test]
    fn evaluation_is_total_without_division(e in common::expr(3, false), p in common::point(6, 2.0)) {
        let v = eval(&e, &p).unwrap();
        prop_assert!(v.re.is_finite() || v.norm().is_infinite());
    }

    #[test]
    fn stray_characters_are_rejected(e in common::expr(2, false), junk in "[$#@!?;]", at in 0..64usize) {
        let mut text = e.to_string();
        let at = text.char_indices().map(|(i, _)| i).nth(at % text.chars().count()).unwrap_or(0);
        text.insert_str(at, &junk);
        prop_assert!(parse(&text).is_err(), "{text}");
    }

    #[test]
    fn conjugation_swaps_the_pair(e in common::expr(2, false), p in common::point(4, 1.0), l in 1..=2usize) {
        let w = wirtinger_ad(&e, &p, l).unwrap();
        let c = wirtinger_ad(&Expr::Call(folia::cfun::Func::Conj, Box::new(e)), &p, l).unwrap();
        prop_assert!((c.a - w.b.conj()).norm() <= 1e-12 * (1.0 + w.b.norm()));
        prop_assert!((c.b - w.a.conj()).norm() <= 1e-12 * (1.0 + w.a.norm()));
    }
}

#[test]
fn grammar_examples() {
    let e = parse("conj(z1)*z2^2").unwrap();
    let v = eval(&e, &[0.0, 1.0, 2.0, 0.0]).unwrap();
    assert_eq!(v, Complex::new(0.0, -4.0));
    assert_eq!(eval(&parse("abs2(z1)").unwrap(), &[3.0, 4.0]).unwrap(), Complex::new(25.0, 0.0));
    let w = wirtinger_ad(&parse("abs2(z1)").unwrap(), &[0.3, -0.7], 1).unwrap();
    assert_eq!(w.a, Complex::new(0.3, 0.7));
    assert_eq!(w.b, Complex::new(0.3, -0.7));
    let err = parse("z1^^2").unwrap_err().to_string();
    assert!(err.contains("offset 3"), "{err}");
    let _ = Float::abs(Dd::of_f64(-1.0));
}
