#![allow(dead_code)]

use std::sync::OnceLock;

use folia::cfun::{Expr, Func};
use folia::{build, BuildParams, Dd, Domain, FoliationManifest};
use num_complex::Complex;
use proptest::prelude::*;

/// 10 stages in the unit disc of C.
pub fn disc_manifest() -> &'static FoliationManifest<Dd> {
    static M: OnceLock<FoliationManifest<Dd>> = OnceLock::new();
    M.get_or_init(|| build(Domain::polydisc(1, 1.0), 7, BuildParams::new(10)).unwrap())
}

/// 20 stages in the unit bidisc of C^2.
pub fn bidisc_manifest() -> &'static FoliationManifest<Dd> {
    static M: OnceLock<FoliationManifest<Dd>> = OnceLock::new();
    M.get_or_init(|| build(Domain::polydisc(2, 1.0), 7, BuildParams::new(20)).unwrap())
}

fn lit() -> impl Strategy<Value = Expr> {
    (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(re, im)| Expr::Lit(Complex::new(re, im)))
}

/// Polynomial-exponential expressions in `z1..zn` without division.
pub fn expr(n: usize, holomorphic: bool) -> BoxedStrategy<Expr> {
    let leaf = prop_oneof![(1..=n).prop_map(Expr::Var), lit()];
    let funcs: Vec<Func> = if holomorphic {
        vec![Func::Exp, Func::Sin, Func::Cos]
    } else {
        vec![Func::Exp, Func::Sin, Func::Cos, Func::Conj, Func::Re, Func::Im, Func::Abs2]
    };
    leaf.prop_recursive(4, 24, 2, move |inner| {
        let funcs = funcs.clone();
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Add(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Sub(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Mul(Box::new(a), Box::new(b))),
            (inner.clone(), 0..4i32).prop_map(|(a, k)| Expr::Pow(Box::new(a), k)),
            (proptest::sample::select(funcs), inner).prop_map(|(f, a)| Expr::Call(f, Box::new(a))),
        ]
    })
    .boxed()
}

/// Point with every coordinate in `(-r, r)`.
pub fn point(dim: usize, r: f64) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(-r..r, dim)
}
