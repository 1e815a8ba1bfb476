//! Holomorphy testing at angular points.
//!
//! At a corner whose arms have complex directions `τ1 ≠ ±τ2` in the `z_l`
//! line, the one-sided derivatives of a C¹ function satisfy
//! `D_k = a τ_k + b conj(τ_k)` with `a = ∂f/∂z_l`, `b = ∂f/∂z̄_l`. Two
//! arms determine `b`; a function holomorphic along the leaf has `b = 0`.

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::builder::FoliationManifest;
use crate::cfun::{eval, wirtinger_ad, Expr, WirtingerPair};
use crate::error::{Error, Result};
use crate::geometry::{complex_coord, Domain, Point};
use crate::kernel::plane_direction;
use crate::scalar::Real;

/// Arms closer than this to parallel are rejected.
pub const MIN_ARM_SEPARATION: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    /// A residual above this (and above `pass_factor` × its error) is a violation.
    pub tau_detect: f64,
    /// A residual below `min(tau_detect, max(pass_floor, pass_factor × error))` passes.
    pub pass_factor: f64,
    pub pass_floor: f64,
    /// Finite-difference step as a fraction of the stage's bend radius.
    pub h0_fraction: f64,
}

impl Thresholds {
    /// Pass tolerance for a residual with the given error estimate; never above `tau_detect`.
    pub fn pass_tolerance(&self, fd_error_est: f64) -> f64 {
        self.pass_floor.max(self.pass_factor * fd_error_est).min(self.tau_detect)
    }
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            tau_detect: 1e-2,
            pass_factor: 10.0,
            pass_floor: 1e-8,
            h0_fraction: 1.0 / 64.0,
        }
    }
}

/// One-sided derivatives of `f` along the two arms of a corner.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct ArmDerivatives<T> {
    pub d1: Complex<T>,
    pub d2: Complex<T>,
    pub h_used: T,
    /// Estimated absolute error of each derivative (max of the two).
    pub fd_error_est: f64,
}

fn eval_checked<T: Real>(f: &Expr, x: &[T]) -> Result<Complex<T>> {
    let v = eval(f, x)?;
    if !(v.re.is_finite() && v.im.is_finite()) {
        return Err(Error::NotANumber);
    }
    Ok(v)
}

fn abs_f<T: Real>(z: Complex<T>) -> f64 {
    z.re.to_f().hypot(z.im.to_f())
}

/// Richardson-extrapolated one-sided difference along `dir` at step `h0`:
/// `(2 f(q+h) - f(q+2h)/2 - 3 f(q)/2) / h`, with an error estimate from the
/// `h` versus `h/2` discrepancy plus rounding.
pub fn one_sided_derivative<T: Real>(
    f: &Expr,
    domain: Option<&Domain<T>>,
    q: &[T],
    dir: &[T],
    h0: T,
) -> Result<(Complex<T>, f64)> {
    let at = |s: T| -> Vec<T> { q.iter().zip(dir).map(|(&a, &d)| a + s * d).collect() };
    let two = T::of(2.0);
    let half = T::of(0.5);
    if let Some(d) = domain {
        // convex domains: the ray segment is inside when its ends are
        if !d.contains(q) || !d.contains(&at(two * h0)) {
            return Err(Error::DomainExit);
        }
    }
    let f0 = eval_checked(f, q)?;
    let fh2 = eval_checked(f, &at(h0 * half))?;
    let f1 = eval_checked(f, &at(h0))?;
    let f2 = eval_checked(f, &at(two * h0))?;
    let c = |x: f64| Complex::new(T::of(x), T::zero());
    let hc = Complex::new(h0, T::zero());
    let d_h = (f1 * c(2.0) - f2 * c(0.5) - f0 * c(1.5)) / hc;
    let d_h2 = (fh2 * c(2.0) - f1 * c(0.5) - f0 * c(1.5)) / (hc * c(0.5));
    let trunc = 4.0 / 3.0 * abs_f(d_h - d_h2);
    let scale = [f0, fh2, f1, f2].iter().map(|&z| abs_f(z)).fold(1.0, f64::max);
    let qmag = q.iter().map(|x| x.to_f().abs()).fold(0.0, f64::max);
    let round = 4.0 * T::UNIT_ROUNDOFF * (8.0 * scale + abs_f(d_h) * (qmag + 1.0)) / h0.to_f();
    Ok((d_h, trunc + round))
}

/// Solve `D_k = a t_k + b conj(t_k)` for the Wirtinger pair.
pub fn wirtinger_from_arms<T: Real>(
    t1: Complex<T>,
    t2: Complex<T>,
    d1: Complex<T>,
    d2: Complex<T>,
) -> Result<WirtingerPair<T>> {
    let sep = (t1.conj() * t2).im;
    let norm = abs_f(t1) * abs_f(t2);
    if !(sep.to_f().abs() >= MIN_ARM_SEPARATION * norm) {
        return Err(Error::DegenerateArms(sep.to_f().abs()));
    }
    let det = t1 * t2.conj() - t2 * t1.conj();
    Ok(WirtingerPair {
        a: (d1 * t2.conj() - d2 * t1.conj()) / det,
        b: (t1 * d2 - t2 * d1) / det,
    })
}

/// Ambient unit directions of the two arms leaving the corner of stage `k`,
/// and their complex directions in the `z_l` line.
pub fn arm_directions<T: Real>(m: &FoliationManifest<T>, k: usize) -> ([Point<T>; 2], [Complex<T>; 2]) {
    let s = &m.stages[k - 1];
    let ap = s.angular_data();
    let dir1 = plane_direction(s, -ap.t1);
    let dir2 = plane_direction(s, ap.t2);
    let tau1 = complex_coord(&dir1, s.l).expect("valid stage index");
    let tau2 = complex_coord(&dir2, s.l).expect("valid stage index");
    ([Point(dir1), Point(dir2)], [tau1, tau2])
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointRecord {
    pub stage: usize,
    pub l: usize,
    pub q: Vec<f64>,
    pub a: Complex<f64>,
    pub b: Complex<f64>,
    /// `|b|`.
    pub residual: f64,
    pub fd_error_est: f64,
    pub h_used: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_b: Option<Complex<f64>>,
    /// `| residual - |oracle_b| |`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_gap: Option<f64>,
}

fn cplx<T: Real>(z: Complex<T>) -> Complex<f64> {
    Complex::new(z.re.to_f(), z.im.to_f())
}

/// Test `f` at the corner of stage `k` (1-based).
pub fn test_at_point<T: Real>(
    f: &Expr,
    m: &FoliationManifest<T>,
    k: usize,
    th: &Thresholds,
    oracle: bool,
) -> Result<PointRecord> {
    let s = &m.stages[k - 1];
    let q = s.angular_data().q;
    let h0 = s.eta * T::of(th.h0_fraction);
    let ([dir1, dir2], [tau1, tau2]) = arm_directions(m, k);
    let (d1, e1) = one_sided_derivative(f, Some(&m.domain), &q, &dir1, h0)?;
    let (d2, e2) = one_sided_derivative(f, Some(&m.domain), &q, &dir2, h0)?;
    let wp = wirtinger_from_arms(tau1, tau2, d1, d2)?;
    let det = 2.0 * (tau1.conj() * tau2).im.to_f().abs();
    let fd_error_est = (e1 + e2) / det;
    let residual = abs_f(wp.b);
    let (oracle_b, oracle_gap) = if oracle {
        let ad = wirtinger_ad(f, &q, s.l)?;
        (Some(cplx(ad.b)), Some((residual - abs_f(ad.b)).abs()))
    } else {
        (None, None)
    };
    Ok(PointRecord {
        stage: k,
        l: s.l,
        q: q.to_f64(),
        a: cplx(wp.a),
        b: cplx(wp.b),
        residual,
        fd_error_est,
        h_used: h0.to_f(),
        oracle_b,
        oracle_gap,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Consistent,
    Violated,
    Inconclusive,
}

pub const DISCLAIMER: &str = "A `consistent` verdict means ∂f/∂z̄_l vanished to within the stated \
tolerance at the finitely many angular points tested. That is evidence, not proof, of holomorphy. \
A `violated` verdict certifies that f is not holomorphic along the foliation.";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HolomorphyReport {
    pub function: String,
    pub manifest: String,
    pub n: usize,
    pub points: Vec<PointRecord>,
    /// Largest residual per coordinate class `l = 1..n` (0 when the class is untested).
    pub per_coordinate_max: Vec<f64>,
    pub verdict: Verdict,
    pub thresholds: Thresholds,
    pub disclaimer: String,
}

impl HolomorphyReport {
    pub fn max_residual(&self) -> f64 {
        self.per_coordinate_max.iter().copied().fold(0.0, f64::max)
    }
}

/// Verdict from per-point records.
pub fn verdict(points: &[PointRecord], th: &Thresholds) -> Verdict {
    let violated = points
        .iter()
        .any(|p| p.residual > th.tau_detect && p.residual > th.pass_factor * p.fd_error_est);
    if violated {
        return Verdict::Violated;
    }
    let pass = points
        .iter()
        .all(|p| p.residual < th.pass_tolerance(p.fd_error_est));
    if pass {
        Verdict::Consistent
    } else {
        Verdict::Inconclusive
    }
}

/// Test `f` at every angular point of the manifest.
pub fn test_function<T: Real>(
    f: &Expr,
    m: &FoliationManifest<T>,
    th: &Thresholds,
    oracle: bool,
    manifest_label: &str,
) -> Result<HolomorphyReport> {
    if m.stages.is_empty() {
        return Err(Error::NoAngularPoints);
    }
    if f.max_var() > m.n {
        return Err(Error::UnboundVariable {
            index: f.max_var(),
            n: m.n,
        });
    }
    let points: Vec<PointRecord> = (1..=m.stages.len())
        .into_par_iter()
        .map(|k| test_at_point(f, m, k, th, oracle))
        .collect::<Result<_>>()?;
    let mut per_coordinate_max = vec![0.0f64; m.n];
    for p in &points {
        per_coordinate_max[p.l - 1] = per_coordinate_max[p.l - 1].max(p.residual);
    }
    Ok(HolomorphyReport {
        function: f.to_string(),
        manifest: manifest_label.to_string(),
        n: m.n,
        verdict: verdict(&points, th),
        points,
        per_coordinate_max,
        thresholds: *th,
        disclaimer: DISCLAIMER.into(),
    })
}
