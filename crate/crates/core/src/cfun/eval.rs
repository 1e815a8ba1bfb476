//! Evaluation and forward-mode Wirtinger differentiation.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::{Expr, Func};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// `(∂f/∂z_l, ∂f/∂z̄_l)` at a point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct WirtingerPair<T> {
    pub a: Complex<T>,
    pub b: Complex<T>,
}

/// Value together with its two Wirtinger derivatives.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Wirt<T> {
    pub v: Complex<T>,
    pub dz: Complex<T>,
    pub dzbar: Complex<T>,
}

trait Arith<T: Real>: Sized + Copy {
    fn lit(c: Complex<T>) -> Self;
    fn var(z: Complex<T>, active: bool) -> Self;
    fn value(&self) -> Complex<T>;
    fn div(self, rhs: Self) -> Self;
    fn powi(self, k: i32) -> Self;
    fn call(self, f: Func) -> Self;
}

fn cpowi<T: Real>(z: Complex<T>, k: i32) -> Complex<T> {
    let mut base = if k < 0 { z.inv() } else { z };
    let mut e = k.unsigned_abs();
    let mut acc = Complex::new(T::one(), T::zero());
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base;
        }
        base = base * base;
        e >>= 1;
    }
    acc
}

fn cexp<T: Real>(z: Complex<T>) -> Complex<T> {
    let r = z.re.exp_full();
    Complex::new(r * z.im.cos_full(), r * z.im.sin_full())
}

fn cosh_sinh<T: Real>(x: T) -> (T, T) {
    let e = x.exp_full();
    let inv = e.recip();
    let half = T::of(0.5);
    (half * (e + inv), half * (e - inv))
}

fn csin<T: Real>(z: Complex<T>) -> Complex<T> {
    let (ch, sh) = cosh_sinh(z.im);
    Complex::new(z.re.sin_full() * ch, z.re.cos_full() * sh)
}

fn ccos<T: Real>(z: Complex<T>) -> Complex<T> {
    let (ch, sh) = cosh_sinh(z.im);
    Complex::new(z.re.cos_full() * ch, -(z.re.sin_full() * sh))
}

impl<T: Real> Arith<T> for Complex<T> {
    fn lit(c: Complex<T>) -> Self {
        c
    }
    fn var(z: Complex<T>, _: bool) -> Self {
        z
    }
    fn value(&self) -> Complex<T> {
        *self
    }
    fn div(self, rhs: Self) -> Self {
        self / rhs
    }
    fn powi(self, k: i32) -> Self {
        cpowi(self, k)
    }
    fn call(self, f: Func) -> Self {
        match f {
            Func::Conj => self.conj(),
            Func::Re => Complex::new(self.re, T::zero()),
            Func::Im => Complex::new(self.im, T::zero()),
            Func::Abs2 => Complex::new(self.norm_sqr(), T::zero()),
            Func::Exp => cexp(self),
            Func::Sin => csin(self),
            Func::Cos => ccos(self),
        }
    }
}

impl<T: Real> Add for Wirt<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Wirt {
            v: self.v + o.v,
            dz: self.dz + o.dz,
            dzbar: self.dzbar + o.dzbar,
        }
    }
}

impl<T: Real> Sub for Wirt<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Wirt {
            v: self.v - o.v,
            dz: self.dz - o.dz,
            dzbar: self.dzbar - o.dzbar,
        }
    }
}

impl<T: Real> Neg for Wirt<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Wirt {
            v: -self.v,
            dz: -self.dz,
            dzbar: -self.dzbar,
        }
    }
}

impl<T: Real> Mul for Wirt<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Wirt {
            v: self.v * o.v,
            dz: self.dz * o.v + self.v * o.dz,
            dzbar: self.dzbar * o.v + self.v * o.dzbar,
        }
    }
}

impl<T: Real> Wirt<T> {
    /// Chain rule through a holomorphic `g` with `g(v)` and `g'(v)` given.
    fn holo(self, g: Complex<T>, dg: Complex<T>) -> Self {
        Wirt {
            v: g,
            dz: dg * self.dz,
            dzbar: dg * self.dzbar,
        }
    }

    pub fn conj(self) -> Self {
        Wirt {
            v: self.v.conj(),
            dz: self.dzbar.conj(),
            dzbar: self.dz.conj(),
        }
    }
}

impl<T: Real> Arith<T> for Wirt<T> {
    fn lit(c: Complex<T>) -> Self {
        let zero = Complex::new(T::zero(), T::zero());
        Wirt {
            v: c,
            dz: zero,
            dzbar: zero,
        }
    }
    fn var(z: Complex<T>, active: bool) -> Self {
        let zero = Complex::new(T::zero(), T::zero());
        Wirt {
            v: z,
            dz: if active {
                Complex::new(T::one(), T::zero())
            } else {
                zero
            },
            dzbar: zero,
        }
    }
    fn value(&self) -> Complex<T> {
        self.v
    }
    fn div(self, o: Self) -> Self {
        let inv = o.v.inv();
        let inv2 = inv * inv;
        Wirt {
            v: self.v * inv,
            dz: (self.dz * o.v - self.v * o.dz) * inv2,
            dzbar: (self.dzbar * o.v - self.v * o.dzbar) * inv2,
        }
    }
    fn powi(self, k: i32) -> Self {
        if k == 0 {
            return Self::lit(Complex::new(T::one(), T::zero()));
        }
        let g = cpowi(self.v, k);
        let dg = cpowi(self.v, k - 1) * T::of(k as f64);
        self.holo(g, dg)
    }
    fn call(self, f: Func) -> Self {
        let half = T::of(0.5);
        match f {
            Func::Conj => self.conj(),
            Func::Re => {
                let s = self + self.conj();
                Wirt {
                    v: s.v * half,
                    dz: s.dz * half,
                    dzbar: s.dzbar * half,
                }
            }
            Func::Im => {
                // (f - conj f) / 2i
                let d = self - self.conj();
                let k = Complex::new(T::zero(), -half);
                Wirt {
                    v: d.v * k,
                    dz: d.dz * k,
                    dzbar: d.dzbar * k,
                }
            }
            Func::Abs2 => self * self.conj(),
            Func::Exp => {
                let e = cexp(self.v);
                self.holo(e, e)
            }
            Func::Sin => self.holo(csin(self.v), ccos(self.v)),
            Func::Cos => self.holo(ccos(self.v), -csin(self.v)),
        }
    }
}

fn walk<T: Real, A: Arith<T> + Add<Output = A> + Sub<Output = A> + Mul<Output = A>>(
    e: &Expr,
    p: &[T],
    active: usize,
) -> Result<A> {
    let zero = Complex::new(T::zero(), T::zero());
    Ok(match e {
        Expr::Var(l) => {
            let n = p.len() / 2;
            if *l == 0 || *l > n {
                return Err(Error::UnboundVariable { index: *l, n });
            }
            A::var(Complex::new(p[2 * l - 2], p[2 * l - 1]), *l == active)
        }
        Expr::Lit(c) => A::lit(Complex::new(T::of(c.re), T::of(c.im))),
        Expr::Add(a, b) => walk::<T, A>(a, p, active)? + walk(b, p, active)?,
        Expr::Sub(a, b) => walk::<T, A>(a, p, active)? - walk(b, p, active)?,
        Expr::Mul(a, b) => walk::<T, A>(a, p, active)? * walk(b, p, active)?,
        Expr::Div(a, b) => {
            let den: A = walk(b, p, active)?;
            if den.value() == zero {
                return Err(Error::DivisionByZero(b.to_string()));
            }
            walk::<T, A>(a, p, active)?.div(den)
        }
        Expr::Pow(a, k) => {
            let base: A = walk(a, p, active)?;
            if *k < 0 && base.value() == zero {
                return Err(Error::DivisionByZero(e.to_string()));
            }
            base.powi(*k)
        }
        Expr::Call(f, a) => walk::<T, A>(a, p, active)?.call(*f),
    })
}

/// Evaluate at a point of R^{2n}.
pub fn eval<T: Real>(e: &Expr, p: &[T]) -> Result<Complex<T>> {
    let v: Complex<T> = walk(e, p, 0)?;
    if v.re.is_nan() || v.im.is_nan() {
        return Err(Error::NotANumber);
    }
    Ok(v)
}

/// Forward-mode Wirtinger derivatives with respect to `z_l`.
pub fn wirtinger_ad<T: Real>(e: &Expr, p: &[T], l: usize) -> Result<WirtingerPair<T>> {
    let n = p.len() / 2;
    if l == 0 || l > n {
        return Err(Error::IndexOutOfRange { index: l, n });
    }
    let w: Wirt<T> = walk(e, p, l)?;
    Ok(WirtingerPair { a: w.dz, b: w.dzbar })
}
