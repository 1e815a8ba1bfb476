//! Scalar abstraction shared by every numerical routine in the crate.
//!
//! All geometry, perturbation and testing code is written against [`Real`],
//! so the same construction can run in `f32`, `f64` or double-double
//! ([`Dd`]). Stage supports shrink geometrically, which exhausts `f64`
//! after a couple of dozen stages; deep builds use [`Dd`].

use std::fmt::Debug;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

mod dd;

pub use dd::{Dd, ParseDdError};

/// Floating point scalar usable by the whole crate.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Default
    + Debug
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Short tag written into manifests (`"f32"`, `"f64"`, `"dd"`).
    const NAME: &'static str;
    /// Relative rounding error of one arithmetic operation.
    const UNIT_ROUNDOFF: f64;
    /// Significant decimal digits used for text output.
    const DIGITS: usize;

    fn of(x: f64) -> Self;

    fn to_f(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Exponential accurate to the full precision of the type.
    fn exp_full(self) -> Self;
    /// Sine accurate to the full precision of the type.
    fn sin_full(self) -> Self;
    /// Cosine accurate to the full precision of the type.
    fn cos_full(self) -> Self;

    /// Scientific notation with [`Real::DIGITS`] significant digits.
    fn to_sci(self) -> String;

    fn unit_roundoff() -> Self {
        Self::of(Self::UNIT_ROUNDOFF)
    }
}

impl Real for f64 {
    const NAME: &'static str = "f64";
    const UNIT_ROUNDOFF: f64 = f64::EPSILON / 2.0;
    const DIGITS: usize = 17;

    fn of(x: f64) -> Self {
        x
    }
    fn exp_full(self) -> Self {
        self.exp()
    }
    fn sin_full(self) -> Self {
        self.sin()
    }
    fn cos_full(self) -> Self {
        self.cos()
    }
    fn to_sci(self) -> String {
        format!("{:.16e}", self)
    }
}

impl Real for f32 {
    const NAME: &'static str = "f32";
    const UNIT_ROUNDOFF: f64 = (f32::EPSILON / 2.0) as f64;
    const DIGITS: usize = 9;

    fn of(x: f64) -> Self {
        x as f32
    }
    fn exp_full(self) -> Self {
        self.exp()
    }
    fn sin_full(self) -> Self {
        self.sin()
    }
    fn cos_full(self) -> Self {
        self.cos()
    }
    fn to_sci(self) -> String {
        format!("{:.8e}", self)
    }
}

impl Real for Dd {
    const NAME: &'static str = "dd";
    // 2^-105
    const UNIT_ROUNDOFF: f64 = 2.465_190_328_815_662e-32;
    const DIGITS: usize = 32;

    fn of(x: f64) -> Self {
        Dd::from(x)
    }
    fn exp_full(self) -> Self {
        self.exp()
    }
    fn sin_full(self) -> Self {
        self.sin()
    }
    fn cos_full(self) -> Self {
        self.cos()
    }
    fn to_sci(self) -> String {
        self.to_sci_digits(Self::DIGITS)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dd_exp_matches_known_digits() {
        // e = 2.71828182845904523536028747135266249...
        let e = Dd::of(1.0).exp_full();
        let err = (e - Dd::E()).abs();
        assert!(err.hi() < 1e-30, "{err:?}");
        let back = Dd::of(-3.5).exp_full() * Dd::of(3.5).exp_full();
        assert!((back - Dd::of(1.0)).abs().hi() < 1e-30);
    }

    #[test]
    fn dd_sin_cos_pythagoras() {
        for &x in &[0.1, 0.5, 1.3, 2.9, -4.2, 10.0] {
            let x = Dd::of(x);
            let (s, c) = (x.sin_full(), x.cos_full());
            let id = s * s + c * c - Dd::of(1.0);
            assert!(id.abs().hi() < 1e-30, "x={x:?} id={id:?}");
            assert!((s.hi() - x.hi().sin()).abs() < 1e-15);
            assert!((c.hi() - x.hi().cos()).abs() < 1e-15);
        }
        let s = Dd::PI().sin_full();
        assert!(s.abs().hi() < 1e-31);
    }

    #[test]
    fn dd_sci_formatting() {
        let third = Dd::of(1.0) / Dd::of(3.0);
        assert_eq!(third.to_sci(), "3.3333333333333333333333333333333e-1");
        let v = Dd::of(-1234.5);
        assert!(v.to_sci().starts_with("-1.2345000000000000000000000000000e3"));
        let tiny = Dd::of(0.25) + Dd::of(1e-20);
        assert_eq!(tiny.to_sci(), "2.5000000000000000001000000000000e-1");
        assert_eq!(1.5f64.to_sci(), "1.5000000000000000e0");
    }
}
