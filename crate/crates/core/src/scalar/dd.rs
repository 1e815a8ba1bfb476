//! Double-double arithmetic: an unevaluated sum `hi + lo` of two `f64`
//! with `|lo| <= ulp(hi)/2`, good for about 32 significant digits.
//!
//! Basic operations follow the error-free transformations of Dekker and
//! Knuth; every transcendental is computed to full precision by argument
//! reduction plus a short series or a Newton step from the `f64` value.

use std::cmp::Ordering;
use std::fmt;
use std::iter::{Product, Sum};
use std::num::FpCategory;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Rem, RemAssign, Sub, SubAssign};
use std::str::FromStr;
use std::sync::OnceLock;

use num_traits::{Float, FloatConst, FromPrimitive, Num, NumCast, One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Dd {
    hi: f64,
    lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// `1/j!` for `j = 0..=9`.
fn inv_factorials() -> &'static [Dd; 10] {
    static C: OnceLock<[Dd; 10]> = OnceLock::new();
    C.get_or_init(|| {
        let mut c = [Dd::ONE; 10];
        for j in 1..10 {
            c[j] = c[j - 1].div_f64(j as f64);
        }
        c
    })
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    /// Build from two parts, renormalising.
    pub fn new(hi: f64, lo: f64) -> Dd {
        let (hi, lo) = two_sum(hi, lo);
        Dd { hi, lo }
    }

    pub const fn of_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    pub const fn from_parts(hi: f64, lo: f64) -> Dd {
        Dd { hi, lo }
    }

    pub fn hi(self) -> f64 {
        self.hi
    }

    pub fn lo(self) -> f64 {
        self.lo
    }

    fn norm(hi: f64, lo: f64) -> Dd {
        if !hi.is_finite() {
            return Dd { hi, lo: 0.0 };
        }
        let (hi, lo) = quick_two_sum(hi, lo);
        Dd { hi, lo }
    }

    fn mul_f64(self, b: f64) -> Dd {
        let (p, e) = two_prod(self.hi, b);
        Dd::norm(p, e + self.lo * b)
    }

    fn div_f64(self, b: f64) -> Dd {
        let q1 = self.hi / b;
        if !q1.is_finite() || !b.is_finite() {
            return Dd::of_f64(q1);
        }
        let r = self - Dd::of_f64(q1).mul_f64(b);
        let q2 = r.hi / b;
        let r = r - Dd::of_f64(q2).mul_f64(b);
        let q3 = r.hi / b;
        let (h, l) = quick_two_sum(q1, q2);
        Dd { hi: h, lo: l } + Dd::of_f64(q3)
    }

    fn sqr(self) -> Dd {
        let (p, e) = two_prod(self.hi, self.hi);
        Dd::norm(p, e + 2.0 * self.hi * self.lo + self.lo * self.lo)
    }

    fn ldexp(self, k: i32) -> Dd {
        let s = 2f64.powi(k);
        Dd { hi: self.hi * s, lo: self.lo * s }
    }

    fn exp_dd(self) -> Dd {
        if self.hi.is_nan() {
            return self;
        }
        if self.hi > 709.7 {
            return Dd::of_f64(f64::INFINITY);
        }
        if self.hi < -745.0 {
            return Dd::ZERO;
        }
        // x = k ln2 + 2^9 r, exp(r) - 1 by Taylor, then square back up
        let k = (self.hi / std::f64::consts::LN_2).round();
        let r = (self - Dd::LN_2() * Dd::of_f64(k)).ldexp(-9);
        // |r| < 7e-4, so nine Taylor terms leave a tail below 1e-34
        let c = inv_factorials();
        let mut t = c[9];
        for j in (1..9).rev() {
            t = t * r + c[j];
        }
        let mut s = t * r; // exp(r) - 1
        for _ in 0..9 {
            s = s.ldexp(1) + s.sqr();
        }
        (s + Dd::ONE).ldexp(k as i32)
    }

    fn ln_dd(self) -> Dd {
        if self.hi.is_nan() || self.hi < 0.0 {
            return Dd::of_f64(f64::NAN);
        }
        if self.hi == 0.0 {
            return Dd::of_f64(f64::NEG_INFINITY);
        }
        if self.hi.is_infinite() {
            return self;
        }
        let x = Dd::of_f64(self.hi.ln());
        x + self * (-x).exp_dd() - Dd::ONE
    }

    /// `sin` and `cos` of `|r| <= pi/4`.
    fn sin_cos_reduced(r: Dd) -> (Dd, Dd) {
        let r2 = r.sqr();
        let mut s = Dd::ZERO;
        let mut c = Dd::ZERO;
        for k in (1..=14).rev() {
            let k = k as f64;
            s = (Dd::ONE - s * r2).div_f64(2.0 * k * (2.0 * k + 1.0));
            c = (Dd::ONE - c * r2).div_f64((2.0 * k - 1.0) * (2.0 * k));
        }
        (r * (Dd::ONE - s * r2), Dd::ONE - c * r2)
    }

    fn sin_cos_dd(self) -> (Dd, Dd) {
        if !self.is_finite() {
            let nan = Dd::of_f64(f64::NAN);
            return (nan, nan);
        }
        let j = (self.hi / std::f64::consts::FRAC_PI_2).round();
        let r = self - Dd::FRAC_PI_2() * Dd::of_f64(j);
        let (s, c) = Dd::sin_cos_reduced(r);
        match (j as i64).rem_euclid(4) {
            0 => (s, c),
            1 => (c, -s),
            2 => (-s, -c),
            _ => (-c, s),
        }
    }

    fn atan2_dd(y: Dd, x: Dd) -> Dd {
        if x.is_zero() && y.is_zero() {
            return Dd::ZERO;
        }
        if x.is_nan() || y.is_nan() {
            return Dd::of_f64(f64::NAN);
        }
        let r = (x.sqr() + y.sqr()).sqrt();
        let (xx, yy) = (x / r, y / r);
        let z = Dd::of_f64(y.hi.atan2(x.hi));
        let (s, c) = z.sin_cos_dd();
        if xx.hi.abs() > yy.hi.abs() {
            z + (yy - s) / c
        } else {
            z - (xx - c) / s
        }
    }

    /// Decimal scientific notation with `digits` significant digits.
    pub fn to_sci_digits(self, digits: usize) -> String {
        let digits = digits.max(1);
        if self.hi.is_nan() {
            return "NaN".into();
        }
        if self.hi.is_infinite() {
            return if self.hi > 0.0 { "inf".into() } else { "-inf".into() };
        }
        if self.hi == 0.0 {
            return format!("{:.*e}", digits - 1, 0.0);
        }
        let neg = self.hi < 0.0;
        let a = self.abs();
        let mut exp10 = a.hi.log10().floor() as i32;
        let ten = Dd::of_f64(10.0);
        let mut y = a / ten.powi(exp10);
        if y >= ten {
            y = y.div_f64(10.0);
            exp10 += 1;
        } else if y < Dd::ONE {
            y = y.mul_f64(10.0);
            exp10 -= 1;
        }
        let mut digs = Vec::with_capacity(digits + 1);
        for _ in 0..=digits {
            let d = y.floor().hi.clamp(0.0, 9.0);
            digs.push(d as u8);
            y = (y - Dd::of_f64(d)).mul_f64(10.0);
        }
        if digs[digits] >= 5 {
            let mut i = digits;
            loop {
                if i == 0 {
                    digs.insert(0, 1);
                    exp10 += 1;
                    break;
                }
                i -= 1;
                if digs[i] == 9 {
                    digs[i] = 0;
                } else {
                    digs[i] += 1;
                    break;
                }
            }
        }
        digs.truncate(digits);
        let mut out = String::with_capacity(digits + 8);
        if neg {
            out.push('-');
        }
        out.push((b'0' + digs[0]) as char);
        out.push('.');
        for d in &digs[1..] {
            out.push((b'0' + d) as char);
        }
        out.push_str(&format!("e{exp10}"));
        out
    }
}

impl From<f64> for Dd {
    fn from(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }
}

impl From<Dd> for f64 {
    fn from(x: Dd) -> f64 {
        x.hi + x.lo
    }
}

impl fmt::Debug for Dd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Dd({})", self.to_sci_digits(32))
    }
}

impl fmt::Display for Dd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_sci_digits(f.precision().map_or(32, |p| p + 1)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseDdError;

impl fmt::Display for ParseDdError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("invalid double-double literal")
    }
}

impl std::error::Error for ParseDdError {}

impl FromStr for Dd {
    type Err = ParseDdError;

    /// Decimal literal, exact up to double-double rounding.
    fn from_str(s: &str) -> Result<Dd, ParseDdError> {
        let s = s.trim();
        match s {
            "NaN" | "nan" => return Ok(Dd::of_f64(f64::NAN)),
            "inf" => return Ok(Dd::of_f64(f64::INFINITY)),
            "-inf" => return Ok(Dd::of_f64(f64::NEG_INFINITY)),
            _ => {}
        }
        let (neg, body) = match s.as_bytes().first() {
            Some(b'-') => (true, &s[1..]),
            Some(b'+') => (false, &s[1..]),
            _ => (false, s),
        };
        let (mant, exp) = match body.find(['e', 'E']) {
            Some(i) => (&body[..i], body[i + 1..].parse::<i32>().map_err(|_| ParseDdError)?),
            None => (body, 0),
        };
        let mut acc = Dd::ZERO;
        let mut scale = exp;
        let mut seen_dot = false;
        let mut any = false;
        for c in mant.chars() {
            match c {
                '0'..='9' => {
                    acc = acc.mul_f64(10.0) + Dd::of_f64((c as u8 - b'0') as f64);
                    any = true;
                    if seen_dot {
                        scale -= 1;
                    }
                }
                '.' if !seen_dot => seen_dot = true,
                _ => return Err(ParseDdError),
            }
        }
        if !any {
            return Err(ParseDdError);
        }
        let v = if scale >= 0 {
            acc * Dd::of_f64(10.0).powi(scale)
        } else {
            acc / Dd::of_f64(10.0).powi(-scale)
        };
        Ok(if neg { -v } else { v })
    }
}

impl PartialOrd for Dd {
    fn partial_cmp(&self, other: &Dd) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi)? {
            Ordering::Equal => self.lo.partial_cmp(&other.lo),
            o => Some(o),
        }
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, b: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, b.hi);
        if !s.is_finite() {
            return Dd::of_f64(s);
        }
        let (t, f) = two_sum(self.lo, b.lo);
        let (s, e) = quick_two_sum(s, e + t);
        Dd::norm(s, e + f)
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, b: Dd) -> Dd {
        self + (-b)
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, b: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, b.hi);
        Dd::norm(p, e + (self.hi * b.lo + self.lo * b.hi))
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, b: Dd) -> Dd {
        let q1 = self.hi / b.hi;
        if !q1.is_finite() || !b.hi.is_finite() {
            return Dd::of_f64(q1);
        }
        let r = self - b.mul_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b.mul_f64(q2);
        let q3 = r.hi / b.hi;
        let (h, l) = quick_two_sum(q1, q2);
        Dd { hi: h, lo: l } + Dd::of_f64(q3)
    }
}

impl Rem for Dd {
    type Output = Dd;
    fn rem(self, b: Dd) -> Dd {
        self - (self / b).trunc() * b
    }
}

macro_rules! assign_ops {
    ($($tr:ident $m:ident $op:tt),*) => {$(
        impl $tr for Dd {
            fn $m(&mut self, b: Dd) {
                *self = *self $op b;
            }
        }
    )*};
}

assign_ops!(AddAssign add_assign +, SubAssign sub_assign -, MulAssign mul_assign *, DivAssign div_assign /, RemAssign rem_assign %);

impl Sum for Dd {
    fn sum<I: Iterator<Item = Dd>>(it: I) -> Dd {
        it.fold(Dd::ZERO, |a, b| a + b)
    }
}

impl Product for Dd {
    fn product<I: Iterator<Item = Dd>>(it: I) -> Dd {
        it.fold(Dd::ONE, |a, b| a * b)
    }
}

impl Zero for Dd {
    fn zero() -> Dd {
        Dd::ZERO
    }
    fn is_zero(&self) -> bool {
        self.hi == 0.0
    }
}

impl One for Dd {
    fn one() -> Dd {
        Dd::ONE
    }
}

impl Num for Dd {
    type FromStrRadixErr = ParseDdError;
    fn from_str_radix(s: &str, radix: u32) -> Result<Dd, ParseDdError> {
        if radix != 10 {
            return Err(ParseDdError);
        }
        s.parse()
    }
}

impl ToPrimitive for Dd {
    fn to_i64(&self) -> Option<i64> {
        let t = self.trunc();
        if !t.hi.is_finite() || t.hi.abs() > 9.2e18 {
            return None;
        }
        Some((t.hi as i128 + t.lo as i128) as i64)
    }
    fn to_u64(&self) -> Option<u64> {
        let t = self.trunc();
        if !t.hi.is_finite() || t.hi < 0.0 || t.hi > 1.8e19 {
            return None;
        }
        Some((t.hi as i128 + t.lo as i128) as u64)
    }
    fn to_f64(&self) -> Option<f64> {
        Some(self.hi + self.lo)
    }
}

impl FromPrimitive for Dd {
    fn from_i64(n: i64) -> Option<Dd> {
        let hi = n as f64;
        let lo = (n as i128 - hi as i128) as f64;
        Some(Dd::norm(hi, lo))
    }
    fn from_u64(n: u64) -> Option<Dd> {
        let hi = n as f64;
        let lo = (n as i128 - hi as i128) as f64;
        Some(Dd::norm(hi, lo))
    }
    fn from_f64(x: f64) -> Option<Dd> {
        Some(Dd::of_f64(x))
    }
}

impl NumCast for Dd {
    fn from<T: ToPrimitive>(n: T) -> Option<Dd> {
        n.to_f64().map(Dd::of_f64)
    }
}

macro_rules! consts {
    ($($name:ident = ($hi:expr, $lo:expr)),* $(,)?) => {
        impl FloatConst for Dd {
            $(fn $name() -> Dd { Dd { hi: $hi, lo: $lo } })*
        }
    };
}

consts! {
    E = (2.718281828459045, 1.4456468917292502e-16),
    FRAC_1_PI = (0.3183098861837907, -1.9678676675182486e-17),
    FRAC_1_SQRT_2 = (0.7071067811865476, -4.833646656726457e-17),
    FRAC_2_PI = (0.6366197723675814, -3.935735335036497e-17),
    FRAC_2_SQRT_PI = (1.1283791670955126, 1.533545961316588e-17),
    FRAC_PI_2 = (1.5707963267948966, 6.123233995736766e-17),
    FRAC_PI_3 = (1.0471975511965979, -1.072081766451091e-16),
    FRAC_PI_4 = (0.7853981633974483, 3.061616997868383e-17),
    FRAC_PI_6 = (0.5235987755982989, -5.360408832255455e-17),
    FRAC_PI_8 = (0.39269908169872414, 1.5308084989341915e-17),
    LN_10 = (2.302585092994046, -2.1707562233822494e-16),
    LN_2 = (0.6931471805599453, 2.3190468138462996e-17),
    LOG10_E = (0.4342944819032518, 1.098319650216765e-17),
    LOG2_E = (1.4426950408889634, 2.0355273740931033e-17),
    PI = (3.141592653589793, 1.2246467991473532e-16),
    SQRT_2 = (1.4142135623730951, -9.667293313452913e-17),
    TAU = (6.283185307179586, 2.4492935982947064e-16),
    LOG2_10 = (3.321928094887362, 1.661617516973592e-16),
    LOG10_2 = (0.3010299956639812, -2.8037281277851704e-18),
}

impl Float for Dd {
    fn nan() -> Dd {
        Dd::of_f64(f64::NAN)
    }
    fn infinity() -> Dd {
        Dd::of_f64(f64::INFINITY)
    }
    fn neg_infinity() -> Dd {
        Dd::of_f64(f64::NEG_INFINITY)
    }
    fn neg_zero() -> Dd {
        Dd::of_f64(-0.0)
    }
    fn min_value() -> Dd {
        Dd::of_f64(f64::MIN)
    }
    fn min_positive_value() -> Dd {
        Dd::of_f64(f64::MIN_POSITIVE)
    }
    fn epsilon() -> Dd {
        // 2^-104
        Dd::of_f64(4.930380657631324e-32)
    }
    fn max_value() -> Dd {
        Dd::of_f64(f64::MAX)
    }
    fn is_nan(self) -> bool {
        self.hi.is_nan()
    }
    fn is_infinite(self) -> bool {
        self.hi.is_infinite()
    }
    fn is_finite(self) -> bool {
        self.hi.is_finite()
    }
    fn is_normal(self) -> bool {
        self.hi.is_normal()
    }
    fn classify(self) -> FpCategory {
        self.hi.classify()
    }
    fn floor(self) -> Dd {
        let h = self.hi.floor();
        if h == self.hi {
            Dd::norm(h, self.lo.floor())
        } else {
            Dd::of_f64(h)
        }
    }
    fn ceil(self) -> Dd {
        let h = self.hi.ceil();
        if h == self.hi {
            Dd::norm(h, self.lo.ceil())
        } else {
            Dd::of_f64(h)
        }
    }
    fn round(self) -> Dd {
        let half = Dd::of_f64(0.5);
        if self.hi >= 0.0 {
            (self + half).floor()
        } else {
            -((-self) + half).floor()
        }
    }
    fn trunc(self) -> Dd {
        if self.hi >= 0.0 {
            self.floor()
        } else {
            self.ceil()
        }
    }
    fn fract(self) -> Dd {
        self - self.trunc()
    }
    fn abs(self) -> Dd {
        if self.hi < 0.0 || (self.hi == 0.0 && self.hi.is_sign_negative()) {
            -self
        } else {
            self
        }
    }
    fn signum(self) -> Dd {
        Dd::of_f64(self.hi.signum())
    }
    fn is_sign_positive(self) -> bool {
        self.hi.is_sign_positive()
    }
    fn is_sign_negative(self) -> bool {
        self.hi.is_sign_negative()
    }
    fn mul_add(self, a: Dd, b: Dd) -> Dd {
        self * a + b
    }
    fn recip(self) -> Dd {
        Dd::ONE / self
    }
    fn powi(self, n: i32) -> Dd {
        let mut base = self;
        let mut e = n.unsigned_abs();
        let mut acc = Dd::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base.sqr();
            e >>= 1;
        }
        if n < 0 {
            acc.recip()
        } else {
            acc
        }
    }
    fn powf(self, y: Dd) -> Dd {
        if y.is_zero() {
            return Dd::ONE;
        }
        if y.fract().is_zero() && y.hi.abs() < 2147483647.0 {
            return self.powi(y.hi as i32);
        }
        (y * self.ln_dd()).exp_dd()
    }
    fn sqrt(self) -> Dd {
        if self.hi <= 0.0 {
            return if self.hi == 0.0 { Dd::ZERO } else { Dd::nan() };
        }
        if self.hi.is_infinite() {
            return self;
        }
        let x = self.hi.sqrt();
        let (p, e) = two_prod(x, x);
        let r = self - Dd { hi: p, lo: e };
        let (h, l) = quick_two_sum(x, r.hi / (2.0 * x));
        Dd { hi: h, lo: l }
    }
    fn exp(self) -> Dd {
        self.exp_dd()
    }
    fn exp2(self) -> Dd {
        (self * Dd::LN_2()).exp_dd()
    }
    fn ln(self) -> Dd {
        self.ln_dd()
    }
    fn log(self, base: Dd) -> Dd {
        self.ln_dd() / base.ln_dd()
    }
    fn log2(self) -> Dd {
        self.ln_dd() / Dd::LN_2()
    }
    fn log10(self) -> Dd {
        self.ln_dd() / Dd::LN_10()
    }
    fn max(self, o: Dd) -> Dd {
        if self.is_nan() || o > self {
            o
        } else {
            self
        }
    }
    fn min(self, o: Dd) -> Dd {
        if self.is_nan() || o < self {
            o
        } else {
            self
        }
    }
    fn abs_sub(self, o: Dd) -> Dd {
        if self > o {
            self - o
        } else {
            Dd::ZERO
        }
    }
    fn cbrt(self) -> Dd {
        if self.is_zero() || !self.is_finite() {
            return self;
        }
        let x = Dd::of_f64(self.hi.cbrt());
        x - (x.powi(3) - self) / (x.sqr().mul_f64(3.0))
    }
    fn hypot(self, o: Dd) -> Dd {
        let (a, b) = (self.abs(), o.abs());
        let m = a.max(b);
        if m.is_zero() || !m.is_finite() {
            return m;
        }
        let (a, b) = (a / m, b / m);
        m * (a.sqr() + b.sqr()).sqrt()
    }
    fn sin(self) -> Dd {
        self.sin_cos_dd().0
    }
    fn cos(self) -> Dd {
        self.sin_cos_dd().1
    }
    fn tan(self) -> Dd {
        let (s, c) = self.sin_cos_dd();
        s / c
    }
    fn asin(self) -> Dd {
        Dd::atan2_dd(self, (Dd::ONE - self.sqr()).sqrt())
    }
    fn acos(self) -> Dd {
        Dd::atan2_dd((Dd::ONE - self.sqr()).sqrt(), self)
    }
    fn atan(self) -> Dd {
        Dd::atan2_dd(self, Dd::ONE)
    }
    fn atan2(self, other: Dd) -> Dd {
        Dd::atan2_dd(self, other)
    }
    fn sin_cos(self) -> (Dd, Dd) {
        self.sin_cos_dd()
    }
    fn exp_m1(self) -> Dd {
        if self.hi.abs() > 0.5 {
            return self.exp_dd() - Dd::ONE;
        }
        let mut t = Dd::ZERO;
        for j in (1..=30).rev() {
            t = (Dd::ONE + t * self).div_f64(j as f64);
        }
        t * self
    }
    fn ln_1p(self) -> Dd {
        if self.hi.abs() > 0.5 {
            return (Dd::ONE + self).ln_dd();
        }
        // ln(1+x) = 2 atanh(w), w = x/(2+x)
        let w = self / (Dd::of_f64(2.0) + self);
        let w2 = w.sqr();
        let mut t = Dd::ZERO;
        for k in (0..=26).rev() {
            t = Dd::ONE.div_f64((2 * k + 1) as f64) + t * w2;
        }
        (t * w).ldexp(1)
    }
    fn sinh(self) -> Dd {
        if self.hi.abs() < 0.5 {
            let e = self.exp_m1();
            return (e + e / (e + Dd::ONE)).div_f64(2.0);
        }
        let e = self.exp_dd();
        (e - e.recip()).div_f64(2.0)
    }
    fn cosh(self) -> Dd {
        let e = self.exp_dd();
        (e + e.recip()).div_f64(2.0)
    }
    fn tanh(self) -> Dd {
        if self.hi.abs() > 40.0 {
            return Dd::of_f64(self.hi.signum());
        }
        let e = (self.ldexp(1)).exp_m1();
        e / (e + Dd::of_f64(2.0))
    }
    fn asinh(self) -> Dd {
        let a = self.abs();
        let r = (a + (a.sqr() + Dd::ONE).sqrt()).ln_dd();
        if self.hi < 0.0 {
            -r
        } else {
            r
        }
    }
    fn acosh(self) -> Dd {
        (self + (self.sqr() - Dd::ONE).sqrt()).ln_dd()
    }
    fn atanh(self) -> Dd {
        (self.ldexp(1) / (Dd::ONE - self)).ln_1p().div_f64(2.0)
    }
    fn integer_decode(self) -> (u64, i16, i8) {
        self.hi.integer_decode()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(got: Dd, want: &str, rel: f64) {
        let w: Dd = want.parse().unwrap();
        let err = ((got - w) / w).abs().hi();
        assert!(err < rel, "got {got:?} want {want} rel {err:e}");
    }

    #[test]
    fn division_keeps_low_word() {
        let third = Dd::ONE / Dd::of_f64(3.0);
        close(third * Dd::of_f64(3.0), "1", 1e-32);
        assert!(third.lo() != 0.0);
        close(Dd::of_f64(2.0).sqrt() / Dd::SQRT_2(), "1", 1e-32);
        assert_eq!(third.to_sci_digits(32), "3.3333333333333333333333333333333e-1");
    }

    #[test]
    fn transcendentals_against_reference_digits() {
        let rel = 4e-32;
        close(Dd::of_f64(0.7).exp(), "2.013752707470476432195964519184247", rel);
        close(Dd::of_f64(-20.25).exp(), "1.60522805518561160865393430910954e-9", rel);
        close(Dd::of_f64(3.0).ln(), "1.098612288668109691395245236922526", rel);
        close(Dd::of_f64(3.0).ln() - "0.001".parse::<Dd>().unwrap().ln(), "8.006367567650246743449219600975618", rel);
        close(Dd::of_f64(2.9).sin(), "2.392493292139824144226657904892263e-1", rel);
        // reduction of a large argument costs a few ulps
        close(Dd::of_f64(100.0).cos(), "8.623188722876839341019385139508425e-1", 1e-30);
        close(Dd::of_f64(1.0).atan2(Dd::of_f64(-2.0)), "2.677945044588987122248387151818288", rel);
        close(Dd::of_f64(2.0).sqrt(), "1.414213562373095048801688724209698", rel);
        close(Dd::of_f64(0.3).asin(), "3.046926540153974963337033402865642e-1", rel);
        close(Dd::of_f64(10.0).cbrt(), "2.15443469003188372175929356651935", rel);
        close(Dd::of_f64(1e-5).exp_m1(), "1.000005000016666790137288615466172e-5", rel);
        close(Dd::of_f64(1e-10).ln_1p(), "9.999999999500000364355306451876052e-11", rel);
        close(Dd::of_f64(0.2).tanh(), "1.973753202249040114078777922452633e-1", rel);
    }

    #[test]
    fn parse_and_format_round_trip() {
        let x: Dd = "-1.2345678901234567890123456789012e-7".parse().unwrap();
        assert_eq!(x.to_sci_digits(32), "-1.2345678901234567890123456789012e-7");
        assert!("1.2.3".parse::<Dd>().is_err());
        assert!("".parse::<Dd>().is_err());
    }

    #[test]
    fn infinities_do_not_poison() {
        let inf = Dd::of_f64(f64::INFINITY);
        assert_eq!(Dd::ONE / inf, Dd::ZERO);
        assert_eq!((Dd::ONE + inf).recip(), Dd::ZERO);
        assert_eq!(Dd::of_f64(800.0).exp(), inf);
        assert!((Dd::ONE / Dd::ZERO).is_infinite());
    }

    #[test]
    fn rounding_and_order() {
        let x = Dd::new(2.0, -1e-20);
        assert_eq!(x.floor(), Dd::of_f64(1.0));
        assert_eq!(x.ceil(), Dd::of_f64(2.0));
        assert!(x < Dd::of_f64(2.0));
        assert_eq!(Dd::of_f64(-2.5).round(), Dd::of_f64(-3.0));
        assert_eq!(Dd::of_f64(7.0) % Dd::of_f64(3.0), Dd::ONE);
        assert_eq!(Dd::of_f64(3.0).powi(-2) * Dd::of_f64(9.0), Dd::ONE);
    }

    #[test]
    fn serde_keeps_both_words() {
        let third = Dd::ONE / Dd::of_f64(3.0);
        let s = serde_json::to_string(&third).unwrap();
        let back: Dd = serde_json::from_str(&s).unwrap();
        assert_eq!(back, third);
    }
}
