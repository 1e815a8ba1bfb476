//! Time-1 map of the rotation field `X(y) = ω(|y|/δ)(y1 + y2)(e2 - e1)`.
//!
//! The field moves only the first two normalized coordinates and always
//! along `e2 - e1`, so each RK4 step reduces to one scalar increment `m`:
//! `(y1, y2) -> (y1 - m, y2 + m)`. The backward map inverts the discrete
//! forward map step by step, so forward and backward compose to the
//! identity up to rounding.

use serde::{Deserialize, Serialize};

use super::bump::{bump_omega, field_lipschitz};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Default number of fixed RK4 steps over unit time.
pub const DEFAULT_FLOW_STEPS: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Backward,
}

/// The field restricted to one trajectory: `|y_3..|²` is invariant because
/// the field only moves the first two coordinates.
struct Field<T> {
    rest2: T,
    delta2: T,
    inv_delta: T,
    tol: T,
}

impl<T: Real> Field<T> {
    fn new(rest2: T, delta: T) -> Self {
        Field {
            rest2,
            delta2: delta * delta,
            inv_delta: delta.recip(),
            tol: T::of(8.0) * T::unit_roundoff() * delta,
        }
    }

    /// Scalar coefficient `c` with `X(y) = c (e2 - e1)`.
    #[inline]
    fn coefficient(&self, y1: T, y2: T) -> T {
        let r2 = y1 * y1 + y2 * y2 + self.rest2;
        if r2 <= self.delta2 {
            // ω = 1 on the unit ball: a pure shear
            return y1 + y2;
        }
        let w = bump_omega(r2.sqrt() * self.inv_delta);
        if w == T::zero() {
            T::zero()
        } else {
            w * (y1 + y2)
        }
    }

    /// One RK4 increment `m = h (c1 + 2 c2 + 2 c3 + c4) / 6`.
    #[inline]
    fn rk4_increment(&self, y1: T, y2: T, h: Step<T>) -> T {
        let c1 = self.coefficient(y1, y2);
        let c2 = self.coefficient(y1 - h.half * c1, y2 + h.half * c1);
        let c3 = self.coefficient(y1 - h.half * c2, y2 + h.half * c2);
        let c4 = self.coefficient(y1 - h.full * c3, y2 + h.full * c3);
        h.sixth * (c1 + T::of(2.0) * (c2 + c3) + c4)
    }

    /// Solve `m = rk4_increment(y1 + m, y2 - m)` for the step ending at `(y1, y2)`.
    fn invert_step(&self, y1: T, y2: T, h: Step<T>) -> Result<T> {
        let g = |m: T| m - self.rk4_increment(y1 + m, y2 - m, h);
        // backward RK4 step as the first guess, then secant iterations
        let mut m0 = -self.rk4_increment(y1, y2, h.neg());
        let mut g0 = g(m0);
        if g0 == T::zero() {
            return Ok(m0);
        }
        let mut m1 = m0 - g0;
        for _ in 0..60 {
            let g1 = g(m1);
            if g1 == T::zero() || (m1 - m0).abs() <= self.tol {
                return Ok(m1);
            }
            let slope = (g1 - g0) / (m1 - m0);
            // g' = 1 - h dC/dm stays near 1; fall back to a fixed-point step otherwise
            let next = if slope > T::of(0.25) && slope < T::of(4.0) {
                m1 - g1 / slope
            } else {
                m1 - g1
            };
            m0 = m1;
            g0 = g1;
            m1 = next;
        }
        let res = g(m1).abs();
        let limit = T::of(64.0) * self.tol;
        if res <= limit {
            Ok(m1)
        } else {
            Err(Error::FlowInverse(format!(
                "step inversion residual {:e} exceeds {:e}",
                res.to_f(),
                limit.to_f()
            )))
        }
    }
}

#[derive(Clone, Copy)]
struct Step<T> {
    full: T,
    half: T,
    sixth: T,
}

impl<T: Real> Step<T> {
    fn new(steps: usize) -> Self {
        let full = T::one() / T::of(steps as f64);
        Step {
            full,
            half: full * T::of(0.5),
            sixth: full / T::of(6.0),
        }
    }

    fn neg(self) -> Self {
        Step {
            full: -self.full,
            half: -self.half,
            sixth: -self.sixth,
        }
    }
}

/// Time-1 map of the flow (or its inverse) applied to a normalized point.
///
/// Points with `|y| >= 2δ` are returned unchanged. The backward direction
/// fails only if a step cannot be inverted to rounding accuracy, which
/// signals a step count too small for the field.
pub fn flow_time1<T: Real>(y: &[T], delta: T, steps: usize, dir: Direction) -> Result<Vec<T>> {
    let mut out = y.to_vec();
    let r2: T = y.iter().fold(T::zero(), |acc, &c| acc + c * c);
    let two_delta = delta + delta;
    if !(r2 < two_delta * two_delta) || y.len() < 2 {
        return Ok(out);
    }
    let field = Field::new(y[2..].iter().fold(T::zero(), |acc, &c| acc + c * c), delta);
    let h = Step::new(steps);
    let (mut y1, mut y2) = (y[0], y[1]);
    match dir {
        Direction::Forward => {
            for _ in 0..steps {
                let m = field.rk4_increment(y1, y2, h);
                y1 = y1 - m;
                y2 = y2 + m;
            }
        }
        Direction::Backward => {
            for _ in 0..steps {
                let m = field.invert_step(y1, y2, h)?;
                y1 = y1 + m;
                y2 = y2 - m;
            }
        }
    }
    out[0] = y1;
    out[1] = y2;
    Ok(out)
}

/// Forward time-1 map; total.
pub fn flow_forward<T: Real>(y: &[T], delta: T, steps: usize) -> Vec<T> {
    flow_time1(y, delta, steps, Direction::Forward).expect("forward flow is total")
}

/// Certified lower Lipschitz constant of the discrete forward map.
///
/// Each step is `id + F` with `Lip(F) <= e^{hL} - 1`, so it contracts
/// distances by at most `2 - e^{hL}`.
pub fn flow_lower_lipschitz(steps: usize) -> f64 {
    let h = 1.0 / steps as f64;
    let per_step = 2.0 - (h * field_lipschitz()).exp();
    if per_step <= 0.0 {
        0.0
    } else {
        per_step.powi(steps as i32)
    }
}
