//! One perturbation stage: a compactly supported homeomorphism that turns
//! the straight leaf through its center into a curve with an angular point
//! lying in a prescribed coordinate plane.
//!
//! A stage is `h ∘ g`. `g = A⁻¹ ∘ λ ∘ A` rotates the leaf tangent onto the
//! in-plane axis `v` using the time-1 flow `λ` in normalized coordinates;
//! `h(x) = x + ψ_η(|x - p|) u` lifts a tent of height `Kη` along the bend
//! axis `u`. Both factors are the identity outside `B(p, 2δ)`.

pub mod bump;
pub mod flow;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

pub use bump::{bump_omega, profile_lipschitz, psi, psi_eta, select_k};
pub use flow::{flow_time1, Direction, DEFAULT_FLOW_STEPS};

use crate::error::{Error, Result};
use crate::geometry::{dist, norm, Point};
use crate::scalar::Real;

/// Flow radius as a fraction of the support radius (`3δ < ε`).
pub const DELTA_FRACTION: f64 = 0.3;
/// Bend radius as a fraction of the flow radius.
///
/// Must stay below `1/√2`: leaf points with `|s| >= δ` are carried onto the
/// line `y1 + y2 = s`, which keeps a distance `|s|/√2` from the center.
pub const ETA_FRACTION: f64 = 0.5;

/// Iteration cap for inverting the bend map.
pub const BEND_MAX_ITER: usize = 60;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct Stage<T> {
    /// Target coordinate index `l` (1-based).
    pub l: usize,
    pub center: Point<T>,
    pub epsilon: T,
    pub delta: T,
    pub eta: T,
    pub k_bend: T,
    pub flow_steps: usize,
    /// Linear part `A` of the straightening map, row-major.
    pub frame: Vec<Vec<T>>,
    pub frame_inverse: Vec<Vec<T>>,
}

/// Corner of the bent leaf.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct AngularPoint<T> {
    pub q: Point<T>,
    pub l: usize,
    /// Tangent of the bent leaf as `t -> 0-`, as a complex number in the
    /// `(v, u)` plane with `v ↔ 1`, `u ↔ i`.
    pub t1: Complex<T>,
    /// Tangent as `t -> 0+`; the complex conjugate of `t1`.
    pub t2: Complex<T>,
    pub angle: T,
}

/// Real index of the in-plane axis `v` for target coordinate `l`.
pub fn in_plane_axis(l: usize) -> usize {
    if l == 1 {
        1
    } else {
        2 * l - 2
    }
}

/// Real index of the bend axis `u` for target coordinate `l`.
pub fn bend_axis(l: usize) -> usize {
    if l == 1 {
        0
    } else {
        2 * l - 1
    }
}

/// Permutation frame: row 0 picks `Re z1`, row 1 picks the in-plane axis,
/// the remaining rows keep the other coordinates in order.
fn permutation_frame<T: Real>(l: usize, m: usize) -> Vec<Vec<T>> {
    let v = in_plane_axis(l);
    let mut order = vec![0, v];
    order.extend((1..m).filter(|&i| i != v));
    order
        .iter()
        .map(|&j| {
            let mut row = vec![T::zero(); m];
            row[j] = T::one();
            row
        })
        .collect()
}

fn mat_vec<T: Real>(a: &[Vec<T>], x: &[T]) -> Vec<T> {
    a.iter()
        .map(|row| {
            row.iter()
                .zip(x)
                .fold(T::zero(), |acc, (&r, &c)| if r == T::zero() { acc } else { acc + r * c })
        })
        .collect()
}

fn transpose<T: Real>(a: &[Vec<T>]) -> Vec<Vec<T>> {
    let m = a.len();
    (0..m).map(|j| (0..m).map(|i| a[i][j]).collect()).collect()
}

/// Upper bound on the spectral norm: `sqrt(‖A‖₁ ‖A‖∞)`.
fn spectral_bound<T: Real>(a: &[Vec<T>]) -> f64 {
    let m = a.len();
    let inf = (0..m)
        .map(|i| a[i].iter().map(|x| x.to_f().abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let one = (0..m)
        .map(|j| (0..m).map(|i| a[i][j].to_f().abs()).sum::<f64>())
        .fold(0.0, f64::max);
    (inf * one).sqrt()
}

impl<T: Real> Stage<T> {
    /// Stage centered at `center` with support radius `epsilon`, bending the
    /// base leaf into the `z_l` plane.
    pub fn new(center: Point<T>, epsilon: T, l: usize, k_bend: T, flow_steps: usize) -> Result<Self> {
        let m = center.dim();
        let delta = epsilon * T::of(DELTA_FRACTION);
        let stage = Stage {
            l,
            frame: permutation_frame(l, m),
            frame_inverse: transpose(&permutation_frame::<T>(l, m)),
            center,
            epsilon,
            delta,
            eta: delta * T::of(ETA_FRACTION),
            k_bend,
            flow_steps,
        };
        stage.validate()?;
        Ok(stage)
    }

    pub fn dim(&self) -> usize {
        self.center.dim()
    }

    pub fn n(&self) -> usize {
        self.center.n()
    }

    /// Radius outside of which the stage is exactly the identity.
    pub fn active_radius(&self) -> T {
        self.delta + self.delta
    }

    /// Check the geometric invariants of the stage.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidStage(m));
        let m = self.dim();
        if m == 0 || m % 2 != 0 || !self.center.is_finite() {
            return bad("center must be a finite point of R^{2n}".into());
        }
        if self.l == 0 || self.l > self.n() {
            return bad(format!("coordinate index {} out of range", self.l));
        }
        let pos = |x: T| x > T::zero() && x.is_finite();
        if !(pos(self.epsilon) && pos(self.delta) && pos(self.eta) && pos(self.k_bend)) {
            return bad("radii and bend constant must be positive".into());
        }
        if !(T::of(3.0) * self.delta < self.epsilon) {
            return bad("3δ must be smaller than ε".into());
        }
        if !(self.eta * T::of(std::f64::consts::SQRT_2) < self.delta) {
            return bad("η must be smaller than δ/√2".into());
        }
        if !(self.k_bend * self.eta <= self.eta * T::of(0.5)) {
            return bad("Kη must not exceed η/2".into());
        }
        if self.k_bend.to_f() * bump::profile_lipschitz() > 0.5 {
            return bad("bend profile is not 1/2-Lipschitz".into());
        }
        if self.flow_steps == 0 {
            return bad("flow needs at least one step".into());
        }
        let square = |a: &Vec<Vec<T>>| a.len() == m && a.iter().all(|r| r.len() == m);
        if !square(&self.frame) || !square(&self.frame_inverse) {
            return bad(format!("frame must be {m}x{m}"));
        }
        let tol = 1e3 * T::UNIT_ROUNDOFF;
        for j in 0..m {
            let col = mat_vec(&self.frame_inverse, &Point::<T>::basis(m, j));
            let back = mat_vec(&self.frame, &col);
            for (i, &b) in back.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                if (b.to_f() - want).abs() > tol {
                    return bad("frame inverse does not invert the frame".into());
                }
            }
        }
        let maps = |src: usize, dst: usize| {
            let img = mat_vec(&self.frame, &Point::<T>::basis(m, src));
            img.iter()
                .enumerate()
                .all(|(i, &x)| (x.to_f() - if i == dst { 1.0 } else { 0.0 }).abs() <= tol)
        };
        if !maps(0, 0) || !maps(in_plane_axis(self.l), 1) {
            return bad("frame must send Re z1 to ē1 and the in-plane axis to ē2".into());
        }
        Ok(())
    }

    /// Apply the stage.
    pub fn forward(&self, x: &[T]) -> Point<T> {
        let p = &self.center;
        let d: Vec<T> = x.iter().zip(p.iter()).map(|(&a, &b)| a - b).collect();
        if !(norm(&d) < self.active_radius()) {
            return Point(x.to_vec());
        }
        let y = mat_vec(&self.frame, &d);
        let y = flow::flow_forward(&y, self.delta, self.flow_steps);
        let mut d = mat_vec(&self.frame_inverse, &y);
        let r = norm(&d);
        if r < self.eta {
            let u = bend_axis(self.l);
            d[u] = d[u] + psi_eta(r, self.eta, self.k_bend);
        }
        Point(p.iter().zip(&d).map(|(&a, &b)| a + b).collect())
    }

    /// Invert the stage.
    ///
    /// The bend is undone by solving `s = ψ_η(|d - s u|)` on the bracket
    /// `[0, Kη]` (the map `s -> ψ_η(...)` contracts by 1/2); the rotation by
    /// the backward flow.
    pub fn inverse(&self, y: &[T]) -> Result<Point<T>> {
        let p = &self.center;
        let mut d: Vec<T> = y.iter().zip(p.iter()).map(|(&a, &b)| a - b).collect();
        if !(norm(&d) < self.active_radius()) {
            return Ok(Point(y.to_vec()));
        }
        if norm(&d) < self.eta {
            let s = self.unbend(&d)?;
            let u = bend_axis(self.l);
            d[u] = d[u] - s;
        }
        let z = mat_vec(&self.frame, &d);
        let z = flow::flow_time1(&z, self.delta, self.flow_steps, Direction::Backward)?;
        let d = mat_vec(&self.frame_inverse, &z);
        Ok(Point(p.iter().zip(&d).map(|(&a, &b)| a + b).collect()))
    }

    fn unbend(&self, d: &[T]) -> Result<T> {
        let u = bend_axis(self.l);
        let g = |s: T| {
            let mut e = d.to_vec();
            e[u] = e[u] - s;
            s - psi_eta(norm(&e), self.eta, self.k_bend)
        };
        // g(0) <= 0 <= g(Kη); Illinois regula falsi
        let (mut a, mut b) = (T::zero(), self.k_bend * self.eta);
        let (mut ga, mut gb) = (g(a), g(b));
        if ga == T::zero() {
            return Ok(a);
        }
        if gb == T::zero() {
            return Ok(b);
        }
        let tol = T::of(4.0) * T::unit_roundoff() * self.eta;
        let mut side = 0i8;
        for _ in 0..BEND_MAX_ITER {
            let c = (a * gb - b * ga) / (gb - ga);
            let gc = g(c);
            if gc == T::zero() || (b - a).abs() <= tol {
                return Ok(c);
            }
            if (gc < T::zero()) == (ga < T::zero()) {
                a = c;
                ga = gc;
                if side == -1 {
                    gb = gb * T::of(0.5);
                }
                side = -1;
            } else {
                b = c;
                gb = gc;
                if side == 1 {
                    ga = ga * T::of(0.5);
                }
                side = 1;
            }
            if (b - a).abs() <= tol {
                return Ok((a + b) * T::of(0.5));
            }
        }
        Err(Error::BendNotConverged(BEND_MAX_ITER))
    }

    /// Corner data of the bent leaf: `q = p + Kη u`, tangents `(1 ± iK)/√(1+K²)`.
    pub fn angular_data(&self) -> AngularPoint<T> {
        let k = self.k_bend;
        let mut q = self.center.clone();
        let u = bend_axis(self.l);
        q[u] = q[u] + k * self.eta;
        let norm = (T::one() + k * k).sqrt();
        let t1 = Complex::new(T::one() / norm, k / norm);
        AngularPoint {
            q,
            l: self.l,
            t1,
            t2: t1.conj(),
            angle: T::of(2.0) * (T::one() / k).atan(),
        }
    }

    /// Certified lower bound `c` with `|F(x) - F(y)| >= c |x - y|`.
    ///
    /// Product of 1/2 for the bend, the discrete flow bound, and the inverse
    /// condition number of the frame.
    pub fn lower_lipschitz(&self) -> f64 {
        let cond = spectral_bound(&self.frame) * spectral_bound(&self.frame_inverse);
        0.5 * flow::flow_lower_lipschitz(self.flow_steps) / cond
    }

    /// Whether `x` is farther than `ε` from the center.
    pub fn outside_support(&self, x: &[T]) -> bool {
        dist(x, &self.center) >= self.epsilon
    }

    /// In-plane axis and bend axis as ambient unit vectors.
    pub fn plane_axes(&self) -> (Point<T>, Point<T>) {
        let m = self.dim();
        (
            Point::basis(m, in_plane_axis(self.l)),
            Point::basis(m, bend_axis(self.l)),
        )
    }
}

/// Complex direction `t` of the `(v, u)` plane as an ambient vector.
pub fn plane_direction<T: Real>(stage: &Stage<T>, t: Complex<T>) -> Vec<T> {
    let mut dir = vec![T::zero(); stage.dim()];
    dir[in_plane_axis(stage.l)] = t.re;
    dir[bend_axis(stage.l)] = t.im;
    dir
}
