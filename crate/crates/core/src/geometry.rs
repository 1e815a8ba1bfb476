//! Domains in C^n, the base foliation by segments parallel to the Re z1 axis,
//! and coordinate-plane frames.
//!
//! C^n is identified with R^{2n} coordinatewise: real coordinate `2l-2` is
//! `Re z_l` and `2l-1` is `Im z_l` (1-based `l`).

use std::ops::{Deref, DerefMut};

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// A point of R^{2n}.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
#[serde(bound = "T: Real")]
pub struct Point<T>(pub Vec<T>);

impl<T: Real> Point<T> {
    pub fn new(coords: Vec<T>) -> Result<Self> {
        if coords.is_empty() || coords.len() % 2 != 0 {
            return Err(Error::DimensionMismatch {
                expected: 2 * coords.len().div_ceil(2).max(1),
                got: coords.len(),
            });
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Point(coords))
    }

    pub fn from_f64(coords: &[f64]) -> Result<Self> {
        Self::new(coords.iter().map(|&c| T::of(c)).collect())
    }

    pub fn origin(n: usize) -> Self {
        Point(vec![T::zero(); 2 * n])
    }

    /// Standard basis vector `e_i` of R^{2n} (0-based `i`).
    pub fn basis(dim: usize, i: usize) -> Self {
        let mut v = vec![T::zero(); dim];
        v[i] = T::one();
        Point(v)
    }

    /// Complex dimension.
    pub fn n(&self) -> usize {
        self.0.len() / 2
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[T] {
        &self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    pub fn norm(&self) -> T {
        norm(&self.0)
    }

    pub fn dist(&self, other: &Self) -> T {
        dist(&self.0, &other.0)
    }

    /// `self + s * dir`
    pub fn offset(&self, dir: &[T], s: T) -> Self {
        Point(self.0.iter().zip(dir).map(|(&a, &d)| a + s * d).collect())
    }

    pub fn sub(&self, other: &Self) -> Vec<T> {
        self.0.iter().zip(&other.0).map(|(&a, &b)| a - b).collect()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(|c| c.to_f()).collect()
    }

    pub fn cast<U: Real>(&self) -> Point<U> {
        Point(self.0.iter().map(|c| U::of(c.to_f())).collect())
    }
}

impl<T> Deref for Point<T> {
    type Target = [T];
    fn deref(&self) -> &[T] {
        &self.0
    }
}

impl<T> DerefMut for Point<T> {
    fn deref_mut(&mut self) -> &mut [T] {
        &mut self.0
    }
}

pub(crate) fn norm<T: Real>(v: &[T]) -> T {
    v.iter().fold(T::zero(), |acc, &x| acc + x * x).sqrt()
}

pub(crate) fn dist<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .fold(T::zero(), |acc, (&x, &y)| acc + (x - y) * (x - y))
        .sqrt()
}

fn check_index(l: usize, n: usize) -> Result<()> {
    if l == 0 || l > n {
        Err(Error::IndexOutOfRange { index: l, n })
    } else {
        Ok(())
    }
}

/// The complex coordinate `z_l` of `p` (1-based `l`).
pub fn complex_coord<T: Real>(p: &[T], l: usize) -> Result<Complex<T>> {
    check_index(l, p.len() / 2)?;
    Ok(Complex::new(p[2 * l - 2], p[2 * l - 1]))
}

pub fn set_complex_coord<T: Real>(p: &mut [T], l: usize, z: Complex<T>) -> Result<()> {
    check_index(l, p.len() / 2)?;
    p[2 * l - 2] = z.re;
    p[2 * l - 1] = z.im;
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DomainKind {
    /// Product of real intervals; `radii` holds 2n half-extents.
    Box,
    /// Product of discs in each `z_l`; `radii` holds n radii.
    Polydisc,
    /// Euclidean ball; `radii` holds one radius.
    Ball,
}

/// A bounded domain in C^n.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct Domain<T> {
    pub kind: DomainKind,
    pub n: usize,
    pub center: Point<T>,
    pub radii: Vec<T>,
}

impl<T: Real> Domain<T> {
    pub fn new(kind: DomainKind, center: Point<T>, radii: Vec<T>) -> Result<Self> {
        let d = Domain {
            kind,
            n: center.n(),
            center,
            radii,
        };
        d.validate()?;
        Ok(d)
    }

    pub fn polydisc(n: usize, radius: f64) -> Self {
        Domain {
            kind: DomainKind::Polydisc,
            n,
            center: Point::origin(n),
            radii: vec![T::of(radius); n],
        }
    }

    pub fn ball(n: usize, radius: f64) -> Self {
        Domain {
            kind: DomainKind::Ball,
            n,
            center: Point::origin(n),
            radii: vec![T::of(radius)],
        }
    }

    pub fn cube(n: usize, half_extent: f64) -> Self {
        Domain {
            kind: DomainKind::Box,
            n,
            center: Point::origin(n),
            radii: vec![T::of(half_extent); 2 * n],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidDomain("n must be at least 1".into()));
        }
        if self.center.len() != 2 * self.n {
            return Err(Error::InvalidDomain(format!(
                "center has {} coordinates, expected {}",
                self.center.len(),
                2 * self.n
            )));
        }
        let expected = match self.kind {
            DomainKind::Box => 2 * self.n,
            DomainKind::Polydisc => self.n,
            DomainKind::Ball => 1,
        };
        if self.radii.len() != expected {
            return Err(Error::InvalidDomain(format!(
                "{:?} needs {} radii, got {}",
                self.kind,
                expected,
                self.radii.len()
            )));
        }
        if self.radii.iter().any(|&r| !(r > T::zero()) || !r.is_finite()) {
            return Err(Error::InvalidDomain("radii must be positive".into()));
        }
        if !self.center.is_finite() {
            return Err(Error::InvalidDomain("center must be finite".into()));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        2 * self.n
    }

    /// The same domain in another scalar type.
    pub fn cast<U: Real>(&self) -> Domain<U> {
        Domain {
            kind: self.kind,
            n: self.n,
            center: self.center.cast(),
            radii: self.radii.iter().map(|r| U::of(r.to_f())).collect(),
        }
    }

    fn check_dim(&self, p: &[T]) -> Result<()> {
        if p.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: p.len(),
            });
        }
        Ok(())
    }

    /// Euclidean distance from `p` to the boundary, negative outside.
    ///
    /// For the box and the polydisc the value outside is only a signed
    /// indicator, not the true exterior distance.
    pub fn boundary_distance(&self, p: &[T]) -> T {
        let c = &self.center;
        match self.kind {
            DomainKind::Box => (0..self.dim())
                .map(|i| self.radii[i] - (p[i] - c[i]).abs())
                .fold(T::infinity(), T::min),
            DomainKind::Polydisc => (0..self.n)
                .map(|l| {
                    let dx = p[2 * l] - c[2 * l];
                    let dy = p[2 * l + 1] - c[2 * l + 1];
                    self.radii[l] - dx.hypot(dy)
                })
                .fold(T::infinity(), T::min),
            DomainKind::Ball => self.radii[0] - dist(p, c),
        }
    }

    /// Open-domain membership.
    pub fn contains(&self, p: &[T]) -> bool {
        p.len() == self.dim() && self.boundary_distance(p) > T::zero()
    }

    pub fn contains_closed(&self, p: &[T]) -> bool {
        p.len() == self.dim() && self.boundary_distance(p) >= T::zero()
    }

    /// Axis-aligned bounding box as `(lo, hi)` per real coordinate.
    pub fn bounding_box(&self) -> Vec<(T, T)> {
        let c = &self.center;
        (0..self.dim())
            .map(|i| {
                let r = match self.kind {
                    DomainKind::Box => self.radii[i],
                    DomainKind::Polydisc => self.radii[i / 2],
                    DomainKind::Ball => self.radii[0],
                };
                (c[i] - r, c[i] + r)
            })
            .collect()
    }

    /// Parameter interval of `{p + t e_{Re z1}}` inside the closed domain,
    /// or `None` when the line misses it.
    pub fn chord_re_z1(&self, p: &[T]) -> Option<(T, T)> {
        let c = &self.center;
        let half = match self.kind {
            DomainKind::Box => {
                let inside = (1..self.dim()).all(|i| (p[i] - c[i]).abs() <= self.radii[i]);
                if !inside {
                    return None;
                }
                self.radii[0]
            }
            DomainKind::Polydisc => {
                let inside = (1..self.n).all(|l| {
                    (p[2 * l] - c[2 * l]).hypot(p[2 * l + 1] - c[2 * l + 1]) <= self.radii[l]
                });
                let dy = p[1] - c[1];
                let h2 = self.radii[0] * self.radii[0] - dy * dy;
                if !inside || h2 < T::zero() {
                    return None;
                }
                h2.sqrt()
            }
            DomainKind::Ball => {
                let rest = (1..self.dim()).fold(T::zero(), |acc, i| {
                    let d = p[i] - c[i];
                    acc + d * d
                });
                let h2 = self.radii[0] * self.radii[0] - rest;
                if h2 < T::zero() {
                    return None;
                }
                h2.sqrt()
            }
        };
        Some((c[0] - half - p[0], c[0] + half - p[0]))
    }
}

/// A leaf of the base foliation: `anchor + t e_{Re z1}` for `t` in `[t_min, t_max]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct BaseLeaf<T> {
    pub anchor: Point<T>,
    pub t_min: T,
    pub t_max: T,
}

impl<T: Real> BaseLeaf<T> {
    pub fn point_at(&self, t: T) -> Point<T> {
        let mut p = self.anchor.clone();
        p[0] = p[0] + t;
        p
    }

    /// Euclidean distance from `x` to the closed segment.
    pub fn distance_to(&self, x: &[T]) -> T {
        let t = (x[0] - self.anchor[0]).max(self.t_min).min(self.t_max);
        let along = x[0] - (self.anchor[0] + t);
        let transverse = (1..x.len()).fold(T::zero(), |acc, i| {
            let d = x[i] - self.anchor[i];
            acc + d * d
        });
        (along * along + transverse).sqrt()
    }

    /// Leaf parameter of the orthogonal projection of `x` onto the line.
    pub fn param_of(&self, x: &[T]) -> T {
        x[0] - self.anchor[0]
    }
}

/// Base leaves are equal exactly when all coordinates other than `Re z1` agree.
pub fn same_base_leaf<T: Real>(a: &[T], b: &[T]) -> bool {
    a.len() == b.len() && a[1..] == b[1..]
}

/// The base leaf through `p`.
pub fn base_leaf_through<T: Real>(d: &Domain<T>, p: &Point<T>) -> Result<BaseLeaf<T>> {
    d.check_dim(p)?;
    if !p.is_finite() {
        return Err(Error::NonFinite);
    }
    if !d.contains(p) {
        return Err(Error::OutsideDomain);
    }
    let (t_min, t_max) = d.chord_re_z1(p).ok_or(Error::OutsideDomain)?;
    Ok(BaseLeaf {
        anchor: p.clone(),
        t_min,
        t_max,
    })
}

/// Orthonormal frame of the `z_l` coordinate plane.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct PlaneFrame<T> {
    pub l: usize,
    /// Unit vector along `Re z_l`.
    pub v: Point<T>,
    /// Unit vector along `Im z_l`.
    pub u: Point<T>,
}

pub fn plane_frame<T: Real>(l: usize, n: usize) -> Result<PlaneFrame<T>> {
    check_index(l, n)?;
    Ok(PlaneFrame {
        l,
        v: Point::basis(2 * n, 2 * l - 2),
        u: Point::basis(2 * n, 2 * l - 1),
    })
}
