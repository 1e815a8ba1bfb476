use serde::{Deserialize, Serialize};

use super::{FoliationManifest, RESOLVE_FACTOR};
use crate::error::Result;
use crate::geometry::{base_leaf_through, same_base_leaf, BaseLeaf, Point};
use crate::scalar::Real;

/// Sampled image of one base leaf.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct LeafCurve<T> {
    pub base: BaseLeaf<T>,
    /// Leaf parameters, increasing.
    pub params: Vec<T>,
    /// `Φ(base(t))` for each parameter.
    pub samples: Vec<Point<T>>,
    /// Stage whose center lies on this leaf (1-based).
    pub marked_stage: Option<usize>,
}

/// Parameter grid: uniform over the chord, dense across every support the
/// chord crosses, and geometric toward a corner on a marked leaf.
fn parameter_grid<T: Real>(m: &FoliationManifest<T>, base: &BaseLeaf<T>, marked: Option<usize>, uniform: usize) -> Vec<T> {
    let (a, b) = (base.t_min, base.t_max);
    let mut ts: Vec<T> = (0..=uniform)
        .map(|i| a + (b - a) * T::of(i as f64 / uniform as f64))
        .collect();
    for (i, s) in m.stages.iter().enumerate() {
        let p = &s.center;
        let tc = p[0] - base.anchor[0];
        let perp2 = (1..p.len()).fold(T::zero(), |acc, j| {
            let d = p[j] - base.anchor[j];
            acc + d * d
        });
        let r = s.active_radius();
        let h2 = r * r - perp2;
        if h2 <= T::zero() {
            continue;
        }
        let half = h2.sqrt();
        let dense = 64;
        for j in 0..=dense {
            let t = tc - half + (half + half) * T::of(j as f64 / dense as f64);
            ts.push(t);
        }
        if marked == Some(i + 1) {
            let eta = s.eta;
            for j in 0..=32 {
                let off = eta * T::of(j as f64 / 32.0);
                ts.push(tc + off);
                ts.push(tc - off);
            }
            for j in 1..=24 {
                let off = eta * T::of(0.5f64.powi(j));
                ts.push(tc + off);
                ts.push(tc - off);
            }
        }
    }
    ts.retain(|&t| t >= a && t <= b);
    ts.sort_by(|x, y| x.partial_cmp(y).expect("finite parameters"));
    ts.dedup();
    ts
}

impl<T: Real> LeafCurve<T> {
    pub(crate) fn sample(m: &FoliationManifest<T>, base: BaseLeaf<T>, marked: Option<usize>, uniform: usize) -> Self {
        let params = parameter_grid(m, &base, marked, uniform);
        let samples = params.iter().map(|&t| m.forward(&base.point_at(t))).collect();
        LeafCurve {
            base,
            params,
            samples,
            marked_stage: marked,
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Smallest distance between samples of two curves.
    pub fn min_distance(&self, other: &LeafCurve<T>) -> T {
        let mut best = T::infinity();
        for x in &self.samples {
            for y in &other.samples {
                best = best.min(x.dist(y));
            }
        }
        best
    }
}

impl<T: Real> FoliationManifest<T> {
    /// The leaf of `Φ(E₀)` through `x`, sampled with `uniform` chord points
    /// plus refinement near supports.
    ///
    /// A preimage within roundoff of a marked base leaf is snapped onto it,
    /// so the corner is sampled exactly.
    pub fn leaf_through(&self, x: &Point<T>, uniform: usize) -> Result<LeafCurve<T>> {
        let mut x0 = self.inverse(x)?;
        let mut marked = None;
        for (i, w) in self.centers_preimage.iter().enumerate() {
            let mag = w.iter().map(|c| c.to_f().abs()).fold(0.0, f64::max);
            let tol = T::of(RESOLVE_FACTOR * T::UNIT_ROUNDOFF * (mag + 1.0));
            let perp = (1..w.len()).fold(T::zero(), |acc, j| {
                let d = x0[j] - w[j];
                acc + d * d
            });
            if same_base_leaf(&x0, w) || perp.sqrt() < tol {
                for j in 1..w.len() {
                    x0[j] = w[j];
                }
                marked = Some(i + 1);
                break;
            }
        }
        if let Some(k) = marked {
            // anchor the marked leaf at its center so the corner is a grid point
            x0 = self.centers_preimage[k - 1].clone();
        }
        let base = base_leaf_through(&self.domain, &x0)?;
        Ok(LeafCurve::sample(self, base, marked, uniform))
    }

    /// The marked leaf of stage `k` (1-based).
    pub fn marked_leaf(&self, k: usize, uniform: usize) -> Result<LeafCurve<T>> {
        let base = base_leaf_through(&self.domain, &self.centers_preimage[k - 1])?;
        Ok(LeafCurve::sample(self, base, Some(k), uniform))
    }
}
