//! Invariant suite for a stored manifest.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::builder::sampler::Sampler;
use crate::builder::{composite_step_gap, measure_corner, separation_check, tail_consistent, FoliationManifest};
use crate::geometry::Point;
use crate::kernel::flow::flow_forward;
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Quick,
    Full,
}

impl Level {
    /// Sample budget for the randomized checks.
    pub fn samples(self) -> usize {
        match self {
            Level::Quick => 1_000,
            Level::Full => 10_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    /// Worst observed value.
    pub measured: f64,
    /// Allowed bound for `measured` (a lower bound for ratio checks).
    pub limit: f64,
    pub detail: String,
}

impl CheckResult {
    fn upper(name: &str, measured: f64, limit: f64, detail: String) -> Self {
        CheckResult {
            name: name.into(),
            passed: measured <= limit,
            measured,
            limit,
            detail,
        }
    }

    fn lower(name: &str, measured: f64, limit: f64, detail: String) -> Self {
        CheckResult {
            name: name.into(),
            passed: measured >= limit,
            measured,
            limit,
            detail,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub level: Level,
    pub stages: usize,
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// Largest `|λ(s e1) - s e2|` over `count` values of `s` spread across `(-δ, δ)`.
pub fn flow_oracle_error<T: Real>(delta: f64, steps: usize, count: usize) -> f64 {
    (0..count)
        .map(|i| {
            let s = delta * (2.0 * (i as f64 + 0.5) / count as f64 - 1.0);
            let y = flow_forward(&[T::of(s), T::zero()], T::of(delta), steps);
            (y[0].to_f()).hypot(y[1].to_f() - s)
        })
        .fold(0.0, f64::max)
}

fn random_in_ball<T: Real>(rng: &mut ChaCha8Rng, c: &[T], r: T) -> Point<T> {
    loop {
        let v: Vec<f64> = (0..c.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        if v.iter().map(|x| x * x).sum::<f64>() < 1.0 {
            return Point(c.iter().zip(&v).map(|(&a, &b)| a + r * T::of(b)).collect());
        }
    }
}

/// Points outside every support: half uniform, half in shells just outside a support.
pub fn points_outside_supports<T: Real>(m: &FoliationManifest<T>, count: usize, seed: u64) -> Vec<Point<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sampler = Sampler::new(&m.domain, seed);
    let mut out = Vec::with_capacity(count);
    let mut tries = 0;
    while out.len() < count && tries < 100 * count {
        tries += 1;
        let x = if out.len() % 2 == 1 && !m.stages.is_empty() {
            let s = &m.stages[rng.gen_range(0..m.stages.len())];
            let r = s.epsilon * T::of(rng.gen_range(1.0..1.5));
            let d: Vec<f64> = (0..s.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let nrm = d.iter().map(|x| x * x).sum::<f64>().sqrt();
            if nrm < 1e-3 {
                continue;
            }
            Point(s.center.iter().zip(&d).map(|(&c, &v)| c + r * T::of(v / nrm)).collect())
        } else {
            Point(sampler.next_inside(&m.domain).into_iter().map(T::of).collect())
        };
        if m.domain.contains(&x) && m.outside_supports(&x) {
            out.push(x);
        }
    }
    out
}

/// Largest `|Φ(x) - x|` over points outside every support.
pub fn locality_error<T: Real>(m: &FoliationManifest<T>, count: usize, seed: u64) -> (f64, usize) {
    let pts = points_outside_supports(m, count, seed);
    let worst = pts
        .par_iter()
        .map(|x| m.forward(x).dist(x).to_f())
        .reduce(|| 0.0, f64::max);
    (worst, pts.len())
}

/// Largest `|Φ(Φ⁻¹(y)) - y|`; half the points lie in active regions.
/// `Err` carries the number of points the inverse failed on.
pub fn round_trip_error<T: Real>(m: &FoliationManifest<T>, count: usize, seed: u64) -> std::result::Result<f64, usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sampler = Sampler::new(&m.domain, seed);
    let pts: Vec<Point<T>> = (0..count)
        .map(|i| {
            if i % 2 == 1 && !m.stages.is_empty() {
                let s = &m.stages[rng.gen_range(0..m.stages.len())];
                let y = s.angular_data().q;
                random_in_ball(&mut rng, &y, s.active_radius())
            } else {
                Point(sampler.next_inside(&m.domain).into_iter().map(T::of).collect())
            }
        })
        .collect();
    let res: Vec<Option<f64>> = pts
        .par_iter()
        .map(|y| m.inverse(y).ok().map(|x| m.forward(&x).dist(y).to_f()))
        .collect();
    let failed = res.iter().filter(|r| r.is_none()).count();
    if failed > 0 {
        return Err(failed);
    }
    Ok(res.into_iter().flatten().fold(0.0, f64::max))
}

/// Largest `|Φ_K(x) - Φ_j(x)|` over samples of each marked leaf `L_j`.
pub fn marked_leaf_drift<T: Real>(m: &FoliationManifest<T>, per_leaf: usize) -> f64 {
    (1..=m.len())
        .into_par_iter()
        .map(|j| match m.marked_leaf(j, per_leaf) {
            Ok(leaf) => leaf
                .params
                .iter()
                .zip(&leaf.samples)
                .map(|(&t, full)| {
                    let x = leaf.base.point_at(t);
                    m.forward_upto(&x, j).dist(full).to_f()
                })
                .fold(0.0, f64::max),
            Err(_) => f64::INFINITY,
        })
        .reduce(|| 0.0, f64::max)
}

/// Smallest distance between samples of distinct leaves through random points.
pub fn leaf_min_separation<T: Real>(m: &FoliationManifest<T>, leaves: usize, per_leaf: usize, seed: u64) -> f64 {
    let mut sampler = Sampler::new(&m.domain, seed);
    let curves: Vec<_> = (0..leaves)
        .filter_map(|_| {
            let x = Point(sampler.next_inside(&m.domain).into_iter().map(T::of).collect());
            m.leaf_through(&x, per_leaf).ok()
        })
        .collect();
    let pairs: Vec<(usize, usize)> = (0..curves.len())
        .flat_map(|i| (i + 1..curves.len()).map(move |j| (i, j)))
        .collect();
    pairs
        .par_iter()
        .map(|&(i, j)| curves[i].min_distance(&curves[j]).to_f())
        .reduce(|| f64::INFINITY, f64::min)
}

/// Run every invariant check at the given budget.
pub fn verify_manifest<T: Real>(m: &FoliationManifest<T>, level: Level, seed: u64) -> VerifyReport {
    let n = level.samples();
    let k = m.len();
    let mut checks = Vec::new();

    checks.push(match m.validate() {
        Ok(()) => CheckResult::upper("structure", 0.0, 0.0, "ε halving, (a)-(d), sizes".into()),
        Err(e) => CheckResult {
            name: "structure".into(),
            passed: false,
            measured: f64::NAN,
            limit: 0.0,
            detail: e.to_string(),
        },
    });

    let steps = m.stages.first().map_or(m.build_params.flow_steps, |s| s.flow_steps);
    let e = flow_oracle_error::<T>(0.5, steps, 101);
    checks.push(CheckResult::upper("flow_oracle", e, 1e-6, "|λ(s e1) - s e2|, δ = 0.5, 101 values".into()));

    let (e, used) = locality_error(m, n, seed);
    checks.push(CheckResult::upper("support_locality", e, 1e-12, format!("|Φ(x) - x| on {used} points outside supports")));

    let (mut plane, mut angle) = (0.0f64, 0.0f64);
    for j in 1..=k {
        let c = measure_corner(m, j, 32);
        plane = plane.max(c.plane_deviation);
        angle = angle.max((c.angle_measured - c.angle_expected).abs());
    }
    checks.push(CheckResult::upper("corner_plane", plane, 1e-8, "distance from the z_l plane within η/2, in units of η".into()));
    checks.push(CheckResult::upper("corner_angle", angle, 1e-6, "|angle - 2 atan(1/K)|".into()));

    let limit = 1e-9 * k.max(1) as f64;
    checks.push(match round_trip_error(m, n, seed.wrapping_add(1)) {
        Ok(e) => CheckResult::upper("round_trip", e, limit, format!("|Φ(Φ⁻¹(y)) - y| on {n} points")),
        Err(failed) => CheckResult {
            name: "round_trip".into(),
            passed: false,
            measured: f64::INFINITY,
            limit,
            detail: format!("inverse failed on {failed} points"),
        },
    });

    let sep = separation_check(m, n, seed.wrapping_add(2));
    checks.push(CheckResult::lower(
        "separation",
        sep.min_ratio,
        1.0,
        format!("observed / certified separation over {} pairs", sep.pairs),
    ));

    if k > 0 {
        let mut worst = 0.0f64;
        let mut detail = String::new();
        let js: Vec<usize> = match level {
            Level::Quick => vec![k - 1],
            Level::Full => (0..k).collect(),
        };
        for &j in &js {
            let budget = if j + 1 == k { n } else { (n / 10).max(100) };
            let gap = composite_step_gap(m, j, budget, seed.wrapping_add(3 + j as u64));
            let ratio = gap / (2.0 * m.stages[j].epsilon.to_f());
            if ratio >= worst {
                worst = ratio;
                detail = format!("|Φ_{} - Φ_{}| = {gap:.3e} against 2ε = {:.3e}", j + 1, j, 2.0 * m.stages[j].epsilon.to_f());
            }
        }
        checks.push(CheckResult::upper("composite_step", worst, 1.0, detail));
    }

    let drift = marked_leaf_drift(m, 64);
    checks.push(CheckResult::upper("marked_leaf_stability", drift, 0.0, "|Φ_K - Φ_j| on marked leaf L_j".into()));

    let tail = tail_consistent(m);
    checks.push(CheckResult {
        name: "tail".into(),
        passed: tail,
        measured: if tail { 0.0 } else { 1.0 },
        limit: 0.0,
        detail: "4ε_{s+1} < ℓ_s/4 for all s".into(),
    });

    let leaves = match level {
        Level::Quick => 8,
        Level::Full => 24,
    };
    let d = leaf_min_separation(m, leaves, 64, seed.wrapping_add(4));
    checks.push(CheckResult {
        name: "leaf_disjointness".into(),
        passed: d > 0.0,
        measured: d,
        limit: 0.0,
        detail: format!("min sample distance between {leaves} leaves"),
    });

    VerifyReport {
        level,
        stages: k,
        checks,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builder::{build, BuildParams};
    use crate::geometry::Domain;
    use crate::scalar::Dd;

    #[test]
    fn healthy_manifest_passes_both_levels() {
        let m = build(Domain::<Dd>::polydisc(1, 1.0), 7, BuildParams::new(6)).unwrap();
        for level in [Level::Quick, Level::Full] {
            let r = verify_manifest(&m, level, 1);
            let bad: Vec<_> = r.failures().collect();
            assert!(bad.is_empty(), "{bad:?}");
        }
    }

    #[test]
    fn broken_halving_is_named() {
        let mut m = build(Domain::<Dd>::polydisc(1, 1.0), 7, BuildParams::new(3)).unwrap();
        m.stages[2].epsilon = m.stages[1].epsilon;
        let r = verify_manifest(&m, Level::Quick, 1);
        let s = r.checks.iter().find(|c| c.name == "structure").unwrap();
        assert!(!s.passed);
        assert!(s.detail.contains("halve"), "{}", s.detail);
    }

    #[test]
    fn flow_oracle_is_accurate() {
        assert!(flow_oracle_error::<f64>(0.5, 64, 101) < 1e-12);
    }
}
