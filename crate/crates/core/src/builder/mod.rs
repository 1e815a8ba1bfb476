//! Inductive construction of the foliation.
//!
//! Stage `k` picks a center `w_k` outside every earlier support, so the
//! composite built so far is the identity near `w_k` and the leaf through it
//! is still a straight base segment. The support radius `ε_k` then obeys
//!
//! * (a) `ε_k < ε_{k-1} / 2`;
//! * (b) the support misses every earlier marked leaf;
//! * (c) `ε_k < ℓ_{k-1} / 16`, with `ℓ_s` a certified lower bound for the
//!   separation `d_s` of pairs at distance `>= 1/(s+2)`;
//! * (d) the support closure lies in the domain, misses earlier supports,
//!   and the stage is resolvable at the working precision.

mod checks;
mod leaves;
pub mod sampler;

use serde::{Deserialize, Serialize};

pub use checks::{
    composite_step_gap, convergence_bound, measure_corner, separation_check, tail_consistent,
    CornerMeasurement, SeparationReport,
};
pub use leaves::LeafCurve;

use crate::error::{Error, Result};
use crate::geometry::{base_leaf_through, dist, BaseLeaf, Domain, Point};
use crate::kernel::{select_k, Stage, DEFAULT_FLOW_STEPS, DELTA_FRACTION, ETA_FRACTION};
use crate::scalar::Real;
use sampler::Sampler;

pub const MANIFEST_VERSION: &str = "folia-manifest/1";

/// A stage is resolvable when its bend radius exceeds this many units of
/// roundoff at the center's magnitude; corner angles are then accurate to
/// about the reciprocal.
pub const RESOLVE_FACTOR: f64 = 1e6;

/// Fraction of the binding bound used for `ε`.
pub const EPSILON_SAFETY: f64 = 0.9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BuildParams {
    /// Number of stages `K`.
    pub max_stages: usize,
    /// Stop early once every class covering radius is at most this (0 disables).
    pub resolution_target: f64,
    pub flow_steps: usize,
    pub k_bend: f64,
    /// Admissible candidates compared per stage.
    pub candidates: usize,
    /// Draws per stage before giving up.
    pub max_attempts: usize,
}

impl BuildParams {
    pub fn new(max_stages: usize) -> Self {
        BuildParams {
            max_stages,
            resolution_target: 0.0,
            flow_steps: DEFAULT_FLOW_STEPS,
            k_bend: select_k(),
            candidates: 16,
            max_attempts: 20_000,
        }
    }
}

/// Offsets `c` of the pair scales `1/(s+c)` behind `d_s`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairScale {
    /// Scale in the inductive step of the construction.
    pub induction: u32,
    /// Scale in the definition of `d_{s+1}`.
    pub definition: u32,
    /// Scale the separation bounds in this manifest refer to.
    pub used: u32,
}

impl Default for PairScale {
    fn default() -> Self {
        PairScale {
            induction: 1,
            definition: 2,
            used: 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct FoliationManifest<T> {
    pub version: String,
    /// Scalar type the stages were built in.
    pub scalar: String,
    pub domain: Domain<T>,
    pub n: usize,
    pub stages: Vec<Stage<T>>,
    pub centers_preimage: Vec<Point<T>>,
    /// `ℓ_0, ..., ℓ_K`; `ℓ_s <= d_s`.
    pub separation_bounds: Vec<f64>,
    /// Smallest per-stage lower Lipschitz constant (1 without stages).
    pub lipschitz_min: f64,
    pub rng_seed: u64,
    pub build_params: BuildParams,
    pub pair_scale: PairScale,
}

impl<T: Real> FoliationManifest<T> {
    /// The manifest of the identity map.
    pub fn empty(domain: Domain<T>, seed: u64, params: BuildParams) -> Self {
        FoliationManifest {
            version: MANIFEST_VERSION.into(),
            scalar: T::NAME.into(),
            n: domain.n,
            domain,
            stages: Vec::new(),
            centers_preimage: Vec::new(),
            separation_bounds: vec![0.5],
            lipschitz_min: 1.0,
            rng_seed: seed,
            build_params: params,
            pair_scale: PairScale::default(),
        }
    }

    pub fn len(&self) -> usize {
        self.stages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stages.is_empty()
    }

    /// Coordinate class of stage `k` (1-based): `((k-1) mod n) + 1`.
    pub fn class_of(&self, k: usize) -> usize {
        (k - 1) % self.n + 1
    }

    /// `Φ_K(x)`.
    pub fn forward(&self, x: &[T]) -> Point<T> {
        self.forward_upto(x, self.stages.len())
    }

    /// `Φ_k(x)`: the first `k` stages in order.
    pub fn forward_upto(&self, x: &[T], k: usize) -> Point<T> {
        let mut y = Point(x.to_vec());
        for s in &self.stages[..k] {
            y = s.forward(&y);
        }
        y
    }

    /// `Φ_K⁻¹(y)`.
    pub fn inverse(&self, y: &[T]) -> Result<Point<T>> {
        let mut x = Point(y.to_vec());
        for s in self.stages.iter().rev() {
            x = s.inverse(&x)?;
        }
        Ok(x)
    }

    /// Whether `x` lies outside every support ball.
    pub fn outside_supports(&self, x: &[T]) -> bool {
        self.stages.iter().all(|s| s.outside_support(x))
    }

    /// Check the structural invariants of a stored manifest.
    pub fn validate(&self) -> Result<()> {
        let fail = |stage: usize, condition: char, detail: String| {
            Err(Error::Invariant {
                stage,
                condition,
                detail,
            })
        };
        if self.version != MANIFEST_VERSION {
            return Err(Error::Manifest(format!("unknown version `{}`", self.version)));
        }
        if self.scalar != T::NAME {
            return Err(Error::Manifest(format!(
                "manifest scalar `{}` read as `{}`",
                self.scalar,
                T::NAME
            )));
        }
        self.domain.validate()?;
        if self.n != self.domain.n || self.centers_preimage.len() != self.stages.len() {
            return Err(Error::Manifest("inconsistent sizes".into()));
        }
        if self.separation_bounds.len() != self.stages.len() + 1 {
            return Err(Error::Manifest("separation bounds must have K+1 entries".into()));
        }
        for (i, s) in self.stages.iter().enumerate() {
            let k = i + 1;
            s.validate()?;
            if s.l != self.class_of(k) {
                return fail(k, 'd', format!("targets z{} instead of z{}", s.l, self.class_of(k)));
            }
            if s.center != self.centers_preimage[i] {
                return fail(k, 'd', "center differs from its preimage".into());
            }
            if i > 0 && !(s.epsilon + s.epsilon < self.stages[i - 1].epsilon) {
                return fail(k, 'a', "ε does not halve".into());
            }
            if !(s.epsilon.to_f() < self.separation_bounds[i] / 16.0) {
                return fail(k, 'c', format!("ε >= ℓ/16 = {:e}", self.separation_bounds[i] / 16.0));
            }
            if !(self.domain.boundary_distance(&s.center) > s.epsilon) {
                return fail(k, 'd', "support leaves the domain".into());
            }
            for (j, e) in self.stages[..i].iter().enumerate() {
                if !(dist(&s.center, &e.center) > s.epsilon + e.epsilon) {
                    return fail(k, 'd', format!("support meets support of stage {}", j + 1));
                }
                let leaf = base_leaf_through(&self.domain, &e.center)?;
                if !(leaf.distance_to(&s.center) > s.epsilon) {
                    return fail(k, 'b', format!("support meets marked leaf {}", j + 1));
                }
            }
        }
        Ok(())
    }
}

/// The four upper bounds on `ε`, `+∞` when a condition does not apply.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EpsilonBounds {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl EpsilonBounds {
    /// `0.9 ×` the binding bound and its condition letter.
    pub fn choose(&self) -> Result<(f64, char)> {
        let (cond, bound) = [('a', self.a), ('b', self.b), ('c', self.c), ('d', self.d)]
            .into_iter()
            .fold(('a', f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc });
        if !(bound > 0.0) || !bound.is_finite() {
            return Err(Error::NoEpsilon { condition: cond, bound });
        }
        Ok((EPSILON_SAFETY * bound, cond))
    }
}

/// Incremental builder; owns the manifest under construction.
pub struct Builder<T> {
    m: FoliationManifest<T>,
    sampler: Sampler,
    marked: Vec<BaseLeaf<T>>,
    /// Sampled images of the marked leaves right after their own stage.
    marked_samples: Vec<Vec<Point<T>>>,
}

impl<T: Real> Builder<T> {
    pub fn new(domain: Domain<T>, seed: u64, params: BuildParams) -> Result<Self> {
        domain.validate()?;
        if domain.dim() > sampler::MAX_DIM {
            return Err(Error::InvalidDomain(format!(
                "at most {} complex dimensions supported",
                sampler::MAX_DIM / 2
            )));
        }
        Ok(Builder {
            sampler: Sampler::new(&domain, seed),
            m: FoliationManifest::empty(domain, seed, params),
            marked: Vec::new(),
            marked_samples: Vec::new(),
        })
    }

    pub fn manifest(&self) -> &FoliationManifest<T> {
        &self.m
    }

    pub fn into_manifest(self) -> FoliationManifest<T> {
        self.m
    }

    /// Bounds on the support radius of a stage centered at `w`.
    pub fn epsilon_bounds(&self, w: &[T]) -> EpsilonBounds {
        let s = self.m.stages.len();
        let a = self.m.stages.last().map_or(f64::INFINITY, |st| st.epsilon.to_f() / 2.0);
        let b = self
            .marked
            .iter()
            .map(|leaf| leaf.distance_to(w).to_f())
            .fold(f64::INFINITY, f64::min);
        let c = self.m.separation_bounds[s] / 16.0;
        let mut d = self.m.domain.boundary_distance(w).to_f();
        for st in &self.m.stages {
            d = d.min((dist(w, &st.center) - st.epsilon).to_f());
        }
        EpsilonBounds { a, b, c, d }
    }

    /// Smallest bend radius resolvable around `w`.
    fn precision_floor(w: &[T]) -> f64 {
        let mag = w.iter().map(|x| x.to_f().abs()).fold(0.0, f64::max);
        RESOLVE_FACTOR * T::UNIT_ROUNDOFF * (mag + 1.0)
    }

    /// Support radius for a stage centered at `w`.
    pub fn choose_epsilon(&self, w: &[T]) -> Result<T> {
        let (eps, _) = self.epsilon_bounds(w).choose()?;
        let eta = eps * DELTA_FRACTION * ETA_FRACTION;
        let floor = Self::precision_floor(w);
        if eta < floor {
            return Err(Error::NoEpsilon {
                condition: 'd',
                bound: floor / (DELTA_FRACTION * ETA_FRACTION),
            });
        }
        Ok(T::of(eps))
    }

    /// Next center of class `l`: admissible, and far from earlier class-`l` centers.
    pub fn dense_sequence_next(&mut self, l: usize) -> Result<Point<T>> {
        let existing: Vec<Vec<f64>> = self
            .m
            .stages
            .iter()
            .filter(|s| s.l == l)
            .map(|s| s.center.to_f64())
            .collect();
        let params = &self.m.build_params;
        let (cands, attempts) = (params.candidates, params.max_attempts);
        let mut last_err = None;
        let this = &*self;
        let mut sampler = self.sampler.clone();
        let found = sampler::best_candidate(&mut sampler, &this.m.domain, &existing, cands, attempts, |x| {
            let w: Vec<T> = x.iter().map(|&v| T::of(v)).collect();
            let clear = this.m.stages.iter().all(|s| dist(&w, &s.center) > s.epsilon);
            if !clear {
                return false;
            }
            match this.choose_epsilon(&w) {
                Ok(_) => true,
                Err(e) => {
                    last_err = Some(e);
                    false
                }
            }
        });
        self.sampler = sampler;
        match found {
            Some(x) => Point::new(x.iter().map(|&v| T::of(v)).collect()),
            None => Err(match last_err {
                Some(Error::NoEpsilon { condition, bound }) => Error::Invariant {
                    stage: self.m.stages.len() + 1,
                    condition,
                    detail: format!("no admissible center after {attempts} draws; last bound {bound:e}"),
                },
                _ => Error::SamplerExhausted(attempts),
            }),
        }
    }

    /// Append the stage centered at `w` with radius `eps`.
    pub fn push_stage(&mut self, w: Point<T>, eps: T) -> Result<&Stage<T>> {
        let k = self.m.stages.len() + 1;
        let l = self.m.class_of(k);
        let bounds = self.epsilon_bounds(&w);
        let e = eps.to_f();
        for (cond, bound) in [('a', bounds.a), ('b', bounds.b), ('c', bounds.c), ('d', bounds.d)] {
            if !(e < bound) {
                return Err(Error::Invariant {
                    stage: k,
                    condition: cond,
                    detail: format!("ε = {e:e} is not below {bound:e}"),
                });
            }
        }
        let p = &self.m.build_params;
        let stage = Stage::new(w.clone(), eps, l, T::of(p.k_bend), p.flow_steps)?;
        // earlier marked leaves must be untouched
        for (j, samples) in self.marked_samples.iter().enumerate() {
            if let Some(x) = samples.iter().find(|x| stage.forward(x).0 != x.0) {
                return Err(Error::Invariant {
                    stage: k,
                    condition: 'b',
                    detail: format!("marked leaf {} moves at {:?}", j + 1, x.to_f64()),
                });
            }
        }
        let leaf = base_leaf_through(&self.m.domain, &w)?;
        self.m.lipschitz_min = self.m.lipschitz_min.min(stage.lower_lipschitz());
        self.m.separation_bounds.push(self.m.lipschitz_min / (k + 2) as f64);
        self.m.centers_preimage.push(w);
        self.m.stages.push(stage);
        let curve = LeafCurve::sample(&self.m, leaf.clone(), Some(k), 64);
        self.marked_samples.push(curve.samples);
        self.marked.push(leaf);
        Ok(self.m.stages.last().expect("just pushed"))
    }

    /// Add one stage.
    pub fn step(&mut self) -> Result<()> {
        let k = self.m.stages.len() + 1;
        let l = self.m.class_of(k);
        let w = self.dense_sequence_next(l)?;
        let eps = self.choose_epsilon(&w)?;
        self.push_stage(w, eps)?;
        Ok(())
    }

    /// Covering radius of the class-`l` centers.
    pub fn class_covering_radius(&self, l: usize, probes: usize) -> f64 {
        let centers: Vec<Vec<f64>> = self
            .m
            .stages
            .iter()
            .filter(|s| s.l == l)
            .map(|s| s.center.to_f64())
            .collect();
        sampler::covering_radius(&self.m.domain, &centers, probes, self.m.rng_seed)
    }

    fn resolved(&self) -> bool {
        let target = self.m.build_params.resolution_target;
        target > 0.0
            && self.m.stages.len() >= self.m.n
            && (1..=self.m.n).all(|l| self.class_covering_radius(l, 4096) <= target)
    }
}

/// Build a manifest with `params.max_stages` stages (fewer if the resolution
/// target is met first).
pub fn build<T: Real>(domain: Domain<T>, seed: u64, params: BuildParams) -> Result<FoliationManifest<T>> {
    if params.max_stages == 0 {
        return Err(Error::Manifest("stage count must be at least 1".into()));
    }
    let mut b = Builder::new(domain, seed, params)?;
    while b.m.stages.len() < b.m.build_params.max_stages {
        b.step()?;
        if b.m.stages.len() % b.m.n == 0 && b.resolved() {
            break;
        }
    }
    Ok(b.into_manifest())
}
