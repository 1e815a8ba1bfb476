//! Low-discrepancy candidate points with a seeded Cranley–Patterson shift.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geometry::Domain;
use crate::scalar::Real;

const PRIMES: [u32; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

/// Largest real dimension the sampler supports (`n <= 8`).
pub const MAX_DIM: usize = PRIMES.len();

fn radical_inverse(mut i: u64, base: u32) -> f64 {
    let b = base as u64;
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += (i % b) as f64 * f;
        i /= b;
        f *= inv;
    }
    r
}

/// Shifted Halton stream over the bounding box of a domain.
#[derive(Clone, Debug)]
pub struct Sampler {
    lo: Vec<f64>,
    width: Vec<f64>,
    shift: Vec<f64>,
    index: u64,
}

impl Sampler {
    pub fn new<T: Real>(domain: &Domain<T>, seed: u64) -> Self {
        let dim = domain.dim();
        assert!(dim <= MAX_DIM, "sampler supports at most {MAX_DIM} real dimensions");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let bb = domain.bounding_box();
        Sampler {
            lo: bb.iter().map(|b| b.0.to_f()).collect(),
            width: bb.iter().map(|b| (b.1 - b.0).to_f()).collect(),
            shift: (0..dim).map(|_| rng.gen::<f64>()).collect(),
            // skip the origin-heavy head of the sequence
            index: 1 + rng.gen_range(0..1024),
        }
    }

    /// Next raw point of the stream (inside the bounding box, maybe not the domain).
    pub fn next_raw(&mut self) -> Vec<f64> {
        let i = self.index;
        self.index += 1;
        (0..self.lo.len())
            .map(|k| {
                let h = (radical_inverse(i, PRIMES[k]) + self.shift[k]).fract();
                self.lo[k] + h * self.width[k]
            })
            .collect()
    }

    /// Next stream point lying strictly inside the domain.
    pub fn next_inside<T: Real>(&mut self, domain: &Domain<T>) -> Vec<f64> {
        loop {
            let x = self.next_raw();
            let xt: Vec<T> = x.iter().map(|&v| T::of(v)).collect();
            if domain.contains(&xt) {
                return x;
            }
        }
    }
}

fn dist_f64(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Mitchell's best-candidate rule: among `candidates` accepted draws keep
/// the one farthest from `existing`. Gives up after `max_attempts` draws.
pub fn best_candidate<T: Real>(
    sampler: &mut Sampler,
    domain: &Domain<T>,
    existing: &[Vec<f64>],
    candidates: usize,
    max_attempts: usize,
    mut accept: impl FnMut(&[f64]) -> bool,
) -> Option<Vec<f64>> {
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut found = 0;
    for _ in 0..max_attempts {
        let x = sampler.next_inside(domain);
        if !accept(&x) {
            continue;
        }
        let score = existing
            .iter()
            .map(|c| dist_f64(c, &x))
            .fold(f64::INFINITY, f64::min);
        if best.as_ref().map_or(true, |(s, _)| score > *s) {
            best = Some((score, x));
        }
        found += 1;
        if found >= candidates || existing.is_empty() {
            break;
        }
    }
    best.map(|(_, x)| x)
}

/// Covering radius of `centers`, estimated as the largest distance from a
/// probe point of the domain to its nearest center.
pub fn covering_radius<T: Real>(domain: &Domain<T>, centers: &[Vec<f64>], probes: usize, seed: u64) -> f64 {
    if centers.is_empty() {
        return f64::INFINITY;
    }
    let mut s = Sampler::new(domain, seed ^ 0x9e37_79b9_7f4a_7c15);
    (0..probes)
        .map(|_| {
            let x = s.next_inside(domain);
            centers.iter().map(|c| dist_f64(c, &x)).fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}
