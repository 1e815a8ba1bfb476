//! Quantitative diagnostics of a built manifest.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::sampler::Sampler;
use super::FoliationManifest;
use crate::geometry::Point;
use crate::scalar::Real;

/// Measured geometry of the corner of stage `k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CornerMeasurement {
    pub stage: usize,
    pub l: usize,
    pub angle_measured: f64,
    pub angle_expected: f64,
    /// Largest distance of the local leaf image from the `z_l` plane, in units of `η`.
    pub plane_deviation: f64,
    /// Distance of the sampled corner from `p + Kη u`, in units of `η`.
    pub corner_offset: f64,
    /// Largest deviation of a sample from its fitted arm, in units of `η`.
    pub collinearity: f64,
    /// `max(|arm1 + t1|, |arm2 - t2|)` for the fitted unit arm directions.
    pub arm_error: f64,
}

fn unit(v: Vec<f64>) -> Vec<f64> {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / n).collect()
}

/// Sample the marked leaf of stage `k` within `η/2` of its center and fit the two arms.
pub fn measure_corner<T: Real>(m: &FoliationManifest<T>, k: usize, per_arm: usize) -> CornerMeasurement {
    let s = &m.stages[k - 1];
    let ap = s.angular_data();
    let (v, u) = s.plane_axes();
    let p = &s.center;
    let eta = s.eta;
    let image = |t: T| {
        let mut x = p.clone();
        x[0] = x[0] + t;
        m.forward(&x)
    };
    let q = image(T::zero());
    let rel = |d: &[T]| -> Vec<f64> { d.iter().map(|&x| (x / eta).to_f()).collect() };
    let corner_offset = q.dist(&ap.q).to_f() / eta.to_f();
    let ts: Vec<T> = (1..=per_arm)
        .map(|j| eta * T::of(0.5 * j as f64 / per_arm as f64))
        .collect();
    let left: Vec<Vec<f64>> = ts.iter().map(|&t| rel(&image(-t).sub(&q))).collect();
    let right: Vec<Vec<f64>> = ts.iter().map(|&t| rel(&image(t).sub(&q))).collect();

    let mut plane_deviation = 0.0f64;
    for x in left.iter().chain(&right) {
        // q - p is along u, so offsets from q and from p share the normal part
        let off: f64 = x
            .iter()
            .enumerate()
            .filter(|&(i, _)| v[i] == T::zero() && u[i] == T::zero())
            .fold(0.0, |acc, (_, c)| acc + c * c)
            .sqrt();
        plane_deviation = plane_deviation.max(off);
    }
    let fit = |pts: &[Vec<f64>]| {
        let dim = pts[0].len();
        let sum: Vec<f64> = (0..dim).map(|i| pts.iter().map(|x| x[i]).sum()).collect();
        let d = unit(sum);
        let worst = pts
            .iter()
            .map(|x| {
                let along: f64 = x.iter().zip(&d).map(|(a, b)| a * b).sum();
                x.iter()
                    .zip(&d)
                    .map(|(a, b)| (a - along * b).powi(2))
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max);
        (d, worst)
    };
    let (d1, c1) = fit(&left);
    let (d2, c2) = fit(&right);
    let cosang: f64 = d1.iter().zip(&d2).map(|(a, b)| a * b).sum();
    let vf: Vec<f64> = v.to_f64();
    let uf: Vec<f64> = u.to_f64();
    let plane = |d: &[f64]| {
        Complex::new(
            d.iter().zip(&vf).map(|(a, b)| a * b).sum::<f64>(),
            d.iter().zip(&uf).map(|(a, b)| a * b).sum::<f64>(),
        )
    };
    let t1 = Complex::new(ap.t1.re.to_f(), ap.t1.im.to_f());
    let t2 = Complex::new(ap.t2.re.to_f(), ap.t2.im.to_f());
    let arm_error = (plane(&d1) + t1).norm().max((plane(&d2) - t2).norm());
    CornerMeasurement {
        stage: k,
        l: s.l,
        angle_measured: cosang.clamp(-1.0, 1.0).acos(),
        angle_expected: ap.angle.to_f(),
        plane_deviation,
        corner_offset,
        collinearity: c1.max(c2),
        arm_error,
    }
}

/// Sup-distance bound between the truncation and any continuation: `2 ε_K`.
///
/// Zero for the identity manifest.
pub fn convergence_bound<T: Real>(m: &FoliationManifest<T>) -> f64 {
    m.stages.last().map_or(0.0, |s| 2.0 * s.epsilon.to_f())
}

/// Whether `4 ε_{s+1} < ℓ_s / 4` for every stage, and the truncation bound
/// stays below `ℓ_K / 4`.
pub fn tail_consistent<T: Real>(m: &FoliationManifest<T>) -> bool {
    let steps = m
        .stages
        .iter()
        .enumerate()
        .all(|(i, s)| 4.0 * s.epsilon.to_f() < m.separation_bounds[i] / 4.0);
    steps && convergence_bound(m) < m.separation_bounds[m.stages.len()] / 4.0
}

/// Random point of the ball `B(c, r)`.
fn in_ball<T: Real>(rng: &mut ChaCha8Rng, c: &Point<T>, r: T) -> Point<T> {
    let dim = c.len();
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let n2: f64 = v.iter().map(|x| x * x).sum();
        if n2 < 1.0 && n2 > 0.0 {
            return Point(c.iter().zip(&v).map(|(&a, &b)| a + r * T::of(b)).collect());
        }
    }
}

fn random_unit(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let n2: f64 = v.iter().map(|x| x * x).sum();
        if n2 < 1.0 && n2 > 1e-6 {
            return unit(v);
        }
    }
}

/// Largest `|Φ_{j+1}(x) - Φ_j(x)|` over `samples` points (half of them in
/// the support of stage `j+1`); bounded by `2 ε_{j+1}`.
pub fn composite_step_gap<T: Real>(m: &FoliationManifest<T>, j: usize, samples: usize, seed: u64) -> f64 {
    let s = &m.stages[j];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sampler = Sampler::new(&m.domain, seed);
    let pts: Vec<Point<T>> = (0..samples)
        .map(|i| {
            if i % 2 == 0 {
                in_ball(&mut rng, &s.center, s.epsilon)
            } else {
                Point(sampler.next_inside(&m.domain).into_iter().map(T::of).collect())
            }
        })
        .collect();
    pts.par_iter()
        .map(|x| {
            let a = m.forward_upto(x, j);
            s.forward(&a).dist(&a).to_f()
        })
        .reduce(|| 0.0, f64::max)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparationReport {
    pub pairs: usize,
    /// Smallest observed `|Φz - Φw|` over its predicted lower bound.
    pub min_ratio: f64,
    /// Same, over pairs `|z - w| >= 1/(s+2)` mapped by `Φ_s`, against `ℓ_s`.
    pub scale_min_ratio: f64,
    /// Same, over pairs inside one support, against `lipschitz_min · |z - w|`.
    pub local_min_ratio: f64,
}

/// Compare separations of random pairs with their certified lower bounds.
///
/// Half the pairs are drawn across the domain at the scale buckets
/// `|z - w| >= 1/(s+2)`; the other half inside the active region of a
/// random stage, where the maps actually move points.
pub fn separation_check<T: Real>(m: &FoliationManifest<T>, pairs: usize, seed: u64) -> SeparationReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sampler = Sampler::new(&m.domain, seed.wrapping_add(1));
    let k_total = m.stages.len();
    let dim = m.domain.dim();
    // (z, w, stages applied, predicted lower bound, local?)
    let mut jobs: Vec<(Point<T>, Point<T>, usize, f64, bool)> = Vec::with_capacity(pairs);
    let local = if k_total == 0 { 0 } else { pairs / 2 };
    let mut tries = 0;
    while jobs.len() < pairs - local && tries < 100 * pairs {
        tries += 1;
        let s = rng.gen_range(0..=k_total);
        let scale = 1.0 / (s + 2) as f64;
        let z = sampler.next_inside(&m.domain);
        let dir = random_unit(&mut rng, dim);
        let r = scale * rng.gen_range(1.0..2.0);
        let w: Vec<f64> = z.iter().zip(&dir).map(|(a, b)| a + r * b).collect();
        let (z, w): (Vec<T>, Vec<T>) = (z.into_iter().map(T::of).collect(), w.into_iter().map(T::of).collect());
        if !m.domain.contains(&w) || !(Point(z.clone()).dist(&Point(w.clone())) >= T::of(scale)) {
            continue;
        }
        jobs.push((Point(z), Point(w), s, m.separation_bounds[s], false));
    }
    for _ in 0..local {
        let st = &m.stages[rng.gen_range(0..k_total)];
        let r = st.active_radius();
        let z = in_ball(&mut rng, &st.center, r);
        let dir = random_unit(&mut rng, dim);
        // log-uniform separations from 1e-4 η up to the active diameter
        let frac = 10f64.powf(rng.gen_range(-4.0..0.0)) * (4.0 / 0.15);
        let w = Point(z.iter().zip(&dir).map(|(&a, &b)| a + st.eta * T::of(frac * b)).collect::<Vec<T>>());
        let d = z.dist(&w).to_f();
        jobs.push((z, w, k_total, m.lipschitz_min * d, true));
    }
    let ratios: Vec<(f64, bool)> = jobs
        .par_iter()
        .map(|(z, w, s, pred, loc)| {
            let gap = m.forward_upto(z, *s).dist(&m.forward_upto(w, *s)).to_f();
            (gap / pred, *loc)
        })
        .collect();
    let min_of = |want: bool| {
        ratios
            .iter()
            .filter(|r| r.1 == want)
            .map(|r| r.0)
            .fold(f64::INFINITY, f64::min)
    };
    let (scale_min_ratio, local_min_ratio) = (min_of(false), min_of(true));
    SeparationReport {
        pairs: ratios.len(),
        min_ratio: scale_min_ratio.min(local_min_ratio),
        scale_min_ratio,
        local_min_ratio,
    }
}
