//! Smooth cutoff `ω` and the bend profile `ψ`.

use std::sync::OnceLock;

use crate::scalar::Real;

/// Smooth cutoff: 1 on `[-1, 1]`, 0 outside `(-2, 2)`, monotone blend between.
///
/// On `1 < |t| < 2` the value is `f(2-|t|) / (f(2-|t|) + f(|t|-1))` with
/// `f(x) = exp(-1/x)`, evaluated as `1 / (1 + exp(1/(2-|t|) - 1/(|t|-1)))`;
/// `ω(±1.5) = 1/2` exactly.
pub fn bump_omega<T: Real>(t: T) -> T {
    let s = t.abs();
    if s <= T::one() {
        return T::one();
    }
    let two = T::of(2.0);
    if s >= two {
        return T::zero();
    }
    let (x, y) = (two - s, s - T::one());
    let e = (x.recip() - y.recip()).exp_full();
    (T::one() + e).recip()
}

/// Derivative of [`bump_omega`].
pub fn bump_omega_deriv<T: Real>(t: T) -> T {
    let s = t.abs();
    let two = T::of(2.0);
    if s <= T::one() || s >= two {
        return T::zero();
    }
    let (x, y) = (two - s, s - T::one());
    let e = (x.recip() - y.recip()).exp_full();
    if !e.is_finite() {
        return T::zero();
    }
    // ω = 1/(1+e), e' = e (1/x² + 1/y²)
    let d = -e * ((x * x).recip() + (y * y).recip()) / ((T::one() + e) * (T::one() + e));
    if t < T::zero() {
        -d
    } else {
        d
    }
}

/// Unscaled bend profile `ψ(t) = K ω(2t) (1 - |t|)`.
pub fn psi<T: Real>(t: T, k_bend: T) -> T {
    k_bend * bump_omega(t + t) * (T::one() - t.abs())
}

/// Scaled bend profile `ψ_η(t) = η ψ(t/η)`; zero for `|t| >= η`.
pub fn psi_eta<T: Real>(t: T, eta: T, k_bend: T) -> T {
    if t.abs() >= eta {
        return T::zero();
    }
    eta * psi(t / eta, k_bend)
}

/// Lipschitz constant of `t -> ω(2t)(1-|t|)`, measured on a fine grid.
pub fn profile_lipschitz() -> f64 {
    static CELL: OnceLock<f64> = OnceLock::new();
    *CELL.get_or_init(|| {
        // the profile is even and vanishes for |t| >= 1
        let n = 200_000;
        let mut prev = psi::<f64>(0.0, 1.0);
        let mut best = 0.0f64;
        for i in 1..=n {
            let t = i as f64 / n as f64;
            let v = psi::<f64>(t, 1.0);
            best = best.max((v - prev).abs() * n as f64);
            prev = v;
        }
        best
    })
}

/// Lipschitz margin required of the default bend constant.
pub const K_MARGIN: f64 = 1.1;

/// Default bend constant `K`.
///
/// The largest multiple of 1/1000 with `K * Lip(profile) * 1.1 <= 1/2`,
/// so `ψ` is 1/2-Lipschitz with at least a 10% margin. The bound is scale
/// invariant, so every `ψ_η` inherits it.
pub fn select_k() -> f64 {
    let lip = profile_lipschitz();
    let mut k = (0.5 / (K_MARGIN * lip) * 1000.0).floor() / 1000.0;
    while k * lip * K_MARGIN > 0.5 {
        k -= 0.001;
    }
    k
}

/// Bound on the operator norm of `DX` for the flow field, in units of `δ`.
///
/// `‖DX(y)‖ <= 2 (|ω'(r)| r + ω(r))` with `r = |y|/δ`.
pub fn field_lipschitz() -> f64 {
    static CELL: OnceLock<f64> = OnceLock::new();
    *CELL.get_or_init(|| {
        let n = 200_000;
        let best = (0..=n)
            .map(|i| {
                let r = 2.0 * i as f64 / n as f64;
                2.0 * (bump_omega_deriv::<f64>(r).abs() * r + bump_omega::<f64>(r))
            })
            .fold(0.0f64, f64::max);
        best * 1.01
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Dd;

    #[test]
    fn omega_plateau_and_support() {
        assert_eq!(bump_omega(0.5f64), 1.0);
        assert_eq!(bump_omega(-1.0f64), 1.0);
        assert_eq!(bump_omega(3.0f64), 0.0);
        assert_eq!(bump_omega(-2.0f64), 0.0);
        assert_eq!(bump_omega(1.5f64), 0.5);
        assert_eq!(bump_omega(Dd::of(1.5)), Dd::of(0.5));
        for i in 0..=400 {
            let t = -2.5 + i as f64 * 0.0125;
            let w = bump_omega(t);
            assert!((0.0..=1.0).contains(&w));
        }
    }

    #[test]
    fn omega_deriv_matches_difference_quotient() {
        for &t in &[1.1f64, 1.3, 1.5, 1.8, -1.4, 1.95] {
            let h = 1e-6;
            let fd = (bump_omega(t + h) - bump_omega(t - h)) / (2.0 * h);
            let d = bump_omega_deriv(t);
            assert!((fd - d).abs() < 1e-7, "t={t} fd={fd} d={d}");
        }
        assert_eq!(bump_omega_deriv(0.3f64), 0.0);
    }

    #[test]
    fn psi_values() {
        let (eta, k) = (0.2f64, 0.3);
        assert!((psi_eta(0.0, eta, k) - k * eta).abs() < 1e-17);
        assert_eq!(psi_eta(eta, eta, k), 0.0);
        assert_eq!(psi_eta(-2.0 * eta, eta, k), 0.0);
        assert!((psi_eta(eta / 2.0, eta, k) - k * eta / 2.0).abs() < 1e-17);
    }

    #[test]
    fn default_k_is_half_lipschitz() {
        let k = select_k();
        assert!(k > 0.0 && k <= 0.5);
        // adjacent pairs of a 1e5 grid over the whole support
        let n = 100_000;
        let (a, b) = (-1.2f64, 1.2f64);
        let step = (b - a) / n as f64;
        let mut worst = 0.0f64;
        for i in 0..n {
            let t0 = a + i as f64 * step;
            let t1 = t0 + step;
            worst = worst.max((psi(t1, k) - psi(t0, k)).abs() / (t1 - t0));
        }
        assert!(worst <= 0.5, "Lipschitz {worst}");
        assert!(worst * K_MARGIN <= 0.5 + 1e-9);
        let angle = 2.0 * (1.0 / k).atan();
        assert!(angle > 0.0 && angle < std::f64::consts::PI);
    }

    #[test]
    fn scaled_profile_keeps_lipschitz() {
        let k = select_k();
        let eta = 1e-3;
        let n = 20_000;
        let mut worst = 0.0f64;
        for i in 0..n {
            let t0 = -1.2 * eta + 2.4 * eta * i as f64 / n as f64;
            let t1 = t0 + 2.4 * eta / n as f64;
            worst = worst.max((psi_eta(t1, eta, k) - psi_eta(t0, eta, k)).abs() / (t1 - t0));
        }
        assert!(worst <= 0.5);
    }
}
