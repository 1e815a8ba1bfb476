mod common;

use folia::builder::sampler::covering_radius;
use folia::builder::{convergence_bound, separation_check, FoliationManifest};
use folia::geometry::Point;
use folia::io::{parse_manifest, to_json, AnyManifest};
use folia::{build, BuildParams, Dd, Domain, Real};
use proptest::prelude::*;

fn as_dd(x: &[f64]) -> Point<Dd> {
    Point(x.iter().map(|&v| Dd::of_f64(v)).collect())
}

fn prefix(m: &FoliationManifest<Dd>, k: usize) -> FoliationManifest<Dd> {
    let mut p = m.clone();
    p.stages.truncate(k);
    p.centers_preimage.truncate(k);
    p.separation_bounds.truncate(k + 1);
    p
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn composite_is_identity_outside_supports(x in common::point(4, 1.0)) {
        let m = common::bidisc_manifest();
        let x = as_dd(&x);
        prop_assume!(m.domain.contains(&x) && m.outside_supports(&x));
        prop_assert_eq!(m.forward(&x), x);
    }

    #[test]
    fn composite_round_trip(k in 0..20usize, dir in common::point(4, 1.0), t in 0.0..1.0f64) {
        let m = common::bidisc_manifest();
        let s = &m.stages[k];
        let nrm = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
        prop_assume!(nrm > 1e-3);
        let r = s.active_radius().hi() * t;
        let y: Point<Dd> = Point(s.angular_data().q.iter().zip(&dir).map(|(&c, &d)| c + Dd::of_f64(r * d / nrm)).collect());
        let back = m.forward(&m.inverse(&y).unwrap());
        prop_assert!(back.dist(&y).hi() <= 1e-30);
    }

    #[test]
    fn leaves_through_distinct_points_do_not_meet(a in common::point(2, 0.9), b in common::point(2, 0.9)) {
        let m = common::disc_manifest();
        let (a, b) = (as_dd(&a), as_dd(&b));
        prop_assume!(m.domain.contains(&a) && m.domain.contains(&b));
        let (la, lb) = (m.leaf_through(&a, 64).unwrap(), m.leaf_through(&b, 64).unwrap());
        if la.base == lb.base {
            return Ok(());
        }
        prop_assert!(la.min_distance(&lb) > Dd::of_f64(0.0));
    }

    #[test]
    fn leaf_passes_through_its_anchor(a in common::point(4, 0.9)) {
        let m = common::bidisc_manifest();
        let a = as_dd(&a);
        prop_assume!(m.domain.contains(&a));
        let leaf = m.leaf_through(&a, 64).unwrap();
        let x0 = m.inverse(&a).unwrap();
        prop_assert!(leaf.base.distance_to(&x0).hi() <= 1e-25);
        prop_assert!(m.forward(&leaf.base.point_at(leaf.base.param_of(&x0))).dist(&a).hi() <= 1e-25);
    }
}

#[test]
fn epsilon_halves_and_the_bound_shrinks() {
    let m = common::bidisc_manifest();
    for w in m.stages.windows(2) {
        assert!(w[1].epsilon + w[1].epsilon < w[0].epsilon);
    }
    let bounds: Vec<f64> = (1..=m.len()).map(|k| convergence_bound(&prefix(m, k))).collect();
    assert!(bounds.windows(2).all(|w| w[1] < w[0]), "{bounds:?}");
    assert_eq!(convergence_bound(&prefix(m, 0)), 0.0);
}

#[test]
fn marked_leaves_are_frozen_after_their_stage() {
    let m = common::bidisc_manifest();
    for j in 1..=m.len() {
        let leaf = m.marked_leaf(j, 64).unwrap();
        for (t, y) in leaf.params.iter().zip(&leaf.samples) {
            assert_eq!(&m.forward_upto(&leaf.base.point_at(*t), j), y, "stage {j}");
        }
    }
}

#[test]
fn class_covering_radius_never_grows() {
    let m = common::bidisc_manifest();
    for l in 1..=2 {
        let mut last = f64::INFINITY;
        let mut first = None;
        for k in 1..=m.len() {
            let centers: Vec<Vec<f64>> = m.stages[..k].iter().filter(|s| s.l == l).map(|s| s.center.to_f64()).collect();
            let r = covering_radius(&m.domain, &centers, 2000, 5);
            assert!(r <= last, "class {l} after {k} stages: {r} > {last}");
            last = r;
            if r.is_finite() && first.is_none() {
                first = Some(r);
            }
        }
        assert!(last < first.unwrap(), "class {l} never improved");
    }
}

#[test]
fn identity_manifest_separates_trivially() {
    let m = FoliationManifest::<f64>::empty(Domain::polydisc(1, 1.0), 1, BuildParams::new(1));
    let r = separation_check(&m, 500, 3);
    assert!(r.min_ratio >= 1.0);
}

#[test]
fn manifests_serialize_deterministically() {
    let a = build(Domain::<Dd>::ball(2, 1.0), 11, BuildParams::new(6)).unwrap();
    let b = build(Domain::<Dd>::ball(2, 1.0), 11, BuildParams::new(6)).unwrap();
    let text = to_json(&a).unwrap();
    assert_eq!(text, to_json(&b).unwrap());
    assert_eq!(parse_manifest(&text).unwrap(), AnyManifest::Dd(a.clone()));
    let c = build(Domain::<Dd>::ball(2, 1.0), 12, BuildParams::new(6)).unwrap();
    assert_ne!(to_json(&c).unwrap(), text);
    assert_eq!(a.scalar, Dd::NAME);
}

#[test]
fn centre_of_stage_one_maps_to_its_corner() {
    let m = common::disc_manifest();
    let w1 = &m.centers_preimage[0];
    let q1 = m.stages[0].angular_data().q;
    assert_eq!(m.forward(w1), q1);
    assert!(m.inverse(&q1).unwrap().dist(w1).hi() < 1e-30);
}
