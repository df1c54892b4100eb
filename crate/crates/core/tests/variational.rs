use billiard_beta::elliptic::beta_caustic;
use billiard_beta::geometry::{boundary_point, perimeter, Domain, Ellipse, Harmonic, SupportDomain};
use billiard_beta::numerics::Tolerance;
use billiard_beta::variational::{beta_rational, maximize_orbit, poncelet_spread, OrbitConfig};
use proptest::prelude::*;
use std::f64::consts::{PI, TAU};

fn cfg() -> OrbitConfig {
    OrbitConfig::default()
}

/// Reflection law checked from the polygon itself: at every vertex the
/// incoming and outgoing chords make equal angles with the normal.
fn reflection_mismatch(domain: &Domain, angles: &[f64]) -> f64 {
    let q = angles.len();
    let pts: Vec<_> = angles.iter().map(|&psi| boundary_point(domain, psi)).collect();
    (0..q)
        .map(|i| {
            let (prev, here, next) = (pts[(i + q - 1) % q], pts[i], pts[(i + 1) % q]);
            let (nx, ny) = (angles[i].cos(), angles[i].sin());
            let unit = |dx: f64, dy: f64| {
                let l = dx.hypot(dy);
                (dx / l, dy / l)
            };
            let (ix, iy) = unit(prev.x - here.x, prev.y - here.y);
            let (ox, oy) = unit(next.x - here.x, next.y - here.y);
            ((ix * nx + iy * ny) - (ox * nx + oy * ny)).abs()
        })
        .fold(0.0, f64::max)
}

#[test]
fn regular_polygons_in_the_disk() {
    let disk = Domain::Support(SupportDomain::disk(1.0).unwrap());
    let o = maximize_orbit(&disk, 1, 3, &cfg()).unwrap();
    assert!((o.perimeter - 3.0 * 3f64.sqrt()).abs() < 1e-12);
    let o = maximize_orbit(&disk, 2, 5, &cfg()).unwrap();
    assert!((o.perimeter - 10.0 * (2.0 * PI / 5.0).sin()).abs() < 1e-12);
    assert!((beta_rational(&disk, 1, 3, &cfg()).unwrap() + 3f64.sqrt()).abs() < 1e-12);
}

#[test]
fn two_periodic_orbit_is_the_major_axis() {
    let e = Domain::Ellipse(Ellipse::new(2.0, 1.0).unwrap());
    let o = maximize_orbit(&e, 1, 2, &cfg()).unwrap();
    assert!((o.perimeter - 8.0).abs() < 1e-12);
}

#[test]
fn orbits_agree_with_caustics() {
    for (a, b) in [(2.0, 1.0), (1.2, 1.0), (5.0, 0.5)] {
        let e = Ellipse::new(a, b).unwrap();
        for (p, q) in [(1, 3), (2, 5), (1, 7), (3, 8), (1, 13)] {
            let v = beta_rational(&Domain::Ellipse(e), p, q, &cfg()).unwrap();
            let c = beta_caustic(&e, f64::from(p) / f64::from(q), &Tolerance::default()).unwrap();
            assert!((v - c).abs() < 1e-6, "({a}, {b}) {p}/{q}: {v} vs {c}");
        }
    }
}

#[test]
fn poncelet_polygons_share_a_perimeter() {
    let e = Ellipse::new(2.0, 1.0).unwrap();
    let s = poncelet_spread(&e, 1, 3, 16, &Tolerance::default()).unwrap();
    assert!(s.spread <= 1e-8 * s.max_perimeter && s.residual <= 1e-9);
    let beta = beta_caustic(&e, 1.0 / 3.0, &Tolerance::default()).unwrap();
    assert!((s.max_perimeter + 3.0 * beta).abs() < 1e-6);
    let circle = Ellipse::circle(1.0).unwrap();
    let s = poncelet_spread(&circle, 2, 7, 5, &Tolerance::default()).unwrap();
    assert!(s.spread < 1e-12 && s.residual <= 1e-10);
}

#[test]
fn rejects_bad_rotation_numbers() {
    let e = Domain::Ellipse(Ellipse::new(2.0, 1.0).unwrap());
    for (p, q) in [(2, 4), (2, 3), (0, 3), (1, 1)] {
        assert!(maximize_orbit(&e, p, q, &cfg()).is_err(), "{p}/{q}");
    }
    let wobbly = Domain::Support(SupportDomain::new(1.0, vec![Harmonic { k: 2, cos: 0.5, sin: 0.0 }]).unwrap());
    assert!(maximize_orbit(&wobbly, 1, 3, &cfg()).is_err());
}

fn convex_support() -> impl Strategy<Value = SupportDomain> {
    (prop::collection::vec((2u32..=6, -1.0f64..1.0, -1.0f64..1.0), 1..4), 0.05f64..0.8).prop_map(|(modes, budget)| {
        let load: f64 = modes.iter().map(|&(k, c, s)| (f64::from(k * k) - 1.0) * c.hypot(s)).sum();
        let scale = if load > 0.0 { budget / load } else { 0.0 };
        let harmonics = modes.into_iter().map(|(k, c, s)| Harmonic { k, cos: c * scale, sin: s * scale }).collect();
        SupportDomain::new(1.0, harmonics).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn maximal_orbits_reflect_and_stay_inside_bounds(d in convex_support(), pq in prop::sample::select(vec![(1u32, 3u32), (1, 4), (2, 5)])) {
        let (p, q) = pq;
        let domain = Domain::Support(d);
        let o = maximize_orbit(&domain, p, q, &cfg()).unwrap();
        prop_assert!(o.converged);
        prop_assert!(o.residual <= 1e-8);
        prop_assert!(reflection_mismatch(&domain, &o.angles) <= 1e-8);
        prop_assert!(o.angles.windows(2).all(|w| w[0] < w[1]));
        // a closed polygon winding p times is no longer than p boundary lengths
        let length = perimeter(&domain, &Tolerance::default()).unwrap();
        prop_assert!(o.perimeter <= f64::from(p) * length);
        // nor shorter than the regular polygon inscribed in the same disk-equivalent
        let disk = f64::from(q) * 2.0 * (PI * f64::from(p) / f64::from(q)).sin() * length / TAU;
        prop_assert!(o.perimeter >= disk - 1e-9);
    }

    #[test]
    fn restarts_only_improve(d in convex_support(), seed in 0u64..1000) {
        let domain = Domain::Support(d);
        let none = maximize_orbit(&domain, 2, 5, &OrbitConfig { n_restarts: 0, seed, ..cfg() }).unwrap();
        let more = maximize_orbit(&domain, 2, 5, &OrbitConfig { n_restarts: 4, seed, ..cfg() }).unwrap();
        prop_assert!(more.perimeter >= none.perimeter);
        let again = maximize_orbit(&domain, 2, 5, &OrbitConfig { n_restarts: 4, seed, ..cfg() }).unwrap();
        prop_assert_eq!(again.perimeter, more.perimeter);
    }
}
