use std::sync::Arc;

use lpcurv::body::{default_grid, l2_distance, ConvexBody};
use lpcurv::constants::kappa;
use lpcurv::generators::{ball, harmonic_threshold, random_convex, BodySpec, Family};
use lpcurv::lp::{centro_affine_extremes, lp_ratio, width};
use lpcurv::sphere::SphereGrid;
use proptest::prelude::*;

fn planar() -> Arc<SphereGrid> {
    default_grid(2).unwrap()
}

fn random_body(grid: &Arc<SphereGrid>, seed: u64) -> ConvexBody {
    random_convex(grid.clone(), seed, 3.0).unwrap()
}

fn unit(n: usize, angles: (f64, f64)) -> Vec<f64> {
    let (t, z) = angles;
    if n == 2 {
        vec![t.cos(), t.sin()]
    } else {
        let s = (1.0 - z * z).sqrt();
        vec![s * t.cos(), s * t.sin(), z]
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn l2_distance_is_a_metric(a in 1u64..500, b in 1u64..500, c in 1u64..500) {
        let grid = planar();
        let (ka, kb, kc) = (random_body(&grid, a), random_body(&grid, b), random_body(&grid, c));
        let ab = l2_distance(&ka, &kb).unwrap();
        prop_assert_eq!(ab, l2_distance(&kb, &ka).unwrap());
        prop_assert_eq!(l2_distance(&ka, &ka).unwrap(), 0.0);
        let ac = l2_distance(&ka, &kc).unwrap();
        let cb = l2_distance(&kc, &kb).unwrap();
        prop_assert!(ab <= ac + cb + 1e-12);
    }

    #[test]
    fn ratio_is_scale_invariant(seed in 1u64..500, lambda in 0.5f64..2.0, p in -2.0f64..5.0) {
        let k = random_body(&planar(), seed);
        let scaled = k.scale(lambda).unwrap();
        let (a, b) = (lp_ratio(&k, p), lp_ratio(&scaled, p));
        prop_assert!(a >= 1.0);
        prop_assert!((a - b).abs() <= 1e-9 * a, "{} vs {}", a, b);
    }

    #[test]
    fn translation_keeps_volume_diameter_and_curvature(seed in 1u64..500, x in -0.05f64..0.05, y in -0.05f64..0.05) {
        let k = random_body(&planar(), seed);
        let moved = k.translate(&[x, y]).unwrap();
        prop_assert!((k.volume() - moved.volume()).abs() <= 1e-9 * k.volume());
        prop_assert!((k.diameter() - moved.diameter()).abs() <= 1e-9);
        let drift = k.curvature().iter().zip(moved.curvature()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        prop_assert!(drift <= 1e-9);
    }

    #[test]
    fn volume_product_obeys_the_santalo_bound(seed in 1u64..500) {
        let k = random_body(&planar(), seed);
        let product = k.volume_product().unwrap();
        prop_assert!(product <= kappa(2).powi(2) + 1e-8, "{}", product);
    }

    #[test]
    fn boundary_points_from_the_radial_function_touch_supporting_lines(seed in 1u64..500, t in 0.0f64..6.283) {
        let k = random_body(&planar(), seed);
        let u = unit(2, (t, 0.0));
        let rho = k.radial_function(&u).unwrap();
        let x = [rho * u[0], rho * u[1], 0.0];
        let gap = k
            .grid()
            .nodes()
            .iter()
            .zip(k.support())
            .map(|(v, h)| x[0] * v[0] + x[1] * v[1] - h)
            .fold(f64::NEG_INFINITY, f64::max);
        // every supporting half-plane contains x, and the nearest one touches it
        prop_assert!((-1e-4..=1e-6).contains(&gap), "{}", gap);
    }

    #[test]
    fn width_point_is_stationary(seed in 1u64..500, p in prop::sample::select(vec![-1.9, -1.5, -1.0, -0.5, 0.0, 0.5, 2.0, 5.0])) {
        let k = random_body(&planar(), seed);
        let e = width(&k, p).unwrap();
        prop_assert!(e.converged);
        for i in 0..8 {
            let v = unit(2, (0.785 * i as f64 + 0.1, 0.0));
            prop_assert!(directional_derivative(&k, &e.point, &v, p).abs() <= 1e-8);
        }
    }

    #[test]
    fn specs_round_trip_through_json(
        radius in 0.1f64..10.0,
        fraction in 0.0f64..0.9,
        degree in 2usize..6,
        cap_height in 0.01f64..0.5,
        seed in any::<u64>(),
        decay in 1.01f64..6.0,
        n in 2usize..4,
    ) {
        let specs = [
            BodySpec::new(n, Family::Ball { radius }),
            BodySpec::new(n, Family::Harmonic { eps: fraction * harmonic_threshold(n, degree), degree, order: 0 }),
            BodySpec::new(n, Family::CapCut { cap_height, smoothing: Some(radius / 10.0) }),
            BodySpec::new(n, Family::Random { seed, decay }).with_resolution(Some(64)),
        ];
        for spec in specs {
            let text = serde_json::to_string(&spec).unwrap();
            prop_assert_eq!(serde_json::from_str::<BodySpec>(&text).unwrap(), spec);
        }
    }
}

/// `d/dt` of `(1/omega) int (h - (x + t v).u)^p` at `t = 0` (`log` for `p = 0`).
fn directional_derivative(k: &ConvexBody, x: &[f64], v: &[f64], p: f64) -> f64 {
    let grid = k.grid();
    let h = k.support();
    let dim = k.dim();
    let sum: f64 = grid
        .nodes()
        .iter()
        .zip(grid.weights())
        .zip(h)
        .map(|((u, w), hi)| {
            let xu: f64 = (0..dim).map(|a| x[a] * u[a]).sum();
            let vu: f64 = (0..dim).map(|a| v[a] * u[a]).sum();
            let d = hi - xu;
            if p == 0.0 {
                -w * vu / d
            } else {
                -w * p * d.powf(p - 1.0) * vu
            }
        })
        .sum();
    sum / grid.total_measure()
}

#[test]
fn spatial_bodies_share_the_invariants() {
    let grid = default_grid(3).unwrap();
    let spec = BodySpec::new(3, Family::Random { seed: 7, decay: 3.0 });
    let k = spec.build().unwrap();
    let moved = k.translate(&[0.03, -0.02, 0.01]).unwrap();
    assert!((k.volume() - moved.volume()).abs() <= 1e-9 * k.volume());
    assert!((k.diameter() - moved.diameter()).abs() <= 1e-9);
    assert!((lp_ratio(&k, -1.0) - lp_ratio(&k.scale(1.7).unwrap(), -1.0)).abs() <= 1e-9);
    assert!(k.volume_product().unwrap() <= kappa(3).powi(2) + 1e-8);
    let b = ball(grid.clone(), 1.0).unwrap();
    let other = BodySpec::new(3, Family::Random { seed: 8, decay: 3.0 }).build().unwrap();
    let ab = l2_distance(&k, &b).unwrap();
    assert!(ab <= l2_distance(&k, &other).unwrap() + l2_distance(&other, &b).unwrap() + 1e-12);
    for p in [-2.5, -1.0, 0.0, 2.0] {
        let e = width(&k, p).unwrap();
        for i in 0..8 {
            let v = unit(3, (0.9 * i as f64, -0.8 + 0.2 * i as f64));
            assert!(directional_derivative(&k, &e.point, &v, p).abs() <= 1e-8, "p = {p}");
        }
    }
}

#[test]
fn ellipsoids_are_extremal_for_the_volume_product() {
    for n in [2, 3] {
        for spec in lpcurv::generators::default_suite(n) {
            if let Family::Ellipsoid { .. } = spec.family {
                let k = spec.build().unwrap();
                let product = k.volume_product().unwrap();
                assert!((product - kappa(n).powi(2)).abs() <= 1e-7, "{}: {product}", spec.label());
                let (lo, hi) = centro_affine_extremes(&k);
                assert!((hi / lo - 1.0).abs() <= 1e-7);
            }
        }
    }
}
