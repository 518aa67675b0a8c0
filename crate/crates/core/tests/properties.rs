//! Randomized invariants across surfaces, curves, the functional and rounding.

mod common;

use std::f64::consts::{PI, TAU};

use ccurve::corners::{round_vertex, RoundingDirection};
use ccurve::curve::{shapes, DiscreteCurve};
use ccurve::functional::{eval_fc, Region};
use ccurve::io::{curve_to_json, region_from_json};
use ccurve::surface::{Point, SurfaceMetric};
use nalgebra::Vector2;
use proptest::prelude::*;

use common::{random_curve, torus, wedge};

fn sphere() -> SurfaceMetric {
    SurfaceMetric::sphere(1.0).unwrap()
}

/// Random point on the surface from three uniforms.
fn surface_point(surface: &SurfaceMetric, u: f64, v: f64, w: f64) -> Point {
    match surface {
        SurfaceMetric::Sphere { radius } => {
            let z = 2.0 * u - 1.0;
            let r = (1.0 - z * z).sqrt();
            let a = TAU * v;
            Point::new(r * a.cos(), r * a.sin(), z) * *radius
        }
        SurfaceMetric::FlatTorus { side_l, side_h } => Point::new(u * side_l, v * side_h, 0.0),
        SurfaceMetric::Plane => Point::new(10.0 * (u - 0.5), 10.0 * (v - w), 0.0),
    }
}

fn any_surface() -> impl Strategy<Value = SurfaceMetric> {
    prop_oneof![Just(SurfaceMetric::Plane), Just(torus()), Just(sphere())]
}

/// A random smooth curve on a random surface, sized to fit its charts.
fn any_curve(n: usize) -> impl Strategy<Value = DiscreteCurve> {
    (any_surface(), any::<u64>()).prop_map(move |(s, seed)| match s {
        SurfaceMetric::Plane => random_curve(s, &Point::new(0.3, -0.2, 0.0), (0.5, 1.5), n, seed),
        SurfaceMetric::FlatTorus { .. } => random_curve(s, &Point::new(1.5, 0.5, 0.0), (0.15, 0.3), n, seed),
        SurfaceMetric::Sphere { .. } => random_curve(s, &Point::new(0.0, 0.6, -0.8), (0.3, 1.2), n, seed),
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn gaussian_curvature_is_constant(s in any_surface(), u in 0.0..1.0f64, v in 0.0..1.0f64, w in 0.0..1.0f64) {
        let p = surface_point(&s, u, v, w);
        let q = surface_point(&s, v, w, u);
        prop_assert_eq!(s.gaussian_curvature(&p), s.gaussian_curvature(&q));
    }

    #[test]
    fn chart_round_trip(
        s in any_surface(),
        u in 0.0..1.0f64, v in 0.0..1.0f64, w in 0.0..1.0f64,
        rho in 0.0..1.0f64, a in 0.0..TAU,
        frac in 0.05..0.95f64,
    ) {
        let center = surface_point(&s, u, v, w);
        let r = frac * s.injectivity_radius().min(2.0);
        let chart = s.exp_chart(&center, r).unwrap();
        let x = Vector2::new(rho * a.cos(), rho * a.sin());
        let back = chart.forward(&chart.backward(&x));
        prop_assert!((back - x).norm() < 1e-12, "{back:?} vs {x:?}");
    }

    #[test]
    fn chart_lengths_within_distortion(
        s in any_surface(),
        u in 0.0..1.0f64, v in 0.0..1.0f64, w in 0.0..1.0f64,
        frac in 0.1..0.9f64, off in 0.0..0.4f64, a in 0.0..TAU,
    ) {
        let center = surface_point(&s, u, v, w);
        let r = frac * s.injectivity_radius().min(2.0);
        let chart = s.exp_chart(&center, r).unwrap();
        // a small circle inside the chart ball, off the chart centre
        let mid = chart.backward(&Vector2::new(off * a.cos(), off * a.sin()));
        let curve = shapes::circle(s, &mid, 0.5 * r, 512).unwrap();
        let pts: Vec<Vector2<f64>> = curve.points().iter().map(|p| chart.forward(p)).collect();
        let chart_len: f64 = (0..pts.len()).map(|i| (pts[(i + 1) % pts.len()] - pts[i]).norm()).sum();
        let alpha = chart.distortion_bound(1.0);
        let ratio = r * chart_len / curve.length();
        prop_assert!((ratio - 1.0).abs() <= alpha + 1e-6, "ratio {ratio}, alpha {alpha}");
    }

    #[test]
    fn reversal_negates_curvature(curve in any_curve(200)) {
        let p = curve.curvature_profile().unwrap();
        let q = curve.reversed().curvature_profile().unwrap();
        let n = curve.len();
        for i in 0..n {
            let j = n - 1 - i;
            prop_assert!((p.k[i] + q.k[j]).abs() <= 1e-9 * (1.0 + p.k[i].abs()));
            prop_assert!((p.normal[i] + q.normal[j]).norm() <= 1e-9);
        }
    }

    #[test]
    fn resampling_keeps_length(curve in any_curve(400), factor in 0.5..2.0f64) {
        let prof = curve.curvature_profile().unwrap();
        let kmax = prof.k.iter().fold(0.0f64, |m, k| m.max(k.abs()));
        let target = (factor * curve.mean_spacing()).min(0.1 / kmax);
        let r = curve.resample(target).unwrap();
        prop_assert!((r.length() - curve.length()).abs() <= 1e-3 * curve.length());
    }

    #[test]
    fn plane_scaling(seed in any::<u64>(), lambda in 0.2..5.0f64, c in 0.1..2.0f64) {
        let curve = random_curve(SurfaceMetric::Plane, &Point::zeros(), (0.5, 1.5), 256, seed);
        let scaled = DiscreteCurve::new(
            SurfaceMetric::Plane,
            curve.points().iter().map(|p| p * lambda).collect(),
        ).unwrap();
        let f = eval_fc(&Region::from_curve(curve), c).unwrap().value;
        let g = eval_fc(&Region::from_curve(scaled), c / lambda).unwrap().value;
        prop_assert!((g - lambda * f).abs() <= 1e-12 * lambda * (1.0 + f.abs()));
    }

    #[test]
    fn sphere_complement_value(seed in any::<u64>(), c in 0.1..2.0f64) {
        let curve = random_curve(sphere(), &Point::new(0.0, 0.0, -1.0), (0.3, 1.2), 256, seed);
        let inner = eval_fc(&Region::from_curve(curve.clone()), c).unwrap();
        let outer = eval_fc(&Region::from_curve(curve.reversed()), c).unwrap();
        prop_assert!((outer.length_term - inner.length_term).abs() < 1e-12);
        prop_assert!((outer.area_term - (4.0 * PI - inner.area_term)).abs() < 1e-9);
    }

    #[test]
    fn json_round_trip_is_exact(curve in any_curve(64)) {
        let back = region_from_json(&curve_to_json(&curve)).unwrap();
        prop_assert_eq!(back.components()[0].points(), curve.points());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn rounded_joins_are_tangent(theta in 0.2..2.9f64, c in 1e-3..2.0f64, frac in 0.01..0.05f64) {
        let len = (0.4 * theta / c).min(1.0);
        let eps = frac * len;
        let (curve, v) = wedge(theta, c, len, 400);
        let (r, rep) = round_vertex(&curve, v, eps, c, RoundingDirection::Inward).unwrap();
        let n = r.len();
        let center = Vector2::new(rep.center.x, rep.center.y);
        let flat = |i: usize| Vector2::new(r.point(i % n).x, r.point(i % n).y);
        // the arc runs counterclockwise about its centre
        let arc_tangent = |p: Vector2<f64>| {
            let d = p - center;
            Vector2::new(-d.y, d.x).normalize()
        };
        let first = rep.arc_start;
        let last = rep.arc_start + rep.arc_len - 1;
        let before = (flat(first) - flat(first + n - 1)).normalize();
        let after = (flat(last + 1) - flat(last)).normalize();
        let gap = |a: Vector2<f64>, b: Vector2<f64>| a.perp(&b).atan2(a.dot(&b)).abs();
        prop_assert!(gap(before, arc_tangent(flat(first))) < 1e-2);
        prop_assert!(gap(arc_tangent(flat(last)), after) < 1e-2);
    }
}
