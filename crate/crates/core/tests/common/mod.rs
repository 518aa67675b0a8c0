//! Shapes shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

use ccurve::curve::{shapes, DiscreteCurve};
use ccurve::surface::{Point, SurfaceMetric};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn torus() -> SurfaceMetric {
    SurfaceMetric::flat_torus(3.0, 1.0).unwrap()
}

pub fn plane_circle(r: f64, n: usize) -> DiscreteCurve {
    shapes::circle(SurfaceMetric::Plane, &Point::zeros(), r, n).unwrap()
}

/// Smooth random star-shaped curve of mean radius in `radii` about `center`.
pub fn random_curve(surface: SurfaceMetric, center: &Point, radii: (f64, f64), n: usize, seed: u64) -> DiscreteCurve {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let r0 = rng.gen_range(radii.0..radii.1);
    let coeffs: Vec<(f64, f64)> = (0..4)
        .map(|_| (rng.gen_range(-0.04..0.04), rng.gen_range(-0.04..0.04)))
        .collect();
    shapes::fourier_curve(surface, center, r0, &coeffs, n).unwrap()
}

/// Plane wedge of angle `theta` at the origin, opening upwards, bounded by two
/// arcs of curvature `c` and length `len` that bend towards the inside, closed
/// by a straight top. Returns the curve and the index of the corner vertex.
pub fn wedge(theta: f64, c: f64, len: f64, per_arc: usize) -> (DiscreteCurve, usize) {
    let a0 = 0.5 * PI - 0.5 * theta;
    let right = |s: f64| {
        if c * s < 1e-9 {
            return Point::new(s * a0.cos(), s * a0.sin(), 0.0);
        }
        let a = a0 + c * s;
        Point::new((a.sin() - a0.sin()) / c, (a0.cos() - a.cos()) / c, 0.0)
    };
    let h = len / per_arc as f64;
    let mut pts: Vec<Point> = (0..=per_arc).map(|i| right(i as f64 * h)).collect();
    let end = pts[per_arc];
    let across = ((2.0 * end.x / h).round() as usize).max(1);
    pts.extend((1..across).map(|j| Point::new(end.x * (1.0 - 2.0 * j as f64 / across as f64), end.y, 0.0)));
    pts.extend((0..per_arc).map(|i| {
        let p = right((per_arc - i) as f64 * h);
        Point::new(-p.x, p.y, 0.0)
    }));
    (DiscreteCurve::new(SurfaceMetric::Plane, pts).unwrap(), 0)
}
