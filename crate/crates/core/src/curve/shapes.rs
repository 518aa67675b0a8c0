//! Constructors for standard curves.

use std::f64::consts::TAU;

use nalgebra::Vector2;

use super::DiscreteCurve;
use crate::error::{Error, Result};
use crate::surface::{Point, SurfaceMetric};

/// Star-shaped curve `theta -> radius(theta)` in geodesic polar coordinates about
/// `center`, traversed counterclockwise so the inside is on the left.
pub fn polar_curve(
    surface: SurfaceMetric,
    center: &Point,
    radius: impl Fn(f64) -> f64,
    n: usize,
) -> Result<DiscreteCurve> {
    let center = surface.normalize(center);
    let pts = (0..n)
        .map(|i| {
            let th = TAU * i as f64 / n as f64;
            let r = radius(th);
            surface.exp(&center, &Vector2::new(r * th.cos(), r * th.sin()))
        })
        .collect();
    DiscreteCurve::new(surface, pts)
}

/// Smooth star-shaped curve with radius `r0 (1 + sum_k a_k cos(k th) + b_k sin(k th))`,
/// harmonics starting at `k = 2`.
pub fn fourier_curve(
    surface: SurfaceMetric,
    center: &Point,
    r0: f64,
    coeffs: &[(f64, f64)],
    n: usize,
) -> Result<DiscreteCurve> {
    let amplitude: f64 = coeffs.iter().map(|(a, b)| a.abs() + b.abs()).sum();
    if !(r0 > 0.0) || amplitude >= 1.0 || r0 * (1.0 + amplitude) >= surface.injectivity_radius() {
        return Err(Error::InvalidParameter(
            "fourier curve leaves the chart or is not star-shaped".into(),
        ));
    }
    polar_curve(
        surface,
        center,
        |th| {
            let wiggle: f64 = coeffs
                .iter()
                .enumerate()
                .map(|(j, (a, b))| {
                    let k = (j + 2) as f64;
                    a * (k * th).cos() + b * (k * th).sin()
                })
                .sum();
            r0 * (1.0 + wiggle)
        },
        n,
    )
}

/// Geodesic circle with the disk on the left.
pub fn circle(surface: SurfaceMetric, center: &Point, radius: f64, n: usize) -> Result<DiscreteCurve> {
    if !(radius > 0.0) || radius >= surface.injectivity_radius() {
        return Err(Error::InvalidParameter(format!("circle radius {radius}")));
    }
    polar_curve(surface, center, |_| radius, n)
}

/// Latitude circle at height fraction `z` on a sphere; `region_below` puts the
/// cap `{height <= z}` on the left.
pub fn latitude(surface: SurfaceMetric, z: f64, n: usize, region_below: bool) -> Result<DiscreteCurve> {
    if !matches!(surface, SurfaceMetric::Sphere { .. }) {
        return Err(Error::InvalidParameter("latitude needs a sphere".into()));
    }
    if !(z > -1.0 && z < 1.0) {
        return Err(Error::InvalidParameter(format!("latitude height {z}")));
    }
    let rho = (1.0 - z * z).sqrt();
    let sign = if region_below { -1.0 } else { 1.0 };
    let pts = (0..n)
        .map(|i| {
            let phi = sign * TAU * i as f64 / n as f64;
            Point::new(rho * phi.cos(), rho * phi.sin(), z)
        })
        .collect();
    DiscreteCurve::new(surface, pts)
}

/// Closed polygon through `corners`, each side subdivided into `per_side` segments.
pub fn polygon(surface: SurfaceMetric, corners: &[Point], per_side: usize) -> Result<DiscreteCurve> {
    let m = corners.len();
    let mut pts = Vec::with_capacity(m * per_side);
    for i in 0..m {
        let a = surface.normalize(&corners[i]);
        let b = surface.normalize(&corners[(i + 1) % m]);
        for j in 0..per_side {
            pts.push(surface.interpolate(&a, &b, j as f64 / per_side as f64));
        }
    }
    DiscreteCurve::new(surface, pts)
}

/// Axis-aligned square in a flat surface, counterclockwise from the lower-left corner.
pub fn square(surface: SurfaceMetric, lower_left: &Point, side: f64, per_side: usize) -> Result<DiscreteCurve> {
    let p = lower_left;
    let corners = [
        *p,
        Point::new(p.x + side, p.y, 0.0),
        Point::new(p.x + side, p.y + side, 0.0),
        Point::new(p.x, p.y + side, 0.0),
    ];
    polygon(surface, &corners, per_side)
}
