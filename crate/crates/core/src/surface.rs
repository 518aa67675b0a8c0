//! Model surfaces: the Euclidean plane, rectangular flat tori and round spheres.
//!
//! Points on every surface are `Vector3<f64>`. Plane and torus points live in
//! the `z = 0` plane (torus points reduced to the fundamental domain
//! `[0, L) x [0, H)`); sphere points are unit vectors in ambient space, with
//! the radius applied to every length and area.

use std::f64::consts::PI;

use nalgebra::{Vector2, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Point = Vector3<f64>;
pub type Tangent = Vector2<f64>;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SurfaceMetric {
    Plane,
    FlatTorus { side_l: f64, side_h: f64 },
    Sphere { radius: f64 },
}

impl SurfaceMetric {
    pub fn flat_torus(side_l: f64, side_h: f64) -> Result<Self> {
        if !(side_l > 0.0 && side_h > 0.0 && side_l.is_finite() && side_h.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "torus sides must be positive, got {side_l} x {side_h}"
            )));
        }
        Ok(SurfaceMetric::FlatTorus { side_l, side_h })
    }

    pub fn sphere(radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "sphere radius must be positive, got {radius}"
            )));
        }
        Ok(SurfaceMetric::Sphere { radius })
    }

    pub fn is_flat(&self) -> bool {
        !matches!(self, SurfaceMetric::Sphere { .. })
    }

    /// Constant Gaussian curvature of the model surface.
    pub fn gaussian_curvature(&self, _p: &Point) -> f64 {
        match *self {
            SurfaceMetric::Plane | SurfaceMetric::FlatTorus { .. } => 0.0,
            SurfaceMetric::Sphere { radius } => 1.0 / (radius * radius),
        }
    }

    pub fn injectivity_radius(&self) -> f64 {
        match *self {
            SurfaceMetric::Plane => f64::INFINITY,
            SurfaceMetric::FlatTorus { side_l, side_h } => 0.5 * side_l.min(side_h),
            SurfaceMetric::Sphere { radius } => PI * radius,
        }
    }

    /// Total area, `None` for the plane.
    pub fn total_area(&self) -> Option<f64> {
        match *self {
            SurfaceMetric::Plane => None,
            SurfaceMetric::FlatTorus { side_l, side_h } => Some(side_l * side_h),
            SurfaceMetric::Sphere { radius } => Some(4.0 * PI * radius * radius),
        }
    }

    /// Maps an arbitrary coordinate to its canonical representative.
    pub fn normalize(&self, p: &Point) -> Point {
        match *self {
            SurfaceMetric::Plane => Point::new(p.x, p.y, 0.0),
            SurfaceMetric::FlatTorus { side_l, side_h } => Point::new(wrap(p.x, side_l), wrap(p.y, side_h), 0.0),
            // already-unit vectors are kept bit for bit so normalizing is idempotent
            SurfaceMetric::Sphere { .. } if (p.norm_squared() - 1.0).abs() <= 4.0 * f64::EPSILON => *p,
            SurfaceMetric::Sphere { .. } => p.normalize(),
        }
    }

    pub fn validate_point(&self, p: &Point) -> Result<()> {
        if !(p.x.is_finite() && p.y.is_finite() && p.z.is_finite()) {
            return Err(Error::InvalidCurve("non-finite coordinate".into()));
        }
        match *self {
            SurfaceMetric::Sphere { .. } => {
                if (p.norm() - 1.0).abs() > 1e-12 {
                    return Err(Error::InvalidCurve(format!(
                        "sphere point has norm {} (expected unit vector)",
                        p.norm()
                    )));
                }
            }
            _ => {
                if p.z != 0.0 {
                    return Err(Error::InvalidCurve("flat point has nonzero z".into()));
                }
            }
        }
        Ok(())
    }

    /// Flat displacement from `a` to `b`; on the torus the shortest lattice representative.
    /// Only meaningful for flat surfaces.
    pub fn flat_displacement(&self, a: &Point, b: &Point) -> Vector2<f64> {
        let mut d = Vector2::new(b.x - a.x, b.y - a.y);
        if let SurfaceMetric::FlatTorus { side_l, side_h } = *self {
            d.x -= side_l * (d.x / side_l).round();
            d.y -= side_h * (d.y / side_h).round();
        }
        d
    }

    /// Geodesic distance (shortest representative on the torus, great circle on the sphere).
    pub fn distance(&self, a: &Point, b: &Point) -> f64 {
        match *self {
            SurfaceMetric::Sphere { radius } => radius * unit_angle(a, b),
            _ => self.flat_displacement(a, b).norm(),
        }
    }

    /// Orthonormal frame `(e1, e2)` of the tangent plane at `p`; on the sphere `e1 x e2 = p`.
    pub fn tangent_frame(&self, p: &Point) -> (Vector3<f64>, Vector3<f64>) {
        match self {
            SurfaceMetric::Sphere { .. } => {
                let a = if p.x.abs() < 0.6 {
                    Vector3::x()
                } else if p.y.abs() < 0.6 {
                    Vector3::y()
                } else {
                    Vector3::z()
                };
                let e1 = (a - p * a.dot(p)).normalize();
                let e2 = p.cross(&e1);
                (e1, e2)
            }
            _ => (Vector3::x(), Vector3::y()),
        }
    }

    /// Riemannian logarithm at `base` in the frame returned by [`Self::tangent_frame`].
    pub fn log(&self, base: &Point, p: &Point) -> Tangent {
        match *self {
            SurfaceMetric::Sphere { radius } => {
                let (e1, e2) = self.tangent_frame(base);
                log_sphere(base, &e1, &e2, p) * radius
            }
            _ => self.flat_displacement(base, p),
        }
    }

    /// Riemannian exponential at `base` in the frame returned by [`Self::tangent_frame`].
    pub fn exp(&self, base: &Point, v: &Tangent) -> Point {
        match *self {
            SurfaceMetric::Sphere { radius } => {
                let (e1, e2) = self.tangent_frame(base);
                exp_sphere(base, &e1, &e2, &(v / radius))
            }
            _ => self.normalize(&Point::new(base.x + v.x, base.y + v.y, 0.0)),
        }
    }

    /// Moves `p` by the ambient tangent vector `v` and returns the surface point.
    pub fn displace(&self, p: &Point, v: &Vector3<f64>) -> Point {
        match *self {
            SurfaceMetric::Sphere { radius } => {
                let w = v - p * v.dot(p);
                let n = w.norm() / radius;
                if n == 0.0 {
                    *p
                } else {
                    (p * n.cos() + w.normalize() * n.sin()).normalize()
                }
            }
            _ => self.normalize(&(p + v)),
        }
    }

    /// Point a fraction `s` of the way along the geodesic segment from `a` to `b`.
    pub fn interpolate(&self, a: &Point, b: &Point, s: f64) -> Point {
        match self {
            SurfaceMetric::Sphere { .. } => {
                let theta = unit_angle(a, b);
                if theta < 1e-14 {
                    return (a + (b - a) * s).normalize();
                }
                let st = theta.sin();
                ((a * ((1.0 - s) * theta).sin() + b * (s * theta).sin()) / st).normalize()
            }
            _ => {
                let d = self.flat_displacement(a, b);
                self.normalize(&Point::new(a.x + s * d.x, a.y + s * d.y, 0.0))
            }
        }
    }

    /// Builds the dilated exponential chart `y -> exp_center^{-1}(y) / r`.
    pub fn exp_chart(&self, center: &Point, r: f64) -> Result<ChartFrame> {
        let bound = self.injectivity_radius();
        if !(r > 0.0) || r >= bound {
            return Err(Error::RadiusTooLarge { radius: r, bound });
        }
        self.validate_point(center)?;
        Ok(ChartFrame {
            surface: *self,
            center: *center,
            radius: r,
        })
    }
}

/// Dilated exponential chart around a point, mapping `B_r(center)` onto the unit disk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartFrame {
    pub surface: SurfaceMetric,
    pub center: Point,
    pub radius: f64,
}

impl ChartFrame {
    pub fn forward(&self, p: &Point) -> Tangent {
        self.surface.log(&self.center, p) / self.radius
    }

    pub fn backward(&self, v: &Tangent) -> Point {
        self.surface.exp(&self.center, &(v * self.radius))
    }

    /// Unscaled chart coordinates (`radius * forward`).
    pub fn log(&self, p: &Point) -> Tangent {
        self.surface.log(&self.center, p)
    }

    pub fn exp(&self, v: &Tangent) -> Point {
        self.surface.exp(&self.center, v)
    }

    /// Certified distortion `alpha(r)` between surface and chart lengths and areas.
    ///
    /// On the sphere the chart metric dominates the round metric with ratio at most
    /// `rho / sin(rho)`, `rho = r / R`. The returned bound is the larger of the
    /// analytic `1.1 * rho^2 / 6` and the exact ratio excess, so it stays valid for
    /// large charts.
    pub fn distortion_bound(&self, _c: f64) -> f64 {
        match self.surface {
            SurfaceMetric::Sphere { radius } => {
                let rho = self.radius / radius;
                let analytic = 1.1 * rho * rho / 6.0;
                let exact = if rho > 0.0 { rho / rho.sin() - 1.0 } else { 0.0 };
                analytic.max(exact)
            }
            _ => 0.0,
        }
    }
}

pub fn gaussian_curvature(metric: &SurfaceMetric, p: &Point) -> f64 {
    metric.gaussian_curvature(p)
}

pub fn exp_chart(metric: &SurfaceMetric, center: &Point, r: f64) -> Result<ChartFrame> {
    metric.exp_chart(center, r)
}

pub fn chart_distortion_bound(chart: &ChartFrame, c: f64) -> f64 {
    chart.distortion_bound(c)
}

fn wrap(x: f64, period: f64) -> f64 {
    let w = x.rem_euclid(period);
    if w >= period {
        0.0
    } else {
        w
    }
}

/// Angle between two unit vectors, accurate for nearby and antipodal pairs.
pub(crate) fn unit_angle(a: &Point, b: &Point) -> f64 {
    a.cross(b).norm().atan2(a.dot(b))
}

fn log_sphere(base: &Point, e1: &Vector3<f64>, e2: &Vector3<f64>, p: &Point) -> Tangent {
    let w = p - base * p.dot(base);
    let s = w.norm();
    if s == 0.0 {
        return Tangent::zeros();
    }
    let theta = s.atan2(p.dot(base));
    let dir = w / s;
    Tangent::new(dir.dot(e1), dir.dot(e2)) * theta
}

fn exp_sphere(base: &Point, e1: &Vector3<f64>, e2: &Vector3<f64>, v: &Tangent) -> Point {
    let rho = v.norm();
    if rho == 0.0 {
        return *base;
    }
    let dir = (e1 * v.x + e2 * v.y) / rho;
    (base * rho.cos() + dir * rho.sin()).normalize()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn curvature_of_models() {
        let p = Point::new(0.3, 0.2, 0.0);
        assert_eq!(SurfaceMetric::Plane.gaussian_curvature(&p), 0.0);
        assert_eq!(SurfaceMetric::flat_torus(3.0, 1.0).unwrap().gaussian_curvature(&p), 0.0);
        let s = SurfaceMetric::sphere(1.0).unwrap();
        assert_eq!(s.gaussian_curvature(&Point::z()), 1.0);
        assert_eq!(
            SurfaceMetric::sphere(2.0).unwrap().gaussian_curvature(&Point::z()),
            0.25
        );
    }

    #[test]
    fn plane_chart_is_dilation() {
        let chart = SurfaceMetric::Plane.exp_chart(&Point::zeros(), 2.0).unwrap();
        let v = chart.forward(&Point::new(1.0, 0.0, 0.0));
        assert_abs_diff_eq!(v.x, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(v.y, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn torus_chart() {
        let t = SurfaceMetric::flat_torus(4.0, 1.0).unwrap();
        let chart = t.exp_chart(&Point::new(2.0, 0.5, 0.0), 0.25).unwrap();
        let v = chart.forward(&Point::new(2.1, 0.5, 0.0));
        assert_abs_diff_eq!(v.x, 0.4, epsilon = 1e-12);
        assert_abs_diff_eq!(v.y, 0.0, epsilon = 1e-12);
        // wraps across the fundamental domain
        let chart = t.exp_chart(&Point::new(0.05, 0.95, 0.0), 0.25).unwrap();
        let v = chart.forward(&Point::new(3.95, 0.05, 0.0)) * 0.25;
        assert_abs_diff_eq!(v.x, -0.1, epsilon = 1e-12);
        assert_abs_diff_eq!(v.y, 0.1, epsilon = 1e-12);
        assert!(t.exp_chart(&Point::new(0.0, 0.0, 0.0), 0.5).is_err());
    }

    #[test]
    fn sphere_chart_is_geodesic_polar() {
        let s = SurfaceMetric::sphere(1.0).unwrap();
        let chart = s.exp_chart(&Point::z(), 0.5).unwrap();
        // point at geodesic distance 0.25 from the pole along the meridian through +x
        let q = Point::new(0.25f64.sin(), 0.0, 0.25f64.cos());
        let v = chart.forward(&q);
        assert_abs_diff_eq!(v.norm(), 0.5, epsilon = 1e-14);
        // the ray direction is the image of the meridian direction
        let (e1, e2) = s.tangent_frame(&Point::z());
        let dir = e1 * v.x + e2 * v.y;
        assert_abs_diff_eq!(dir.normalize().x, 1.0, epsilon = 1e-14);
        assert!(s.exp_chart(&Point::z(), 4.0).is_err());
    }

    #[test]
    fn distortion_bounds() {
        let t = SurfaceMetric::flat_torus(3.0, 1.0).unwrap();
        assert_eq!(t.exp_chart(&Point::zeros(), 0.3).unwrap().distortion_bound(1.0), 0.0);
        assert_eq!(
            SurfaceMetric::Plane
                .exp_chart(&Point::zeros(), 9.0)
                .unwrap()
                .distortion_bound(5.0),
            0.0
        );
        let s = SurfaceMetric::sphere(1.0).unwrap();
        let alpha = s.exp_chart(&Point::z(), 0.1).unwrap().distortion_bound(1.0);
        assert!(alpha <= 0.01);
        // oracle: worst metric ratio over the chart, sampled
        let worst = (1..=1000)
            .map(|i| {
                let rho = 0.1 * i as f64 / 1000.0;
                1.0 - rho.sin() / rho
            })
            .fold(0.0f64, f64::max);
        assert!(worst <= alpha);
        // alpha -> 0 as r -> 0
        let small = s.exp_chart(&Point::z(), 1e-3).unwrap().distortion_bound(1.0);
        assert!(small < 1e-6);
    }

    #[test]
    fn torus_normalize_edge() {
        let t = SurfaceMetric::flat_torus(3.0, 1.0).unwrap();
        let p = t.normalize(&Point::new(-1e-18, 1.0, 0.0));
        assert!(p.x >= 0.0 && p.x < 3.0);
        assert!(p.y >= 0.0 && p.y < 1.0);
    }
}
