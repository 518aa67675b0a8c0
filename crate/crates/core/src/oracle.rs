//! Closed-form reference objects: the flat-torus lens, the doubled vertical
//! geodesic, stationary sphere latitudes and the plane-circle radius ODE.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::curve::{detect_corners, shapes, DiscreteCurve, DEFAULT_CORNER_THRESHOLD};
use crate::error::{Error, Result};
use crate::functional::{first_variation, Region};
use crate::surface::{Point, SurfaceMetric};

fn torus_sides(surface: &SurfaceMetric) -> Result<(f64, f64)> {
    match *surface {
        SurfaceMetric::FlatTorus { side_l, side_h } => Ok((side_l, side_h)),
        _ => Err(Error::InvalidParameter("expected a flat torus".into())),
    }
}

/// Closed-form data of the lens bounded by two radius-`1/c` arcs through the
/// ends of the vertical geodesic segment `x = L/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LensGeometry {
    pub side_l: f64,
    pub side_h: f64,
    pub c: f64,
    pub radius: f64,
    /// Half the angle subtended by each arc at its centre.
    pub half_angle: f64,
    /// Distance from each centre to the line `x = L/2`.
    pub center_offset: f64,
    /// Half the horizontal extent of the lens.
    pub half_width: f64,
}

impl LensGeometry {
    pub fn new(side_l: f64, side_h: f64, c: f64) -> Result<Self> {
        if !(c > 0.0) || c * side_h > 2.0 || !c.is_finite() {
            return Err(Error::InfeasibleC { c });
        }
        let radius = 1.0 / c;
        let half_angle = (0.5 * c * side_h).asin();
        let center_offset = (radius * radius - 0.25 * side_h * side_h).max(0.0).sqrt();
        let half_width = radius - center_offset;
        if 2.0 * half_width >= side_l {
            return Err(Error::InfeasibleC { c });
        }
        Ok(LensGeometry {
            side_l,
            side_h,
            c,
            radius,
            half_angle,
            center_offset,
            half_width,
        })
    }

    pub fn length(&self) -> f64 {
        4.0 * self.radius * self.half_angle
    }

    /// Two circular segments of angle `2 * half_angle`.
    pub fn area(&self) -> f64 {
        let phi = self.half_angle;
        self.radius * self.radius * (2.0 * phi - (2.0 * phi).sin())
    }

    pub fn fc(&self) -> f64 {
        self.length() - self.c * self.area()
    }

    /// Centre of the arc on the right of the geodesic (it bulges to `+x`).
    pub fn right_center(&self) -> Point {
        Point::new(0.5 * self.side_l - self.center_offset, 0.5 * self.side_h, 0.0)
    }

    pub fn left_center(&self) -> Point {
        Point::new(0.5 * self.side_l + self.center_offset, 0.5 * self.side_h, 0.0)
    }

    /// The singular point `(L/2, 0)`.
    pub fn crossing_point(&self) -> Point {
        Point::new(0.5 * self.side_l, 0.0, 0.0)
    }

    /// Interior angle of each of the two wedges at the singular point.
    pub fn corner_angle(&self) -> f64 {
        2.0 * self.half_angle
    }
}

#[derive(Debug, Clone)]
pub struct LensCurve {
    pub torus: SurfaceMetric,
    pub geometry: LensGeometry,
    pub curve: DiscreteCurve,
    pub exact_length: f64,
    pub exact_area: f64,
    pub exact_fc: f64,
}

impl LensCurve {
    pub fn c(&self) -> f64 {
        self.geometry.c
    }

    pub fn region(&self) -> Region {
        Region::from_curve(self.curve.clone())
    }
}

/// Lens discretized with `n_points` vertices (rounded up to even), starting at
/// the singular point and running up the right arc, then down the left arc.
pub fn lens_curve(torus: &SurfaceMetric, c: f64, n_points: usize) -> Result<LensCurve> {
    let (side_l, side_h) = torus_sides(torus)?;
    let geometry = LensGeometry::new(side_l, side_h, c)?;
    let half = n_points.div_ceil(2).max(4);
    let curve = DiscreteCurve::new(*torus, lens_points(&geometry, half))?;
    Ok(LensCurve {
        torus: *torus,
        geometry,
        curve,
        exact_length: geometry.length(),
        exact_area: geometry.area(),
        exact_fc: geometry.fc(),
    })
}

/// `2 * half` points of the lens, unnormalized (the right arc ends at height `H`).
pub(crate) fn lens_points(g: &LensGeometry, half: usize) -> Vec<Point> {
    let phi = g.half_angle;
    let arc = |center: Point, start: f64| {
        (0..half).map(move |j| {
            let a = start + 2.0 * phi * j as f64 / half as f64;
            center + Point::new(g.radius * a.cos(), g.radius * a.sin(), 0.0)
        })
    };
    let mut pts: Vec<Point> = arc(g.right_center(), -phi).collect();
    pts.extend(arc(g.left_center(), PI - phi));
    // pin the singular point exactly
    pts[0] = g.crossing_point();
    pts[half] = Point::new(0.5 * g.side_l, g.side_h, 0.0);
    pts
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SingularityReport {
    pub corner_count: usize,
    /// Angle between the two tangent lines at the singular point.
    pub tangent_angle: f64,
    /// Curvature just before the singular point along a tangent-continuous branch.
    pub k_before: f64,
    /// Curvature just after, on the same branch (the other arc, traversed backwards).
    pub k_after: f64,
}

/// Tangent cone and one-sided curvatures at the lens singularity.
pub fn lens_singularity_check(lens: &LensCurve) -> Result<SingularityReport> {
    let curve = &lens.curve;
    let cornered = detect_corners(curve, DEFAULT_CORNER_THRESHOLD)?;
    let prof = curve.curvature_profile()?;
    let n = curve.len();
    let half = n / 2;
    let tangent_angle = cornered
        .corners
        .iter()
        .map(|c| c.tangent_line_angle())
        .fold(0.0, f64::max);
    // Arriving at the bottom point along the left arc, the tangent continues
    // into the right arc run backwards from its top end.
    let mean = |idx: &[usize]| idx.iter().map(|&i| prof.k[i]).sum::<f64>() / idx.len() as f64;
    let k_before = mean(&[n - 2, n - 3]);
    let k_after = -mean(&[half - 2, half - 3]);
    Ok(SingularityReport {
        corner_count: cornered.corners.len(),
        tangent_angle,
        k_before,
        k_after,
    })
}

/// Hausdorff distance between the lens vertices and the vertical geodesic `x = L/2`.
pub fn lens_geodesic_hausdorff(lens: &LensCurve) -> f64 {
    let g = &lens.geometry;
    let surface = lens.torus;
    let x0 = 0.5 * g.side_l;
    let to_line = lens
        .curve
        .points()
        .iter()
        .map(|p| surface.flat_displacement(&Point::new(x0, p.y, 0.0), p).x.abs())
        .fold(0.0, f64::max);
    let samples = 4 * lens.curve.len();
    let from_line = (0..samples)
        .map(|j| {
            let q = Point::new(x0, g.side_h * j as f64 / samples as f64, 0.0);
            lens.curve.distance_to(&q)
        })
        .fold(0.0, f64::max);
    to_line.max(from_line)
}

/// The vertical geodesic traversed twice: a reference value, not a curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DoubledGeodesic {
    pub x: f64,
    pub loop_length: f64,
    pub length: f64,
    pub area: f64,
}

impl DoubledGeodesic {
    /// `F_c` is independent of `c` since the enclosed area vanishes.
    pub fn fc(&self, c: f64) -> f64 {
        self.length - c * self.area
    }
}

pub fn doubled_geodesic(torus: &SurfaceMetric) -> Result<DoubledGeodesic> {
    let (side_l, side_h) = torus_sides(torus)?;
    Ok(DoubledGeodesic {
        x: 0.5 * side_l,
        loop_length: side_h,
        length: 2.0 * side_h,
        area: 0.0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatitudeData {
    pub radius: f64,
    pub c: f64,
    /// Height fraction whose latitude has curvature `c` relative to the cap above it.
    pub f_c: f64,
    /// Height fraction of the stationary latitude bounding the cap below.
    pub stationary_height: f64,
    /// Discrete curvature of the stationary latitude (mean over vertices).
    pub curvature: f64,
    /// First variation of the stationary cap with unit normal speed.
    pub first_variation: f64,
}

/// Geodesic curvature of the latitude at height fraction `z`, relative to the cap below it.
pub fn latitude_curvature(radius: f64, z: f64) -> f64 {
    -z / (radius * (1.0 - z * z).sqrt())
}

/// Height fraction `f(c) = cR / sqrt(1 + c^2 R^2)`.
pub fn latitude_height(radius: f64, c: f64) -> f64 {
    c * radius / (1.0 + c * c * radius * radius).sqrt()
}

pub fn sphere_latitude_data(radius: f64, c: f64) -> Result<LatitudeData> {
    sphere_latitude_data_at(radius, c, 16384)
}

pub fn sphere_latitude_data_at(radius: f64, c: f64, n: usize) -> Result<LatitudeData> {
    if !(c > 0.0) {
        return Err(Error::InvalidParameter(format!("c must be positive, got {c}")));
    }
    let sphere = SurfaceMetric::sphere(radius)?;
    let f_c = latitude_height(radius, c);
    let lat = shapes::latitude(sphere, -f_c, n, true)?;
    let prof = lat.curvature_profile()?;
    let curvature = prof.k.iter().sum::<f64>() / n as f64;
    let region = Region::from_curve(lat);
    let first_variation = first_variation(&region, c, &vec![1.0; n])?;
    Ok(LatitudeData {
        radius,
        c,
        f_c,
        stationary_height: -f_c,
        curvature,
        first_variation,
    })
}

/// Radius of a plane circle under the c-flow, `dr/dt = c - 1/r`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CircleOde {
    pub r0: f64,
    pub c: f64,
    pub t_end: f64,
    /// Accepted step times, starting at 0.
    pub times: Vec<f64>,
    /// `u = r^2` at the step times.
    pub squared: Vec<f64>,
    pub extinction_time: Option<f64>,
}

fn ode_rhs(c: f64, u: f64) -> f64 {
    2.0 * c * u.max(0.0).sqrt() - 2.0
}

impl CircleOde {
    /// Radius at time `t` by cubic Hermite interpolation of `u`; zero after extinction.
    pub fn radius_at(&self, t: f64) -> f64 {
        if let Some(te) = self.extinction_time {
            if t >= te {
                return 0.0;
            }
        }
        let last = self.times.len() - 1;
        let t = t.clamp(0.0, self.times[last]);
        let i = match self.times.binary_search_by(|x| x.partial_cmp(&t).unwrap()) {
            Ok(i) => return self.squared[i].max(0.0).sqrt(),
            Err(i) => i.clamp(1, last) - 1,
        };
        let (t0, t1) = (self.times[i], self.times[i + 1]);
        let (u0, u1) = (self.squared[i], self.squared[i + 1]);
        let h = t1 - t0;
        let (d0, d1) = (ode_rhs(self.c, u0) * h, ode_rhs(self.c, u1) * h);
        let s = (t - t0) / h;
        let (s2, s3) = (s * s, s * s * s);
        let u =
            (2.0 * s3 - 3.0 * s2 + 1.0) * u0 + (s3 - 2.0 * s2 + s) * d0 + (-2.0 * s3 + 3.0 * s2) * u1 + (s3 - s2) * d1;
        u.max(0.0).sqrt()
    }

    pub fn final_radius(&self) -> f64 {
        self.radius_at(self.t_end)
    }
}

/// Closed-form extinction time of a shrinking circle, if it shrinks.
pub fn circle_extinction_time(r0: f64, c: f64) -> Option<f64> {
    if c == 0.0 {
        Some(0.5 * r0 * r0)
    } else if c * r0 < 1.0 {
        Some(-r0 / c - (1.0 - c * r0).ln() / (c * c))
    } else {
        None
    }
}

/// Integrates `du/dt = 2c sqrt(u) - 2` for `u = r^2` with adaptive Dormand-Prince 5(4).
pub fn plane_circle_ode(r0: f64, c: f64, t_end: f64) -> Result<CircleOde> {
    if !(r0 > 0.0) || !(c >= 0.0) || !(t_end >= 0.0) {
        return Err(Error::InvalidParameter(
            "plane_circle_ode needs r0 > 0, c >= 0, t_end >= 0".into(),
        ));
    }
    const TOL: f64 = 1e-12;
    const H_MAX: f64 = 1e-3;
    const A: [[f64; 6]; 6] = [
        [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [
            19372.0 / 6561.0,
            -25360.0 / 2187.0,
            64448.0 / 6561.0,
            -212.0 / 729.0,
            0.0,
            0.0,
        ],
        [
            9017.0 / 3168.0,
            -355.0 / 33.0,
            46732.0 / 5247.0,
            49.0 / 176.0,
            -5103.0 / 18656.0,
            0.0,
        ],
        [
            35.0 / 384.0,
            0.0,
            500.0 / 1113.0,
            125.0 / 192.0,
            -2187.0 / 6784.0,
            11.0 / 84.0,
        ],
    ];
    const E: [f64; 7] = [
        71.0 / 57600.0,
        0.0,
        -71.0 / 16695.0,
        71.0 / 1920.0,
        -17253.0 / 339200.0,
        22.0 / 525.0,
        -1.0 / 40.0,
    ];
    let f = |u: f64| ode_rhs(c, u);
    let mut t = 0.0;
    let mut u = r0 * r0;
    let mut h = H_MAX.min(t_end.max(1e-12));
    let mut times = vec![0.0];
    let mut squared = vec![u];
    let mut extinction_time = None;
    let equilibrium = c > 0.0 && (c * r0 - 1.0).abs() < 1e-15;
    while t < t_end && !equilibrium {
        h = h.min(t_end - t);
        let mut k = [0.0; 7];
        k[0] = f(u);
        for s in 0..6 {
            let ui = u + h * (0..=s).map(|j| A[s][j] * k[j]).sum::<f64>();
            k[s + 1] = f(ui);
        }
        let u_new = u + h * (0..6).map(|j| A[5][j] * k[j]).sum::<f64>();
        let err = (h * (0..7).map(|j| E[j] * k[j]).sum::<f64>()).abs();
        let scale = TOL * (1.0 + u.abs());
        if u_new <= 0.0 || err > scale {
            if h < 1e-15 {
                extinction_time = Some(t);
                break;
            }
            let shrink = if u_new <= 0.0 {
                0.5
            } else {
                (0.9 * (scale / err).powf(0.2)).clamp(0.1, 0.5)
            };
            h *= shrink;
            continue;
        }
        t += h;
        u = u_new;
        times.push(t);
        squared.push(u);
        if u < 1e-24 {
            extinction_time = Some(t);
            break;
        }
        let grow = if err == 0.0 {
            5.0
        } else {
            (0.9 * (scale / err).powf(0.2)).clamp(0.2, 5.0)
        };
        h = (h * grow).min(H_MAX);
    }
    if equilibrium {
        times.push(t_end);
        squared.push(u);
    }
    Ok(CircleOde {
        r0,
        c,
        t_end,
        times,
        squared,
        extinction_time,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::shoelace;
    use crate::functional::eval_fc;
    use approx::assert_abs_diff_eq;

    fn torus() -> SurfaceMetric {
        SurfaceMetric::flat_torus(3.0, 1.0).unwrap()
    }

    #[test]
    fn lens_closed_forms_at_unit_c() {
        let g = LensGeometry::new(3.0, 1.0, 1.0).unwrap();
        assert_abs_diff_eq!(g.length(), 2.0 * PI / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(g.area(), PI / 3.0 - 3f64.sqrt() / 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(g.area(), 0.181172, epsilon = 1e-6);
        assert_abs_diff_eq!(g.corner_angle(), PI / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn lens_circles_pass_through_the_geodesic_ends() {
        for c in [0.3, 1.0, 1.9] {
            let g = LensGeometry::new(3.0, 1.0, c).unwrap();
            for center in [g.right_center(), g.left_center()] {
                for end in [Point::new(1.5, 0.0, 0.0), Point::new(1.5, 1.0, 0.0)] {
                    assert_abs_diff_eq!((center - end).norm(), 1.0 / c, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn lens_area_matches_polygon_brute_force() {
        // independent check: fine polygon in the plane, no torus machinery
        for c in [0.2, 0.5, 1.0, 1.5] {
            let g = LensGeometry::new(3.0, 1.0, c).unwrap();
            let pts = lens_points(&g, 200_000);
            let mut lift: Vec<_> = pts.iter().map(|p| nalgebra::Vector2::new(p.x, p.y)).collect();
            lift.push(lift[0]);
            let brute = shoelace(&lift);
            assert_abs_diff_eq!(brute, g.area(), epsilon = 1e-9 * (1.0 + g.area()));
            // the printed closed form without the 1/c^2 factor only agrees at c = 1
            let printed = 2.0 * (1.0 - c * c / 4.0).sqrt().acos() - c * c * (1.0 / (c * c) - 0.25).sqrt();
            assert_abs_diff_eq!(printed / (c * c), g.area(), epsilon = 1e-12);
        }
    }

    #[test]
    fn lens_feasibility() {
        assert!(matches!(
            LensGeometry::new(3.0, 1.0, 2.5),
            Err(Error::InfeasibleC { .. })
        ));
        assert!(matches!(
            LensGeometry::new(3.0, 1.0, 0.0),
            Err(Error::InfeasibleC { .. })
        ));
        // too wide for a narrow torus
        assert!(matches!(
            LensGeometry::new(0.5, 1.0, 1.9),
            Err(Error::InfeasibleC { .. })
        ));
        assert!(LensGeometry::new(3.0, 1.0, 2.0).is_ok());
    }

    #[test]
    fn lens_expansion() {
        let g = LensGeometry::new(3.0, 1.0, 0.01).unwrap();
        assert_abs_diff_eq!(g.fc(), 2.0 - 1e-4 / 12.0, epsilon = 1e-9);
        let mut prev = f64::INFINITY;
        for c in [0.05, 0.02, 0.01] {
            let g = LensGeometry::new(3.0, 1.0, c).unwrap();
            let ratio = (2.0 - g.fc()) / (c * c);
            let gap = (ratio - 1.0 / 12.0).abs();
            assert!(gap < prev);
            prev = gap;
        }
        assert!(prev < 0.01 / 12.0);
    }

    #[test]
    fn discrete_lens_converges() {
        let mut errs = Vec::new();
        for n in [256, 512, 1024] {
            let lens = lens_curve(&torus(), 1.0, n).unwrap();
            assert_eq!(lens.curve.len(), n);
            let a = lens.curve.enclosed_area().unwrap();
            errs.push((a - lens.exact_area).abs());
            assert!((lens.curve.length() - lens.exact_length).abs() < 1e-4);
        }
        for w in errs.windows(2) {
            assert!((w[0] / w[1]).log2() > 1.9);
        }
    }

    #[test]
    fn lens_green_identity() {
        let lens = lens_curve(&torus(), 1.0, 1024).unwrap();
        let a = lens.curve.enclosed_area().unwrap();
        let b = lens.curve.reversed().enclosed_area().unwrap();
        assert_abs_diff_eq!(a + b, 3.0, epsilon = 1e-6);
    }

    #[test]
    fn lens_singularity() {
        let lens = lens_curve(&torus(), 1.0, 2048).unwrap();
        let rep = lens_singularity_check(&lens).unwrap();
        assert_eq!(rep.corner_count, 1);
        assert_abs_diff_eq!(rep.tangent_angle, PI / 3.0, epsilon = 1e-2);
        assert_abs_diff_eq!(rep.k_before, 1.0, epsilon = 0.05);
        assert_abs_diff_eq!(rep.k_after, -1.0, epsilon = 0.05);
        let cornered = detect_corners(&lens.curve, DEFAULT_CORNER_THRESHOLD).unwrap();
        assert_eq!(cornered.corners[0].wedges.len(), 2);
        for w in &cornered.corners[0].wedges {
            assert_abs_diff_eq!(w.angle, PI / 3.0, epsilon = 1e-2);
        }
        assert!(!lens.curve.is_self_intersecting());
    }

    #[test]
    fn lens_tends_to_doubled_geodesic() {
        let dg = doubled_geodesic(&torus()).unwrap();
        assert_eq!(dg.fc(0.7), 2.0);
        let mut prev = f64::INFINITY;
        for c in [1.0, 0.3, 0.1, 0.03] {
            let lens = lens_curve(&torus(), c, 512).unwrap();
            let d = lens_geodesic_hausdorff(&lens);
            assert!(d < prev);
            prev = d;
            assert!(lens.exact_fc < dg.fc(c));
            let rep = lens_singularity_check(&lens).unwrap();
            assert_abs_diff_eq!(rep.tangent_angle, 2.0 * (c / 2.0).asin(), epsilon = 2e-2);
        }
        assert!(prev < 0.01);
        let lens = lens_curve(&torus(), 0.01, 512).unwrap();
        assert_abs_diff_eq!(lens.exact_length, 2.0, epsilon = 1e-4);
    }

    #[test]
    fn discrete_lens_fc() {
        let lens = lens_curve(&torus(), 1.0, 4096).unwrap();
        let v = eval_fc(&lens.region(), 1.0).unwrap();
        assert!((v.value - lens.exact_fc).abs() < 1e-5);
    }

    #[test]
    fn latitude_data() {
        let d = sphere_latitude_data(1.0, 1.0).unwrap();
        assert_abs_diff_eq!(d.f_c, 0.5f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(d.curvature, 1.0, epsilon = 1e-6);
        for c in [0.5, 1.0, 2.0] {
            let d = sphere_latitude_data(1.0, c).unwrap();
            assert!(d.first_variation.abs() < 1e-6, "{c}: {}", d.first_variation);
            assert_abs_diff_eq!(latitude_curvature(1.0, d.stationary_height), c, epsilon = 1e-12);
        }
        assert!(latitude_height(1.0, 1e-9) < 1e-8);
    }

    #[test]
    fn latitude_height_is_critical_for_the_cap_functional() {
        // L(z) - c A(z) for the cap below height z; finite differences, no curvature involved
        let c = 1.3;
        let f = |z: f64| 2.0 * PI * (1.0 - z * z).sqrt() - c * 2.0 * PI * (1.0 + z);
        let z = -latitude_height(1.0, c);
        let h = 1e-5;
        assert!(((f(z + h) - f(z - h)) / (2.0 * h)).abs() < 1e-8);
        // and it is a maximum along the latitude family
        assert!(f(z + 0.05) < f(z) && f(z - 0.05) < f(z));
    }

    #[test]
    fn ode_fixed_point_and_extinction() {
        let sol = plane_circle_ode(1.0, 1.0, 3.0).unwrap();
        assert_eq!(sol.radius_at(2.0), 1.0);
        let sol = plane_circle_ode(0.5, 1.0, 1.0).unwrap();
        let te = sol.extinction_time.unwrap();
        assert_abs_diff_eq!(te, circle_extinction_time(0.5, 1.0).unwrap(), epsilon = 1e-9);
        assert_eq!(sol.radius_at(0.5), 0.0);
        let sol = plane_circle_ode(1.0, 0.0, 1.0).unwrap();
        assert_abs_diff_eq!(sol.extinction_time.unwrap(), 0.5, epsilon = 1e-10);
        for t in [0.1, 0.2, 0.33, 0.45] {
            assert_abs_diff_eq!(sol.radius_at(t), (1.0 - 2.0 * t).sqrt(), epsilon = 1e-10);
        }
    }

    #[test]
    fn ode_growth_matches_implicit_solution() {
        // t(r) = r - r0 + ln((r - 1)/(r0 - 1)) for c = 1
        let sol = plane_circle_ode(2.0, 1.0, 3.0).unwrap();
        for t in [0.5, 1.0, 2.0, 3.0] {
            let r = sol.radius_at(t);
            let implied = r - 2.0 + (r - 1.0).ln();
            assert_abs_diff_eq!(implied, t, epsilon = 1e-8);
        }
    }

    #[test]
    fn ode_dissipation_identity() {
        let c = 1.0;
        for r0 in [0.5, 2.0] {
            let sol = plane_circle_ode(r0, c, 1.0).unwrap();
            let energy = |t: f64| {
                let r = sol.radius_at(t);
                2.0 * PI * r - c * PI * r * r
            };
            for t in [0.05, 0.1, 0.15] {
                let h = 1e-4;
                let lhs =
                    (8.0 * (energy(t + h) - energy(t - h)) - (energy(t + 2.0 * h) - energy(t - 2.0 * h))) / (12.0 * h);
                let r = sol.radius_at(t);
                let rhs = -2.0 * PI * r * (1.0 / r - c).powi(2);
                assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-8 * (1.0 + rhs.abs()));
            }
        }
    }
}
