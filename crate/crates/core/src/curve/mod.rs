//! Closed discrete curves on a model surface.
//!
//! A [`DiscreteCurve`] is a cyclic list of surface points. The region it bounds
//! always lies to the left of travel; reversing the point order selects the
//! complementary region.

mod cornered;
mod intersect;
pub mod shapes;

use std::f64::consts::PI;

use nalgebra::{Vector2, Vector3};

use crate::error::{Error, Result};
use crate::surface::{Point, SurfaceMetric, Tangent};

pub use cornered::{
    detect_corners, touch_comparison, ArcSpan, Corner, CorneredCurve, TouchReport, Wedge, DEFAULT_CORNER_THRESHOLD,
};
pub(crate) use intersect::components_self_intersect;

/// Minimum number of vertices of a valid curve.
pub const MIN_POINTS: usize = 8;
/// Largest admissible ratio between the longest and shortest segment.
pub const MAX_SPACING_RATIO: f64 = 4.0;
/// Consecutive points closer than this are degenerate.
pub const MIN_SEGMENT: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteCurve {
    surface: SurfaceMetric,
    points: Vec<Point>,
}

/// Per-vertex discrete geodesic curvature data.
#[derive(Debug, Clone)]
pub struct CurvatureProfile {
    /// Arclength coordinate of each vertex measured from vertex 0.
    pub s: Vec<f64>,
    /// Signed geodesic curvature, positive when bending toward the region.
    pub k: Vec<f64>,
    /// Unit normal pointing into the region, in ambient coordinates.
    pub normal: Vec<Vector3<f64>>,
    /// Vertex-centred quadrature weights `(|seg_{i-1}| + |seg_i|) / 2`.
    pub weight: Vec<f64>,
    /// Signed turning angle at each vertex (left turns positive).
    pub turning: Vec<f64>,
}

impl CurvatureProfile {
    pub fn len(&self) -> usize {
        self.k.len()
    }

    pub fn is_empty(&self) -> bool {
        self.k.is_empty()
    }

    pub fn k_min(&self) -> f64 {
        self.k.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn k_max(&self) -> f64 {
        self.k.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn total_weight(&self) -> f64 {
        self.weight.iter().sum()
    }
}

impl DiscreteCurve {
    /// Builds a curve, normalizing every point and checking the curve invariants.
    pub fn new(surface: SurfaceMetric, points: Vec<Point>) -> Result<Self> {
        let curve = Self::from_points(surface, points)?;
        let ratio = curve.spacing_ratio();
        if ratio > MAX_SPACING_RATIO {
            return Err(Error::InvalidCurve(format!(
                "spacing ratio {ratio:.3} exceeds {MAX_SPACING_RATIO}"
            )));
        }
        Ok(curve)
    }

    /// Like [`Self::new`] but without the spacing-ratio check.
    pub(crate) fn from_points(surface: SurfaceMetric, points: Vec<Point>) -> Result<Self> {
        if points.len() < MIN_POINTS {
            return Err(Error::InvalidCurve(format!(
                "need at least {MIN_POINTS} points, got {}",
                points.len()
            )));
        }
        let points: Vec<Point> = points.iter().map(|p| surface.normalize(p)).collect();
        for p in &points {
            surface.validate_point(p)?;
        }
        let curve = DiscreteCurve { surface, points };
        for (i, d) in curve.segment_lengths().into_iter().enumerate() {
            if !(d >= MIN_SEGMENT) {
                return Err(Error::DegenerateSpacing { index: i, distance: d });
            }
        }
        Ok(curve)
    }

    pub fn surface(&self) -> &SurfaceMetric {
        &self.surface
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, i: usize) -> &Point {
        &self.points[i % self.points.len()]
    }

    /// Same curve traversed backwards; the region becomes the complement.
    pub fn reversed(&self) -> Self {
        let mut points = self.points.clone();
        points.reverse();
        DiscreteCurve {
            surface: self.surface,
            points,
        }
    }

    /// Length of segment `i`, from vertex `i` to vertex `i + 1`.
    pub fn segment_length(&self, i: usize) -> f64 {
        let n = self.points.len();
        self.surface.distance(&self.points[i % n], &self.points[(i + 1) % n])
    }

    pub fn segment_lengths(&self) -> Vec<f64> {
        (0..self.points.len()).map(|i| self.segment_length(i)).collect()
    }

    pub fn spacing_ratio(&self) -> f64 {
        let seg = self.segment_lengths();
        let max = seg.iter().copied().fold(0.0, f64::max);
        let min = seg.iter().copied().fold(f64::INFINITY, f64::min);
        max / min
    }

    pub fn mean_spacing(&self) -> f64 {
        self.length() / self.points.len() as f64
    }

    pub fn min_spacing(&self) -> f64 {
        self.segment_lengths().into_iter().fold(f64::INFINITY, f64::min)
    }

    /// Sum of geodesic segment lengths.
    pub fn length(&self) -> f64 {
        self.segment_lengths().iter().sum()
    }

    /// Neighbours of vertex `i` in the exponential chart centred at it.
    pub(crate) fn chart_neighbours(&self, i: usize) -> (Tangent, Tangent) {
        let n = self.points.len();
        let p = &self.points[i];
        let prev = &self.points[(i + n - 1) % n];
        let next = &self.points[(i + 1) % n];
        (self.surface.log(p, prev), self.surface.log(p, next))
    }

    /// Menger curvature, tangent and turning angle at every vertex, computed in
    /// the exponential chart centred at that vertex.
    pub fn curvature_profile(&self) -> Result<CurvatureProfile> {
        let n = self.points.len();
        let seg = self.segment_lengths();
        let mut prof = CurvatureProfile {
            s: Vec::with_capacity(n),
            k: Vec::with_capacity(n),
            normal: Vec::with_capacity(n),
            weight: Vec::with_capacity(n),
            turning: Vec::with_capacity(n),
        };
        let mut s = 0.0;
        for i in 0..n {
            let (a, b) = self.chart_neighbours(i);
            let (la, lb) = (a.norm(), b.norm());
            if la < MIN_SEGMENT || lb < MIN_SEGMENT {
                let distance = la.min(lb);
                let index = if la < lb { (i + n - 1) % n } else { i };
                return Err(Error::DegenerateSpacing { index, distance });
            }
            let chord = b - a;
            let lc = chord.norm();
            let back = -a;
            let cross = back.x * b.y - back.y * b.x;
            let k = if lc > 0.0 { 2.0 * cross / (la * lb * lc) } else { 0.0 };
            let turning = cross.atan2(back.dot(&b));
            let t = if lc > 0.0 { chord / lc } else { b / lb };
            let n2 = Vector2::new(-t.y, t.x);
            let (e1, e2) = self.surface.tangent_frame(&self.points[i]);
            prof.s.push(s);
            prof.k.push(k);
            prof.normal.push(e1 * n2.x + e2 * n2.y);
            prof.weight.push(0.5 * (seg[(i + n - 1) % n] + seg[i]));
            prof.turning.push(turning);
            s += seg[i];
        }
        Ok(prof)
    }

    /// Signed turning angles at every vertex.
    pub fn turning_angles(&self) -> Vec<f64> {
        (0..self.points.len())
            .map(|i| {
                let (a, b) = self.chart_neighbours(i);
                let back = -a;
                (back.x * b.y - back.y * b.x).atan2(back.dot(&b))
            })
            .collect()
    }

    /// Continuous planar lift of a flat curve, `N + 1` points; the last one is
    /// the lift of vertex 0 reached after going once around.
    pub fn lift(&self) -> Vec<Vector2<f64>> {
        let n = self.points.len();
        let mut out = Vec::with_capacity(n + 1);
        let mut cur = Vector2::new(self.points[0].x, self.points[0].y);
        out.push(cur);
        for i in 0..n {
            cur += self
                .surface
                .flat_displacement(&self.points[i], &self.points[(i + 1) % n]);
            out.push(cur);
        }
        out
    }

    /// Lattice winding of a torus curve; `[0, 0]` for contractible curves.
    pub fn torus_winding(&self) -> [i64; 2] {
        match self.surface {
            SurfaceMetric::FlatTorus { side_l, side_h } => {
                let lift = self.lift();
                let d = lift[lift.len() - 1] - lift[0];
                [(d.x / side_l).round() as i64, (d.y / side_h).round() as i64]
            }
            _ => [0, 0],
        }
    }

    pub fn is_self_intersecting(&self) -> bool {
        components_self_intersect(std::slice::from_ref(self))
    }

    /// Area of the region on the left, without the embeddedness check.
    pub(crate) fn enclosed_area_unchecked(&self) -> Result<f64> {
        match self.surface {
            SurfaceMetric::Plane => {
                let a = shoelace(&self.lift());
                if a <= 0.0 {
                    Err(Error::UnboundedRegion)
                } else {
                    Ok(a)
                }
            }
            SurfaceMetric::FlatTorus { side_l, side_h } => {
                let winding = self.torus_winding();
                if winding != [0, 0] {
                    return Err(Error::NonContractible { winding });
                }
                let a = shoelace(&self.lift());
                Ok(if a > 0.0 { a } else { side_l * side_h + a })
            }
            SurfaceMetric::Sphere { radius } => {
                let turning: f64 = self.turning_angles().iter().sum();
                Ok(radius * radius * (2.0 * PI - turning))
            }
        }
    }

    /// Area of the region to the left of the curve.
    pub fn enclosed_area(&self) -> Result<f64> {
        if let SurfaceMetric::FlatTorus { .. } = self.surface {
            let winding = self.torus_winding();
            if winding != [0, 0] {
                return Err(Error::NonContractible { winding });
            }
        }
        if self.is_self_intersecting() {
            return Err(Error::SelfIntersection);
        }
        self.enclosed_area_unchecked()
    }

    /// Whether `q` lies in the region on the left of the curve.
    pub fn contains(&self, q: &Point) -> Result<bool> {
        match self.surface {
            SurfaceMetric::Plane => {
                let lift = self.lift();
                let w = winding_number(&lift, &Vector2::new(q.x, q.y));
                let negative = shoelace(&lift) < 0.0;
                Ok(w + i64::from(negative) >= 1)
            }
            SurfaceMetric::FlatTorus { side_l, side_h } => {
                let winding = self.torus_winding();
                if winding != [0, 0] {
                    return Err(Error::NonContractible { winding });
                }
                let lift = self.lift();
                let (lo, hi) = bbox(&lift);
                let q = self.surface.normalize(q);
                let mut w = 0;
                let i0 = ((lo.x - q.x) / side_l).floor() as i64;
                let i1 = ((hi.x - q.x) / side_l).ceil() as i64;
                let j0 = ((lo.y - q.y) / side_h).floor() as i64;
                let j1 = ((hi.y - q.y) / side_h).ceil() as i64;
                for i in i0..=i1 {
                    for j in j0..=j1 {
                        let qq = Vector2::new(q.x + i as f64 * side_l, q.y + j as f64 * side_h);
                        w += winding_number(&lift, &qq);
                    }
                }
                let negative = shoelace(&lift) < 0.0;
                Ok(w + i64::from(negative) >= 1)
            }
            SurfaceMetric::Sphere { .. } => Ok(sphere_contains(self, &q.normalize())),
        }
    }

    /// Uniform arclength resampling with the given target spacing.
    pub fn resample(&self, target_spacing: f64) -> Result<Self> {
        let length = self.length();
        if !(target_spacing > 0.0) || target_spacing > length / MIN_POINTS as f64 {
            return Err(Error::SpacingTooCoarse {
                spacing: target_spacing,
                length,
            });
        }
        let m = ((length / target_spacing).round() as usize).max(MIN_POINTS);
        self.resample_count(m)
    }

    /// Resamples to exactly `m` points equally spaced in arclength, starting at vertex 0.
    pub fn resample_count(&self, m: usize) -> Result<Self> {
        let out = self.resample_count_raw(m)?;
        DiscreteCurve::new(out.surface, out.points)
    }

    /// Like [`Self::resample_count`] but without the spacing-ratio check.
    pub(crate) fn resample_count_raw(&self, m: usize) -> Result<Self> {
        let seg = self.segment_lengths();
        let length: f64 = seg.iter().sum();
        let n = self.points.len();
        let step = length / m as f64;
        let mut out = Vec::with_capacity(m);
        let mut i = 0;
        let mut start = 0.0;
        for j in 0..m {
            let target = j as f64 * step;
            while i + 1 < n && start + seg[i] <= target {
                start += seg[i];
                i += 1;
            }
            let frac = ((target - start) / seg[i]).clamp(0.0, 1.0);
            let p = if frac == 0.0 {
                self.points[i]
            } else {
                self.surface
                    .interpolate(&self.points[i], &self.points[(i + 1) % n], frac)
            };
            out.push(p);
        }
        DiscreteCurve::from_points(self.surface, out)
    }

    /// Hausdorff distance between the vertex sets of two curves on the same surface.
    pub fn vertex_hausdorff(&self, other: &DiscreteCurve) -> f64 {
        let one = |a: &DiscreteCurve, b: &DiscreteCurve| {
            a.points
                .iter()
                .map(|p| {
                    b.points
                        .iter()
                        .map(|q| a.surface.distance(p, q))
                        .fold(f64::INFINITY, f64::min)
                })
                .fold(0.0, f64::max)
        };
        one(self, other).max(one(other, self))
    }

    /// Distance from `q` to the polyline, segments measured in the chart at their start.
    pub fn distance_to(&self, q: &Point) -> f64 {
        self.closest_point(q).1
    }

    /// Nearest point of the polyline to `q` and its distance.
    pub fn closest_point(&self, q: &Point) -> (Point, f64) {
        let n = self.points.len();
        let mut best = (self.points[0], f64::INFINITY);
        for i in 0..n {
            let a = &self.points[i];
            let b = &self.points[(i + 1) % n];
            let qa = self.surface.log(a, q);
            let ba = self.surface.log(a, b);
            let t = (qa.dot(&ba) / ba.norm_squared()).clamp(0.0, 1.0);
            let d = (qa - ba * t).norm();
            if d < best.1 {
                best = (self.surface.interpolate(a, b, t), d);
            }
        }
        best
    }
}

pub(crate) fn shoelace(lift: &[Vector2<f64>]) -> f64 {
    let n = lift.len() - 1;
    let o = lift[0];
    let mut s = 0.0;
    for i in 0..n {
        let a = lift[i] - o;
        let b = lift[i + 1] - o;
        s += a.x * b.y - a.y * b.x;
    }
    0.5 * s
}

/// `lift` is closed: its last point equals its first.
fn winding_number(lift: &[Vector2<f64>], q: &Vector2<f64>) -> i64 {
    let mut w = 0;
    for i in 0..lift.len() - 1 {
        let a = lift[i];
        let b = lift[i + 1];
        let side = (b.x - a.x) * (q.y - a.y) - (q.x - a.x) * (b.y - a.y);
        if a.y <= q.y {
            if b.y > q.y && side > 0.0 {
                w += 1;
            }
        } else if b.y <= q.y && side < 0.0 {
            w -= 1;
        }
    }
    w
}

fn bbox(pts: &[Vector2<f64>]) -> (Vector2<f64>, Vector2<f64>) {
    let mut lo = Vector2::repeat(f64::INFINITY);
    let mut hi = Vector2::repeat(f64::NEG_INFINITY);
    for p in pts {
        lo = lo.inf(p);
        hi = hi.sup(p);
    }
    (lo, hi)
}

/// Parity of crossings along a short great-circle arc from `q` to a point
/// just to the left of some segment.
fn sphere_contains(curve: &DiscreteCurve, q: &Point) -> bool {
    let pts = &curve.points;
    let n = pts.len();
    for j in 0..n {
        let a = pts[j];
        let b = pts[(j + 1) % n];
        let mid = (a + b).normalize();
        let t = b - a;
        let left = mid.cross(&t).normalize();
        let m = (mid + left * (1e-7 * t.norm())).normalize();
        if q.dot(&m) < -0.5 {
            continue;
        }
        let mut crossings = 0;
        for i in 0..n {
            if intersect::great_arcs_cross(q, &m, &pts[i], &pts[(i + 1) % n]) {
                crossings += 1;
            }
        }
        return crossings % 2 == 0;
    }
    // every probe was far from q; q is near the antipode of the whole curve
    let centroid: Point = pts.iter().sum::<Point>().normalize();
    let inside_centroid_side = curve
        .enclosed_area_unchecked()
        .map(|a| a < 2.0 * PI * sphere_radius(curve).powi(2))
        .unwrap_or(true);
    (q.dot(&centroid) > 0.0) == inside_centroid_side
}

fn sphere_radius(curve: &DiscreteCurve) -> f64 {
    match curve.surface {
        SurfaceMetric::Sphere { radius } => radius,
        _ => 1.0,
    }
}
