//! Rounding off corners: replacing the two edges at a wedge by an arc of the
//! circle of radius `eps` tangent to both, with a certified drop of `F_c`.

use std::f64::consts::{PI, TAU};

use nalgebra::Vector2;
use serde::{Deserialize, Serialize};

use crate::curve::{CorneredCurve, DiscreteCurve, DEFAULT_CORNER_THRESHOLD};
use crate::error::{Error, Result};
use crate::functional::{eval_fc, Region};
use crate::surface::{ChartFrame, Point};

/// Interior angles closer to `pi` than this are rejected.
pub const ANGLE_MARGIN: f64 = 0.05;
/// Minimum number of segments on an inserted arc.
const MIN_ARC_SEGMENTS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RoundingDirection {
    /// Cut the corner off the region.
    Inward,
    /// Round the complementary wedge, adding area to the region.
    Outward,
}

/// Where a tangency point sits on a polyline arc.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArcFoot {
    pub point: Point,
    /// Segment index along the arc, counted from the corner.
    pub segment: usize,
    pub t: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangentCircle {
    pub center: Point,
    /// Tangency on the first arc.
    pub x: ArcFoot,
    /// Tangency on the second arc.
    pub y: ArcFoot,
    /// Interior angle of the wedge.
    pub angle: f64,
}

fn cross(a: &Vector2<f64>, b: &Vector2<f64>) -> f64 {
    a.x * b.y - a.y * b.x
}

/// Closest point of an open polyline: `(foot, segment, t, distance)`.
fn polyline_foot(poly: &[Vector2<f64>], q: &Vector2<f64>) -> (Vector2<f64>, usize, f64, f64) {
    let mut best = (poly[0], 0, 0.0, f64::INFINITY);
    for i in 0..poly.len() - 1 {
        let (a, b) = (poly[i], poly[i + 1]);
        let ab = b - a;
        let t = ((q - a).dot(&ab) / ab.norm_squared()).clamp(0.0, 1.0);
        let f = a + ab * t;
        let d = (q - f).norm();
        if d < best.3 {
            best = (f, i, t, d);
        }
    }
    best
}

/// Circle of radius `eps` inside the wedge swept counterclockwise from `second`
/// to `first`, tangent to both. Both arcs start at the chart centre.
pub fn tangent_circle(first: &[Point], second: &[Point], eps: f64, chart: &ChartFrame) -> Result<TangentCircle> {
    if first.len() < 2 || second.len() < 2 {
        return Err(Error::InvalidParameter("wedge arcs need at least two points".into()));
    }
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter(format!("epsilon must be positive, got {eps}")));
    }
    let a: Vec<Vector2<f64>> = first.iter().map(|p| chart.log(p)).collect();
    let b: Vec<Vector2<f64>> = second.iter().map(|p| chart.log(p)).collect();
    let (da, db) = ((a[1] - a[0]).normalize(), (b[1] - b[0]).normalize());
    let angle = cross(&db, &da).atan2(db.dot(&da)).rem_euclid(TAU);
    if angle >= PI - ANGLE_MARGIN {
        return Err(Error::AngleTooLarge { angle });
    }
    let half = 0.5 * angle;
    let bisector = Vector2::new(
        db.x * half.cos() - db.y * half.sin(),
        db.x * half.sin() + db.y * half.cos(),
    );
    let mut center = a[0] + bisector * (eps / half.sin());
    let mut converged = false;
    for _ in 0..60 {
        let (fa, _, _, ra) = polyline_foot(&a, &center);
        let (fb, _, _, rb) = polyline_foot(&b, &center);
        let res = Vector2::new(ra - eps, rb - eps);
        if res.amax() <= 1e-14 * (1.0 + eps) {
            converged = true;
            break;
        }
        let (ga, gb) = ((center - fa) / ra, (center - fb) / rb);
        let det = ga.x * gb.y - ga.y * gb.x;
        if det.abs() < 1e-14 {
            break;
        }
        let step = Vector2::new(gb.y * res.x - ga.y * res.y, -gb.x * res.x + ga.x * res.y) / det;
        center -= step;
    }
    if !converged {
        return Err(Error::EpsilonTooLarge { epsilon: eps });
    }
    let (fa, sa, ta, _) = polyline_foot(&a, &center);
    let (fb, sb, tb, _) = polyline_foot(&b, &center);
    let at_end = |s: usize, t: f64, len: usize| s + 2 == len && t >= 1.0;
    let at_start = |s: usize, t: f64| s == 0 && t <= 0.0;
    if at_end(sa, ta, a.len()) || at_end(sb, tb, b.len()) || at_start(sa, ta) || at_start(sb, tb) {
        return Err(Error::EpsilonTooLarge { epsilon: eps });
    }
    // the centre must lie on the wedge side of both arcs
    let side_a = cross(&(a[sa + 1] - a[sa]), &(center - fa));
    let side_b = cross(&(b[sb + 1] - b[sb]), &(center - fb));
    if side_a >= 0.0 || side_b <= 0.0 {
        return Err(Error::EpsilonTooLarge { epsilon: eps });
    }
    Ok(TangentCircle {
        center: chart.exp(&center),
        x: ArcFoot {
            point: chart.exp(&fa),
            segment: sa,
            t: ta,
        },
        y: ArcFoot {
            point: chart.exp(&fb),
            segment: sb,
            t: tb,
        },
        angle,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WedgeRounding {
    pub epsilon: f64,
    pub c: f64,
    pub direction: RoundingDirection,
    pub vertex: usize,
    pub angle: f64,
    pub center: Point,
    pub x: Point,
    pub y: Point,
    /// Vertex indices of the inserted arc in the new curve, `x` through `y`.
    pub arc_start: usize,
    pub arc_len: usize,
    pub arc_k_min: f64,
    pub arc_k_max: f64,
    pub delta_length: f64,
    pub delta_area: f64,
    pub delta_fc: f64,
    /// `F_c` change of the local modification measured in the chart.
    pub chart_delta_fc: f64,
    pub alpha: f64,
}

/// Vertices walked from `v` in direction `dir` until the next corner (inclusive)
/// or half the curve.
fn walk(curve: &DiscreteCurve, turning: &[f64], v: usize, forward: bool) -> Vec<usize> {
    let n = curve.len();
    let mut out = vec![v];
    for k in 1..n / 2 {
        let i = if forward { (v + k) % n } else { (v + n - k % n) % n };
        out.push(i);
        if turning[i].abs() > DEFAULT_CORNER_THRESHOLD {
            break;
        }
    }
    out
}

/// Rounds the wedge `wedge_index` of `cornered` with the tangent circle of radius `eps`.
pub fn round_corner(
    cornered: &CorneredCurve,
    wedge_index: usize,
    eps: f64,
    c: f64,
    direction: RoundingDirection,
) -> Result<(DiscreteCurve, WedgeRounding)> {
    let wedge = cornered
        .wedge(wedge_index)
        .ok_or_else(|| Error::InvalidParameter(format!("no wedge {wedge_index}")))?;
    round_vertex(&cornered.curve, wedge.vertex, eps, c, direction)
}

/// Rounds the corner at vertex `v`. Outward rounding works on the reversed
/// curve, so the complement's wedge at `v` is the one cut off.
pub fn round_vertex(
    original: &DiscreteCurve,
    v: usize,
    eps: f64,
    c: f64,
    direction: RoundingDirection,
) -> Result<(DiscreteCurve, WedgeRounding)> {
    let outward = direction == RoundingDirection::Outward;
    let flipped;
    let (curve, v) = if outward {
        flipped = original.reversed();
        (&flipped, original.len() - 1 - v)
    } else {
        (original, v)
    };
    let surface = *curve.surface();
    let n = curve.len();
    let turning = curve.turning_angles();
    let back = walk(curve, &turning, v, false);
    let ahead = walk(curve, &turning, v, true);
    let p = *curve.point(v);
    let reach = |idx: &[usize]| {
        idx.iter()
            .map(|&i| surface.distance(&p, curve.point(i)))
            .fold(0.0, f64::max)
    };
    let r = (1.01 * reach(&back).max(reach(&ahead))).min(0.999 * surface.injectivity_radius());
    let chart = surface.exp_chart(&p, r)?;
    let first: Vec<Point> = back.iter().map(|&i| *curve.point(i)).collect();
    let second: Vec<Point> = ahead.iter().map(|&i| *curve.point(i)).collect();
    let tc = tangent_circle(&first, &second, eps, &chart)?;
    if tc.x.segment + tc.y.segment + 4 >= n {
        return Err(Error::EpsilonTooLarge { epsilon: eps });
    }

    // inserted arc, counterclockwise about the centre, in chart coordinates
    let cc = chart.log(&tc.center);
    let xc = chart.log(&tc.x.point) - cc;
    let yc = chart.log(&tc.y.point) - cc;
    let a0 = xc.y.atan2(xc.x);
    let sweep = (yc.y.atan2(yc.x) - a0).rem_euclid(TAU);
    let h = curve.mean_spacing();
    let segments = ((sweep * eps / h).ceil() as usize).max(MIN_ARC_SEGMENTS);
    let arc: Vec<Vector2<f64>> = (0..=segments)
        .map(|j| {
            let a = a0 + sweep * j as f64 / segments as f64;
            cc + Vector2::new(eps * a.cos(), eps * a.sin())
        })
        .collect();

    // keep vertices strictly beyond the tangency segments, dropping near-duplicates
    let last_before = back[tc.x.segment + 1];
    let first_after = ahead[tc.y.segment + 1];
    let min_gap = 0.25 * h.min(eps * sweep / segments as f64);
    let mut kept: Vec<Point> = Vec::new();
    let mut i = first_after;
    loop {
        kept.push(*curve.point(i));
        if i == last_before {
            break;
        }
        i = (i + 1) % n;
    }
    if surface.distance(kept.last().unwrap(), &tc.x.point) < min_gap && kept.len() > 1 {
        kept.pop();
    }
    if surface.distance(&kept[0], &tc.y.point) < min_gap && kept.len() > 1 {
        kept.remove(0);
    }
    let arc_start = kept.len();
    let mut pts = kept;
    pts.extend(arc.iter().map(|v| chart.exp(v)));
    let rounded = DiscreteCurve::from_points(surface, pts)?;
    let arc_len = segments + 1;

    // local change measured in the chart: removed polyline x -> p -> y versus the arc
    let removed: Vec<Vector2<f64>> = {
        let mut v = vec![chart.log(&tc.x.point)];
        for k in (1..=tc.x.segment).rev() {
            v.push(chart.log(&first[k]));
        }
        v.push(Vector2::zeros());
        v.extend(second[1..=tc.y.segment].iter().map(|q| chart.log(q)));
        v.push(chart.log(&tc.y.point));
        v
    };
    let poly_len = |v: &[Vector2<f64>]| v.windows(2).map(|w| (w[1] - w[0]).norm()).sum::<f64>();
    let chart_dl = poly_len(&arc) - poly_len(&removed);
    // loop x -> p -> y -> arc back to x encloses the cut-off piece counterclockwise
    let mut lp = removed.clone();
    lp.extend(arc.iter().rev().skip(1));
    let cut = 0.5 * lp.windows(2).map(|w| cross(&w[0], &w[1])).sum::<f64>();
    let sign = if outward { -1.0 } else { 1.0 };
    let chart_delta_fc = chart_dl + sign * c * cut;
    let local = removed.iter().chain(&arc).map(|v| v.norm()).fold(0.0, f64::max);
    let alpha = surface.exp_chart(&p, (1.01 * local).min(r))?.distortion_bound(c);
    let scale = poly_len(&removed) + c * cut.abs();

    // curvature of the arc relative to the side it rounds
    let prof = rounded.curvature_profile()?;
    let interior: Vec<f64> = (1..arc_len - 1)
        .map(|j| prof.k[(arc_start + j) % rounded.len()])
        .collect();
    let arc_k_min = interior.iter().copied().fold(f64::INFINITY, f64::min);
    let arc_k_max = interior.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (rounded, arc_start) = if outward {
        let m = rounded.len();
        (rounded.reversed(), m - 1 - (arc_start + arc_len - 1) % m)
    } else {
        (rounded, arc_start)
    };
    let before = eval_fc(&Region::from_curve(original.clone()), c)?;
    let after = eval_fc(&Region::from_curve(rounded.clone()), c)?;

    let report = WedgeRounding {
        epsilon: eps,
        c,
        direction,
        vertex: if outward { n - 1 - v } else { v },
        angle: tc.angle,
        center: tc.center,
        x: tc.x.point,
        y: tc.y.point,
        arc_start,
        arc_len,
        arc_k_min,
        arc_k_max,
        delta_length: after.length_term - before.length_term,
        delta_area: after.area_term - before.area_term,
        delta_fc: after.value - before.value,
        chart_delta_fc,
        alpha,
    };
    if !(chart_delta_fc < -2.0 * alpha * scale) {
        return Err(Error::CertificationFailed(format!(
            "chart change {chart_delta_fc:.3e} does not beat distortion allowance {:.3e}",
            2.0 * alpha * scale
        )));
    }
    if !(report.delta_fc < 0.0) {
        return Err(Error::CertificationFailed(format!(
            "F_c change {:.3e} is not negative",
            report.delta_fc
        )));
    }
    if !(arc_k_min >= 0.5 / eps && arc_k_max <= 2.0 / eps) {
        return Err(Error::CertificationFailed(format!(
            "arc curvature [{arc_k_min:.4}, {arc_k_max:.4}] outside [{}, {}]",
            0.5 / eps,
            2.0 / eps
        )));
    }
    Ok((rounded, report))
}
