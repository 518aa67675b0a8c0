//! Proper-crossing detection between polyline segments, bucketed on a uniform grid.
//!
//! Segments that only touch at an endpoint, or overlap tangentially, do not
//! count: quasi-embedded curves pass.

use nalgebra::{Vector2, Vector3};

use super::DiscreteCurve;
use crate::surface::SurfaceMetric;

const ORIENT_EPS: f64 = 1e-13;

#[derive(Clone, Copy)]
struct Seg {
    a: Vector3<f64>,
    b: Vector3<f64>,
    comp: usize,
    index: usize,
    copy: u8,
}

/// True when any two segments of the given components cross properly.
pub(crate) fn components_self_intersect(curves: &[DiscreteCurve]) -> bool {
    let Some(first) = curves.first() else {
        return false;
    };
    let surface = *first.surface();
    let lens: Vec<usize> = curves.iter().map(|c| c.len()).collect();
    let mut segs = Vec::new();
    match surface {
        SurfaceMetric::Sphere { .. } => {
            for (ci, c) in curves.iter().enumerate() {
                let n = c.len();
                for i in 0..n {
                    segs.push(Seg {
                        a: c.points()[i],
                        b: c.points()[(i + 1) % n],
                        comp: ci,
                        index: i,
                        copy: 0,
                    });
                }
            }
        }
        SurfaceMetric::Plane | SurfaceMetric::FlatTorus { .. } => {
            let shifts: Vec<Vector2<f64>> = match surface {
                SurfaceMetric::FlatTorus { side_l, side_h } => {
                    let mut v = vec![Vector2::zeros()];
                    for i in -1..=1 {
                        for j in -1..=1 {
                            if i != 0 || j != 0 {
                                v.push(Vector2::new(i as f64 * side_l, j as f64 * side_h));
                            }
                        }
                    }
                    v
                }
                _ => vec![Vector2::zeros()],
            };
            for (ci, c) in curves.iter().enumerate() {
                let lift = c.lift();
                for (k, shift) in shifts.iter().enumerate() {
                    for i in 0..c.len() {
                        let a = lift[i] + shift;
                        let b = lift[i + 1] + shift;
                        segs.push(Seg {
                            a: Vector3::new(a.x, a.y, 0.0),
                            b: Vector3::new(b.x, b.y, 0.0),
                            comp: ci,
                            index: i,
                            copy: k as u8,
                        });
                    }
                }
            }
        }
    }
    let spherical = matches!(surface, SurfaceMetric::Sphere { .. });
    any_crossing(&segs, &lens, spherical) || vertex_crossing(curves)
}

/// A curve passing twice through one point crosses itself there when the two
/// passages interleave around the point.
fn vertex_crossing(curves: &[DiscreteCurve]) -> bool {
    // only true coincidences count: distinct vertices of a near-cusp can be
    // closer than 1e-7 without the branches crossing
    let finest = curves.iter().map(|c| c.min_spacing()).fold(f64::INFINITY, f64::min);
    let same = (1e-6 * finest).min(1e-10);
    let surface = *curves[0].surface();
    let mut verts: Vec<(f64, usize, usize)> = Vec::new();
    for (ci, c) in curves.iter().enumerate() {
        for (i, p) in c.points().iter().enumerate() {
            verts.push((p.x, ci, i));
        }
    }
    verts.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
    let angles = |ci: usize, i: usize| {
        let (a, b) = curves[ci].chart_neighbours(i);
        (a.y.atan2(a.x), b.y.atan2(b.x))
    };
    let tau = std::f64::consts::TAU;
    // torus points near x = 0 and x = L are also close; compare them across the seam
    let period = match surface {
        SurfaceMetric::FlatTorus { side_l, .. } => Some(side_l),
        _ => None,
    };
    let m = verts.len();
    for u in 0..m {
        let (x, ci, i) = verts[u];
        let check = |cj: usize, j: usize| {
            let p = curves[ci].point(i);
            if surface.distance(p, curves[cj].point(j)) > same {
                return false;
            }
            let (a1, b1) = angles(ci, i);
            let (a2, b2) = angles(cj, j);
            let inside = |x: f64| (x - a1).rem_euclid(tau) < (b1 - a1).rem_euclid(tau);
            inside(a2) != inside(b2)
        };
        for &(x2, cj, j) in &verts[u + 1..] {
            if x2 - x > same {
                break;
            }
            if check(cj, j) {
                return true;
            }
        }
        if let Some(l) = period {
            if x < same {
                for &(x2, cj, j) in verts.iter().rev() {
                    if x2 < l - same {
                        break;
                    }
                    if check(cj, j) {
                        return true;
                    }
                }
            }
        }
    }
    false
}

fn any_crossing(segs: &[Seg], lens: &[usize], spherical: bool) -> bool {
    // sweep and prune along x, filtering candidate pairs by their y/z boxes
    let boxes: Vec<(Vector3<f64>, Vector3<f64>)> = segs.iter().map(|s| (s.a.inf(&s.b), s.a.sup(&s.b))).collect();
    let mut order: Vec<usize> = (0..segs.len()).collect();
    order.sort_unstable_by(|&i, &j| boxes[i].0.x.total_cmp(&boxes[j].0.x));
    let mut active: Vec<usize> = Vec::new();
    for &i in &order {
        let lo = boxes[i].0;
        active.retain(|&j| boxes[j].1.x >= lo.x);
        for &j in &active {
            let (blo, bhi) = boxes[j];
            let hi = boxes[i].1;
            if blo.y > hi.y || bhi.y < lo.y || blo.z > hi.z || bhi.z < lo.z {
                continue;
            }
            let (s, t) = (&segs[i], &segs[j]);
            if s.copy != 0 && t.copy != 0 {
                continue;
            }
            if s.comp == t.comp {
                let n = lens[s.comp];
                let d = s.index.abs_diff(t.index);
                // neighbours, including the closing joint of a winding lift seen in another copy
                let joined = s.copy == t.copy || [(s.a, t.b), (s.b, t.a)].iter().any(|(p, q)| (p - q).norm() < 1e-9);
                if (d <= 1 || d == n - 1) && joined {
                    continue;
                }
            }
            let crossed = if spherical {
                great_arcs_cross(&s.a, &s.b, &t.a, &t.b)
            } else {
                planar_cross(&s.a, &s.b, &t.a, &t.b)
            };
            if crossed {
                return true;
            }
        }
        active.push(i);
    }
    false
}

fn orient(a: &Vector3<f64>, b: &Vector3<f64>, c: &Vector3<f64>) -> f64 {
    let v = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
    let scale = (b - a).norm() * (c - a).norm();
    if v.abs() <= ORIENT_EPS * scale {
        0.0
    } else {
        v
    }
}

fn planar_cross(a: &Vector3<f64>, b: &Vector3<f64>, c: &Vector3<f64>, d: &Vector3<f64>) -> bool {
    let o1 = orient(a, b, c);
    let o2 = orient(a, b, d);
    let o3 = orient(c, d, a);
    let o4 = orient(c, d, b);
    o1 * o2 < 0.0 && o3 * o4 < 0.0
}

/// Proper crossing of two short great-circle arcs.
pub(crate) fn great_arcs_cross(a: &Vector3<f64>, b: &Vector3<f64>, c: &Vector3<f64>, d: &Vector3<f64>) -> bool {
    let n1 = a.cross(b);
    let n2 = c.cross(d);
    let clip = |v: f64, scale: f64| if v.abs() <= ORIENT_EPS * scale { 0.0 } else { v };
    let s1 = n1.norm();
    let s2 = n2.norm();
    let o1 = clip(n1.dot(c), s1);
    let o2 = clip(n1.dot(d), s1);
    let o3 = clip(n2.dot(a), s2);
    let o4 = clip(n2.dot(b), s2);
    o1 * o2 < 0.0 && o3 * o4 < 0.0 && (a + b).dot(&(c + d)) > 0.0
}
