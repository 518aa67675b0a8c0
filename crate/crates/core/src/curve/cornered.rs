//! Piecewise-smooth curves: corner detection and the touching-curve comparison.

use std::f64::consts::PI;

use nalgebra::Vector3;

use super::{CurvatureProfile, DiscreteCurve};
use crate::error::{Error, Result};
use crate::surface::Point;

/// Turning angle (radians) above which a vertex counts as a corner.
pub const DEFAULT_CORNER_THRESHOLD: f64 = 0.3;

/// Vertices closer than this are treated as the same surface point.
const SAME_POINT: f64 = 1e-9;

/// One passage of the curve through a corner point.
#[derive(Debug, Clone, PartialEq)]
pub struct Wedge {
    pub vertex: usize,
    pub point: Point,
    /// Unit tangent of arrival, ambient coordinates.
    pub incoming: Vector3<f64>,
    /// Unit tangent of departure, ambient coordinates.
    pub outgoing: Vector3<f64>,
    /// Interior angle on the region side, in `(0, 2 pi)`.
    pub angle: f64,
    pub k_minus: f64,
    pub k_plus: f64,
}

/// A corner point; a quasi-embedded curve may pass through it several times.
#[derive(Debug, Clone, PartialEq)]
pub struct Corner {
    pub point: Point,
    pub wedges: Vec<Wedge>,
}

impl Corner {
    /// Distinct tangent lines through the corner (unit directions, sign-normalized).
    pub fn tangent_lines(&self) -> Vec<Vector3<f64>> {
        let mut lines: Vec<Vector3<f64>> = Vec::new();
        for w in &self.wedges {
            for t in [w.incoming, w.outgoing] {
                if !lines.iter().any(|l| l.dot(&t).abs() > 1.0 - 1e-6) {
                    lines.push(t);
                }
            }
        }
        lines
    }

    /// Largest angle in `[0, pi/2]` between two tangent lines.
    pub fn tangent_line_angle(&self) -> f64 {
        let lines = self.tangent_lines();
        let mut best = 0.0f64;
        for (i, a) in lines.iter().enumerate() {
            for b in &lines[i + 1..] {
                best = best.max(a.dot(b).abs().min(1.0).acos());
            }
        }
        best
    }
}

/// Vertex span of a smooth arc, `start..=end` taken cyclically (`end` may exceed `N`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ArcSpan {
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone)]
pub struct CorneredCurve {
    pub curve: DiscreteCurve,
    pub corners: Vec<Corner>,
    pub arcs: Vec<ArcSpan>,
}

impl CorneredCurve {
    /// Every wedge of every corner, in order of corner then passage.
    pub fn wedges(&self) -> Vec<&Wedge> {
        self.corners.iter().flat_map(|c| c.wedges.iter()).collect()
    }

    pub fn wedge(&self, index: usize) -> Option<&Wedge> {
        self.wedges().get(index).copied()
    }

    pub fn corner_vertices(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.wedges().iter().map(|w| w.vertex).collect();
        v.sort_unstable();
        v
    }
}

pub(crate) fn wedge_at(curve: &DiscreteCurve, prof: &CurvatureProfile, i: usize) -> Wedge {
    let n = curve.len();
    let (a, b) = curve.chart_neighbours(i);
    let (e1, e2) = curve.surface().tangent_frame(curve.point(i));
    let tin = -a / a.norm();
    let tout = b / b.norm();
    Wedge {
        vertex: i,
        point: *curve.point(i),
        incoming: e1 * tin.x + e2 * tin.y,
        outgoing: e1 * tout.x + e2 * tout.y,
        angle: PI - prof.turning[i],
        k_minus: prof.k[(i + n - 1) % n],
        k_plus: prof.k[(i + 1) % n],
    }
}

/// Splits a curve into smooth arcs at vertices whose turning exceeds `angle_threshold`.
pub fn detect_corners(curve: &DiscreteCurve, angle_threshold: f64) -> Result<CorneredCurve> {
    let prof = curve.curvature_profile()?;
    let n = curve.len();
    let vertices: Vec<usize> = (0..n).filter(|&i| prof.turning[i].abs() > angle_threshold).collect();
    let mut corners: Vec<Corner> = Vec::new();
    for &i in &vertices {
        let w = wedge_at(curve, &prof, i);
        match corners
            .iter_mut()
            .find(|c| curve.surface().distance(&c.point, &w.point) < SAME_POINT)
        {
            Some(c) => c.wedges.push(w),
            None => corners.push(Corner {
                point: w.point,
                wedges: vec![w],
            }),
        }
    }
    let arcs = if vertices.is_empty() {
        vec![ArcSpan { start: 0, end: n }]
    } else {
        (0..vertices.len())
            .map(|j| {
                let start = vertices[j];
                let end = if j + 1 < vertices.len() {
                    vertices[j + 1]
                } else {
                    vertices[0] + n
                };
                ArcSpan { start, end }
            })
            .collect()
    };
    Ok(CorneredCurve {
        curve: curve.clone(),
        corners,
        arcs,
    })
}

/// Interior angles and one-sided curvatures of two nested curves at a common point.
#[derive(Debug, Clone, PartialEq)]
pub struct TouchReport {
    pub theta_inner: f64,
    pub theta_outer: f64,
    /// `(k_minus, k_plus)` of the inner curve.
    pub k_inner: (f64, f64),
    pub k_outer: (f64, f64),
    /// The comparison inequalities fail beyond discretization tolerance.
    pub violation: bool,
}

pub fn touch_comparison(inner: &DiscreteCurve, outer: &DiscreteCurve, p: &Point) -> Result<TouchReport> {
    let surface = *outer.surface();
    let tol = 1.5 * inner.mean_spacing().max(outer.mean_spacing());
    for q in inner.points() {
        if !outer.contains(q)? && outer.distance_to(q) > tol {
            return Err(Error::NotNested);
        }
    }
    let nearest = |c: &DiscreteCurve| -> Result<usize> {
        let (i, d) = c
            .points()
            .iter()
            .enumerate()
            .map(|(i, q)| (i, surface.distance(q, p)))
            .fold((0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
        if d > tol {
            Err(Error::NoTouch)
        } else {
            Ok(i)
        }
    };
    let side = |c: &DiscreteCurve| -> Result<(f64, (f64, f64))> {
        let i = nearest(c)?;
        let prof = c.curvature_profile()?;
        let w = wedge_at(c, &prof, i);
        let theta = if prof.turning[i].abs() > DEFAULT_CORNER_THRESHOLD {
            w.angle
        } else {
            PI
        };
        Ok((theta, (w.k_minus, w.k_plus)))
    };
    let (theta_inner, k_inner) = side(inner)?;
    let (theta_outer, k_outer) = side(outer)?;
    let angle_tol = 0.05;
    let k_tol = |k: f64| 1e-2 * (1.0 + k.abs());
    let violation = if theta_inner > theta_outer + angle_tol {
        true
    } else if (theta_inner - theta_outer).abs() <= angle_tol {
        k_inner.0 < k_outer.0 - k_tol(k_outer.0) || k_inner.1 < k_outer.1 - k_tol(k_outer.1)
    } else {
        false
    };
    Ok(TouchReport {
        theta_inner,
        theta_outer,
        k_inner,
        k_outer,
        violation,
    })
}
