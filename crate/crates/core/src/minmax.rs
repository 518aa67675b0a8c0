//! Sweepout families of regions, their `F_c` profiles and width estimates.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::Vector2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corners::{round_vertex, RoundingDirection, ANGLE_MARGIN};
use crate::curve::{shapes, DiscreteCurve, DEFAULT_CORNER_THRESHOLD};
use crate::error::{Error, Result};
use crate::flow::{run_region, FlowConfig, Termination};
use crate::functional::Region;
use crate::oracle::{lens_points, LensGeometry};
use crate::surface::{Point, SurfaceMetric};

/// Default number of boundary vertices per slice.
pub const DEFAULT_RESOLUTION: usize = 4096;
/// Golden-section refinement stops once the bracket is this narrow in `t`.
pub const ARGMAX_TOLERANCE: f64 = 1e-8;

type SliceFn = dyn Fn(f64) -> Result<Region> + Send + Sync;

/// A one-parameter family `t -> Omega_t`, `t` in `[0, 1]`.
#[derive(Clone)]
pub struct SweepoutFamily {
    pub surface: SurfaceMetric,
    pub label: String,
    generator: Arc<SliceFn>,
}

impl std::fmt::Debug for SweepoutFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SweepoutFamily")
            .field("surface", &self.surface)
            .field("label", &self.label)
            .finish()
    }
}

impl SweepoutFamily {
    pub fn new(
        surface: SurfaceMetric,
        label: impl Into<String>,
        generator: impl Fn(f64) -> Result<Region> + Send + Sync + 'static,
    ) -> Self {
        SweepoutFamily {
            surface,
            label: label.into(),
            generator: Arc::new(generator),
        }
    }

    pub fn slice(&self, t: f64) -> Result<Region> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::InvalidParameter(format!("slice parameter {t} outside [0, 1]")));
        }
        (self.generator)(t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfilePoint {
    pub t: f64,
    pub fc: f64,
    pub length: f64,
    pub area: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WidthEstimate {
    pub label: String,
    pub c: f64,
    pub n_slices: usize,
    /// Grid and refinement evaluations, ordered by `t`.
    pub profile: Vec<ProfilePoint>,
    pub t_star: f64,
    pub value: f64,
}

impl WidthEstimate {
    /// Largest `|dF| / dt` between consecutive profile points of the uniform grid.
    pub fn grid_modulus(&self) -> f64 {
        let grid: Vec<&ProfilePoint> = self
            .profile
            .iter()
            .filter(|p| is_grid_point(p.t, self.n_slices))
            .collect();
        grid.windows(2)
            .map(|w| (w[1].fc - w[0].fc).abs() / (w[1].t - w[0].t))
            .fold(0.0, f64::max)
    }
}

fn grid_t(i: usize, n: usize) -> f64 {
    i as f64 / (n - 1) as f64
}

fn is_grid_point(t: f64, n: usize) -> bool {
    let x = t * (n - 1) as f64;
    (x - x.round()).abs() < 1e-9
}

fn evaluate(family: &SweepoutFamily, c: f64, t: f64) -> Result<ProfilePoint> {
    let region = family.slice(t)?;
    let length = region.length();
    let area = region.area()?;
    Ok(ProfilePoint {
        t,
        fc: length - c * area,
        length,
        area,
    })
}

/// Profile on a uniform grid of `n_slices` parameters, refined around the
/// coarse maximum by golden-section search.
pub fn eval_family(family: &SweepoutFamily, c: f64, n_slices: usize) -> Result<WidthEstimate> {
    if n_slices < 16 {
        return Err(Error::InvalidParameter(format!(
            "need at least 16 slices, got {n_slices}"
        )));
    }
    if !(c > 0.0) {
        return Err(Error::InvalidParameter(format!("c must be positive, got {c}")));
    }
    let mut profile = (0..n_slices)
        .into_par_iter()
        .map(|i| evaluate(family, c, grid_t(i, n_slices)))
        .collect::<Result<Vec<_>>>()?;
    let best = (0..n_slices)
        .max_by(|&a, &b| profile[a].fc.total_cmp(&profile[b].fc))
        .unwrap_or(0);
    let mut lo = grid_t(best.saturating_sub(1), n_slices);
    let mut hi = grid_t((best + 1).min(n_slices - 1), n_slices);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let mut f1 = evaluate(family, c, x1)?;
    let mut f2 = evaluate(family, c, x2)?;
    while hi - lo > ARGMAX_TOLERANCE {
        if f1.fc >= f2.fc {
            hi = x2;
            x2 = x1;
            profile.push(f2);
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = evaluate(family, c, x1)?;
        } else {
            lo = x1;
            x1 = x2;
            profile.push(f1);
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = evaluate(family, c, x2)?;
        }
    }
    profile.push(f1);
    profile.push(f2);
    profile.sort_by(|a, b| a.t.total_cmp(&b.t));
    profile.dedup_by(|a, b| a.t == b.t);
    let top = profile
        .iter()
        .max_by(|a, b| a.fc.total_cmp(&b.fc))
        .copied()
        .expect("profile is non-empty");
    if !(top.fc > 0.0) {
        return Err(Error::CertificationFailed(format!(
            "width estimate {} of family {} is not positive",
            top.fc, family.label
        )));
    }
    Ok(WidthEstimate {
        label: family.label.clone(),
        c,
        n_slices,
        profile,
        t_star: top.t,
        value: top.fc,
    })
}

/// Caps below height `2t - 1` on a sphere.
pub fn latitude_family(sphere: &SurfaceMetric) -> Result<SweepoutFamily> {
    latitude_family_with(sphere, 1024)
}

pub fn latitude_family_with(sphere: &SurfaceMetric, n: usize) -> Result<SweepoutFamily> {
    let SurfaceMetric::Sphere { .. } = *sphere else {
        return Err(Error::InvalidParameter("latitude family needs a sphere".into()));
    };
    let s = *sphere;
    Ok(SweepoutFamily::new(s, "latitude", move |t| {
        let z = 2.0 * t - 1.0;
        let rho = (1.0 - z * z).max(0.0).sqrt();
        if rho * 2.0 * PI / n as f64 <= 1e-9 {
            return Ok(if t < 0.5 { Region::empty(s) } else { Region::full(s) });
        }
        Ok(Region::from_curve(shapes::latitude(s, z, n, true)?))
    }))
}

/// Plane disks of radius `t * r_max`; the plane has no full region, so the
/// family ends at the disk of radius `r_max`.
pub fn disk_family(r_max: f64, n: usize) -> Result<SweepoutFamily> {
    if !(r_max > 0.0) {
        return Err(Error::InvalidParameter("r_max must be positive".into()));
    }
    let s = SurfaceMetric::Plane;
    Ok(SweepoutFamily::new(s, "disk", move |t| {
        if t * r_max * 2.0 * PI / n as f64 <= 1e-9 {
            return Ok(Region::empty(s));
        }
        Ok(Region::from_curve(shapes::circle(s, &Point::zeros(), t * r_max, n)?))
    }))
}

/// Circular arc `center + radius (cos a, sin a)` for `a` from `start` through `start + sweep`.
#[derive(Debug, Clone, Copy)]
struct ArcPiece {
    center: Vector2<f64>,
    radius: f64,
    start: f64,
    sweep: f64,
}

impl ArcPiece {
    fn length(&self) -> f64 {
        self.radius * self.sweep.abs()
    }

    fn at(&self, s: f64) -> Vector2<f64> {
        let a = self.start + self.sweep.signum() * s / self.radius;
        self.center + Vector2::new(a.cos(), a.sin()) * self.radius
    }
}

/// `n` points uniformly spaced in arclength along the pieces, starting at the
/// beginning; with `closed = false` the final endpoint is appended.
fn sample_path(pieces: &[ArcPiece], n: usize, closed: bool) -> Vec<Vector2<f64>> {
    let total: f64 = pieces.iter().map(|p| p.length()).sum();
    let count = if closed { n } else { n + 1 };
    let mut out = Vec::with_capacity(count);
    let mut k = 0;
    let mut offset = 0.0;
    for j in 0..count {
        let s = total * j as f64 / n as f64;
        while k + 1 < pieces.len() && s > offset + pieces[k].length() {
            offset += pieces[k].length();
            k += 1;
        }
        out.push(pieces[k].at((s - offset).min(pieces[k].length())));
    }
    out
}

fn to_points(v: &[Vector2<f64>]) -> Vec<Point> {
    v.iter().map(|p| Point::new(p.x, p.y, 0.0)).collect()
}

/// Geometry of the three-stage lens sweepout.
#[derive(Debug, Clone, Copy)]
struct LensSweep {
    g: LensGeometry,
    eps_max: f64,
    s_max: f64,
}

impl LensSweep {
    fn new(g: LensGeometry) -> Self {
        let mut sweep = LensSweep {
            g,
            eps_max: 0.0,
            s_max: 0.5 * g.side_l - g.half_width,
        };
        let ok = |e: f64| {
            let (q, delta) = sweep.offset(e);
            let tangency_y = 0.5 * g.side_h - g.radius * delta.sin();
            q - e <= 0.5 * g.half_width && tangency_y <= 0.25 * g.side_h
        };
        let (mut lo, mut hi) = (0.0, g.radius);
        if ok(hi) {
            lo = hi;
        } else {
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if ok(mid) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
        }
        sweep.eps_max = lo;
        sweep
    }

    /// Horizontal offset `q` of the rounding circle centre from the singular
    /// point, and the half angle `delta` of the lens arc's tangency.
    fn offset(&self, eps: f64) -> (f64, f64) {
        let g = &self.g;
        let a = 0.5 * g.side_h;
        let q = ((g.radius + eps).powi(2) - a * a).sqrt() - g.center_offset;
        (q, a.atan2(q + g.center_offset))
    }

    /// Right boundary loop of the band obtained by rounding both complementary
    /// wedges with radius `eps` and moving the loops apart by `2 s`. Starts at the
    /// middle of the lower rounding arc and winds once upwards.
    fn right_loop(&self, eps: f64, s: f64, n: usize) -> Vec<Vector2<f64>> {
        let g = &self.g;
        let (q, delta) = self.offset(eps);
        let (x0, h) = (0.5 * g.side_l, g.side_h);
        let pieces = [
            ArcPiece {
                center: Vector2::new(x0 + q + s, 0.0),
                radius: eps,
                start: PI,
                sweep: -delta,
            },
            ArcPiece {
                center: Vector2::new(x0 - g.center_offset + s, 0.5 * h),
                radius: g.radius,
                start: -delta,
                sweep: 2.0 * delta,
            },
            ArcPiece {
                center: Vector2::new(x0 + q + s, h),
                radius: eps,
                start: PI + delta,
                sweep: -delta,
            },
        ];
        let pieces: Vec<ArcPiece> = pieces.into_iter().filter(|p| p.length() > 0.0).collect();
        sample_path(&pieces, n, true)
    }

    fn band(&self, eps: f64, s: f64, n: usize) -> Result<Region> {
        let torus = SurfaceMetric::FlatTorus {
            side_l: self.g.side_l,
            side_h: self.g.side_h,
        };
        let right = self.right_loop(eps, s, n / 2);
        let mirror = |p: &Vector2<f64>| Vector2::new(self.g.side_l - p.x, p.y);
        let mut left = vec![mirror(&right[0])];
        left.extend(right[1..].iter().rev().map(mirror));
        Region::from_components(vec![
            DiscreteCurve::new(torus, to_points(&right))?,
            DiscreteCurve::new(torus, to_points(&left))?,
        ])
    }

    /// The complement at full separation: a curve with its two tips on the
    /// singular point `(0, H/2)`, centred at the origin, with the complement on its left.
    fn complement_curve(&self, n: usize) -> Vec<Vector2<f64>> {
        let g = &self.g;
        let a = 0.5 * g.side_h;
        let eps = self.eps_max;
        let (q, delta) = self.offset(eps);
        let pieces: Vec<ArcPiece> = [
            ArcPiece {
                center: Vector2::new(-g.radius, a),
                radius: g.radius,
                start: 0.0,
                sweep: -delta,
            },
            ArcPiece {
                center: Vector2::new(q - g.half_width, 0.0),
                radius: eps,
                start: PI - delta,
                sweep: 2.0 * delta,
            },
            ArcPiece {
                center: Vector2::new(-g.radius, -a),
                radius: g.radius,
                start: delta,
                sweep: -delta,
            },
        ]
        .into_iter()
        .filter(|p| p.length() > 0.0)
        .collect();
        let half = n / 2;
        let side = sample_path(&pieces, half, false);
        let mut out: Vec<Vector2<f64>> = side[..half].to_vec();
        out.extend((1..=half).rev().map(|j| Vector2::new(-side[j].x, side[j].y)));
        out
    }
}

/// Stage boundaries of the lens family.
pub const LENS_T: f64 = 1.0 / 3.0;
const ROUND_END: f64 = 4.0 / 9.0;
const SEPARATE_END: f64 = 7.0 / 9.0;

/// Sweepout of a flat torus through the lens: growing scaled lenses up to
/// `t = 1/3`, then rounding the complementary wedges at the singular point,
/// separating the two boundary loops, and finally shrinking the complement.
pub fn lens_family(torus: &SurfaceMetric, c: f64) -> Result<SweepoutFamily> {
    lens_family_with(torus, c, DEFAULT_RESOLUTION)
}

pub fn lens_family_with(torus: &SurfaceMetric, c: f64, n: usize) -> Result<SweepoutFamily> {
    let SurfaceMetric::FlatTorus { side_l, side_h } = *torus else {
        return Err(Error::InvalidParameter("lens family needs a flat torus".into()));
    };
    let g = LensGeometry::new(side_l, side_h, c)?;
    let sweep = LensSweep::new(g);
    let s = *torus;
    let half = n.div_ceil(2).max(4);
    let center = Vector2::new(0.5 * side_l, 0.5 * side_h);
    let lens: Vec<Vector2<f64>> = lens_points(&g, half).iter().map(|p| Vector2::new(p.x, p.y)).collect();
    let complement = sweep.complement_curve(2 * half);
    Ok(SweepoutFamily::new(s, "lens", move |t| {
        if t <= LENS_T {
            let lambda = t / LENS_T;
            if lambda * g.length() / (2 * half) as f64 <= 1e-9 {
                return Ok(Region::empty(s));
            }
            let pts: Vec<Vector2<f64>> = if t == LENS_T {
                lens.clone()
            } else {
                lens.iter().map(|p| center + (p - center) * lambda).collect()
            };
            return Ok(Region::from_curve(DiscreteCurve::new(s, to_points(&pts))?));
        }
        if t <= ROUND_END {
            let eps = sweep.eps_max * (t - LENS_T) / (ROUND_END - LENS_T);
            return sweep.band(eps, 0.0, 2 * half);
        }
        if t <= SEPARATE_END {
            let sep = sweep.s_max * (t - ROUND_END) / (SEPARATE_END - ROUND_END);
            return sweep.band(sweep.eps_max, sep, 2 * half);
        }
        let lambda = (1.0 - t) / (1.0 - SEPARATE_END);
        if t >= 1.0 || lambda * g.length() / (2 * half) as f64 <= 1e-9 {
            return Ok(Region::full(s));
        }
        let pts: Vec<Vector2<f64>> = complement.iter().rev().map(|p| p * lambda).collect();
        Ok(Region::from_curve(DiscreteCurve::new(s, to_points(&pts))?))
    }))
}

/// Outcome of flowing one perturbed side of the maximal slice.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReflowSide {
    pub t: f64,
    pub initial_fc: f64,
    pub final_fc: f64,
    pub min_fc: f64,
    pub termination: Termination,
    pub corners_rounded: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReflowReport {
    pub value: f64,
    pub t_star: f64,
    pub delta: f64,
    pub threshold: f64,
    pub below: ReflowSide,
    pub above: ReflowSide,
    /// Both sides fall below `threshold = value - delta^2 * margin`.
    pub descends: bool,
}

/// Rounds every corner of every component with radius `eps`.
pub fn desingularize(region: &Region, eps: f64, c: f64) -> Result<(Region, usize)> {
    let mut comps = Vec::new();
    let mut rounded = 0;
    for curve in region.components() {
        let mut cur = curve.clone();
        loop {
            let turning = cur.turning_angles();
            let Some(v) = (0..cur.len()).find(|&i| turning[i].abs() > DEFAULT_CORNER_THRESHOLD) else {
                break;
            };
            let interior = PI - turning[v];
            let dir = if interior < PI - ANGLE_MARGIN {
                RoundingDirection::Inward
            } else if interior > PI + ANGLE_MARGIN {
                RoundingDirection::Outward
            } else {
                return Err(Error::AngleTooLarge { angle: interior });
            };
            cur = round_vertex(&cur, v, eps, c, dir)?.0;
            rounded += 1;
            if rounded > 64 {
                return Err(Error::CertificationFailed("too many corners to round".into()));
            }
        }
        let n = cur.len();
        comps.push(cur.resample_count(n)?);
    }
    if comps.is_empty() {
        return Ok((region.clone(), 0));
    }
    Ok((Region::from_components(comps)?, rounded))
}

/// Flows the slices at `t_star -/+ delta`, after rounding their corners with
/// radius `round_eps`, and checks that both descend below `value - delta^2 margin`.
pub fn perturb_and_reflow(
    family: &SweepoutFamily,
    c: f64,
    t_star: f64,
    delta: f64,
    round_eps: f64,
    config: &FlowConfig,
) -> Result<ReflowReport> {
    if !(t_star - delta > 0.0 && t_star + delta < 1.0) {
        return Err(Error::InvalidParameter("t_star must be interior".into()));
    }
    let value = evaluate(family, c, t_star)?.fc;
    let side = |t: f64| -> Result<ReflowSide> {
        let (region, corners_rounded) = desingularize(&family.slice(t)?, round_eps, c)?;
        let initial_fc = region.length() - c * region.area()?;
        let traj = run_region(region, config)?;
        let fcs: Vec<f64> = traj.diagnostics.iter().filter_map(|d| d.fc).collect();
        let final_fc = fcs.last().copied().unwrap_or(initial_fc);
        let min_fc = fcs.iter().copied().fold(initial_fc, f64::min);
        Ok(ReflowSide {
            t,
            initial_fc,
            final_fc,
            min_fc,
            termination: traj.termination,
            corners_rounded,
        })
    };
    let (below, above) = rayon::join(|| side(t_star - delta), || side(t_star + delta));
    let (below, above) = (below?, above?);
    let threshold = value - delta * delta;
    Ok(ReflowReport {
        value,
        t_star,
        delta,
        threshold,
        descends: below.min_fc < threshold && above.min_fc < threshold,
        below,
        above,
    })
}
