//! Explicit integration of the c-flow `d gamma/dt = (k - c) n`.
//!
//! Each step moves every vertex along its inward normal by `dt (k_i - c)`
//! with `dt = beta * h_min^2`. Curves are resampled when their spacing drifts
//! and dropped once they become shorter than the extinction length.

use serde::{Deserialize, Serialize};

use crate::curve::{components_self_intersect, touch_comparison, CurvatureProfile, DiscreteCurve, TouchReport};
use crate::error::{Error, Result};
use crate::functional::{Region, RegionKind};
use crate::surface::{Point, SurfaceMetric};

const MAX_POINTS: usize = 1 << 15;
const RESAMPLE_RATIO: f64 = 2.0;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FlowConfig {
    pub c: f64,
    pub beta: f64,
    /// Target spacing after resampling; the initial mean spacing when `None`.
    pub resample_spacing: Option<f64>,
    pub max_time: f64,
    pub max_steps: usize,
    pub stop_gradient_norm: f64,
    /// Components shorter than this vanish; 1% of the initial length when `None`.
    pub extinction_length: Option<f64>,
    /// Keep a snapshot every this many steps; 0 keeps only the first and last.
    pub record_every: usize,
    /// Check for crossings after every step.
    pub check_embedding: bool,
}

impl FlowConfig {
    pub fn new(c: f64) -> Self {
        FlowConfig {
            c,
            beta: 0.25,
            resample_spacing: None,
            max_time: 10.0,
            max_steps: 1_000_000,
            stop_gradient_norm: 1e-6,
            extinction_length: None,
            record_every: 0,
            check_embedding: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParameter(m.into()));
        if !(self.c >= 0.0 && self.c.is_finite()) {
            return bad("c must be finite and non-negative");
        }
        if !(self.beta > 0.0 && self.beta <= 0.5) {
            return bad("beta must lie in (0, 0.5]");
        }
        if !(self.max_time > 0.0) || !(self.stop_gradient_norm >= 0.0) {
            return bad("max_time must be positive and stop_gradient_norm non-negative");
        }
        if self.resample_spacing.is_some_and(|h| !(h > 0.0)) || self.extinction_length.is_some_and(|l| !(l > 0.0)) {
            return bad("lengths must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Stationary,
    Extinct,
    MaxTime,
    MaxSteps,
    BlowUp,
    /// Constrained flow came to rest against the obstacle.
    Obstructed,
}

impl Termination {
    pub fn as_str(&self) -> &'static str {
        match self {
            Termination::Stationary => "stationary",
            Termination::Extinct => "extinct",
            Termination::MaxTime => "max_time",
            Termination::MaxSteps => "max_steps",
            Termination::BlowUp => "blow_up",
            Termination::Obstructed => "obstructed",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepDiagnostics {
    pub step: usize,
    pub t: f64,
    pub dt: f64,
    /// `None` once the boundary has crossed itself.
    pub fc: Option<f64>,
    pub length: f64,
    pub area: Option<f64>,
    pub k_min: f64,
    pub k_max: f64,
    pub grad_norm: f64,
    pub self_intersecting: bool,
    pub resampled: bool,
    /// Change of `F_c` caused by resampling during this step.
    pub resample_shift: f64,
    pub n_points: usize,
}

#[derive(Debug, Clone)]
pub struct FlowState {
    pub region: Region,
    pub t: f64,
    pub step_count: usize,
    pub target_spacing: f64,
    pub extinction_length: f64,
    area_valid: bool,
    self_intersecting: bool,
    profiles: Vec<CurvatureProfile>,
    last_dt: f64,
    resampled: bool,
    resample_shift: f64,
}

impl FlowState {
    pub fn new(region: Region, config: &FlowConfig) -> Result<Self> {
        config.validate()?;
        if region.components().is_empty() {
            return Err(Error::InvalidParameter("flow needs a region with a boundary".into()));
        }
        let n: usize = region.vertex_count();
        let length = region.length();
        let target_spacing = config.resample_spacing.unwrap_or(length / n as f64);
        let extinction_length = config.extinction_length.unwrap_or(0.01 * length);
        let self_intersecting = config.check_embedding && region.is_self_intersecting();
        let profiles = region.profiles()?;
        Ok(FlowState {
            region,
            t: 0.0,
            step_count: 0,
            target_spacing,
            extinction_length,
            area_valid: !self_intersecting,
            self_intersecting,
            profiles,
            last_dt: 0.0,
            resampled: false,
            resample_shift: 0.0,
        })
    }

    pub fn from_curve(curve: DiscreteCurve, config: &FlowConfig) -> Result<Self> {
        Self::new(Region::from_curve(curve), config)
    }

    pub fn components(&self) -> &[DiscreteCurve] {
        self.region.components()
    }

    pub fn profiles(&self) -> &[CurvatureProfile] {
        &self.profiles
    }

    /// The boundary vanished: the region is empty or everything.
    pub fn is_extinct(&self) -> bool {
        !matches!(self.region.kind(), RegionKind::Bounded(_))
    }

    pub fn area_valid(&self) -> bool {
        self.area_valid
    }

    /// L2 norm of the normal speed, `sqrt(sum (k_i - c)^2 ds_i)`.
    pub fn grad_norm(&self, c: f64) -> f64 {
        self.profiles
            .iter()
            .flat_map(|p| p.k.iter().zip(&p.weight))
            .map(|(k, w)| (k - c) * (k - c) * w)
            .sum::<f64>()
            .sqrt()
    }

    fn fc(&self, c: f64) -> (Option<f64>, Option<f64>) {
        let length = self.region.length();
        if !self.area_valid {
            return (None, None);
        }
        match self.region.area_unchecked() {
            Ok(a) => (Some(length - c * a), Some(a)),
            Err(_) => (None, None),
        }
    }

    pub fn diagnostics(&self, c: f64) -> StepDiagnostics {
        let (fc, area) = if self.is_extinct() {
            let a = self.region.area_unchecked().ok();
            (a.map(|a| self.region.length() - c * a), a)
        } else {
            self.fc(c)
        };
        let k_min = self.profiles.iter().map(|p| p.k_min()).fold(f64::INFINITY, f64::min);
        let k_max = self
            .profiles
            .iter()
            .map(|p| p.k_max())
            .fold(f64::NEG_INFINITY, f64::max);
        StepDiagnostics {
            step: self.step_count,
            t: self.t,
            dt: self.last_dt,
            fc,
            length: self.region.length(),
            area,
            k_min,
            k_max,
            grad_norm: self.grad_norm(c),
            self_intersecting: self.self_intersecting,
            resampled: self.resampled,
            resample_shift: self.resample_shift,
            n_points: self.region.vertex_count(),
        }
    }
}

fn stable_dt(state: &FlowState, config: &FlowConfig) -> Result<f64> {
    let mut h_min = f64::INFINITY;
    for (curve, prof) in state.components().iter().zip(&state.profiles) {
        let h = curve.min_spacing();
        let k = prof.k.iter().fold(0.0f64, |m, k| m.max(k.abs()));
        if k * h > 1.0 {
            return Err(Error::BlowUp {
                curvature: k,
                spacing: h,
            });
        }
        h_min = h_min.min(h);
    }
    let mut dt = config.beta * h_min * h_min;
    let remaining = config.max_time - state.t;
    if remaining > 0.0 && remaining < dt {
        dt = remaining;
    }
    Ok(dt)
}

fn is_hole(curve: &DiscreteCurve) -> bool {
    match (curve.surface().total_area(), curve.enclosed_area_unchecked()) {
        (Some(total), Ok(a)) => a > 0.5 * total,
        _ => false,
    }
}

/// Advances the state by one explicit Euler step.
pub fn step(state: &FlowState, config: &FlowConfig) -> Result<FlowState> {
    let c = config.c;
    let surface = *state.region.surface();
    let dt = stable_dt(state, config)?;
    let mut moved = Vec::with_capacity(state.components().len());
    let mut dropped_hole = false;
    for (curve, prof) in state.components().iter().zip(&state.profiles) {
        let pts: Vec<Point> = curve
            .points()
            .iter()
            .enumerate()
            .map(|(i, p)| surface.displace(p, &(prof.normal[i] * (dt * (prof.k[i] - c)))))
            .collect();
        let next = DiscreteCurve::from_points(surface, pts)?;
        if next.length() < state.extinction_length {
            dropped_hole |= is_hole(&next);
        } else {
            moved.push(next);
        }
    }
    let mut next = state.clone();
    next.t += dt;
    next.step_count += 1;
    next.last_dt = dt;
    next.resampled = false;
    next.resample_shift = 0.0;
    if moved.is_empty() {
        next.region = if dropped_hole {
            Region::full(surface)
        } else {
            Region::empty(surface)
        };
        next.profiles.clear();
        return Ok(next);
    }
    let before = Region::from_components(moved.clone())?;
    let mut any_resampled = false;
    for curve in moved.iter_mut() {
        let target = state.target_spacing.min(curve.mean_spacing());
        let max_seg = curve.segment_lengths().into_iter().fold(0.0, f64::max);
        if curve.spacing_ratio() > RESAMPLE_RATIO || max_seg > RESAMPLE_RATIO * state.target_spacing {
            let m = ((curve.length() / target).round() as usize).clamp(crate::curve::MIN_POINTS, MAX_POINTS);
            *curve = curve.resample_count_raw(m)?;
            any_resampled = true;
        }
    }
    next.region = Region::from_components(moved)?;
    if config.check_embedding && !next.self_intersecting {
        next.self_intersecting = components_self_intersect(next.region.components());
        if next.self_intersecting {
            next.area_valid = false;
        }
    }
    if any_resampled {
        next.resampled = true;
        if next.area_valid {
            let f = |r: &Region| r.area_unchecked().map(|a| r.length() - c * a);
            if let (Ok(a), Ok(b)) = (f(&before), f(&next.region)) {
                next.resample_shift = b - a;
            }
        }
    }
    next.profiles = next.region.profiles()?;
    Ok(next)
}

/// A stored state along a trajectory.
#[derive(Debug, Clone)]
pub struct Snapshot {
    pub step: usize,
    pub t: f64,
    pub components: Vec<DiscreteCurve>,
}

impl Snapshot {
    fn of(state: &FlowState) -> Self {
        Snapshot {
            step: state.step_count,
            t: state.t,
            components: state.components().to_vec(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub c: f64,
    pub diagnostics: Vec<StepDiagnostics>,
    pub snapshots: Vec<Snapshot>,
    pub final_state: FlowState,
    pub termination: Termination,
    /// The error behind a `BlowUp` termination.
    pub error: Option<Error>,
}

impl Trajectory {
    pub fn final_region(&self) -> &Region {
        &self.final_state.region
    }
}

pub fn run(initial: DiscreteCurve, config: &FlowConfig) -> Result<Trajectory> {
    run_region(Region::from_curve(initial), config)
}

pub fn run_region(initial: Region, config: &FlowConfig) -> Result<Trajectory> {
    let state = FlowState::new(initial, config)?;
    drive(state, config)
}

fn drive(mut state: FlowState, config: &FlowConfig) -> Result<Trajectory> {
    let c = config.c;
    let mut diagnostics = vec![state.diagnostics(c)];
    let mut snapshots = vec![Snapshot::of(&state)];
    let mut error = None;
    let termination = loop {
        if state.is_extinct() {
            break Termination::Extinct;
        }
        if diagnostics
            .last()
            .is_some_and(|d| d.grad_norm < config.stop_gradient_norm)
        {
            break Termination::Stationary;
        }
        if state.t >= config.max_time {
            break Termination::MaxTime;
        }
        if state.step_count >= config.max_steps {
            break Termination::MaxSteps;
        }
        match step(&state, config) {
            Ok(next) => state = next,
            Err(e) => {
                error = Some(e);
                break Termination::BlowUp;
            }
        }
        diagnostics.push(state.diagnostics(c));
        if config.record_every > 0 && state.step_count.is_multiple_of(config.record_every) {
            snapshots.push(Snapshot::of(&state));
        }
    };
    if snapshots.last().map(|s| s.step) != Some(state.step_count) {
        snapshots.push(Snapshot::of(&state));
    }
    Ok(Trajectory {
        c,
        diagnostics,
        snapshots,
        final_state: state,
        termination,
        error,
    })
}

fn periodic_sample(prof: &CurvatureProfile, length: f64, sigma: f64) -> f64 {
    let n = prof.len();
    let s = sigma.rem_euclid(1.0) * length;
    let i = prof.s.partition_point(|&x| x <= s).max(1) - 1;
    let (s0, s1) = (prof.s[i], if i + 1 < n { prof.s[i + 1] } else { length });
    let w = if s1 > s0 { (s - s0) / (s1 - s0) } else { 0.0 };
    prof.k[i] * (1.0 - w) + prof.k[(i + 1) % n] * w
}

/// `|k_t - (k_ss + k^2 (k - c) + G (k - c))|` at one vertex of snapshot `step_index`,
/// with time differences taken against the neighbouring snapshots.
pub fn evolution_residual(traj: &Trajectory, vertex_index: usize, step_index: usize) -> Result<f64> {
    if step_index == 0 || step_index + 1 >= traj.snapshots.len() {
        return Err(Error::InsufficientHistory { step: step_index });
    }
    let snaps = &traj.snapshots[step_index - 1..=step_index + 1];
    if snaps.iter().any(|s| s.components.len() != 1) {
        return Err(Error::Unsupported("residual needs single-component snapshots".into()));
    }
    let curves: Vec<&DiscreteCurve> = snaps.iter().map(|s| &s.components[0]).collect();
    let profs = curves
        .iter()
        .map(|c| c.curvature_profile())
        .collect::<Result<Vec<_>>>()?;
    let mid = &profs[1];
    let n = mid.len();
    let i = vertex_index % n;
    let length = curves[1].length();
    let sigma = mid.s[i] / length;
    let k_at = |j: usize| {
        if profs[j].len() == n {
            profs[j].k[i]
        } else {
            periodic_sample(&profs[j], curves[j].length(), sigma)
        }
    };
    let (ka, kb, kc) = (k_at(0), mid.k[i], k_at(2));
    let h1 = snaps[1].t - snaps[0].t;
    let h2 = snaps[2].t - snaps[1].t;
    let k_t = (h1 * h1 * (kc - kb) + h2 * h2 * (kb - ka)) / (h1 * h2 * (h1 + h2));
    let seg_prev = curves[1].segment_length((i + n - 1) % n);
    let seg_next = curves[1].segment_length(i);
    let k_prev = mid.k[(i + n - 1) % n];
    let k_next = mid.k[(i + 1) % n];
    let k_ss = 2.0 * ((k_next - kb) / seg_next - (kb - k_prev) / seg_prev) / (seg_prev + seg_next);
    let g = curves[1].surface().gaussian_curvature(curves[1].point(i));
    let c = traj.c;
    Ok((k_t - (k_ss + kb * kb * (kb - c) + g * (kb - c))).abs())
}

#[derive(Debug, Clone)]
pub struct ContactReport {
    pub contact_vertices: usize,
    pub contact_fraction: f64,
    /// Angle and one-sided curvature comparison at a contact point, when one exists.
    pub touch: Option<TouchReport>,
}

#[derive(Debug, Clone)]
pub struct ConstrainedTrajectory {
    pub trajectory: Trajectory,
    pub contact: ContactReport,
}

fn contact_mask(curve: &DiscreteCurve, obstacle: &DiscreteCurve) -> Vec<bool> {
    let tol = 1e-3 * curve.mean_spacing().min(obstacle.mean_spacing());
    curve.points().iter().map(|p| obstacle.distance_to(p) <= tol).collect()
}

/// Projected normal speed: vertices resting on the obstacle cannot move outward.
fn projected_grad_norm(state: &FlowState, obstacle: &DiscreteCurve, c: f64) -> f64 {
    let mut total = 0.0;
    for (curve, prof) in state.components().iter().zip(state.profiles()) {
        let mask = contact_mask(curve, obstacle);
        for ((k, w), resting) in prof.k.iter().zip(&prof.weight).zip(mask) {
            let v = k - c;
            if !(resting && v < 0.0) {
                total += v * v * w;
            }
        }
    }
    total.sqrt()
}

/// The c-flow constrained to stay inside `obstacle`: vertices that leave are
/// moved to the closest point of the obstacle boundary.
pub fn constrained_flow(initial: Region, obstacle: Region, config: &FlowConfig) -> Result<ConstrainedTrajectory> {
    let obs = match obstacle.components() {
        [one] => one.clone(),
        _ => {
            return Err(Error::Unsupported(
                "obstacle must have exactly one boundary curve".into(),
            ))
        }
    };
    let tol = 1e-9 * (1.0 + obs.length());
    for curve in initial.components() {
        for p in curve.points() {
            if !obs.contains(p)? && obs.distance_to(p) > tol {
                return Err(Error::NotNested);
            }
        }
    }
    let c = config.c;
    let mut state = FlowState::new(initial, config)?;
    let mut diagnostics = vec![state.diagnostics(c)];
    let mut snapshots = vec![Snapshot::of(&state)];
    let mut error = None;
    let project = |s: FlowState| -> Result<FlowState> {
        let surface = *s.region.surface();
        let mut comps = Vec::new();
        for curve in s.components() {
            let pts: Vec<Point> = curve
                .points()
                .iter()
                .map(|p| {
                    if obs.contains(p).unwrap_or(true) {
                        Ok(*p)
                    } else {
                        Ok(obs.closest_point(p).0)
                    }
                })
                .collect::<Result<_>>()?;
            comps.push(DiscreteCurve::from_points(surface, pts)?);
        }
        let mut s = s;
        if comps.is_empty() {
            return Ok(s);
        }
        s.region = Region::from_components(comps)?;
        s.profiles = s.region.profiles()?;
        Ok(s)
    };
    let termination = loop {
        if state.is_extinct() {
            break Termination::Extinct;
        }
        let g = projected_grad_norm(&state, &obs, c);
        if g < config.stop_gradient_norm {
            let touching = state
                .components()
                .iter()
                .any(|cv| contact_mask(cv, &obs).into_iter().any(|b| b));
            break if touching {
                Termination::Obstructed
            } else {
                Termination::Stationary
            };
        }
        if state.t >= config.max_time {
            break Termination::MaxTime;
        }
        if state.step_count >= config.max_steps {
            break Termination::MaxSteps;
        }
        match step(&state, config).and_then(project) {
            Ok(next) => state = next,
            Err(e) => {
                error = Some(e);
                break Termination::BlowUp;
            }
        }
        diagnostics.push(state.diagnostics(c));
        if config.record_every > 0 && state.step_count.is_multiple_of(config.record_every) {
            snapshots.push(Snapshot::of(&state));
        }
    };
    if snapshots.last().map(|s| s.step) != Some(state.step_count) {
        snapshots.push(Snapshot::of(&state));
    }
    let mut contact = ContactReport {
        contact_vertices: 0,
        contact_fraction: 0.0,
        touch: None,
    };
    if let [curve] = state.components() {
        let mask = contact_mask(curve, &obs);
        contact.contact_vertices = mask.iter().filter(|b| **b).count();
        contact.contact_fraction = contact.contact_vertices as f64 / curve.len() as f64;
        if let Some(i) = mask.iter().position(|b| *b) {
            contact.touch = touch_comparison(curve, &obs, curve.point(i)).ok();
        }
    }
    Ok(ConstrainedTrajectory {
        trajectory: Trajectory {
            c,
            diagnostics,
            snapshots,
            final_state: state,
            termination,
            error,
        },
        contact,
    })
}

/// Mean distance of the vertices from their centroid (flat surfaces).
pub fn mean_radius(curve: &DiscreteCurve) -> f64 {
    let lift = curve.lift();
    let n = curve.len();
    let center = lift[..n].iter().sum::<nalgebra::Vector2<f64>>() / n as f64;
    lift[..n].iter().map(|p| (p - center).norm()).sum::<f64>() / n as f64
}

/// Height fraction of a sphere curve: mean of the vertices' `z`.
pub fn mean_height(curve: &DiscreteCurve) -> f64 {
    debug_assert!(matches!(curve.surface(), SurfaceMetric::Sphere { .. }));
    curve.points().iter().map(|p| p.z).sum::<f64>() / curve.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::shapes::{circle, latitude};
    use approx::assert_abs_diff_eq;

    fn plane_circle(r: f64, n: usize) -> DiscreteCurve {
        circle(SurfaceMetric::Plane, &Point::zeros(), r, n).unwrap()
    }

    #[test]
    fn stationary_circle_does_not_move() {
        let cfg = FlowConfig::new(1.0);
        let s0 = FlowState::from_curve(plane_circle(1.0, 128), &cfg).unwrap();
        let s1 = step(&s0, &cfg).unwrap();
        let dt = s1.t;
        for (a, b) in s0.components()[0].points().iter().zip(s1.components()[0].points()) {
            assert!((a - b).norm() <= 1e-6 * dt);
        }
        let traj = run(plane_circle(1.0, 128), &cfg).unwrap();
        assert_eq!(traj.termination, Termination::Stationary);
        assert!(traj.diagnostics.len() <= 10);
    }

    #[test]
    fn single_step_radius_change() {
        let cfg = FlowConfig::new(1.0);
        for (r, rate) in [(0.5, -1.0), (2.0, 0.5)] {
            let s0 = FlowState::from_curve(plane_circle(r, 256), &cfg).unwrap();
            let s1 = step(&s0, &cfg).unwrap();
            let dr = mean_radius(&s1.components()[0]) - mean_radius(&s0.components()[0]);
            assert_abs_diff_eq!(dr, rate * s1.t, epsilon = 1e-3 * s1.t);
        }
    }

    #[test]
    fn shrinking_circle_goes_extinct() {
        let traj = run(plane_circle(0.5, 128), &FlowConfig::new(1.0)).unwrap();
        assert_eq!(traj.termination, Termination::Extinct);
        assert!(traj.final_region().is_empty());
        let te = crate::oracle::circle_extinction_time(0.5, 1.0).unwrap();
        assert!((traj.final_state.t - te).abs() < 1e-2);
    }

    #[test]
    fn growing_circle_hits_max_time() {
        let mut cfg = FlowConfig::new(1.0);
        cfg.max_time = 1.0;
        let traj = run(plane_circle(2.0, 128), &cfg).unwrap();
        assert_eq!(traj.termination, Termination::MaxTime);
        assert_abs_diff_eq!(traj.final_state.t, 1.0, epsilon = 1e-12);
        for w in traj.diagnostics.windows(2) {
            assert!(w[1].length > w[0].length);
        }
    }

    #[test]
    fn blow_up_is_a_termination() {
        // a star whose spikes turn by almost pi at every vertex
        let pts: Vec<Point> = (0..32)
            .map(|i| {
                let a = std::f64::consts::TAU * i as f64 / 32.0;
                let r = if i % 2 == 0 { 1.5 } else { 0.5 };
                Point::new(r * a.cos(), r * a.sin(), 0.0)
            })
            .collect();
        let curve = DiscreteCurve::new(SurfaceMetric::Plane, pts).unwrap();
        let traj = run(curve, &FlowConfig::new(1.0)).unwrap();
        assert_eq!(traj.termination, Termination::BlowUp);
        assert!(
            matches!(traj.error, Some(Error::BlowUp { .. })),
            "{:?} {:?}",
            traj.termination,
            traj.error
        );
    }

    #[test]
    fn residual_needs_history() {
        let mut cfg = FlowConfig::new(1.0);
        cfg.max_steps = 3;
        cfg.record_every = 1;
        let traj = run(plane_circle(0.5, 64), &cfg).unwrap();
        assert!(evolution_residual(&traj, 0, 0).is_err());
        assert!(evolution_residual(&traj, 0, 3).is_err());
        assert!(evolution_residual(&traj, 5, 1).is_ok());
    }

    #[test]
    fn stationary_circle_residual_vanishes() {
        let mut cfg = FlowConfig::new(1.0);
        cfg.max_steps = 4;
        cfg.record_every = 1;
        cfg.stop_gradient_norm = 0.0;
        let traj = run(plane_circle(1.0, 128), &cfg).unwrap();
        assert!(evolution_residual(&traj, 7, 2).unwrap() < 1e-6);
    }

    #[test]
    fn sphere_cap_below_shrinks() {
        let s = SurfaceMetric::sphere(1.0).unwrap();
        let cap = latitude(s, -0.9, 128, true).unwrap();
        let traj = run(cap, &FlowConfig::new(1.0)).unwrap();
        assert_eq!(traj.termination, Termination::Extinct);
    }

    #[test]
    fn complement_of_small_cap_becomes_full() {
        let s = SurfaceMetric::sphere(1.0).unwrap();
        let hole = latitude(s, -0.9, 128, true).unwrap().reversed();
        let traj = run(hole, &FlowConfig::new(0.5)).unwrap();
        assert_eq!(traj.termination, Termination::Extinct);
        assert!(traj.final_region().is_full());
    }

    #[test]
    fn constrained_rejects_unnested() {
        let r = Region::from_curve(plane_circle(2.0, 64));
        let o = Region::from_curve(plane_circle(1.0, 64));
        assert!(matches!(
            constrained_flow(r, o, &FlowConfig::new(1.0)),
            Err(Error::NotNested)
        ));
    }

    #[test]
    fn config_validation() {
        let mut cfg = FlowConfig::new(1.0);
        cfg.beta = 0.6;
        assert!(cfg.validate().is_err());
        cfg.beta = 0.5;
        assert!(cfg.validate().is_ok());
        cfg.c = -1.0;
        assert!(cfg.validate().is_err());
    }
}
