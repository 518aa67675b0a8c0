//! The functional `F_c(R) = Length(dR) - c * Area(R)`, its first variation and gradient.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::curve::{components_self_intersect, CurvatureProfile, DiscreteCurve};
use crate::error::{Error, Result};
use crate::surface::{Point, SurfaceMetric};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FcValue {
    pub c: f64,
    pub length_term: f64,
    pub area_term: f64,
    pub value: f64,
}

impl FcValue {
    pub fn new(c: f64, length_term: f64, area_term: f64) -> Self {
        FcValue {
            c,
            length_term,
            area_term,
            value: length_term - c * area_term,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum RegionKind {
    Empty,
    Full,
    /// Region to the left of every boundary component.
    Bounded(Vec<DiscreteCurve>),
}

/// An open set of the surface with polygonal boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    surface: SurfaceMetric,
    kind: RegionKind,
    witness: Option<Point>,
}

impl Region {
    pub fn empty(surface: SurfaceMetric) -> Self {
        Region {
            surface,
            kind: RegionKind::Empty,
            witness: None,
        }
    }

    pub fn full(surface: SurfaceMetric) -> Self {
        Region {
            surface,
            kind: RegionKind::Full,
            witness: None,
        }
    }

    pub fn from_curve(curve: DiscreteCurve) -> Self {
        Region {
            surface: *curve.surface(),
            kind: RegionKind::Bounded(vec![curve]),
            witness: None,
        }
    }

    pub fn from_components(components: Vec<DiscreteCurve>) -> Result<Self> {
        let Some(first) = components.first() else {
            return Err(Error::InvalidParameter(
                "region needs at least one boundary component".into(),
            ));
        };
        let surface = *first.surface();
        if components.iter().any(|c| *c.surface() != surface) {
            return Err(Error::InvalidParameter(
                "boundary components on different surfaces".into(),
            ));
        }
        Ok(Region {
            surface,
            kind: RegionKind::Bounded(components),
            witness: None,
        })
    }

    /// Attaches an interior witness point, checking that it lies in the region.
    pub fn with_witness(mut self, p: Point) -> Result<Self> {
        let p = self.surface.normalize(&p);
        if !self.contains(&p)? {
            return Err(Error::InvalidParameter("witness point is outside the region".into()));
        }
        self.witness = Some(p);
        Ok(self)
    }

    pub fn witness(&self) -> Option<&Point> {
        self.witness.as_ref()
    }

    pub fn surface(&self) -> &SurfaceMetric {
        &self.surface
    }

    pub fn kind(&self) -> &RegionKind {
        &self.kind
    }

    pub fn is_empty(&self) -> bool {
        matches!(self.kind, RegionKind::Empty)
    }

    pub fn is_full(&self) -> bool {
        matches!(self.kind, RegionKind::Full)
    }

    pub fn components(&self) -> &[DiscreteCurve] {
        match &self.kind {
            RegionKind::Bounded(c) => c,
            _ => &[],
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.components().iter().map(|c| c.len()).sum()
    }

    pub fn length(&self) -> f64 {
        self.components().iter().map(|c| c.length()).fold(0.0, |a, b| a + b)
    }

    pub fn is_self_intersecting(&self) -> bool {
        components_self_intersect(self.components())
    }

    pub fn area(&self) -> Result<f64> {
        if self.is_self_intersecting() {
            return Err(Error::SelfIntersection);
        }
        self.area_unchecked()
    }

    /// Area without the embeddedness check.
    pub(crate) fn area_unchecked(&self) -> Result<f64> {
        let comps = match &self.kind {
            RegionKind::Empty => return Ok(0.0),
            RegionKind::Full => {
                return self.surface.total_area().ok_or(Error::UnboundedRegion);
            }
            RegionKind::Bounded(c) => c,
        };
        if comps.len() == 1 {
            return comps[0].enclosed_area_unchecked();
        }
        match self.surface {
            SurfaceMetric::Plane => {
                let a: f64 = comps.iter().map(|c| crate::curve::shoelace(&c.lift())).sum();
                if a <= 0.0 {
                    Err(Error::UnboundedRegion)
                } else {
                    Ok(a)
                }
            }
            SurfaceMetric::FlatTorus { side_l, side_h } => {
                let mut net = [0i64; 2];
                let mut total = 0.0;
                for c in comps {
                    let w = c.torus_winding();
                    if w[0] != 0 {
                        return Err(Error::NonContractible { winding: w });
                    }
                    net[1] += w[1];
                    let lift = c.lift();
                    total += lift
                        .windows(2)
                        .map(|s| 0.5 * (s[0].x + s[1].x) * (s[1].y - s[0].y))
                        .sum::<f64>();
                }
                if net != [0, 0] {
                    return Err(Error::NonContractible { winding: net });
                }
                Ok(total.rem_euclid(side_l * side_h))
            }
            SurfaceMetric::Sphere { radius } => {
                let mut a = 0.0;
                for c in comps {
                    a += c.enclosed_area_unchecked()?;
                }
                Ok(a - (comps.len() as f64 - 1.0) * 4.0 * std::f64::consts::PI * radius * radius)
            }
        }
    }

    /// Membership test; supported for the sentinels and single-component regions.
    pub fn contains(&self, q: &Point) -> Result<bool> {
        match &self.kind {
            RegionKind::Empty => Ok(false),
            RegionKind::Full => Ok(true),
            RegionKind::Bounded(c) if c.len() == 1 => c[0].contains(q),
            RegionKind::Bounded(_) => Err(Error::Unsupported("membership for multi-component regions".into())),
        }
    }

    /// Curvature profiles of the boundary components, in order.
    pub fn profiles(&self) -> Result<Vec<CurvatureProfile>> {
        self.components().iter().map(|c| c.curvature_profile()).collect()
    }

    /// Moves every boundary vertex by `h * phi_i` along its inward normal.
    pub fn perturbed(&self, phi: &[f64], h: f64) -> Result<Region> {
        self.check_arity(phi.len())?;
        let mut offset = 0;
        let mut comps = Vec::new();
        for c in self.components() {
            let prof = c.curvature_profile()?;
            let pts = c
                .points()
                .iter()
                .enumerate()
                .map(|(i, p)| {
                    let v: Vector3<f64> = prof.normal[i] * (h * phi[offset + i]);
                    self.surface.displace(p, &v)
                })
                .collect();
            offset += c.len();
            comps.push(DiscreteCurve::from_points(self.surface, pts)?);
        }
        if comps.is_empty() {
            return Ok(self.clone());
        }
        Region::from_components(comps)
    }

    fn check_arity(&self, got: usize) -> Result<()> {
        let expected = self.vertex_count();
        if got != expected {
            return Err(Error::LengthMismatch { expected, got });
        }
        Ok(())
    }
}

fn check_c(c: f64) -> Result<()> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidParameter(format!("c must be positive, got {c}")));
    }
    Ok(())
}

/// `F_c` of a region.
pub fn eval_fc(region: &Region, c: f64) -> Result<FcValue> {
    check_c(c)?;
    Ok(FcValue::new(c, region.length(), region.area()?))
}

/// Per-vertex normal speeds `k_i - c` along the inward normals.
#[derive(Debug, Clone)]
pub struct GradientField {
    pub speed: Vec<f64>,
    pub normal: Vec<Vector3<f64>>,
    pub weight: Vec<f64>,
}

impl GradientField {
    /// Discrete L2 norm `sqrt(sum (k_i - c)^2 ds_i)`.
    pub fn l2_norm(&self) -> f64 {
        self.speed
            .iter()
            .zip(&self.weight)
            .map(|(v, w)| v * v * w)
            .sum::<f64>()
            .sqrt()
    }
}

pub fn fc_gradient(region: &Region, c: f64) -> Result<GradientField> {
    check_c(c)?;
    let mut g = GradientField {
        speed: Vec::new(),
        normal: Vec::new(),
        weight: Vec::new(),
    };
    for prof in region.profiles()? {
        g.speed.extend(prof.k.iter().map(|k| k - c));
        g.normal.extend(prof.normal);
        g.weight.extend(prof.weight);
    }
    Ok(g)
}

/// Discrete first variation `-sum phi_i (k_i - c) ds_i`; positive `phi` pushes into the region.
pub fn first_variation(region: &Region, c: f64, phi: &[f64]) -> Result<f64> {
    region.check_arity(phi.len())?;
    let g = fc_gradient(region, c)?;
    Ok(-phi
        .iter()
        .zip(g.speed.iter().zip(&g.weight))
        .map(|(f, (v, w))| f * v * w)
        .sum::<f64>())
}
