//! Curve snapshot JSON and CSV tables.
//!
//! Floating-point numbers are written in scientific notation with 17
//! significant digits, which round-trips every `f64` exactly and makes
//! outputs byte-reproducible.

use std::fmt::Write as _;

use serde::Deserialize;
use serde_json::Value;

use crate::curve::DiscreteCurve;
use crate::error::{Error, Result};
use crate::flow::Trajectory;
use crate::functional::Region;
use crate::minmax::WidthEstimate;
use crate::oracle::LensGeometry;
use crate::surface::{Point, SurfaceMetric};

/// `x` with 17 significant digits; non-finite values become `nan`, `inf`, `-inf`.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

fn surface_json(s: &SurfaceMetric) -> String {
    match *s {
        SurfaceMetric::Plane => r#"{"kind": "plane", "params": {}}"#.into(),
        SurfaceMetric::FlatTorus { side_l, side_h } => format!(
            r#"{{"kind": "flat_torus", "params": {{"side_l": {}, "side_h": {}}}}}"#,
            fmt_f64(side_l),
            fmt_f64(side_h)
        ),
        SurfaceMetric::Sphere { radius } => {
            format!(r#"{{"kind": "sphere", "params": {{"radius": {}}}}}"#, fmt_f64(radius))
        }
    }
}

fn points_json(out: &mut String, curve: &DiscreteCurve, indent: &str) {
    let dim = if curve.surface().is_flat() { 2 } else { 3 };
    out.push('[');
    for (i, p) in curve.points().iter().enumerate() {
        out.push_str(if i == 0 { "\n" } else { ",\n" });
        out.push_str(indent);
        out.push('[');
        for d in 0..dim {
            if d > 0 {
                out.push_str(", ");
            }
            out.push_str(&fmt_f64(p[d]));
        }
        out.push(']');
    }
    out.push('\n');
    out.push_str(&indent[2..]);
    out.push(']');
}

/// Snapshot of a single curve.
pub fn curve_to_json(curve: &DiscreteCurve) -> String {
    let mut out = format!("{{\n  \"surface\": {},\n  \"points\": ", surface_json(curve.surface()));
    points_json(&mut out, curve, "    ");
    out.push_str(",\n  \"orientation\": \"left\"\n}\n");
    out
}

/// Snapshot of a region: one curve uses `points`, several use `components`,
/// and the sentinels carry `"region": "empty"` or `"full"` with no points.
pub fn region_to_json(region: &Region) -> String {
    let surface = surface_json(region.surface());
    if region.is_empty() || region.is_full() {
        let which = if region.is_empty() { "empty" } else { "full" };
        return format!(
            "{{\n  \"surface\": {surface},\n  \"region\": \"{which}\",\n  \"points\": [],\n  \"orientation\": \"left\"\n}}\n"
        );
    }
    let comps = region.components();
    if comps.len() == 1 {
        return curve_to_json(&comps[0]);
    }
    let mut out = format!("{{\n  \"surface\": {surface},\n  \"components\": [");
    for (i, c) in comps.iter().enumerate() {
        out.push_str(if i == 0 { "\n    " } else { ",\n    " });
        points_json(&mut out, c, "      ");
    }
    out.push_str("\n  ],\n  \"orientation\": \"left\"\n}\n");
    out
}

#[derive(Deserialize)]
struct SurfaceJson {
    kind: String,
    #[serde(default)]
    params: serde_json::Map<String, Value>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Snapshot {
    surface: SurfaceJson,
    #[serde(default)]
    points: Vec<Vec<f64>>,
    #[serde(default)]
    components: Vec<Vec<Vec<f64>>>,
    #[serde(default)]
    region: Option<String>,
    #[serde(default = "default_orientation")]
    orientation: String,
}

fn default_orientation() -> String {
    "left".into()
}

fn parse_surface(desc: &SurfaceJson) -> Result<SurfaceMetric> {
    let param = |name: &str| {
        desc.params
            .get(name)
            .and_then(Value::as_f64)
            .ok_or_else(|| Error::Parse(format!("surface `{}` needs numeric `{name}`", desc.kind)))
    };
    match desc.kind.as_str() {
        "plane" => Ok(SurfaceMetric::Plane),
        "flat_torus" => SurfaceMetric::flat_torus(param("side_l")?, param("side_h")?),
        "sphere" => SurfaceMetric::sphere(param("radius")?),
        other => Err(Error::Parse(format!("unknown surface kind `{other}`"))),
    }
}

pub fn parse_surface_json(text: &str) -> Result<SurfaceMetric> {
    let desc: SurfaceJson = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    parse_surface(&desc)
}

fn parse_points(surface: &SurfaceMetric, raw: &[Vec<f64>], reverse: bool) -> Result<DiscreteCurve> {
    let dim = if surface.is_flat() { 2 } else { 3 };
    let mut pts = raw
        .iter()
        .map(|p| match (p.len(), dim) {
            (2, 2) => Ok(Point::new(p[0], p[1], 0.0)),
            (3, 3) => Ok(Point::new(p[0], p[1], p[2])),
            (n, d) => Err(Error::Parse(format!("point has {n} coordinates, expected {d}"))),
        })
        .collect::<Result<Vec<_>>>()?;
    if reverse {
        pts.reverse();
    }
    DiscreteCurve::new(*surface, pts)
}

/// Reads a snapshot written by [`region_to_json`] or [`curve_to_json`].
pub fn region_from_json(text: &str) -> Result<Region> {
    let snap: Snapshot = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let surface = parse_surface(&snap.surface)?;
    let reverse = match snap.orientation.as_str() {
        "left" => false,
        "right" => true,
        o => {
            return Err(Error::Parse(format!(
                "orientation must be `left` or `right`, got `{o}`"
            )))
        }
    };
    match snap.region.as_deref() {
        Some("empty") => return Ok(Region::empty(surface)),
        Some("full") => return Ok(Region::full(surface)),
        Some(other) => return Err(Error::Parse(format!("unknown region sentinel `{other}`"))),
        None => {}
    }
    match (snap.points.is_empty(), snap.components.is_empty()) {
        (false, true) => Ok(Region::from_curve(parse_points(&surface, &snap.points, reverse)?)),
        (true, false) => Region::from_components(
            snap.components
                .iter()
                .map(|c| parse_points(&surface, c, reverse))
                .collect::<Result<_>>()?,
        ),
        (true, true) => Err(Error::Parse("snapshot has no points".into())),
        (false, false) => Err(Error::Parse("snapshot has both `points` and `components`".into())),
    }
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| "nan".into(), fmt_f64)
}

/// Per-step diagnostics; `F_c` and `area` read `nan` once the area is no longer valid.
pub fn trajectory_csv(traj: &Trajectory) -> String {
    let mut out = String::from("step,t,F_c,length,area,k_min,k_max,grad_norm,self_intersecting\n");
    for d in &traj.diagnostics {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            d.step,
            fmt_f64(d.t),
            opt(d.fc),
            fmt_f64(d.length),
            opt(d.area),
            fmt_f64(d.k_min),
            fmt_f64(d.k_max),
            fmt_f64(d.grad_norm),
            d.self_intersecting
        );
    }
    out
}

pub fn profile_csv(est: &WidthEstimate) -> String {
    let mut out = String::from("t,F_c,length,area\n");
    for p in &est.profile {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            fmt_f64(p.t),
            fmt_f64(p.fc),
            fmt_f64(p.length),
            fmt_f64(p.area)
        );
    }
    out
}

/// Closed-form lens values per `c`; infeasible rows carry the marker `infeasible`.
pub fn lens_table_csv(side_l: f64, side_h: f64, cs: &[f64]) -> String {
    let mut out = String::from("c,exact_length,exact_area,exact_fc,(2-fc)/c^2\n");
    for &c in cs {
        match LensGeometry::new(side_l, side_h, c) {
            Ok(g) => {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{}",
                    fmt_f64(c),
                    fmt_f64(g.length()),
                    fmt_f64(g.area()),
                    fmt_f64(g.fc()),
                    fmt_f64((2.0 - g.fc()) / (c * c))
                );
            }
            Err(_) => {
                let _ = writeln!(out, "{},infeasible,infeasible,infeasible,infeasible", fmt_f64(c));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::shapes;
    use crate::minmax::{eval_family, latitude_family_with};

    #[test]
    fn number_format() {
        assert_eq!(fmt_f64(1.0), "1.0000000000000000e0");
        assert_eq!(fmt_f64(-0.1), "-1.0000000000000001e-1");
        assert_eq!(fmt_f64(f64::NAN), "nan");
        for x in [std::f64::consts::PI, 1e-300, -123456.789, f64::MIN_POSITIVE] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap().to_bits(), x.to_bits());
        }
    }

    #[test]
    fn curve_round_trip_is_exact() {
        for s in [
            SurfaceMetric::Plane,
            SurfaceMetric::flat_torus(3.0, 1.0).unwrap(),
            SurfaceMetric::sphere(1.3).unwrap(),
        ] {
            let p = match s {
                SurfaceMetric::Sphere { radius } => Point::new(0.0, 0.0, -radius),
                _ => Point::new(0.7, 0.4, 0.0),
            };
            let curve = shapes::circle(s, &p, 0.3, 97).unwrap();
            let text = curve_to_json(&curve);
            let back = region_from_json(&text).unwrap();
            let c2 = &back.components()[0];
            assert_eq!(back.surface(), &s);
            for (a, b) in curve.points().iter().zip(c2.points()) {
                assert_eq!(a, b);
            }
            assert_eq!(region_to_json(&back), text);
        }
    }

    #[test]
    fn sentinels_and_components() {
        let s = SurfaceMetric::flat_torus(3.0, 1.0).unwrap();
        for r in [Region::empty(s), Region::full(s)] {
            let back = region_from_json(&region_to_json(&r)).unwrap();
            assert_eq!(back.is_empty(), r.is_empty());
            assert_eq!(back.is_full(), r.is_full());
        }
        let a = shapes::circle(s, &Point::new(0.6, 0.5, 0.0), 0.3, 64).unwrap();
        let b = shapes::circle(s, &Point::new(2.0, 0.5, 0.0), 0.3, 64).unwrap();
        let r = Region::from_components(vec![a, b]).unwrap();
        let back = region_from_json(&region_to_json(&r)).unwrap();
        assert_eq!(back.components().len(), 2);
        assert_eq!(back.area().unwrap(), r.area().unwrap());
    }

    #[test]
    fn right_orientation_is_reversed() {
        let text = r#"{"surface": {"kind": "plane", "params": {}},
            "points": [[1,0],[1,-1],[0,-1],[-1,-1],[-1,0],[-1,1],[0,1],[1,1]], "orientation": "right"}"#;
        let r = region_from_json(text).unwrap();
        assert!(r.area().unwrap() > 0.0);
        assert_eq!(r.components()[0].points()[0], Point::new(1.0, 1.0, 0.0));
    }

    #[test]
    fn parse_errors() {
        for bad in [
            "not json",
            r#"{"surface": {"kind": "cube", "params": {}}, "points": [[0,0]]}"#,
            r#"{"surface": {"kind": "sphere", "params": {}}, "points": [[0,0,1]]}"#,
            r#"{"surface": {"kind": "plane", "params": {}}, "points": []}"#,
            r#"{"surface": {"kind": "plane", "params": {}}, "points": [[0,0,0],[1,0,0],[0,1,0]]}"#,
            r#"{"surface": {"kind": "plane", "params": {}}, "region": "half"}"#,
        ] {
            assert_eq!(region_from_json(bad).unwrap_err().name(), "parse-error", "{bad}");
        }
        let degenerate = r#"{"surface": {"kind": "plane", "params": {}}, "points": [[0,0],[1,0]]}"#;
        assert!(region_from_json(degenerate).unwrap_err().is_geometric());
    }

    #[test]
    fn tables() {
        let t = lens_table_csv(3.0, 1.0, &[1.0, 5.0]);
        let lines: Vec<&str> = t.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[2].ends_with("infeasible"));
        let est = eval_family(
            &latitude_family_with(&SurfaceMetric::sphere(1.0).unwrap(), 64).unwrap(),
            0.5,
            16,
        )
        .unwrap();
        let csv = profile_csv(&est);
        assert_eq!(csv.lines().count(), est.profile.len() + 1);
        assert_eq!(csv, profile_csv(&est));
    }
}
