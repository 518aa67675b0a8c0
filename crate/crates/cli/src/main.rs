use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use ccurve::corners::{round_corner, RoundingDirection};
use ccurve::curve::{detect_corners, shapes, DiscreteCurve, DEFAULT_CORNER_THRESHOLD};
use ccurve::flow::{run_region, FlowConfig, Termination};
use ccurve::functional::{eval_fc, Region};
use ccurve::io;
use ccurve::minmax::{eval_family, latitude_family_with, lens_family_with};
use ccurve::oracle::lens_curve;
use ccurve::surface::{Point, SurfaceMetric};
use ccurve::Error;
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(
    name = "ccurve",
    version,
    about = "Curves of prescribed geodesic curvature on model surfaces"
)]
struct Cli {
    /// Where to write the run manifest; defaults to `<first output>.manifest.json`.
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate Length - c Area of the region in a curve file.
    Eval {
        /// Curve snapshot (JSON).
        curve: PathBuf,
        /// Curvature constant c > 0.
        #[arg(long)]
        c: f64,
    },
    /// Run the c-flow from a curve file.
    Flow(FlowArgs),
    /// Round one corner of a curve.
    Round {
        /// Curve snapshot (JSON).
        curve: PathBuf,
        /// Index into the detected wedges (corners in order, one wedge per passage).
        #[arg(long, default_value_t = 0)]
        corner: usize,
        /// Radius of the inserted arc.
        #[arg(long)]
        epsilon: f64,
        /// Curvature constant c > 0.
        #[arg(long)]
        c: f64,
        /// Round the complementary wedge instead, adding area.
        #[arg(long)]
        outward: bool,
        /// Write the rounded curve here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Profile a sweepout family and estimate its width.
    Width {
        family: FamilyName,
        #[command(flatten)]
        surface: SurfaceArgs,
        /// Curvature constant c > 0.
        #[arg(long)]
        c: f64,
        /// Grid size before the argmax is refined (at least 16).
        #[arg(long, default_value_t = 64)]
        n_slices: usize,
        /// Boundary vertices per slice.
        #[arg(long, default_value_t = 4096)]
        resolution: usize,
        /// Write the profile CSV (t, F_c, length, area) here.
        #[arg(long)]
        out_profile: Option<PathBuf>,
    },
    /// Closed-form lens values for a list of c.
    LensTable {
        #[arg(long, default_value_t = 3.0)]
        side_l: f64,
        #[arg(long, default_value_t = 1.0)]
        side_h: f64,
        /// Comma-separated values of c.
        #[arg(long, value_delimiter = ',', required = true)]
        c: Vec<f64>,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a standard curve as a snapshot file.
    #[command(allow_negative_numbers = true)]
    MakeCurve {
        shape: Shape,
        #[command(flatten)]
        surface: SurfaceArgs,
        /// Circle radius, or square side.
        #[arg(long, default_value_t = 1.0)]
        size: f64,
        /// Centre (or lower-left corner) as `x,y` on flat surfaces.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "0,0")]
        at: Vec<f64>,
        /// Latitude height as a fraction of the radius.
        #[arg(long, default_value_t = 0.0)]
        z: f64,
        /// Put the cap above the latitude on the left instead of the one below.
        #[arg(long)]
        above: bool,
        /// Curvature for the lens.
        #[arg(long, default_value_t = 1.0)]
        c: f64,
        /// Number of vertices.
        #[arg(long, default_value_t = 256)]
        n: usize,
        /// Seed for the random shape.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Re-execute the command recorded in a manifest.
    Rerun { manifest: PathBuf },
}

#[derive(Args, Debug)]
struct FlowArgs {
    /// Curve snapshot (JSON).
    curve: PathBuf,
    /// Curvature constant c >= 0.
    #[arg(long)]
    c: f64,
    /// Time step as a multiple of the squared minimal spacing.
    #[arg(long, default_value_t = 0.25)]
    beta: f64,
    #[arg(long, default_value_t = 10.0)]
    max_time: f64,
    #[arg(long, default_value_t = 1_000_000)]
    max_steps: usize,
    /// Stop once the L2 norm of k - c falls below this.
    #[arg(long, default_value_t = 1e-6)]
    stop_grad: f64,
    /// Write per-step diagnostics as CSV here.
    #[arg(long)]
    out_traj: Option<PathBuf>,
    /// Write the final region as a snapshot here.
    #[arg(long)]
    out_final: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct SurfaceArgs {
    #[arg(long, value_enum, default_value_t = SurfaceKind::Plane)]
    surface: SurfaceKind,
    /// Torus side lengths.
    #[arg(long, default_value_t = 3.0)]
    side_l: f64,
    #[arg(long, default_value_t = 1.0)]
    side_h: f64,
    /// Sphere radius.
    #[arg(long, default_value_t = 1.0)]
    radius: f64,
}

impl SurfaceArgs {
    fn metric(&self) -> Result<SurfaceMetric, Error> {
        match self.surface {
            SurfaceKind::Plane => Ok(SurfaceMetric::Plane),
            SurfaceKind::Torus => SurfaceMetric::flat_torus(self.side_l, self.side_h),
            SurfaceKind::Sphere => SurfaceMetric::sphere(self.radius),
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum SurfaceKind {
    Plane,
    Torus,
    Sphere,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum FamilyName {
    Lens,
    Latitude,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Shape {
    Circle,
    Square,
    Latitude,
    Lens,
    Random,
    Empty,
    Full,
}

#[derive(Serialize, Deserialize, Debug)]
struct RunManifest {
    command: String,
    parameters: BTreeMap<String, Value>,
    inputs: Vec<PathBuf>,
    outputs: Vec<PathBuf>,
    seed: u64,
    version: String,
    /// Arguments after the program name; `rerun` replays them.
    argv: Vec<String>,
}

/// Failure with its process exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::BlowUp { .. } => 4,
            Error::CertificationFailed(_) | Error::EpsilonTooLarge { .. } | Error::AngleTooLarge { .. } => 5,
            e if e.is_geometric() => 3,
            _ => 2,
        };
        Failure {
            code,
            message: format!("{}: {e}", e.name()),
        }
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure {
        code: 2,
        message: format!("io-error: {}: {e}", path.display()),
    }
}

struct Outcome {
    stdout: String,
    outputs: Vec<(PathBuf, String)>,
    parameters: BTreeMap<String, Value>,
    inputs: Vec<PathBuf>,
    seed: u64,
    code: u8,
}

impl Outcome {
    fn new(stdout: String) -> Self {
        Outcome {
            stdout,
            outputs: Vec::new(),
            parameters: BTreeMap::new(),
            inputs: Vec::new(),
            seed: 0,
            code: 0,
        }
    }

    fn param(mut self, key: &str, v: impl Serialize) -> Self {
        self.parameters.insert(key.into(), json!(v));
        self
    }

    fn output(mut self, path: &Option<PathBuf>, contents: String) -> Self {
        if let Some(p) = path {
            self.outputs.push((p.clone(), contents));
        }
        self
    }
}

fn read_region(path: &Path) -> Result<Region, Failure> {
    let text = fs::read_to_string(path).map_err(|e| io_failure(path, e))?;
    Ok(io::region_from_json(&text)?)
}

fn random_curve(
    surface: SurfaceMetric,
    center: &Point,
    size: f64,
    n: usize,
    seed: u64,
) -> Result<DiscreteCurve, Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coeffs: Vec<(f64, f64)> = (0..4)
        .map(|_| (rng.gen_range(-0.05..0.05), rng.gen_range(-0.05..0.05)))
        .collect();
    shapes::fourier_curve(surface, center, size, &coeffs, n)
}

fn execute(command: &Command) -> Result<Outcome, Failure> {
    match command {
        Command::Eval { curve, c } => {
            let region = read_region(curve)?;
            let v = eval_fc(&region, *c)?;
            let out = json!({"length": v.length_term, "area": v.area_term, "fc": v.value});
            let mut o = Outcome::new(format!("{out}\n")).param("c", c);
            o.inputs.push(curve.clone());
            Ok(o)
        }
        Command::Flow(a) => {
            let region = read_region(&a.curve)?;
            let mut cfg = FlowConfig::new(a.c);
            cfg.beta = a.beta;
            cfg.max_time = a.max_time;
            cfg.max_steps = a.max_steps;
            cfg.stop_gradient_norm = a.stop_grad;
            let traj = run_region(region, &cfg)?;
            let last = traj.diagnostics.last();
            let summary = json!({
                "termination": traj.termination.as_str(),
                "steps": last.map_or(0, |d| d.step),
                "t": last.map_or(0.0, |d| d.t),
                "fc": last.and_then(|d| d.fc),
                "length": last.map_or(0.0, |d| d.length),
                "self_intersecting": last.is_some_and(|d| d.self_intersecting),
                "error": traj.error.as_ref().map(|e| e.name()),
            });
            let mut o = Outcome::new(format!("{summary}\n"))
                .param("c", a.c)
                .param("beta", a.beta)
                .param("max_time", a.max_time)
                .param("max_steps", a.max_steps)
                .param("stop_grad", a.stop_grad)
                .output(&a.out_traj, io::trajectory_csv(&traj))
                .output(&a.out_final, io::region_to_json(traj.final_region()));
            o.inputs.push(a.curve.clone());
            if traj.termination == Termination::BlowUp {
                o.code = 4;
            }
            Ok(o)
        }
        Command::Round {
            curve,
            corner,
            epsilon,
            c,
            outward,
            out,
        } => {
            let region = read_region(curve)?;
            let [boundary] = region.components() else {
                return Err(Error::Unsupported("rounding needs a single boundary curve".into()).into());
            };
            let cornered = detect_corners(boundary, DEFAULT_CORNER_THRESHOLD)?;
            let wedges = cornered.wedges().len();
            if *corner >= wedges {
                return Err(Error::InvalidParameter(format!("wedge {corner} requested but {wedges} detected")).into());
            }
            let dir = if *outward {
                RoundingDirection::Outward
            } else {
                RoundingDirection::Inward
            };
            let (rounded, report) = round_corner(&cornered, *corner, *epsilon, *c, dir)?;
            let text = serde_json::to_string_pretty(&report).expect("report serializes");
            let mut o = Outcome::new(format!("{text}\n"))
                .param("corner", corner)
                .param("epsilon", epsilon)
                .param("c", c)
                .param("outward", outward)
                .output(out, io::curve_to_json(&rounded));
            o.inputs.push(curve.clone());
            Ok(o)
        }
        Command::Width {
            family,
            surface,
            c,
            n_slices,
            resolution,
            out_profile,
        } => {
            let metric = surface.metric()?;
            let fam = match family {
                FamilyName::Lens => lens_family_with(&metric, *c, *resolution)?,
                FamilyName::Latitude => latitude_family_with(&metric, *resolution)?,
            };
            let est = eval_family(&fam, *c, *n_slices)?;
            let summary = json!({
                "label": est.label,
                "c": est.c,
                "n_slices": est.n_slices,
                "t_star": est.t_star,
                "value": est.value,
            });
            Ok(Outcome::new(format!("{summary}\n"))
                .param("family", format!("{family:?}").to_lowercase())
                .param("surface", format!("{metric:?}"))
                .param("c", c)
                .param("n_slices", n_slices)
                .param("resolution", resolution)
                .output(out_profile, io::profile_csv(&est)))
        }
        Command::LensTable { side_l, side_h, c, out } => {
            let table = io::lens_table_csv(*side_l, *side_h, c);
            let stdout = if out.is_some() { String::new() } else { table.clone() };
            Ok(Outcome::new(stdout)
                .param("side_l", side_l)
                .param("side_h", side_h)
                .param("c", c)
                .output(out, table))
        }
        Command::MakeCurve {
            shape,
            surface,
            size,
            at,
            z,
            above,
            c,
            n,
            seed,
            out,
        } => {
            let metric = surface.metric()?;
            if at.len() != 2 {
                return Err(Error::InvalidParameter("--at takes two coordinates `x,y`".into()).into());
            }
            let anchor = match metric {
                SurfaceMetric::Sphere { radius } => Point::new(0.0, 0.0, -radius),
                _ => Point::new(at[0], at[1], 0.0),
            };
            let region = match shape {
                Shape::Circle => Region::from_curve(shapes::circle(metric, &anchor, *size, *n)?),
                Shape::Square => Region::from_curve(shapes::square(metric, &anchor, *size, (*n / 4).max(2))?),
                Shape::Latitude => Region::from_curve(shapes::latitude(metric, *z, *n, !*above)?),
                Shape::Lens => lens_curve(&metric, *c, *n)?.region(),
                Shape::Random => Region::from_curve(random_curve(metric, &anchor, *size, *n, *seed)?),
                Shape::Empty => Region::empty(metric),
                Shape::Full => Region::full(metric),
            };
            let summary = json!({
                "out": out,
                "components": region.components().len(),
                "vertices": region.vertex_count(),
                "length": region.length(),
            });
            let mut o = Outcome::new(format!("{summary}\n"))
                .param("shape", format!("{shape:?}").to_lowercase())
                .param("size", size)
                .param("z", z)
                .param("c", c)
                .param("n", n)
                .output(&Some(out.clone()), io::region_to_json(&region));
            o.seed = *seed;
            Ok(o)
        }
        Command::Rerun { .. } => unreachable!("rerun is resolved before execution"),
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Eval { .. } => "eval",
        Command::Flow(_) => "flow",
        Command::Round { .. } => "round",
        Command::Width { .. } => "width",
        Command::LensTable { .. } => "lens-table",
        Command::MakeCurve { .. } => "make-curve",
        Command::Rerun { .. } => "rerun",
    }
}

/// The arguments without `--manifest <path>`, so a replay does not overwrite the manifest.
fn strip_manifest(argv: &[String]) -> Vec<String> {
    let mut out = Vec::new();
    let mut skip = false;
    for a in argv {
        if skip {
            skip = false;
        } else if a == "--manifest" {
            skip = true;
        } else if !a.starts_with("--manifest=") {
            out.push(a.clone());
        }
    }
    out
}

fn run(argv: Vec<String>) -> Result<u8, Failure> {
    let cli = Cli::try_parse_from(std::iter::once("ccurve".to_string()).chain(argv.iter().cloned()))
        .unwrap_or_else(|e| e.exit());
    if let Command::Rerun { manifest } = &cli.command {
        let text = fs::read_to_string(manifest).map_err(|e| io_failure(manifest, e))?;
        let m: RunManifest = serde_json::from_str(&text).map_err(|e| Failure {
            code: 2,
            message: format!("parse-error: {e}"),
        })?;
        return run(m.argv);
    }
    let outcome = execute(&cli.command)?;
    for (path, contents) in &outcome.outputs {
        fs::write(path, contents).map_err(|e| io_failure(path, e))?;
    }
    let manifest_path = cli.manifest.clone().or_else(|| {
        outcome
            .outputs
            .first()
            .map(|(p, _)| PathBuf::from(format!("{}.manifest.json", p.display())))
    });
    if let Some(path) = manifest_path {
        let m = RunManifest {
            command: command_name(&cli.command).into(),
            parameters: outcome.parameters.clone(),
            inputs: outcome.inputs.clone(),
            outputs: outcome.outputs.iter().map(|(p, _)| p.clone()).collect(),
            seed: outcome.seed,
            version: env!("CARGO_PKG_VERSION").into(),
            argv: strip_manifest(&argv),
        };
        let text = serde_json::to_string_pretty(&m).expect("manifest serializes");
        fs::write(&path, text + "\n").map_err(|e| io_failure(&path, e))?;
    }
    print!("{}", outcome.stdout);
    Ok(outcome.code)
}

fn main() -> ExitCode {
    match run(std::env::args().skip(1).collect()) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
