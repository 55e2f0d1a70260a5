//! Command-line front end. Every command reads a JSON config and/or flags
//! (flags win), writes its artifacts into the output directory and prints a
//! one-line summary.
//!
//! Exit codes: 0 success, 2 invalid input or a regime the theory does not
//! cover, 1 internal failure (including a check that fails).

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{require_nonnegative, require_positive, Error, Regime, Result};
use crate::experiments::{ball_compare, concentration_profile, cookie_sweep};
use crate::functionals::{eval_f0, eval_f1, uniform_baseline, PhysicsParams, ThicknessField};
use crate::geometry::{
    alexandrov_fenchel_check, circle_mesh, cookie_boundary, discretize_parametric_curve,
    discretize_sphere, ellipse_mesh, fmt17, spheroid_mesh, BoundaryMesh, CookieSpec, PolarCurve,
};
use crate::optimizer::{optimize, OptimizerReport};
use crate::oracle::{
    fiber_expansion_check, radial_expansion_check, recovery_energy, ExpansionReport,
};

const OUTPUTS_HELP: &str = "\
Outputs (written to --out, default the current directory):
  evaluate       evaluate.json, mesh.csv
  optimize       optimize.json, mu.csv, mesh.csv
  verify-radial  radial.json, radial.csv
  verify-fiber   fiber.json, fiber.csv
  cookie-sweep   cookie_sweep_<hash>.json, cookie_sweep_<hash>.csv
  ball-compare   ball_compare_<hash>.json, ball_compare_<hash>.csv
  af-check       af_check.json
  concentration  concentration_<hash>.json, concentration_<hash>.csv

CSV columns:
  mesh.csv                x,y[,z],weight,H
  mu.csv                  x,y[,z],weight,H,mu
  radial.csv, fiber.csv   eps,exact,model,remainder_ratio
  cookie_sweep_*.csv      r,R,G_eps,gap,optimizer_value
  ball_compare_*.csv      perimeter,ball_radius,G_shape,G_ball,hypothesis,satisfied
  concentration_*.csv     H,mu,active   (sorted by H)

<hash> is the first 12 hex digits of the SHA-256 of the resolved config.
THINSHIELD_THREADS caps the worker threads (0 = all cores).
Exit codes: 0 ok, 2 invalid input or unsupported regime, 1 internal failure.";

#[derive(Debug, Parser)]
#[command(name = "thinshield", version, about = "Optimal thin insulating layers", after_help = OUTPUTS_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate F0, F1 and G_eps for a given thickness field
    Evaluate(Flags),
    /// Minimize G_eps at fixed mass
    Optimize(Flags),
    /// Exact annulus/shell energies against the first-order model
    VerifyRadial(Flags),
    /// Per-fiber energies on a mesh against the first-order model
    VerifyFiber(Flags),
    /// Fixed-perimeter cookie shapes with shrinking rim
    CookieSweep(Flags),
    /// Optimal value of a planar shape against the disk of equal perimeter
    BallCompare(Flags),
    /// Quermassintegral inequality on a convex surface
    AfCheck(Flags),
    /// Optimal thickness against curvature
    Concentration(Flags),
    /// Run the command named in the config file
    Run(Flags),
}

#[derive(Debug, Clone, Default, clap::Args)]
struct Flags {
    /// JSON config file; flags override its fields
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// Shape family: circle, ellipse, polar, sphere, spheroid, cookie
    #[arg(long)]
    shape: Option<String>,
    #[arg(long)]
    radius: Option<f64>,
    #[arg(long)]
    a: Option<f64>,
    #[arg(long)]
    b: Option<f64>,
    #[arg(long)]
    c: Option<f64>,
    /// Cookie rim radius
    #[arg(long)]
    r: Option<f64>,
    /// Cookie flat radius
    #[arg(long = "big-r")]
    big_r: Option<f64>,
    #[arg(long)]
    amplitude: Option<f64>,
    #[arg(long)]
    lobes: Option<u32>,
    /// Number of samples (latitudes for spheres and spheroids)
    #[arg(long = "n-samples")]
    n_samples: Option<usize>,
    #[arg(long)]
    beta: Option<f64>,
    /// One value, or a decreasing comma-separated list for the verify commands
    #[arg(long, value_delimiter = ',')]
    eps: Option<Vec<f64>>,
    #[arg(long)]
    mass: Option<f64>,
    /// Constant thickness field
    #[arg(long = "h-const")]
    h_const: Option<f64>,
    /// Thickness field CSV (column `h`, mesh sample order)
    #[arg(long = "h-file")]
    h_file: Option<PathBuf>,
    /// Ambient dimension for verify-radial
    #[arg(long)]
    n: Option<usize>,
    /// Shell thickness for verify-radial
    #[arg(long)]
    h: Option<f64>,
    /// Target perimeter for cookie-sweep
    #[arg(long)]
    perimeter: Option<f64>,
    /// Decreasing rim radii for cookie-sweep
    #[arg(long = "r-list", value_delimiter = ',')]
    r_list: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Config {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    command: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    shape: Option<ShapeConfig>,
    #[serde(default)]
    physics: PhysicsConfig,
    #[serde(default)]
    sweep: SweepConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ShapeConfig {
    #[serde(default)]
    family: String,
    #[serde(default)]
    params: BTreeMap<String, f64>,
    #[serde(rename = "N", default, skip_serializing_if = "Option::is_none")]
    n: Option<usize>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PhysicsConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    eps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    mass: Option<f64>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    eps_list: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    r_list: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    perimeter: Option<f64>,
    /// Ambient dimension of the radial problem.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    n: Option<usize>,
    /// Shell thickness of the radial problem.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    h: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    h_const: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    h_file: Option<PathBuf>,
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return 2;
    }
    let (name, flags) = match cli.command {
        Command::Evaluate(f) => (Some("evaluate"), f),
        Command::Optimize(f) => (Some("optimize"), f),
        Command::VerifyRadial(f) => (Some("verify-radial"), f),
        Command::VerifyFiber(f) => (Some("verify-fiber"), f),
        Command::CookieSweep(f) => (Some("cookie-sweep"), f),
        Command::BallCompare(f) => (Some("ball-compare"), f),
        Command::AfCheck(f) => (Some("af-check"), f),
        Command::Concentration(f) => (Some("concentration"), f),
        Command::Run(f) => (None, f),
    };
    match execute(name, &flags) {
        Ok(outcome) => {
            println!("{}", outcome.summary);
            outcome.code
        }
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_validation() {
                2
            } else {
                1
            }
        }
    }
}

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var("THINSHIELD_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw.trim().parse().map_err(|_| {
        Error::InvalidInput(format!(
            "THINSHIELD_THREADS must be a nonnegative integer, got `{raw}`"
        ))
    })?;
    if threads > 0 {
        // a pool already installed by the host process is left alone
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    Ok(())
}

struct Outcome {
    summary: String,
    code: i32,
}

impl Outcome {
    fn ok(summary: String) -> Self {
        Self { summary, code: 0 }
    }

    fn check(passed: bool, summary: String) -> Self {
        Self {
            summary: format!("{} {summary}", if passed { "PASS" } else { "FAIL" }),
            code: if passed { 0 } else { 1 },
        }
    }
}

fn execute(name: Option<&str>, flags: &Flags) -> Result<Outcome> {
    let cfg = resolve_config(name, flags)?;
    let command = cfg
        .command
        .clone()
        .ok_or_else(|| Error::InvalidInput("no command given (config `command` field)".into()))?;
    let out = cfg.out.clone().unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&out)?;
    match command.as_str() {
        "evaluate" => cmd_evaluate(&cfg, &out),
        "optimize" => cmd_optimize(&cfg, &out),
        "verify-radial" => cmd_verify_radial(&cfg, &out),
        "verify-fiber" => cmd_verify_fiber(&cfg, &out),
        "cookie-sweep" => cmd_cookie_sweep(&cfg, &out),
        "ball-compare" => cmd_ball_compare(&cfg, &out),
        "af-check" => cmd_af_check(&cfg, &out),
        "concentration" => cmd_concentration(&cfg, &out),
        other => Err(Error::InvalidInput(format!("unknown command `{other}`"))),
    }
}

fn resolve_config(name: Option<&str>, flags: &Flags) -> Result<Config> {
    let mut cfg = match &flags.config {
        Some(path) => {
            let file = File::open(path).map_err(|e| {
                Error::InvalidInput(format!("cannot open config {}: {e}", path.display()))
            })?;
            serde_json::from_reader(BufReader::new(file)).map_err(|e| {
                Error::InvalidInput(format!("malformed config {}: {e}", path.display()))
            })?
        }
        None => Config::default(),
    };
    if let Some(name) = name {
        if let Some(given) = &cfg.command {
            if given != name {
                return Err(Error::InvalidInput(format!(
                    "config is for `{given}` but `{name}` was requested"
                )));
            }
        }
        cfg.command = Some(name.to_string());
    }
    let verify = matches!(
        cfg.command.as_deref(),
        Some("verify-radial" | "verify-fiber")
    );

    let f = flags.clone();
    if f.out.is_some() {
        cfg.out = f.out;
    }
    let shape_flags = [
        ("radius", f.radius),
        ("a", f.a),
        ("b", f.b),
        ("c", f.c),
        ("r", f.r),
        ("R", f.big_r),
        ("amplitude", f.amplitude),
        ("lobes", f.lobes.map(f64::from)),
    ];
    if f.shape.is_some() || f.n_samples.is_some() || shape_flags.iter().any(|(_, v)| v.is_some()) {
        let shape = cfg.shape.get_or_insert_with(ShapeConfig::default);
        if let Some(family) = f.shape {
            shape.family = family;
        }
        if f.n_samples.is_some() {
            shape.n = f.n_samples;
        }
        for (key, value) in shape_flags {
            if let Some(v) = value {
                shape.params.insert(key.to_string(), v);
            }
        }
    }
    if f.beta.is_some() {
        cfg.physics.beta = f.beta;
    }
    if f.mass.is_some() {
        cfg.physics.mass = f.mass;
    }
    if let Some(eps) = f.eps {
        if verify {
            cfg.sweep.eps_list = Some(eps);
        } else if let [single] = eps[..] {
            cfg.physics.eps = Some(single);
        } else {
            return Err(Error::InvalidInput(format!(
                "expected a single --eps value, got {}",
                eps.len()
            )));
        }
    }
    let sweep = &mut cfg.sweep;
    if f.r_list.is_some() {
        sweep.r_list = f.r_list;
    }
    if f.perimeter.is_some() {
        sweep.perimeter = f.perimeter;
    }
    if f.n.is_some() {
        sweep.n = f.n;
    }
    if f.h.is_some() {
        sweep.h = f.h;
    }
    if f.h_const.is_some() {
        sweep.h_const = f.h_const;
        sweep.h_file = None;
    }
    if f.h_file.is_some() {
        sweep.h_file = f.h_file;
        sweep.h_const = None;
    }
    Ok(cfg)
}

fn config_hash(cfg: &Config) -> Result<String> {
    let mut hashed = cfg.clone();
    // where the files go does not change what they contain
    hashed.out = None;
    let digest = Sha256::digest(serde_json::to_vec(&hashed)?);
    Ok(hex::encode(digest)[..12].to_string())
}

fn missing(what: &str) -> Error {
    Error::InvalidInput(format!("missing `{what}`"))
}

fn shape_param(shape: &ShapeConfig, key: &str) -> Result<f64> {
    shape.params.get(key).copied().ok_or_else(|| {
        Error::InvalidInput(format!("shape `{}` needs parameter `{key}`", shape.family))
    })
}

fn build_mesh(cfg: &Config) -> Result<BoundaryMesh> {
    let shape = cfg.shape.as_ref().ok_or_else(|| missing("shape"))?;
    let n = shape.n;
    match shape.family.as_str() {
        "circle" => circle_mesh(shape_param(shape, "radius")?, n.unwrap_or(256)),
        "ellipse" => ellipse_mesh(
            shape_param(shape, "a")?,
            shape_param(shape, "b")?,
            n.unwrap_or(256),
        ),
        "polar" => {
            let lobes = shape_param(shape, "lobes")?;
            if !(lobes >= 0.0 && lobes.fract() == 0.0 && lobes <= u32::MAX as f64) {
                return Err(Error::InvalidInput(format!(
                    "`lobes` must be a nonnegative integer, got {lobes}"
                )));
            }
            let curve = PolarCurve {
                base: require_positive("radius", shape_param(shape, "radius")?)?,
                amplitude: shape_param(shape, "amplitude")?,
                lobes: lobes as u32,
            };
            discretize_parametric_curve(&curve, n.unwrap_or(256))
        }
        "sphere" => discretize_sphere(shape_param(shape, "radius")?, n.unwrap_or(32)),
        "spheroid" => {
            let n = n.unwrap_or(32);
            spheroid_mesh(shape_param(shape, "a")?, shape_param(shape, "c")?, n, 2 * n)
        }
        "cookie" => {
            let spec = CookieSpec::new(shape_param(shape, "r")?, shape_param(shape, "R")?, 2)?;
            cookie_boundary(&spec, n.unwrap_or(512))
        }
        "" => Err(missing("shape family")),
        other => Err(Error::InvalidInput(format!(
            "unknown shape family `{other}` (expected circle, ellipse, polar, sphere, spheroid or cookie)"
        ))),
    }
}

fn beta(cfg: &Config) -> Result<f64> {
    require_positive("beta", cfg.physics.beta.ok_or_else(|| missing("beta"))?)
}

fn physics(cfg: &Config) -> Result<PhysicsParams> {
    PhysicsParams::new(
        beta(cfg)?,
        cfg.physics.eps.ok_or_else(|| missing("eps"))?,
        cfg.physics.mass.ok_or_else(|| missing("mass"))?,
    )
}

fn thickness(cfg: &Config, mesh: &BoundaryMesh) -> Result<ThicknessField> {
    match (&cfg.sweep.h_file, cfg.sweep.h_const) {
        (Some(path), _) => {
            let file = File::open(path)
                .map_err(|e| Error::InvalidInput(format!("cannot open {}: {e}", path.display())))?;
            ThicknessField::read_csv(mesh, BufReader::new(file)).map_err(|e| match e {
                Error::Csv(e) => Error::InvalidInput(format!("{}: {e}", path.display())),
                other => other,
            })
        }
        (None, Some(h)) => ThicknessField::constant(mesh, require_nonnegative("h", h)?),
        (None, None) => Err(missing("thickness (--h-const or --h-file)")),
    }
}

fn create(out: &Path, name: &str) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(out.join(name))?))
}

fn write_json<T: Serialize>(out: &Path, name: &str, value: &T) -> Result<()> {
    let mut w = create(out, name)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

fn write_mesh(out: &Path, mesh: &BoundaryMesh) -> Result<()> {
    mesh.write_csv(create(out, "mesh.csv")?)
}

fn opt_fmt(x: Option<f64>) -> String {
    x.map(fmt17).unwrap_or_else(|| "none".into())
}

#[derive(Serialize)]
struct EvaluateOutput<'a> {
    shape: &'a str,
    samples: usize,
    perimeter: f64,
    beta: f64,
    eps: f64,
    mass: f64,
    #[serde(rename = "F0")]
    f0: f64,
    #[serde(rename = "F1")]
    f1: f64,
    #[serde(rename = "G_eps")]
    g_eps: f64,
}

fn cmd_evaluate(cfg: &Config, out: &Path) -> Result<Outcome> {
    let mesh = build_mesh(cfg)?;
    let beta = beta(cfg)?;
    let eps = require_nonnegative("eps", cfg.physics.eps.unwrap_or(0.0))?;
    let h = thickness(cfg, &mesh)?;
    let f0 = eval_f0(&mesh, &h, beta)?;
    let f1 = eval_f1(&mesh, &h, beta)?;
    let g_eps = f0 + eps * f1;
    write_json(
        out,
        "evaluate.json",
        &EvaluateOutput {
            shape: mesh.shape_tag(),
            samples: mesh.len(),
            perimeter: mesh.perimeter(),
            beta,
            eps,
            mass: h.mass(),
            f0,
            f1,
            g_eps,
        },
    )?;
    write_mesh(out, &mesh)?;
    Ok(Outcome::ok(format!(
        "G_eps={} F0={} F1={} mass={}",
        fmt17(g_eps),
        fmt17(f0),
        fmt17(f1),
        fmt17(h.mass())
    )))
}

#[derive(Serialize)]
struct OptimizeOutput<'a> {
    shape: &'a str,
    samples: usize,
    perimeter: f64,
    params: PhysicsParams,
    #[serde(flatten)]
    report: OptimizerReport,
    active_count: usize,
    /// `beta P^2/(P + beta m)`
    uniform_f0: f64,
}

fn cmd_optimize(cfg: &Config, out: &Path) -> Result<Outcome> {
    let mesh = build_mesh(cfg)?;
    let params = physics(cfg)?;
    let opt = optimize(&mesh, &params)?;
    let baseline = uniform_baseline(&mesh, &params)?;
    let report = opt.report();
    write_json(
        out,
        "optimize.json",
        &OptimizeOutput {
            shape: mesh.shape_tag(),
            samples: mesh.len(),
            perimeter: mesh.perimeter(),
            params,
            report,
            active_count: opt.active_set.len(),
            uniform_f0: baseline.value,
        },
    )?;
    write_mu(out, &mesh, opt.mu.values())?;
    write_mesh(out, &mesh)?;
    Ok(Outcome::ok(format!(
        "regime={} value={} k_m={} mass_residual={}",
        report.regime,
        fmt17(report.value),
        opt_fmt(report.k_m),
        fmt17(report.mass_residual)
    )))
}

fn write_mu(out: &Path, mesh: &BoundaryMesh, mu: &[f64]) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(out, "mu.csv")?);
    let three = mesh.dimension() == 3;
    if three {
        w.write_record(["x", "y", "z", "weight", "H", "mu"])?;
    } else {
        w.write_record(["x", "y", "weight", "H", "mu"])?;
    }
    for (s, &m) in mesh.samples().iter().zip(mu) {
        let mut row = vec![fmt17(s.position[0]), fmt17(s.position[1])];
        if three {
            row.push(fmt17(s.position[2]));
        }
        row.extend([fmt17(s.weight), fmt17(s.curvature), fmt17(m)]);
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

fn eps_list(cfg: &Config, default: &[f64]) -> Vec<f64> {
    cfg.sweep
        .eps_list
        .clone()
        .unwrap_or_else(|| default.to_vec())
}

fn expansion_summary(rep: &ExpansionReport) -> String {
    format!(
        "fitted_F0={} fitted_F1={} reference_F0={} reference_F1={} remainder_spread={}",
        fmt17(rep.fitted_f0),
        fmt17(rep.fitted_f1),
        fmt17(rep.reference_f0),
        fmt17(rep.reference_f1),
        fmt17(rep.remainder_spread())
    )
}

fn cmd_verify_radial(cfg: &Config, out: &Path) -> Result<Outcome> {
    let n = cfg.sweep.n.unwrap_or(2);
    let radius = cfg
        .shape
        .as_ref()
        .and_then(|s| s.params.get("radius").copied())
        .ok_or_else(|| missing("radius"))?;
    let h = cfg.sweep.h.ok_or_else(|| missing("h"))?;
    let eps = eps_list(cfg, &[1e-1, 1e-2, 1e-3]);
    let rep = radial_expansion_check(n, radius, beta(cfg)?, h, &eps)?;
    write_json(out, "radial.json", &rep)?;
    rep.write_csv(create(out, "radial.csv")?)?;
    Ok(Outcome::ok(expansion_summary(&rep)))
}

#[derive(Serialize)]
struct FiberOutput<'a> {
    shape: &'a str,
    samples: usize,
    #[serde(flatten)]
    expansion: &'a ExpansionReport,
    recovery_order1: Vec<f64>,
    recovery_order2: Vec<f64>,
}

fn cmd_verify_fiber(cfg: &Config, out: &Path) -> Result<Outcome> {
    let mesh = build_mesh(cfg)?;
    let beta = beta(cfg)?;
    let h = thickness(cfg, &mesh)?;
    let eps = eps_list(cfg, &[1e-2, 1e-3, 1e-4]);
    let rep = fiber_expansion_check(&mesh, &h, beta, &eps)?;
    let recovery = |order| {
        eps.iter()
            .map(|&e| recovery_energy(&mesh, &h, beta, e, order))
            .collect::<Result<Vec<_>>>()
    };
    write_json(
        out,
        "fiber.json",
        &FiberOutput {
            shape: mesh.shape_tag(),
            samples: mesh.len(),
            expansion: &rep,
            recovery_order1: recovery(1)?,
            recovery_order2: recovery(2)?,
        },
    )?;
    rep.write_csv(create(out, "fiber.csv")?)?;
    Ok(Outcome::ok(expansion_summary(&rep)))
}

fn cmd_cookie_sweep(cfg: &Config, out: &Path) -> Result<Outcome> {
    let params = PhysicsParams::new(
        beta(cfg)?,
        cfg.physics.eps.unwrap_or(0.0),
        cfg.physics.mass.ok_or_else(|| missing("mass"))?,
    )?;
    let perimeter = cfg.sweep.perimeter.ok_or_else(|| missing("perimeter"))?;
    let r_list = cfg.sweep.r_list.clone().ok_or_else(|| missing("r-list"))?;
    let n_samples = cfg.shape.as_ref().and_then(|s| s.n).unwrap_or(512);
    let sweep = cookie_sweep(perimeter, &params, &r_list, n_samples)?;
    let stem = format!("cookie_sweep_{}", config_hash(cfg)?);
    write_json(out, &format!("{stem}.json"), &sweep)?;
    sweep.write_csv(create(out, &format!("{stem}.csv"))?)?;

    let rows = &sweep.rows;
    let decreasing = rows.windows(2).all(|w| w[1].gap < w[0].gap);
    let positive = rows.iter().all(|r| r.gap > 0.0);
    let optimizer_ok = rows
        .iter()
        .all(|r| r.optimizer_value.is_none_or(|v| v <= r.g_eps + 1e-10));
    let last = rows.last().map(|r| r.gap);
    Ok(Outcome::check(
        decreasing && positive && optimizer_ok,
        format!(
            "rows={} gap_positive={positive} gap_decreasing={decreasing} last_gap={} limit={}",
            rows.len(),
            opt_fmt(last),
            fmt17(sweep.limit)
        ),
    ))
}

fn cmd_ball_compare(cfg: &Config, out: &Path) -> Result<Outcome> {
    let mesh = build_mesh(cfg)?;
    let params = physics(cfg)?;
    let cmp = ball_compare(&mesh, &params)?;
    let stem = format!("ball_compare_{}", config_hash(cfg)?);
    write_json(out, &format!("{stem}.json"), &cmp)?;
    {
        let mut w = csv::Writer::from_writer(create(out, &format!("{stem}.csv"))?);
        w.write_record([
            "perimeter",
            "ball_radius",
            "G_shape",
            "G_ball",
            "hypothesis",
            "satisfied",
        ])?;
        let hypothesis = serde_json::to_value(cmp.hypothesis)?;
        w.write_record([
            fmt17(cmp.perimeter),
            fmt17(cmp.ball_radius),
            cmp.g_shape.map(fmt17).unwrap_or_default(),
            cmp.g_ball.map(fmt17).unwrap_or_default(),
            hypothesis.as_str().unwrap_or_default().to_string(),
            cmp.satisfied.map(|s| s.to_string()).unwrap_or_default(),
        ])?;
        w.flush()?;
    }
    let summary = format!(
        "G_shape={} G_ball={} regime_shape={} regime_ball={} hypothesis={}",
        opt_fmt(cmp.g_shape),
        opt_fmt(cmp.g_ball),
        cmp.regime_shape,
        cmp.regime_ball,
        serde_json::to_value(cmp.hypothesis)?
            .as_str()
            .unwrap_or_default()
    );
    if cmp.skipped() {
        return Ok(Outcome {
            summary: format!("SKIPPED (outside-theory regime) {summary}"),
            code: 2,
        });
    }
    Ok(match cmp.satisfied {
        Some(ok) => Outcome::check(ok, summary),
        None => Outcome::ok(format!("NOT-CHECKED (hypothesis not met) {summary}")),
    })
}

fn cmd_af_check(cfg: &Config, out: &Path) -> Result<Outcome> {
    let mesh = build_mesh(cfg)?;
    let rep = alexandrov_fenchel_check(&mesh)?;
    write_json(out, "af_check.json", &rep)?;
    Ok(Outcome::check(
        rep.satisfied,
        format!(
            "lhs={} rhs={} equality_gap={}",
            fmt17(rep.lhs),
            fmt17(rep.rhs),
            fmt17(rep.equality_gap)
        ),
    ))
}

fn cmd_concentration(cfg: &Config, out: &Path) -> Result<Outcome> {
    let mesh = build_mesh(cfg)?;
    let params = physics(cfg)?;
    let prof = concentration_profile(&mesh, &params)?;
    let stem = format!("concentration_{}", config_hash(cfg)?);
    write_json(out, &format!("{stem}.json"), &prof)?;
    prof.write_csv(create(out, &format!("{stem}.csv"))?)?;
    let summary = format!(
        "regime={} active={} violations={}",
        prof.regime, prof.active_count, prof.violations
    );
    Ok(if prof.regime == Regime::Interior {
        Outcome::check(prof.violations == 0, summary)
    } else {
        Outcome::ok(summary)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> (Option<&'static str>, Flags) {
        let cli =
            Cli::try_parse_from(std::iter::once("thinshield").chain(args.iter().copied())).unwrap();
        match cli.command {
            Command::Optimize(f) => (Some("optimize"), f),
            Command::VerifyRadial(f) => (Some("verify-radial"), f),
            Command::Run(f) => (None, f),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn flags_fill_config() {
        let (name, flags) = parse(&[
            "optimize", "--shape", "ellipse", "--a", "2", "--b", "1", "--beta", "1", "--eps",
            "0.1", "--mass", "3",
        ]);
        let cfg = resolve_config(name, &flags).unwrap();
        let shape = cfg.shape.unwrap();
        assert_eq!(shape.family, "ellipse");
        assert_eq!(shape.params["a"], 2.0);
        assert_eq!(cfg.physics.eps, Some(0.1));
        assert_eq!(cfg.command.as_deref(), Some("optimize"));
    }

    #[test]
    fn eps_list_only_for_verify() {
        let (name, flags) = parse(&["verify-radial", "--eps", "1e-1,1e-2,1e-3"]);
        let cfg = resolve_config(name, &flags).unwrap();
        assert_eq!(cfg.sweep.eps_list, Some(vec![1e-1, 1e-2, 1e-3]));
        let (name, flags) = parse(&["optimize", "--eps", "1e-1,1e-2"]);
        assert!(resolve_config(name, &flags).is_err());
    }

    #[test]
    fn hash_ignores_output_directory() {
        let mut a = Config {
            command: Some("concentration".into()),
            ..Config::default()
        };
        let h1 = config_hash(&a).unwrap();
        a.out = Some("elsewhere".into());
        assert_eq!(config_hash(&a).unwrap(), h1);
        a.physics.beta = Some(2.0);
        assert_ne!(config_hash(&a).unwrap(), h1);
        assert_eq!(h1.len(), 12);
    }

    #[test]
    fn unknown_family_is_validation_error() {
        let cfg = Config {
            shape: Some(ShapeConfig {
                family: "torus".into(),
                ..ShapeConfig::default()
            }),
            ..Config::default()
        };
        let err = build_mesh(&cfg).unwrap_err();
        assert!(err.is_validation());
    }
}
