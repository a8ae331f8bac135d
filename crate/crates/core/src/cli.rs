//! Command-line interface.
//!
//! Exit codes: 0 success, 1 malformed input or internal error, 2 violated
//! condition (`validate`), 3 no positive solution (`solve`, `realize`).

use std::f64::consts::PI;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;

use crate::checker::{full_verdict, stokes_residual, Subcomplex};
use crate::config::{Config, Mode, CONFIG_ENV};
use crate::error::{Error, Result};
use crate::feasibility::{find_positive_solution, FeasibilityResult};
use crate::generate;
use crate::instance::RawInstance;
use crate::lobachevsky::{lobachevsky, lobachevsky_quadrature};
use crate::realize::{realize, svg, Core, Realization};
use crate::system::{assemble_sigma, verify_nz, AngleAssignment, SolutionSpace};
use crate::topology::Triangulation;
use crate::volume::{directional_derivative, maximize_volume_slab, volume};

macro_rules! out {
    ($($t:tt)*) => { write!(std::io::stdout(), $($t)*)? };
}

macro_rules! outln {
    ($($t:tt)*) => { writeln!(std::io::stdout(), $($t)*)? };
}

pub const EXIT_OK: u8 = 0;
pub const EXIT_ERROR: u8 = 1;
pub const EXIT_CONDITION: u8 = 2;
pub const EXIT_INFEASIBLE: u8 = 3;

/// Header line of sweep CSV output.
pub const CSV_VERSION: &str = "# solidtorus sweep v1";
pub const CSV_COLUMNS: &str = "K,volume,core_length,cusp_shape_re,cusp_shape_im,gradient_norm,status";

#[derive(Debug, Parser)]
#[command(name = "solidtorus", version, about = "Angle structures and volume maximization on triangulated solid tori")]
pub struct Cli {
    /// Configuration file (TOML). Defaults to the file named by SOLIDTORUS_CONFIG.
    #[arg(long, global = true, env = CONFIG_ENV)]
    pub config: Option<PathBuf>,
    /// Use exact rational arithmetic (requires alpha_pi / cone_angle_pi).
    #[arg(long, global = true)]
    pub exact: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the admissibility conditions on the angle data.
    Validate {
        instance: PathBuf,
        /// Normal-curve crossing bound.
        #[arg(long)]
        bound: Option<u32>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Find a positive angle structure or a certificate.
    Solve {
        instance: PathBuf,
        #[command(flatten)]
        out: OutArgs,
        /// Write the particular solution and kernel basis as JSON.
        #[arg(long, value_name = "PATH")]
        dump_solution_space: Option<PathBuf>,
    },
    /// Maximize volume and develop the boundary.
    Realize {
        instance: PathBuf,
        #[command(flatten)]
        out: OutArgs,
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Print the volume report.
        #[arg(long)]
        report: bool,
        /// Solve the mirror image (the system with holonomy -K).
        #[arg(long)]
        mirror: bool,
        /// Also maximize over holonomy at least K.
        #[arg(long)]
        slab: bool,
    },
    /// Volume as a function of the cone angle.
    Sweep {
        instance: PathBuf,
        /// `start:end:count`, endpoints included.
        #[arg(long, allow_hyphen_values = true)]
        k_range: String,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Run quick property checks.
    Selftest {
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Debug, Args)]
pub struct OutArgs {
    /// Write the JSON result to this file.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

pub fn run(cli: Cli) -> ExitCode {
    let mut config = match Config::load(cli.config.as_deref()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_ERROR);
        }
    };
    if cli.exact {
        config.mode = Mode::Exact;
    }
    match dispatch(cli.command, config) {
        Ok(code) => ExitCode::from(code),
        Err(Error::Io(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => ExitCode::from(EXIT_OK),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}

fn dispatch(cmd: Command, mut config: Config) -> Result<u8> {
    match cmd {
        Command::Validate { instance, bound, out } => {
            if bound.is_some() {
                config.bound = bound;
            }
            config.validate()?;
            cmd_validate(&instance, &config, out.json.as_deref().or(config.outputs.json.as_deref()))
        }
        Command::Solve { instance, out, dump_solution_space } => {
            if let Some(p) = &dump_solution_space {
                let (_, tri, a) = load(&instance, &config)?;
                write_json(Some(p), &serde_json::to_value(SolutionSpace::new(&tri, &a)?)?)?;
            }
            cmd_solve(&instance, &config, out.json.as_deref().or(config.outputs.json.as_deref()))
        }
        Command::Realize { instance, out, svg, report, mirror, slab } => {
            let json = out.json.or(config.outputs.json.clone());
            let svg = svg.or(config.outputs.svg.clone());
            cmd_realize(&instance, &config, RealizeOutputs { json, svg, report, mirror, slab })
        }
        Command::Sweep { instance, k_range, csv } => {
            let ks = parse_range(&k_range)?;
            let csv = csv.or(config.outputs.csv.clone());
            let text = cmd_sweep(&instance, &ks, &config)?;
            match csv {
                Some(p) => std::fs::write(p, &text)?,
                None => out!("{text}"),
            }
            Ok(EXIT_OK)
        }
        Command::Selftest { seed } => Ok(if selftest(seed, &mut std::io::stdout()) { EXIT_OK } else { EXIT_CONDITION }),
    }
}

fn load(path: &Path, config: &Config) -> Result<(RawInstance, Triangulation, AngleAssignment)> {
    let raw = RawInstance::read(path)?;
    let tri = raw.triangulation()?;
    let mut a = raw.angles()?;
    if a.alpha.len() != tri.num_edges() {
        return Err(Error::InvalidAngle(format!("expected {} edge angles", tri.num_edges())));
    }
    if config.mode == Mode::Numeric {
        a = a.to_numeric();
    } else if !a.is_exact() {
        log::warn!("exact mode requested but the instance has no exact angles; using floating point");
    }
    Ok((raw, tri, a))
}

fn write_json(path: Option<&Path>, value: &serde_json::Value) -> Result<()> {
    if let Some(p) = path {
        std::fs::write(p, serde_json::to_string_pretty(value)? + "\n")?;
    }
    Ok(())
}

pub fn cmd_validate(path: &Path, config: &Config, json_out: Option<&Path>) -> Result<u8> {
    let (_, tri, a) = load(path, config)?;
    let report = full_verdict(&tri, &a, config.bound, &config.feasibility());
    out!("{}", report.render());
    write_json(json_out, &serde_json::to_value(&report)?)?;
    Ok(if report.admissible() { EXIT_OK } else { EXIT_CONDITION })
}

pub fn cmd_solve(path: &Path, config: &Config, json_out: Option<&Path>) -> Result<u8> {
    let (_, tri, a) = load(path, config)?;
    let r = find_positive_solution(&tri, &a, &config.feasibility())?;
    let mut v = serde_json::to_value(&r)?;
    if r.is_feasible() {
        let residual = assemble_sigma(&tri).residual(r.theta(), &a);
        v["residual"] = json!(residual);
        if residual > config.tolerances.residual {
            log::warn!("residual {residual:e} exceeds tolerance");
        }
    }
    outln!("{}", serde_json::to_string_pretty(&v)?);
    write_json(json_out, &v)?;
    Ok(match r {
        FeasibilityResult::Feasible { .. } => EXIT_OK,
        FeasibilityResult::Infeasible { .. } => EXIT_INFEASIBLE,
    })
}

pub struct RealizeOutputs {
    pub json: Option<PathBuf>,
    pub svg: Option<PathBuf>,
    pub report: bool,
    pub mirror: bool,
    pub slab: bool,
}

pub fn realization_json(r: &Realization) -> serde_json::Value {
    let core = match r.core {
        Core::Geodesic { length, cone_angle, complex_length } => {
            json!({ "length": length, "cone_angle": cone_angle, "complex_length": complex_length })
        }
        Core::Cusp { cusp_shape } => json!({ "cusp_shape": cusp_shape }),
    };
    json!({
        "volume": r.volume,
        "core": core,
        "theta": r.theta,
        "shapes": r.shapes.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
        "holonomy": r.holonomy,
    })
}

pub fn cmd_realize(path: &Path, config: &Config, out: RealizeOutputs) -> Result<u8> {
    let (raw, _, _) = load(path, config)?;
    let raw = if out.mirror { raw.mirrored() } else { raw };
    let tri = raw.triangulation()?;
    let mut a = raw.angles()?;
    if config.mode == Mode::Numeric {
        a = a.to_numeric();
    }
    let r = match realize(&tri, &a, &config.realize()) {
        Ok(r) => r,
        Err(Error::Infeasible(cert)) => {
            let v = json!({ "status": "infeasible", "certificate": *cert });
            outln!("{}", serde_json::to_string_pretty(&v)?);
            write_json(out.json.as_deref(), &v)?;
            return Ok(EXIT_INFEASIBLE);
        }
        Err(e) => return Err(e),
    };
    let mut v = realization_json(&r);
    if out.slab {
        let sp = SolutionSpace::new(&tri, &a)?;
        let s = maximize_volume_slab(&tri, &sp, &r.theta, a.cone_angle, &config.volume())?;
        v["slab"] = json!({ "volume": s.report.volume, "binding": s.binding, "holonomy": s.holonomy });
    }
    if out.report {
        let rep = &r.report;
        outln!("volume            {:.15}", rep.volume);
        outln!("gradient norm     {:.3e}", rep.gradient_norm);
        outln!("newton iterations {}", rep.iterations);
        for (v, p) in rep.vertex_products.iter().enumerate() {
            outln!("vertex {v:<4} sine-ratio product {p:.15}");
        }
        outln!("meridian sine-ratio product {:.15}", rep.meridian_product);
        match r.core {
            Core::Geodesic { length, cone_angle, .. } => {
                outln!("core length {length:.15}, cone angle {cone_angle:.15}")
            }
            Core::Cusp { cusp_shape } => outln!("cusp shape {:.15} + {:.15} i", cusp_shape[0], cusp_shape[1]),
        }
    } else {
        outln!("{}", serde_json::to_string_pretty(&v)?);
    }
    write_json(out.json.as_deref(), &v)?;
    if let Some(p) = out.svg {
        std::fs::write(p, svg(&tri, &r))?;
    }
    Ok(EXIT_OK)
}

pub fn parse_range(s: &str) -> Result<Vec<f64>> {
    let bad = || Error::Config(format!("k-range must look like start:end:count, got '{s}'"));
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    let a: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let b: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
    if n == 0 || !a.is_finite() || !b.is_finite() {
        return Err(bad());
    }
    if n == 1 {
        return Ok(vec![a]);
    }
    Ok((0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect())
}

/// One CSV row per cone angle, in the order given.
pub fn cmd_sweep(path: &Path, ks: &[f64], config: &Config) -> Result<String> {
    let (_, tri, a) = load(path, config)?;
    let a = a.to_numeric();
    let opts = config.realize();
    let rows: Vec<String> = ks
        .par_iter()
        .map(|&k| {
            let ak = a.with_cone_angle(k);
            match realize(&tri, &ak, &opts) {
                Ok(r) => {
                    let (len, re, im) = match r.core {
                        Core::Geodesic { length, .. } => (format!("{length:.15e}"), String::new(), String::new()),
                        Core::Cusp { cusp_shape } => {
                            (String::new(), format!("{:.15e}", cusp_shape[0]), format!("{:.15e}", cusp_shape[1]))
                        }
                    };
                    format!("{k:.15e},{:.15e},{len},{re},{im},{:.3e},ok", r.volume, r.report.gradient_norm)
                }
                Err(Error::Infeasible(_)) => format!("{k:.15e},,,,,,infeasible"),
                Err(e) => format!("{k:.15e},,,,,,error: {}", e.to_string().replace(',', ";")),
            }
        })
        .collect();
    let mut out = format!("{CSV_VERSION}\n{CSV_COLUMNS}\n");
    for r in rows {
        out.push_str(&r);
        out.push('\n');
    }
    Ok(out)
}

/// Quick versions of the property suites. Prints one line per check.
pub fn selftest(seed: u64, out: &mut dyn Write) -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut all = true;
    let mut line = |name: &str, ok: bool, detail: String| {
        let _ = writeln!(out, "{} {name}: {detail}", if ok { "PASS" } else { "FAIL" });
        all &= ok;
    };

    let mut nz_ok = true;
    for _ in 0..10 {
        let m = 2 * rng.gen_range(1..=20);
        let tri = generate::random_triangulation(m, &mut rng);
        nz_ok &= verify_nz(&tri, tri.longitude()).is_ok();
    }
    line("symplectic relation", nz_ok, "10 random triangulations".into());

    let (tri, a, theta) = generate::random_admissible(8, &mut rng);
    let worst = (0..200)
        .map(|_| stokes_residual(&tri, &theta, &a.alpha, &Subcomplex::random(&tri, &mut rng)))
        .fold(0.0, f64::max);
    line("discrete Stokes", worst <= 1e-10, format!("max residual {worst:.2e}"));

    let worst = (0..100)
        .map(|_| {
            let x = rng.gen_range(0.0..PI);
            (lobachevsky(x) - lobachevsky_quadrature(x, 1e-14)).abs()
        })
        .fold(0.0, f64::max);
    line("Lobachevsky series", worst <= 1e-12, format!("max error {worst:.2e}"));

    let sp = SolutionSpace::new(&tri, &a).expect("admissible instance");
    let mut worst: f64 = 0.0;
    for k in &sp.kernel {
        let kf: Vec<f64> = k.iter().map(|&x| x as f64).collect();
        let h = 1e-5;
        let p: Vec<f64> = theta.iter().zip(&kf).map(|(x, d)| x + h * d).collect();
        let m: Vec<f64> = theta.iter().zip(&kf).map(|(x, d)| x - h * d).collect();
        let fd = (volume(&p) - volume(&m)) / (2.0 * h);
        let an = directional_derivative(&theta, &kf);
        worst = worst.max((fd - an).abs() / an.abs().max(1e-3));
    }
    line("volume gradient", worst <= 1e-5, format!("max relative error {worst:.2e}"));

    let tri = generate::one_vertex();
    let a = AngleAssignment::new(vec![PI / 3.0; 3], PI / 3.0).expect("valid angles");
    let ok = match realize(&tri, &a, &Default::default()) {
        Ok(r) => {
            let rot = crate::realize::rotation_near(&r.holonomy.rho_mu, PI / 3.0);
            r.report.gradient_norm <= 1e-10
                && (rot - PI / 3.0).abs() <= 1e-8
                && (r.holonomy.rho_mu.scale() - 1.0).abs() <= 1e-8
        }
        Err(_) => false,
    };
    line("one-vertex realization", ok, "K = π/3".into());
    all
}
