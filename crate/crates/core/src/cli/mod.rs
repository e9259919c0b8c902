//! Command-line front end: one subcommand per experiment, flat JSON configs,
//! CSV/JSON/SVG artifacts and a checksummed manifest per run.

mod commands;
pub mod config;
pub mod svg;

pub use config::{Resolver, Settings};
pub use svg::{emit_svg, PlotStyle, Series};

use crate::centre::CentreError;
use crate::orbits::OrbitError;
use crate::output::to_json;
use crate::pdesim::SimError;
use crate::profiles::{ParamError, ProfileError};
use crate::spectral::SpectralError;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;
use thiserror::Error;

pub const OUT_ENV: &str = "TFE_LAB_OUT";

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid parameters: {0}")]
    Validation(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => EXIT_VALIDATION,
            CliError::Numerical(_) => EXIT_NUMERICAL,
            CliError::Io(_) => EXIT_IO,
        }
    }

    fn status(&self) -> &'static str {
        match self {
            CliError::Validation(_) => "validation-error",
            CliError::Numerical(_) => "numerical-error",
            CliError::Io(_) => "io-error",
        }
    }
}

impl From<ParamError> for CliError {
    fn from(e: ParamError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<OrbitError> for CliError {
    fn from(e: OrbitError) -> Self {
        match e {
            OrbitError::Domain(_) => CliError::Validation(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<ProfileError> for CliError {
    fn from(e: ProfileError) -> Self {
        match e {
            ProfileError::Param(p) => p.into(),
            ProfileError::Orbit(o) => o.into(),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<SpectralError> for CliError {
    fn from(e: SpectralError) -> Self {
        match e {
            SpectralError::OddIndex(_) | SpectralError::IndexRange { .. } | SpectralError::Domain(_) => {
                CliError::Validation(e.to_string())
            }
            SpectralError::Param(p) => p.into(),
            SpectralError::Profile(p) => p.into(),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<CentreError> for CliError {
    fn from(e: CentreError) -> Self {
        match e {
            CentreError::Unsupported(_) => CliError::Validation(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::Config(_) | SimError::Param(_) => CliError::Validation(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Debug, Clone, Default, Args)]
struct Common {
    /// Flat JSON config (or a previous manifest); flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output root; defaults to $TFE_LAB_OUT or ./out.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Artifact formats to write (the manifest is always written).
    #[arg(long, global = true, value_delimiter = ',')]
    format: Option<Vec<Format>>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Similarity profile of the free-boundary problem by shooting.
    ProfileFbp {
        #[arg(long)]
        n: Option<String>,
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        points: Option<usize>,
    },
    /// Oscillatory Cauchy-problem profile in one dimension.
    ProfileCp {
        #[arg(long)]
        n: Option<String>,
        #[arg(long)]
        points: Option<usize>,
    },
    /// Fundamental kernel of the n = 0 problem.
    Kernel {
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        points: Option<usize>,
    },
    /// FBP profiles with k-th interface, approaching the kernel.
    KernelSequence {
        #[arg(long)]
        k_max: Option<usize>,
        #[arg(long)]
        points: Option<usize>,
    },
    /// Closed-form n = 1 profile c₀(1 − |y|²)^m.
    ProfileExplicit {
        #[arg(long)]
        n: Option<String>,
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        points: Option<usize>,
    },
    /// Spectrum of the linearized operator.
    Spectrum {
        #[arg(long)]
        n: Option<String>,
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long)]
        k_max: Option<usize>,
        #[arg(long)]
        grid: Option<usize>,
    },
    /// Exact-arithmetic symmetry certificate of the interface expansion.
    SymmetryCheck {
        #[arg(long)]
        n: Option<String>,
    },
    /// Centre-subspace coefficients and the critical pattern.
    Centre {
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long)]
        points: Option<usize>,
    },
    /// Stable periodic orbit of the interface oscillation equation.
    Orbit {
        #[arg(long)]
        n: Option<String>,
    },
    /// Closed-form periodic orbit at n = 1.
    OrbitExact,
    /// Period continuation in n up to the heteroclinic limit.
    Bifurcate {
        #[arg(long)]
        range: Option<String>,
        #[arg(long)]
        period_cap: Option<f64>,
    },
    /// Critical-absorption PDE run in one dimension.
    SimulateCritical {
        #[arg(long)]
        n: Option<String>,
        #[arg(long)]
        tau_max: Option<f64>,
        #[arg(long)]
        spacing: Option<f64>,
        #[arg(long)]
        amplitude: Option<f64>,
        #[arg(long)]
        dt_max: Option<f64>,
    },
    /// Supercritical-absorption PDE run in one dimension.
    SimulateSupercritical {
        #[arg(long)]
        n: Option<String>,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        tau_max: Option<f64>,
        #[arg(long)]
        spacing: Option<f64>,
        #[arg(long)]
        amplitude: Option<f64>,
        #[arg(long)]
        dt_max: Option<f64>,
    },
    /// Figure presets: figure-1, figure-3, periodic-basin, heteroclinic.
    Preset {
        name: Option<String>,
    },
}

#[derive(Debug, Parser)]
#[command(name = "tfe-lab", version, about = "Numerical laboratory for thin film equations with critical absorption")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::ProfileFbp { .. } => "profile-fbp",
            Command::ProfileCp { .. } => "profile-cp",
            Command::Kernel { .. } => "kernel",
            Command::KernelSequence { .. } => "kernel-sequence",
            Command::ProfileExplicit { .. } => "profile-explicit",
            Command::Spectrum { .. } => "spectrum",
            Command::SymmetryCheck { .. } => "symmetry-check",
            Command::Centre { .. } => "centre",
            Command::Orbit { .. } => "orbit",
            Command::OrbitExact => "orbit-exact",
            Command::Bifurcate { .. } => "bifurcate",
            Command::SimulateCritical { .. } => "simulate-critical",
            Command::SimulateSupercritical { .. } => "simulate-supercritical",
            Command::Preset { .. } => "preset",
        }
    }

    fn flags(&self) -> Settings {
        let num = |s: &Option<String>| s.clone().map(Value::String);
        let mut s = Settings::default();
        match self {
            Command::ProfileFbp { n, dim, tol, points } => {
                (s.n, s.dim, s.tol, s.points) = (num(n), *dim, *tol, *points);
            }
            Command::ProfileCp { n, points } => (s.n, s.points) = (num(n), *points),
            Command::Kernel { tol, points } => (s.tol, s.points) = (*tol, *points),
            Command::KernelSequence { k_max, points } => (s.k_max, s.points) = (*k_max, *points),
            Command::ProfileExplicit { n, dim, m, points } => {
                (s.n, s.dim, s.m, s.points) = (num(n), *dim, *m, *points);
            }
            Command::Spectrum { n, dim, k_max, grid } => (s.n, s.dim, s.k_max, s.grid) = (num(n), *dim, *k_max, *grid),
            Command::SymmetryCheck { n } => s.n = num(n),
            Command::Centre { dim, points } => (s.dim, s.points) = (*dim, *points),
            Command::Orbit { n } => s.n = num(n),
            Command::OrbitExact => {}
            Command::Bifurcate { range, period_cap } => (s.range, s.period_cap) = (range.clone(), *period_cap),
            Command::SimulateCritical { n, tau_max, spacing, amplitude, dt_max } => {
                (s.n, s.tau_max, s.spacing, s.amplitude, s.dt_max) = (num(n), *tau_max, *spacing, *amplitude, *dt_max);
            }
            Command::SimulateSupercritical { n, p, tau_max, spacing, amplitude, dt_max } => {
                (s.n, s.p, s.tau_max, s.spacing, s.amplitude, s.dt_max) =
                    (num(n), *p, *tau_max, *spacing, *amplitude, *dt_max);
            }
            Command::Preset { name } => s.preset = name.clone(),
        }
        s
    }
}

/// One artifact with its checksum, path relative to the run directory.
#[derive(Debug, Clone, Serialize)]
pub struct Artifact {
    pub path: String,
    pub sha256: String,
}

/// Output side of one run: directory, enabled formats and written artifacts.
pub struct RunContext {
    pub dir: PathBuf,
    pub formats: Vec<Format>,
    pub artifacts: Vec<Artifact>,
    pub resolver: Resolver,
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

impl RunContext {
    fn enabled(&self, rel: &str) -> bool {
        let format = match Path::new(rel).extension().and_then(|e| e.to_str()) {
            Some("csv") => Format::Csv,
            Some("svg") => Format::Svg,
            _ => Format::Json,
        };
        self.formats.contains(&format)
    }

    /// Writes `rel` under the run directory when its format is enabled.
    pub fn write(&mut self, rel: &str, contents: &str) -> Result<(), CliError> {
        if !self.enabled(rel) {
            return Ok(());
        }
        let path = self.dir.join(rel);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)?;
        }
        std::fs::write(&path, contents)?;
        self.artifacts.push(Artifact { path: rel.to_string(), sha256: sha256_hex(contents.as_bytes()) });
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, rel: &str, value: &T) -> Result<(), CliError> {
        let text = to_json(value).map_err(|e| CliError::Numerical(format!("serialization: {e}")))?;
        self.write(rel, &text)
    }
}

fn out_root(flag: Option<PathBuf>, file: Option<&str>) -> PathBuf {
    flag.or_else(|| file.map(PathBuf::from))
        .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"))
}

fn parse_formats(list: &[String]) -> Result<Vec<Format>, CliError> {
    list.iter()
        .map(|f| Format::from_str(f, true).map_err(|_| CliError::Validation(format!("unknown format '{f}' (csv, json, svg)"))))
        .collect()
}

/// Parses argv (program name first), runs the subcommand and returns the
/// exit code: 0 ok, 2 invalid parameters, 3 numerical failure.
pub fn run_command<I: IntoIterator<Item = OsString>>(argv: I) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK };
        }
    };
    let started = Instant::now();
    let name = cli.command.name();
    let file = match cli.common.config.as_deref().map(Settings::load).transpose() {
        Ok(f) => f.unwrap_or_default(),
        Err(e) => {
            eprintln!("tfe-lab {name}: {e}");
            return e.exit_code();
        }
    };
    let flags = Settings {
        formats: cli.common.format.as_ref().map(|v| {
            v.iter().map(|f| f.to_possible_value().map_or(String::new(), |p| p.get_name().to_string())).collect()
        }),
        ..cli.command.flags()
    };
    let settings = flags.over(file);
    let root = out_root(cli.common.out.clone(), settings.out.as_deref());
    let sub = match (&cli.command, settings.preset.as_deref()) {
        (Command::Preset { .. }, Some(p)) => format!("preset-{p}"),
        _ => name.to_string(),
    };
    let dir = root.join(sub);
    let setup = (|| {
        let formats = parse_formats(
            &settings.formats.clone().unwrap_or_else(|| vec!["csv".into(), "json".into(), "svg".into()]),
        )?;
        let mut resolver = Resolver::new(settings.clone(), name)?;
        resolver.take("formats", Some(formats.clone()), vec![]);
        std::fs::create_dir_all(&dir)?;
        Ok::<_, CliError>(RunContext { dir: dir.clone(), formats, artifacts: Vec::new(), resolver })
    })();
    let mut ctx = match setup {
        Ok(c) => c,
        Err(e) => {
            eprintln!("tfe-lab {name}: {e}");
            return e.exit_code();
        }
    };
    let outcome = commands::dispatch(&cli.command, &mut ctx);
    let (status, code, results, diagnostic) = match outcome {
        Ok(r) => ("ok", EXIT_OK, r, None),
        Err(e) => {
            eprintln!("tfe-lab {name}: {e}");
            (e.status(), e.exit_code(), Value::Null, Some(e.to_string()))
        }
    };
    let manifest = json!({
        "config": Value::Object(ctx.resolver.used.clone()),
        "artifacts": ctx.artifacts,
        "versions": { "tfe-core": env!("CARGO_PKG_VERSION"), "manifest": 1 },
        "wallclock": started.elapsed().as_secs_f64(),
        "status": status,
        "diagnostic": diagnostic,
        "results": results,
    });
    let written = to_json(&manifest).map_err(std::io::Error::other).and_then(|t| std::fs::write(dir.join("manifest.json"), t));
    if let Err(e) = written {
        eprintln!("tfe-lab {name}: cannot write manifest: {e}");
        return if code == EXIT_OK { EXIT_IO } else { code };
    }
    code
}
