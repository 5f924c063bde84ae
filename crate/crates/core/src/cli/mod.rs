//! Batch frontend: parameter sweeps to CSV, single points to JSON, and
//! cavity Wigner grids to plain text.

pub mod config;
pub mod point;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::ansatz::{self, GridSpec, WignerGrid};
use crate::error::{Error, Result};
use crate::optimize::Ansatz;

pub use config::{ConfigFile, DeOverrides, GRange, Objective, RealList};
pub use point::{solve_point, solve_row, Coupling, PointReport, PointRequest, PointRow, CSV_COLUMNS, JSON_KEYS};

/// Environment variable capping the worker pool.
pub const THREADS_ENV: &str = "RABIVAR_THREADS";

const SWEEP_HELP: &str = "\
CSV columns (fixed order):
  omega_q, g, g_over_gstar, dim, fidelity_error, energy_error,
  exact_energy_shift, alpha_c, r, phi, p_minus, purity_noq, purity_exact,
  de_generations, seed, status
Rows follow the input order: omega_q outer, g_over_gstar inner.
status is \"ok\" or \"error: <message>\"; the exit code is 1 if any row failed.
omega_c = 1. g is given in units of g* = sqrt(omega_c omega_q)/2.";

const POINT_HELP: &str = "\
JSON keys (fixed order): the sweep CSV columns, then
  omega_c, ansatz, objective, g_star_approx, g_star_exact, best_params,
  de_objective, de_converged, noq {alpha_c, r, phi},
  schmidt {p_minus, alpha_c, r}, exact_eigenvalues, target_energy, trial_energy
Non-finite numbers are written as null.";

const WIGNER_HELP: &str = "\
Output: line 1 `x_min x_max nx`, line 2 `p_min p_max np`, line 3 a `#`
parameter echo, then np rows of nx values (p increasing by row, x by column).
Coordinates are quadratures: alpha = (x + i p)/sqrt(2).";

#[derive(Debug, Parser)]
#[command(name = "rabivar", version, about = "Variational and exact ground states of the quantum Rabi model")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit an ansatz over a grid of (omega_q, g/g*) and write CSV.
    #[command(after_help = SWEEP_HELP)]
    Sweep(PointArgs),
    /// `sweep` with --ansatz noq-excited.
    #[command(after_help = SWEEP_HELP)]
    ExcitedSweep(PointArgs),
    /// Solve one point and write a JSON report.
    #[command(after_help = POINT_HELP)]
    Point(PointArgs),
    /// `point` with --objective energy.
    #[command(after_help = POINT_HELP)]
    EnergyMin(PointArgs),
    /// Cavity Wigner function of a selected state on a square grid.
    #[command(after_help = WIGNER_HELP)]
    Wigner(WignerArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct PointArgs {
    /// Qubit frequencies in units of omega_c, comma separated.
    #[arg(long)]
    pub omega_q: Option<RealList>,
    /// Coupling in units of g*: VALUE or START:STOP:COUNT.
    #[arg(long, allow_hyphen_values = true)]
    pub g_over_gstar: Option<GRange>,
    /// Absolute coupling g (single points only); overrides --g-over-gstar.
    #[arg(long)]
    pub g: Option<f64>,
    #[arg(long, value_parser = parse_ansatz)]
    pub ansatz: Option<Ansatz>,
    #[arg(long)]
    pub objective: Option<Objective>,
    /// Differential-evolution seed (default 0).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Fixed cavity dimension instead of the converged one.
    #[arg(long)]
    pub dim_override: Option<usize>,
    /// Output file; stdout if absent or `-`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// key=value file; flags take precedence over it.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StateSelector {
    /// Exact ground state.
    ExactGround,
    /// Fidelity-optimized NOQ ground state (energy-minimized with --objective energy).
    NoqOptimized,
    /// Entangled coherent state at alpha = -g/omega_c.
    Ecs,
}

impl std::str::FromStr for StateSelector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        <Self as ValueEnum>::from_str(s, false).map_err(|_| Error::Parse(format!("unknown state '{s}'")))
    }
}

impl StateSelector {
    pub fn name(self) -> &'static str {
        match self {
            StateSelector::ExactGround => "exact-ground",
            StateSelector::NoqOptimized => "noq-optimized",
            StateSelector::Ecs => "ecs",
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct WignerArgs {
    #[command(flatten)]
    pub point: PointArgs,
    #[arg(long)]
    pub state: Option<StateSelector>,
    /// Grid half-width in x and p (default sqrt(2) g/omega_c + 4).
    #[arg(long)]
    pub extent: Option<f64>,
    /// Points per axis (default 101).
    #[arg(long)]
    pub points: Option<usize>,
}

fn parse_ansatz(s: &str) -> std::result::Result<Ansatz, String> {
    s.parse::<Ansatz>().map_err(|e| e.to_string())
}

/// Fully resolved sweep settings.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub omega_q: Vec<f64>,
    pub g_over_gstar: GRange,
    pub ansatz: Ansatz,
    pub objective: Objective,
    pub seed: u64,
    pub dim_override: Option<usize>,
    pub de: DeOverrides,
    pub out: Option<PathBuf>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.omega_q.is_empty() {
            return Err(Error::InvalidConfig("omega_q list is empty".into()));
        }
        if let Some(w) = self.omega_q.iter().find(|w| !(**w > 0.0 && w.is_finite())) {
            return Err(Error::InvalidConfig(format!("omega_q must be > 0, got {w}")));
        }
        if self.g_over_gstar.count == 0 {
            return Err(Error::InvalidConfig("g_over_gstar count must be >= 1".into()));
        }
        if self.g_over_gstar.values().iter().any(|g| !(*g >= 0.0)) {
            return Err(Error::InvalidConfig(format!("g_over_gstar must be >= 0, got {}", self.g_over_gstar)));
        }
        Ok(())
    }

    /// Points in output order: `ω_q` outer, `g/g*` inner.
    pub fn requests(&self) -> Vec<PointRequest> {
        let gs = self.g_over_gstar.values();
        self.omega_q
            .iter()
            .flat_map(|&w| {
                gs.iter().map(move |&x| PointRequest {
                    omega_q: w,
                    coupling: Coupling::Relative(x),
                    ansatz: self.ansatz,
                    objective: self.objective,
                    seed: self.seed,
                    dim_override: self.dim_override,
                    de: self.de,
                })
            })
            .collect()
    }
}

fn load_config(path: &Option<PathBuf>) -> Result<ConfigFile> {
    match path {
        Some(p) => ConfigFile::load(p),
        None => Ok(ConfigFile::default()),
    }
}

fn missing(what: &str) -> Error {
    Error::InvalidConfig(format!("{what} is required (flag or config file)"))
}

fn sweep_spec(args: PointArgs, cfg: &ConfigFile) -> Result<SweepSpec> {
    if cfg.resolve_opt(args.g, "g")?.is_some() {
        return Err(Error::InvalidConfig("sweeps take --g-over-gstar, not --g".into()));
    }
    let spec = SweepSpec {
        omega_q: cfg.resolve_opt(args.omega_q, "omega_q")?.ok_or_else(|| missing("omega_q"))?.0,
        g_over_gstar: cfg.resolve_opt(args.g_over_gstar, "g_over_gstar")?.ok_or_else(|| missing("g_over_gstar"))?,
        ansatz: cfg.resolve(args.ansatz, "ansatz", Ansatz::NoqGround)?,
        objective: cfg.resolve(args.objective, "objective", Objective::Fidelity)?,
        seed: cfg.resolve(args.seed, "seed", 0)?,
        dim_override: cfg.resolve_opt(args.dim_override, "dim_override")?,
        de: DeOverrides::from_config(cfg)?,
        out: config::output_path(cfg.resolve_opt(args.out, "out")?),
    };
    spec.validate()?;
    Ok(spec)
}

fn point_request(args: &PointArgs, cfg: &ConfigFile) -> Result<PointRequest> {
    let omega = cfg.resolve_opt(args.omega_q.clone(), "omega_q")?.ok_or_else(|| missing("omega_q"))?.0;
    let [omega_q] = omega[..] else {
        return Err(Error::InvalidConfig(format!("a single omega_q is required, got {}", omega.len())));
    };
    let coupling = match cfg.resolve_opt(args.g, "g")? {
        Some(g) => Coupling::Absolute(g),
        None => {
            let r: GRange =
                cfg.resolve_opt(args.g_over_gstar, "g_over_gstar")?.ok_or_else(|| missing("g_over_gstar or g"))?;
            if r.count != 1 {
                return Err(Error::InvalidConfig(format!("a single g_over_gstar is required, got {r}")));
            }
            Coupling::Relative(r.start)
        }
    };
    Ok(PointRequest {
        omega_q,
        coupling,
        ansatz: cfg.resolve(args.ansatz, "ansatz", Ansatz::NoqGround)?,
        objective: cfg.resolve(args.objective, "objective", Objective::Fidelity)?,
        seed: cfg.resolve(args.seed, "seed", 0)?,
        dim_override: cfg.resolve_opt(args.dim_override, "dim_override")?,
        de: DeOverrides::from_config(cfg)?,
    })
}

fn open_output(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// Solves every point of the sweep (in parallel) and returns rows in input order.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<PointRow>> {
    spec.validate()?;
    Ok(spec.requests().par_iter().map(solve_row).collect())
}

pub fn write_csv<W: Write>(rows: &[PointRow], w: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    for row in rows {
        wtr.serialize(row)?;
    }
    if rows.is_empty() {
        wtr.write_record(CSV_COLUMNS)?;
    }
    wtr.flush()?;
    Ok(())
}

/// Runs the sweep, writes the CSV, and reports whether every row succeeded.
pub fn cmd_sweep(spec: &SweepSpec) -> Result<bool> {
    let rows = run_sweep(spec)?;
    write_csv(&rows, open_output(&spec.out)?)?;
    for row in rows.iter().filter(|r| !r.is_ok()) {
        log::error!("omega_q = {}, g/g* = {}: {}", row.omega_q, row.g_over_gstar, row.status);
    }
    Ok(rows.iter().all(PointRow::is_ok))
}

pub fn cmd_point(req: &PointRequest, out: &Option<PathBuf>) -> Result<bool> {
    let (json, ok) = match solve_point(req) {
        Ok(rep) => (serde_json::to_string_pretty(&rep)?, true),
        Err(e) => {
            log::error!("{e}");
            (serde_json::to_string_pretty(&PointRow::failed(req, &e))?, false)
        }
    };
    let mut w = open_output(out)?;
    writeln!(w, "{json}")?;
    w.flush()?;
    Ok(ok)
}

/// Reduced cavity state of the selected state and its parameter echo.
pub fn wigner_state(req: &PointRequest, state: StateSelector) -> Result<(crate::qops::ComplexMatrix, String)> {
    let p = req.model()?;
    let (exact, dim) = point::exact_states(&p, req.dim_override)?;
    let ground = exact.state(0)?;
    let (psi, extra) = match state {
        StateSelector::ExactGround => (ground, String::new()),
        StateSelector::NoqOptimized => {
            let req = PointRequest { ansatz: Ansatz::NoqGround, ..req.clone() };
            let fit = point::fit(&req, &p, &ground)?;
            let q = fit.noq.ok_or_else(|| Error::InvalidConfig("NOQ fit returned no parameters".into()))?;
            let echo = format!(
                " objective={} seed={} alpha_c={} r={} phi={}",
                req.objective.name(),
                req.seed,
                q.alpha_c,
                q.r,
                q.phi
            );
            (fit.state, echo)
        }
        StateSelector::Ecs => {
            let alpha = -p.displacement_scale();
            (ansatz::ecs_ground(alpha, dim)?, format!(" alpha={alpha}"))
        }
    };
    let echo =
        format!("# omega_c={} omega_q={} g={} state={} dim={}{}", p.omega_c, p.omega_q, p.g, state.name(), dim, extra);
    Ok((ansatz::reduced_cavity(&psi), echo))
}

pub fn write_wigner<W: Write>(grid: &WignerGrid, echo: &str, mut w: W) -> Result<()> {
    let s = &grid.spec;
    writeln!(w, "{} {} {}", s.x_min, s.x_max, s.nx)?;
    writeln!(w, "{} {} {}", s.p_min, s.p_max, s.np)?;
    writeln!(w, "{echo} truncation_warning={}", grid.truncation_warning)?;
    for i in 0..s.np {
        let row: Vec<String> = (0..s.nx).map(|j| grid.values[(i, j)].to_string()).collect();
        writeln!(w, "{}", row.join(" "))?;
    }
    w.flush()?;
    Ok(())
}

fn cmd_wigner(args: WignerArgs) -> Result<bool> {
    let cfg = load_config(&args.point.config)?;
    let req = point_request(&args.point, &cfg)?;
    let state = cfg.resolve(args.state, "state", StateSelector::ExactGround)?;
    let p = req.model()?;
    let extent = cfg.resolve(args.extent, "extent", std::f64::consts::SQRT_2 * p.displacement_scale() + 4.0)?;
    let points = cfg.resolve(args.points, "points", 101)?;
    let out = config::output_path(cfg.resolve_opt(args.point.out.clone(), "out")?);
    let (rho, echo) = wigner_state(&req, state)?;
    let grid = ansatz::wigner(&rho, &GridSpec::square(extent, points))?;
    write_wigner(&grid, &echo, open_output(&out)?)?;
    Ok(true)
}

/// Sizes the global worker pool from `RABIVAR_THREADS` if set.
pub fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = v.trim().parse().map_err(|e| Error::Parse(format!("{THREADS_ENV}='{v}': {e}")))?;
    if n == 0 {
        return Err(Error::Parse(format!("{THREADS_ENV} must be >= 1")));
    }
    // fails only if the pool was already built, which is harmless
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn force<T: PartialEq + Copy>(given: Option<T>, want: T, what: &str, name: impl Fn(T) -> String) -> Result<Option<T>> {
    match given {
        Some(v) if v != want => Err(Error::InvalidConfig(format!("this command fixes {what} = {}", name(want)))),
        _ => Ok(Some(want)),
    }
}

/// Executes a parsed command line. `Ok(false)` means some point failed.
pub fn run(cli: Cli) -> Result<bool> {
    configure_threads()?;
    match cli.command {
        Command::Sweep(args) => {
            let cfg = load_config(&args.config)?;
            cmd_sweep(&sweep_spec(args, &cfg)?)
        }
        Command::ExcitedSweep(mut args) => {
            let cfg = load_config(&args.config)?;
            let given = cfg.resolve_opt(args.ansatz, "ansatz")?;
            args.ansatz = force(given, Ansatz::NoqExcited, "ansatz", |a| a.name().into())?;
            cmd_sweep(&sweep_spec(args, &cfg)?)
        }
        Command::Point(args) => {
            let cfg = load_config(&args.config)?;
            let req = point_request(&args, &cfg)?;
            cmd_point(&req, &config::output_path(cfg.resolve_opt(args.out, "out")?))
        }
        Command::EnergyMin(mut args) => {
            let cfg = load_config(&args.config)?;
            let given = cfg.resolve_opt(args.objective, "objective")?;
            args.objective = force(given, Objective::Energy, "objective", |o| o.name().into())?;
            let req = point_request(&args, &cfg)?;
            cmd_point(&req, &config::output_path(cfg.resolve_opt(args.out, "out")?))
        }
        Command::Wigner(args) => cmd_wigner(args),
    }
}

/// Reads a Wigner file back: grid spec, echo line and values.
pub fn read_wigner(path: &Path) -> Result<(GridSpec, String, Vec<Vec<f64>>)> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines();
    let mut header = |what: &str| -> Result<(f64, f64, usize)> {
        let line = lines.next().ok_or_else(|| Error::Parse(format!("missing {what} header")))?;
        let f: Vec<&str> = line.split_whitespace().collect();
        let [lo, hi, n] = f[..] else {
            return Err(Error::Parse(format!("bad {what} header '{line}'")));
        };
        let num = |t: &str| t.parse::<f64>().map_err(|e| Error::Parse(format!("'{t}': {e}")));
        Ok((num(lo)?, num(hi)?, n.parse().map_err(|e| Error::Parse(format!("'{n}': {e}")))?))
    };
    let (x_min, x_max, nx) = header("x")?;
    let (p_min, p_max, np) = header("p")?;
    let echo = lines.next().ok_or_else(|| Error::Parse("missing parameter echo".into()))?.to_string();
    let rows = lines
        .map(|l| {
            l.split_whitespace()
                .map(|t| t.parse::<f64>().map_err(|e| Error::Parse(format!("'{t}': {e}"))))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    if rows.len() != np || rows.iter().any(|r| r.len() != nx) {
        return Err(Error::Parse(format!("expected {np} rows of {nx} values")));
    }
    Ok((GridSpec { x_min, x_max, nx, p_min, p_max, np }, echo, rows))
}
