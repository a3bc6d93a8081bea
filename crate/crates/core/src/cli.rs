//! The `fluctlab` command line.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error (malformed or
//! invalid input file, below-bound result in `--strict` mode), 3 numerical
//! failure (decay guard, truncation, mesh resolution).

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use thiserror::Error;

use crate::audit::{
    classify, entropy_surrogate, time_energy, AuditReport, Verdict, DEFAULT_EPSILON,
};
use crate::density::{
    density_eval, density_scan, extremal_variances, normalization_check, reduced_box_integral,
    reduced_density, sample, verify_extremum, FluctuationParams, PhasePoint, DEFAULT_FD_STEP,
};
use crate::error::FluctError;
use crate::grid::GridSpec;
use crate::io::{self, EnsembleFile, IoError, Loaded, StateFile};
use crate::quantum::{
    build_state, ensemble_energy_moments, ensemble_moments, thermal_ensemble, HamiltonianSpec,
    StateRecipe,
};
use crate::scenarios::{eigenstate_sweep, relaxation_walk, thermal_sweep};
use crate::units::UnitSystem;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Data(_) => EXIT_DATA,
            CliError::Numerical(_) => EXIT_NUMERICAL,
        }
    }
}

fn is_numerical(e: &FluctError) -> bool {
    matches!(
        e.root(),
        FluctError::DecayGuardViolation { .. }
            | FluctError::Truncation { .. }
            | FluctError::Resolution { .. }
            | FluctError::NumericalFailure(_)
    )
}

/// Errors from flag-supplied values.
impl From<FluctError> for CliError {
    fn from(e: FluctError) -> Self {
        if is_numerical(&e) {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Usage(e.to_string())
        }
    }
}

/// Errors from files.
impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        match &e {
            IoError::Invalid { source, .. } if is_numerical(source) => {
                CliError::Numerical(e.to_string())
            }
            _ => CliError::Data(e.to_string()),
        }
    }
}

/// `min:max:n`
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RangeArg {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl FromStr for RangeArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let [lo, hi, n] = parts[..] else {
            return Err(format!("expected min:max:n, got `{s}`"));
        };
        let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("`{t}`: {e}"));
        Ok(RangeArg {
            lo: num(lo)?,
            hi: num(hi)?,
            n: n.trim().parse().map_err(|e| format!("`{n}`: {e}"))?,
        })
    }
}

impl RangeArg {
    fn grid(&self) -> Result<GridSpec, CliError> {
        Ok(GridSpec::new(self.lo, self.hi, self.n)?)
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "fluctlab",
    version,
    about = "Phase-space fluctuation statistics and uncertainty-bound audits"
)]
pub struct Cli {
    /// Planck constant in working units (default 2π, i.e. ħ = 1).
    #[arg(long, global = true, env = "FLUCTLAB_H", allow_hyphen_values = true)]
    pub h: Option<f64>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a state (or thermal ensemble) on a grid and write it as JSON.
    State(StateArgs),
    /// Audit a state or ensemble file against the uncertainty bound.
    Audit(AuditArgs),
    /// Gaussian fluctuation densities.
    #[command(subcommand)]
    Density(DensityCommand),
    /// Parameter sweeps and the toy relaxation walk.
    #[command(subcommand)]
    Scenario(ScenarioCommand),
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("recipe").required(true).args(["gaussian", "eigenstate", "coherent", "thermal"]))]
pub struct StateArgs {
    /// Gaussian packet (--center, --momentum, --sigma).
    #[arg(long)]
    pub gaussian: bool,
    /// Oscillator eigenstate with this index (--mass, --omega).
    #[arg(long, value_name = "N")]
    pub eigenstate: Option<usize>,
    /// Coherent state (--alpha-re, --alpha-im, --mass, --omega).
    #[arg(long)]
    pub coherent: bool,
    /// Thermal ensemble at this temperature (--n-max, --mass, --omega).
    #[arg(long, value_name = "T")]
    pub thermal: Option<f64>,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub center: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub momentum: f64,
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    #[arg(long, default_value_t = 1.0)]
    pub mass: f64,
    #[arg(long, default_value_t = 1.0)]
    pub omega: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub alpha_re: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub alpha_im: f64,
    #[arg(long, default_value_t = 40)]
    pub n_max: usize,
    /// Grid as min:max:n.
    #[arg(long, allow_hyphen_values = true, default_value = "-12:12:1024")]
    pub grid: RangeArg,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct AuditArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    pub epsilon: f64,
    /// Treat a below-bound result as a data error.
    #[arg(long)]
    pub strict: bool,
    /// Oscillator mass for the Hamiltonian behind delta_t.
    #[arg(long, default_value_t = 1.0)]
    pub mass: f64,
    /// Oscillator frequency for the Hamiltonian behind delta_t.
    #[arg(long, default_value_t = 1.0)]
    pub omega: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct Means {
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub mean_x: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub mean_p: f64,
}

#[derive(Debug, Args)]
pub struct GaussianArgs {
    #[command(flatten)]
    pub means: Means,
    #[arg(long)]
    pub var_x: f64,
    #[arg(long)]
    pub var_p: f64,
}

#[derive(Debug, Args)]
pub struct PointArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub x: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub p: f64,
}

#[derive(Debug, Subcommand)]
pub enum DensityCommand {
    /// Gaussian density at a phase point.
    Eval {
        #[command(flatten)]
        gaussian: GaussianArgs,
        #[command(flatten)]
        point: PointArgs,
    },
    /// Draw samples and write them as CSV (`x,p`).
    Sample {
        #[command(flatten)]
        gaussian: GaussianArgs,
        #[arg(long)]
        count: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Extremal variances at a phase point and the reduced density there.
    Extremize {
        #[command(flatten)]
        means: Means,
        #[command(flatten)]
        point: PointArgs,
    },
    /// Finite-difference check that the extremal variance is a maximum.
    Verify {
        #[command(flatten)]
        means: Means,
        #[command(flatten)]
        point: PointArgs,
        #[arg(long, default_value_t = DEFAULT_FD_STEP)]
        fd_step: f64,
    },
    /// Quadrature of the Gaussian density, or with --box of the reduced density.
    Normcheck {
        #[command(flatten)]
        means: Means,
        #[arg(long, required_unless_present = "box_half_width")]
        var_x: Option<f64>,
        #[arg(long, required_unless_present = "box_half_width")]
        var_p: Option<f64>,
        #[arg(long, default_value_t = 10.0)]
        half_width: f64,
        /// Integrate the reduced density over a square of this half width.
        #[arg(long = "box")]
        box_half_width: Option<f64>,
    },
    /// Density on a rectangular mesh, written as CSV (`x,p,f`).
    Scan {
        #[command(flatten)]
        means: Means,
        #[arg(long, required_unless_present = "reduced")]
        var_x: Option<f64>,
        #[arg(long, required_unless_present = "reduced")]
        var_p: Option<f64>,
        /// Scan the reduced density instead of the Gaussian.
        #[arg(long)]
        reduced: bool,
        #[arg(long, allow_hyphen_values = true)]
        x_range: RangeArg,
        #[arg(long, allow_hyphen_values = true)]
        p_range: RangeArg,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
pub enum ScenarioCommand {
    /// Oscillator eigenstates 0..=n_max.
    Eigensweep {
        #[arg(long)]
        n_max: usize,
        #[arg(long, default_value_t = 1.0)]
        mass: f64,
        #[arg(long, default_value_t = 1.0)]
        omega: f64,
        #[arg(long, allow_hyphen_values = true, default_value = "-15:15:2048")]
        grid: RangeArg,
        /// CSV, or JSON when the name ends in .json; stdout CSV if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Truncated Gibbs ensembles at the given temperatures.
    Thermalsweep {
        #[arg(long, value_delimiter = ',', required = true)]
        temps: Vec<f64>,
        #[arg(long, default_value_t = 80)]
        n_max: usize,
        #[arg(long, default_value_t = 1.0)]
        mass: f64,
        #[arg(long, default_value_t = 1.0)]
        omega: f64,
        #[arg(long, allow_hyphen_values = true, default_value = "-25:25:2048")]
        grid: RangeArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Toy multiplicative relaxation of Δx·Δp toward the bound.
    Walk {
        #[command(flatten)]
        gaussian: GaussianArgs,
        #[arg(long)]
        steps: usize,
        #[arg(long, default_value_t = 0.05)]
        step_size: f64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Six significant digits for human-facing summaries.
pub fn fmt_human(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    let exp = v.abs().log10().floor() as i32;
    if (-5..6).contains(&exp) {
        format!("{:.*}", (5 - exp).max(0) as usize, v)
    } else {
        format!("{v:.5e}")
    }
}

fn check_out(path: &Path) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    if !dir.is_dir() {
        return Err(CliError::Usage(format!(
            "output directory {} does not exist",
            dir.display()
        )));
    }
    if path.is_dir() {
        return Err(CliError::Usage(format!(
            "output path {} is a directory",
            path.display()
        )));
    }
    Ok(())
}

fn check_in(path: &Path) -> Result<(), CliError> {
    if !path.is_file() {
        return Err(CliError::Usage(format!(
            "input file {} does not exist",
            path.display()
        )));
    }
    Ok(())
}

fn is_json(path: &Path) -> bool {
    path.extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

fn emit(out: Option<&Path>, bytes: Vec<u8>) -> Result<(), CliError> {
    match out {
        Some(p) => io::write_atomic(p, &bytes).map_err(|e| CliError::Data(e.to_string())),
        None => {
            print!("{}", String::from_utf8_lossy(&bytes));
            Ok(())
        }
    }
}

fn encode(e: IoError) -> CliError {
    CliError::Data(e.to_string())
}

fn units_from(h: Option<f64>) -> Result<UnitSystem, CliError> {
    match h {
        Some(h) => Ok(UnitSystem::new(h)?),
        None => Ok(UnitSystem::default()),
    }
}

fn gaussian_params(g: &GaussianArgs, units: UnitSystem) -> Result<FluctuationParams, CliError> {
    Ok(FluctuationParams::new(
        g.means.mean_x,
        g.means.mean_p,
        g.var_x,
        g.var_p,
        units,
    )?)
}

fn run_state(args: &StateArgs, units: UnitSystem) -> Result<(), CliError> {
    check_out(&args.out)?;
    let grid = args.grid.grid()?;
    let bytes = if let Some(t) = args.thermal {
        let e = thermal_ensemble(args.omega, args.mass, t, args.n_max, &grid, &units)?;
        println!(
            "thermal ensemble: {} members, T = {}",
            e.len(),
            fmt_human(t)
        );
        io::to_json(&EnsembleFile::from_ensemble(&e, units)).map_err(encode)?
    } else {
        let recipe = if args.gaussian {
            StateRecipe::GaussianPacket {
                center: args.center,
                momentum: args.momentum,
                width: args.sigma,
            }
        } else if let Some(n) = args.eigenstate {
            StateRecipe::OscillatorEigenstate {
                n,
                mass: args.mass,
                omega: args.omega,
            }
        } else {
            StateRecipe::CoherentState {
                alpha: Complex64::new(args.alpha_re, args.alpha_im),
                mass: args.mass,
                omega: args.omega,
            }
        };
        let s = build_state(&recipe, &grid, &units)?;
        io::to_json(&StateFile::from_state(&s, units)).map_err(encode)?
    };
    emit(Some(&args.out), bytes)
}

fn run_audit(args: &AuditArgs, h: Option<f64>) -> Result<(), CliError> {
    check_in(&args.input)?;
    if let Some(out) = &args.out {
        check_out(out)?;
    }
    if !(args.epsilon > 0.0 && args.epsilon < 0.1) {
        return Err(CliError::Usage(format!(
            "--epsilon {} outside (0, 0.1)",
            args.epsilon
        )));
    }
    let loaded: Loaded = io::load_target(&args.input)?;
    let units = match h {
        Some(h) => UnitSystem::new(h)?,
        None => loaded.units(),
    };
    let ensemble = loaded.into_ensemble();
    let moments = ensemble_moments(&ensemble, &units)?;
    let c = classify(&moments, &units, args.epsilon);
    let hamiltonian = HamiltonianSpec::harmonic(ensemble.grid(), args.mass, args.omega)?;
    let energy = ensemble_energy_moments(&ensemble, &hamiltonian, &units)?;
    let delta_t = time_energy(energy.spread(), &units).ok();
    let report = AuditReport::new(&c, delta_t, entropy_surrogate(&ensemble));

    println!(
        "product {} bound {} relative_excess {} -> {} ({})",
        fmt_human(c.product),
        fmt_human(c.bound),
        fmt_human(c.relative_excess),
        c.verdict,
        c.verdict.interpretation()
    );
    let bytes = io::to_json(&report).map_err(encode)?;
    emit(args.out.as_deref(), bytes)?;
    if args.strict && c.verdict == Verdict::BelowBound {
        return Err(CliError::Data(format!(
            "product {} is below the bound {}",
            fmt_human(c.product),
            fmt_human(c.bound)
        )));
    }
    Ok(())
}

fn run_density(cmd: &DensityCommand, units: UnitSystem) -> Result<(), CliError> {
    match cmd {
        DensityCommand::Eval { gaussian, point } => {
            let params = gaussian_params(gaussian, units)?;
            let f = density_eval(&params, PhasePoint::new(point.x, point.p));
            println!("f={}", io::fmt_machine(f));
        }
        DensityCommand::Sample {
            gaussian,
            count,
            seed,
            out,
        } => {
            check_out(out)?;
            let params = gaussian_params(gaussian, units)?;
            let points = sample(&params, *count, *seed);
            emit(Some(out), io::samples_csv(&points).map_err(encode)?)?;
        }
        DensityCommand::Extremize { means, point } => {
            let pt = PhasePoint::new(point.x, point.p);
            let (vx, vp) = extremal_variances(means.mean_x, means.mean_p, pt, &units)?;
            println!(
                "var_x={} var_p={} product={} reduced_density={}",
                fmt_human(vx),
                fmt_human(vp),
                fmt_human(vx * vp),
                fmt_human(reduced_density(means.mean_x, means.mean_p, pt, &units))
            );
        }
        DensityCommand::Verify {
            means,
            point,
            fd_step,
        } => {
            let c = verify_extremum(
                means.mean_x,
                means.mean_p,
                PhasePoint::new(point.x, point.p),
                &units,
                *fd_step,
            )?;
            println!(
                "s_star={} first_derivative={} second_derivative={} is_max={}",
                fmt_human(c.s_star),
                fmt_human(c.first_derivative),
                fmt_human(c.second_derivative),
                c.is_max
            );
        }
        DensityCommand::Normcheck {
            means,
            var_x,
            var_p,
            half_width,
            box_half_width,
        } => {
            if let Some(l) = box_half_width {
                let v = reduced_box_integral(means.mean_x, means.mean_p, *l, &units)?;
                println!(
                    "box_integral={} half_width={} (not normalized; grows like ln L)",
                    io::fmt_machine(v),
                    fmt_human(*l)
                );
            } else {
                let (vx, vp) = (
                    var_x.expect("required by clap"),
                    var_p.expect("required by clap"),
                );
                let params = FluctuationParams::new(means.mean_x, means.mean_p, vx, vp, units)?;
                println!(
                    "integral={}",
                    io::fmt_machine(normalization_check(&params, *half_width)?)
                );
            }
        }
        DensityCommand::Scan {
            means,
            var_x,
            var_p,
            reduced,
            x_range,
            p_range,
            out,
        } => {
            check_out(out)?;
            let xr = (x_range.lo, x_range.hi, x_range.n);
            let pr = (p_range.lo, p_range.hi, p_range.n);
            let rows = if *reduced {
                density_scan(xr, pr, |pt| {
                    reduced_density(means.mean_x, means.mean_p, pt, &units)
                })?
            } else {
                let (vx, vp) = (
                    var_x.expect("required by clap"),
                    var_p.expect("required by clap"),
                );
                let params = FluctuationParams::new(means.mean_x, means.mean_p, vx, vp, units)?;
                density_scan(xr, pr, |pt| density_eval(&params, pt))?
            };
            emit(Some(out), io::scan_csv(&rows).map_err(encode)?)?;
        }
    }
    Ok(())
}

fn run_scenario(cmd: &ScenarioCommand, units: UnitSystem) -> Result<(), CliError> {
    let out = match cmd {
        ScenarioCommand::Eigensweep { out, .. }
        | ScenarioCommand::Thermalsweep { out, .. }
        | ScenarioCommand::Walk { out, .. } => out.as_deref(),
    };
    if let Some(o) = out {
        check_out(o)?;
    }
    let json = out.is_some_and(is_json);
    let bytes = match cmd {
        ScenarioCommand::Eigensweep { n_max, mass, omega, grid, .. } => {
            let rows = eigenstate_sweep(*n_max, *mass, *omega, &grid.grid()?, &units)?;
            if json { io::to_json(&rows) } else { io::sweep_csv(&rows) }
        }
        ScenarioCommand::Thermalsweep { temps, n_max, mass, omega, grid, .. } => {
            let rows = thermal_sweep(temps, *mass, *omega, *n_max, &grid.grid()?, &units)?;
            if json { io::to_json(&rows) } else { io::sweep_csv(&rows) }
        }
        ScenarioCommand::Walk { gaussian, steps, step_size, seed, .. } => {
            eprintln!("note: relaxation walk is toy dynamics (random multiplicative contraction), not a physical model");
            let start = gaussian_params(gaussian, units)?;
            let trace = relaxation_walk(&start, *steps, *step_size, *seed)?;
            if json { io::to_json(&trace) } else { io::walk_csv(&trace) }
        }
    }
    .map_err(encode)?;
    emit(out, bytes)
}

fn dispatch(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::State(a) => run_state(a, units_from(cli.h)?),
        Command::Audit(a) => run_audit(a, cli.h),
        Command::Density(d) => run_density(d, units_from(cli.h)?),
        Command::Scenario(s) => run_scenario(s, units_from(cli.h)?),
    }
}

/// Parses `argv` (including the program name) and runs one command,
/// returning the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(&cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
