//! `spinqnd` command-line front end.
//!
//! Exit codes: 0 ok, 2 invalid input, 3 I/O failure, 4 invariant failure.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::analytics;
use crate::coupling::kappa_from_physics;
use crate::error::Error;
use crate::model::{two_pi_mhz, ExperimentConfig, PhysicalParams, VarianceReport};
use crate::montecarlo;
use crate::oracle::{self, ExactSystem, OracleReport};

pub const EXIT_INVALID: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_INVARIANT: i32 = 4;

/// Environment variable capping the worker thread count.
pub const THREADS_ENV: &str = "SPINQND_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "spinqnd",
    version,
    about = "QND spin squeezing and rotation simulator"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Interaction strength κ from atomic and optical constants.
    Kappa(KappaArgs),
    /// Theory curves of all readout variances versus rotation angle.
    Curves(CurvesArgs),
    /// Monte Carlo angle sweep from a JSON config.
    Simulate(SimulateArgs),
    /// Exact small-ensemble simulation compared with the linearized model.
    Oracle(OracleArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    /// Cold ¹⁷¹Yb probed on ¹S₀ ↔ ¹P₁ at 399 nm.
    Yb171,
}

/// Frequencies are entered as `2π × value` with the value in MHz.
#[derive(Debug, Args)]
pub struct KappaArgs {
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
    /// Natural linewidth Γ/2π in MHz.
    #[arg(long, allow_hyphen_values = true)]
    pub gamma: Option<f64>,
    /// Absorption cross section in m².
    #[arg(long, allow_hyphen_values = true)]
    pub sigma0: Option<f64>,
    /// Beam waist in m.
    #[arg(long, allow_hyphen_values = true)]
    pub w0: Option<f64>,
    /// Probe detuning δ/2π in MHz.
    #[arg(long, allow_hyphen_values = true)]
    pub delta: Option<f64>,
    /// Hyperfine splitting δ₀/2π in MHz.
    #[arg(long, allow_hyphen_values = true)]
    pub delta0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub n_atoms: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub n_photons: Option<f64>,
    /// Atomic loss parameter ε_A (default 0 without a preset).
    #[arg(long, allow_hyphen_values = true)]
    pub epsilon_a: Option<f64>,
}

#[derive(Debug, Args)]
pub struct CurvesArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub kappa: f64,
    /// Explicit comma-separated angles (rad); overrides the uniform grid.
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    pub angles: Option<Vec<f64>>,
    /// Number of uniform steps from 0 to `--phi-max`.
    #[arg(long, default_value_t = 16)]
    pub steps: usize,
    #[arg(long, default_value_t = std::f64::consts::PI)]
    pub phi_max: f64,
    /// Spin attenuation per probe pass; 0 uses the closed forms.
    #[arg(long, default_value_t = 0.0)]
    pub loss: f64,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    /// Run only the coherent-state control (no first probe interaction).
    #[arg(long)]
    pub no_first_pulse: bool,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[arg(long, default_value_t = 8)]
    pub n_atoms: usize,
    #[arg(long, default_value_t = 8)]
    pub n_photons: usize,
    /// Run a convergence study with N_A = N_L = each listed size.
    #[arg(long, value_delimiter = ',')]
    pub sizes: Option<Vec<usize>>,
    #[arg(long, allow_hyphen_values = true)]
    pub kappa: f64,
    #[arg(long, value_delimiter = ',', num_args = 0.., required = true)]
    pub angles: Vec<f64>,
    /// Largest accepted relative deviation at the largest size.
    #[arg(long, default_value_t = 0.15)]
    pub max_deviation: f64,
}

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn invalid(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INVALID,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Io(_) => EXIT_IO,
            Error::Invariant(_) => EXIT_INVARIANT,
            _ => EXIT_INVALID,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

fn io_error(path: &Path, e: std::io::Error) -> CliError {
    CliError {
        code: EXIT_IO,
        message: format!("{}: {e}", path.display()),
    }
}

type CliResult = Result<(), CliError>;

pub fn run(cli: Cli, out: &mut dyn Write) -> CliResult {
    match cli.command {
        Command::Kappa(args) => cmd_kappa(&args, out),
        Command::Curves(args) => cmd_curves(&args, out),
        Command::Simulate(args) => cmd_simulate(&args, out),
        Command::Oracle(args) => cmd_oracle(&args, out),
    }
}

fn write_out(out: &mut dyn Write, text: &str) -> CliResult {
    out.write_all(text.as_bytes()).map_err(|e| CliError {
        code: EXIT_IO,
        message: format!("stdout: {e}"),
    })
}

#[derive(Debug, Serialize)]
pub struct KappaSummary {
    pub kappa: f64,
    pub abs_kappa: f64,
    pub j: f64,
    pub s: f64,
    pub epsilon_a: f64,
}

pub fn resolve_params(args: &KappaArgs) -> Result<PhysicalParams, CliError> {
    let base = args.preset.map(|Preset::Yb171| PhysicalParams::yb171());
    let mut missing = Vec::new();
    let mut pick = |value: Option<f64>, preset: Option<f64>, flag: &'static str| {
        value.or(preset).unwrap_or_else(|| {
            missing.push(flag);
            f64::NAN
        })
    };
    let params = PhysicalParams {
        gamma: pick(args.gamma.map(two_pi_mhz), base.map(|b| b.gamma), "--gamma"),
        sigma0: pick(args.sigma0, base.map(|b| b.sigma0), "--sigma0"),
        w0: pick(args.w0, base.map(|b| b.w0), "--w0"),
        delta: pick(args.delta.map(two_pi_mhz), base.map(|b| b.delta), "--delta"),
        delta0: pick(args.delta0.map(two_pi_mhz), base.map(|b| b.delta0), "--delta0"),
        n_atoms: pick(args.n_atoms, base.map(|b| b.n_atoms), "--n-atoms"),
        n_photons: pick(args.n_photons, base.map(|b| b.n_photons), "--n-photons"),
        epsilon_a: args.epsilon_a.or(base.map(|b| b.epsilon_a)).unwrap_or(0.0),
    };
    if !missing.is_empty() {
        let usage = Cli::command()
            .find_subcommand_mut("kappa")
            .map(|c| c.render_usage().to_string())
            .unwrap_or_default();
        return Err(CliError::invalid(format!(
            "missing required flags without --preset: {}\n\n{usage}",
            missing.join(", ")
        )));
    }
    let violations = params.violations();
    if !violations.is_empty() {
        return Err(CliError::invalid(violations.join("; ")));
    }
    Ok(params)
}

pub fn cmd_kappa(args: &KappaArgs, out: &mut dyn Write) -> CliResult {
    let params = resolve_params(args)?;
    let kappa = kappa_from_physics(&params)?;
    let summary = KappaSummary {
        kappa,
        abs_kappa: kappa.abs(),
        j: params.spin_length(),
        s: params.stokes_length(),
        epsilon_a: params.epsilon_a,
    };
    let text = serde_json::to_string_pretty(&summary).map_err(Error::from)?;
    write_out(out, &(text + "\n"))
}

pub fn curve_grid(args: &CurvesArgs) -> Result<Vec<f64>, CliError> {
    let grid = match &args.angles {
        Some(a) => a.clone(),
        None => {
            if args.steps == 0 {
                return Err(CliError::invalid("--steps must be ≥ 1"));
            }
            (0..=args.steps)
                .map(|k| args.phi_max * k as f64 / args.steps as f64)
                .collect()
        }
    };
    if grid.is_empty() {
        return Err(CliError::invalid("angle grid is empty"));
    }
    if grid.iter().any(|a| !a.is_finite()) {
        return Err(CliError::invalid("angles must be finite"));
    }
    Ok(grid)
}

pub fn curves_csv(kappa: f64, grid: &[f64], loss: f64) -> Result<String, CliError> {
    if !kappa.is_finite() {
        return Err(CliError::invalid("kappa must be finite"));
    }
    if !(0.0..1.0).contains(&loss) {
        return Err(CliError::invalid("loss out of [0,1)"));
    }
    let mut csv = String::from("phi,v1,v2,v_plus,v_minus,v_cond,v_coh\n");
    for &phi in grid {
        let r = analytics::curve_row(kappa, phi, loss)?;
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{}",
            r.phi, r.v1, r.v2, r.v_plus, r.v_minus, r.v_cond, r.v_coh
        );
    }
    Ok(csv)
}

pub fn cmd_curves(args: &CurvesArgs, out: &mut dyn Write) -> CliResult {
    let grid = curve_grid(args)?;
    let csv = curves_csv(args.kappa, &grid, args.loss)?;
    match &args.output {
        Some(path) => fs::write(path, csv).map_err(|e| io_error(path, e)),
        None => write_out(out, &csv),
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".to_string(), |x| format!("{x:.5}"))
}

fn summary_table(reports: &[VarianceReport], global_g: Option<f64>) -> String {
    let mut t = String::new();
    if let Some(g) = global_g {
        let _ = writeln!(t, "global g = {g:.6}");
    }
    let _ = writeln!(
        t,
        "{:<9} {:>8} {:>9} {:>9} {:>9} {:>9} {:>9} {:>9}",
        "protocol", "phi", "V1", "V2", "V+", "V-", "Vcond", "dV2"
    );
    for r in reports {
        let _ = writeln!(
            t,
            "{:<9} {:>8.4} {:>9.5} {:>9.5} {:>9.5} {:>9.5} {:>9} {:>9.5}",
            format!("{:?}", r.protocol).to_lowercase(),
            r.phi,
            r.v1,
            r.v2,
            r.v_plus,
            r.v_minus,
            fmt_opt(r.v_cond),
            r.dv2
        );
    }
    t
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig, CliError> {
    let text = fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    let config = ExperimentConfig::from_json(&text)
        .map_err(|e| CliError::invalid(format!("{}: {e}", path.display())))?;
    let violations = config.violations();
    if !violations.is_empty() {
        return Err(CliError::invalid(violations.join("; ")));
    }
    Ok(config)
}

pub fn cmd_simulate(args: &SimulateArgs, out: &mut dyn Write) -> CliResult {
    let config = load_config(&args.config)?;
    fs::create_dir_all(&args.out_dir).map_err(|e| io_error(&args.out_dir, e))?;
    let write = |name: &str, text: String| {
        let path = args.out_dir.join(name);
        fs::write(&path, text).map_err(|e| io_error(&path, e))
    };
    let (reports, global_g) = if args.no_first_pulse {
        let runs = montecarlo::coherent_control(&config)?;
        let records: Vec<_> = runs.iter().flat_map(|r| r.records.iter().copied()).collect();
        write("records.csv", montecarlo::records_csv(&records))?;
        (runs.into_iter().map(|r| r.report).collect::<Vec<_>>(), None)
    } else {
        let sweep = montecarlo::sweep(&config)?;
        write("records.csv", montecarlo::records_csv(&sweep.squeezed_records()))?;
        write(
            "records_coherent.csv",
            montecarlo::records_csv(&sweep.coherent_records()),
        )?;
        (sweep.reports(), Some(sweep.global_g))
    };
    write("report.json", montecarlo::reports_json(&reports)? + "\n")?;
    write_out(out, &summary_table(&reports, global_g))
}

/// Checks that the max deviation at each angle does not grow with size.
pub fn convergence_violations(reports: &[OracleReport], sizes: &[usize], angles: &[f64]) -> Vec<String> {
    let mut out = Vec::new();
    for (ai, phi) in angles.iter().enumerate() {
        let series: Vec<f64> = (0..sizes.len())
            .map(|si| reports[si * angles.len() + ai].deviations.max_relative)
            .collect();
        for w in 0..series.len().saturating_sub(1) {
            if series[w + 1] > series[w] {
                out.push(format!(
                    "φ = {phi}: deviation grows from {:.3e} (N = {}) to {:.3e} (N = {})",
                    series[w],
                    sizes[w],
                    series[w + 1],
                    sizes[w + 1]
                ));
            }
        }
    }
    out
}

pub fn oracle_reports(args: &OracleArgs) -> Result<(Vec<OracleReport>, Vec<String>), CliError> {
    if args.angles.is_empty() {
        return Err(CliError::invalid("angle list is empty"));
    }
    let sizes: Vec<(usize, usize)> = match &args.sizes {
        Some(s) if s.is_empty() => return Err(CliError::invalid("size list is empty")),
        Some(s) => s.iter().map(|&n| (n, n)).collect(),
        None => vec![(args.n_atoms, args.n_photons)],
    };
    let systems = sizes
        .iter()
        .map(|&(na, nl)| ExactSystem::new(na, nl, args.kappa))
        .collect::<Result<Vec<_>, _>>()?;
    let mut reports = Vec::new();
    for system in &systems {
        for &phi in &args.angles {
            reports.push(oracle::compare(system, phi)?);
        }
    }
    let mut failures = Vec::new();
    if let Some(s) = &args.sizes {
        failures.extend(convergence_violations(&reports, s, &args.angles));
    }
    let last = &reports[reports.len() - args.angles.len()..];
    for r in last {
        if !(r.deviations.max_relative < args.max_deviation) {
            failures.push(format!(
                "φ = {}: max relative deviation {:.3e} ≥ {}",
                r.phi, r.deviations.max_relative, args.max_deviation
            ));
        }
    }
    Ok((reports, failures))
}

pub fn cmd_oracle(args: &OracleArgs, out: &mut dyn Write) -> CliResult {
    let (reports, failures) = oracle_reports(args)?;
    let text = serde_json::to_string_pretty(&reports).map_err(Error::from)?;
    write_out(out, &(text + "\n"))?;
    if failures.is_empty() {
        Ok(())
    } else {
        Err(CliError {
            code: EXIT_INVARIANT,
            message: failures.join("\n"),
        })
    }
}

/// Reads [`THREADS_ENV`] and installs a capped global thread pool.
pub fn configure_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = value
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::invalid(format!("{THREADS_ENV} must be a positive integer")))?;
    // a second install (e.g. repeated in-process runs) keeps the first pool
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}
