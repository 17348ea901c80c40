//! Argument parsing and the four subcommands.

use std::io::Write;
use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use cavity_ghz::units::to_ns;
use cavity_ghz::Error;

use crate::config::ScenarioConfig;
use crate::output::{calibration_csv, calibration_table, trajectory_csv, validity_text, write_file};
use crate::run::{calibrate, simulate, simulate_calibrated};
use crate::{presets, CliError};

#[derive(Debug, Parser)]
#[command(name = "cavity-ghz", version, about = "Calibrate and simulate single-step GHZ-state generation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve the drive amplitudes and print the calibration table.
    Calibrate(Common),
    /// Integrate the scenario and write the fidelity trajectory.
    Simulate(Common),
    /// Repeat a simulation over one parameter axis.
    Sweep(SweepArgs),
    /// Print every rotating-wave margin.
    Validate(Common),
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("source").required(true).args(["config", "preset"])))]
pub struct Common {
    /// Scenario file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Built-in scenario.
    #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(presets::names().collect::<Vec<_>>()))]
    pub preset: Option<String>,
    /// Output file; overrides the path in the scenario's output section.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Override one key, e.g. `--set rates.kappa_over_2pi_kHz=0`.
    #[arg(long = "set", value_name = "SECTION.KEY=VALUE")]
    pub overrides: Vec<String>,
}

impl Common {
    pub fn load(&self) -> Result<ScenarioConfig, CliError> {
        match (&self.config, &self.preset) {
            (Some(path), _) => ScenarioConfig::load(path, &self.overrides),
            (None, Some(name)) => presets::load(name, &self.overrides),
            (None, None) => Err(CliError::Config("one of --config or --preset is required".into())),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Axis {
    /// Fock levels of the coupled mode.
    Truncation,
    /// Inter-cavity coupling J/2π in MHz.
    #[value(name = "J")]
    J,
    /// z-drive frequency ω_z/2π in MHz, recalibrated at each value.
    #[value(name = "omega_z")]
    OmegaZ,
    /// RK4 steps per period of the fastest frequency.
    Dt,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub axis: Axis,
    /// Comma-separated axis values; at least two.
    #[arg(long, value_delimiter = ',', required = true)]
    pub values: Vec<f64>,
}

pub fn run(cli: &Cli, stdout: &mut impl Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Calibrate(args) => cmd_calibrate(args, stdout),
        Command::Simulate(args) => cmd_simulate(args, stdout),
        Command::Sweep(args) => cmd_sweep(args, stdout),
        Command::Validate(args) => cmd_validate(args, stdout),
    }
}

fn print(stdout: &mut impl Write, text: &str) -> Result<(), CliError> {
    stdout.write_all(text.as_bytes()).map_err(|source| CliError::Io {
        path: "standard output".into(),
        source,
    })
}

fn cmd_calibrate(args: &Common, stdout: &mut impl Write) -> Result<(), CliError> {
    let cfg = args.load()?;
    let cal = calibrate(&cfg)?;
    print(stdout, &calibration_table(&cal))?;
    if let Some(path) = args.out.as_ref().or(cfg.output.calibration.as_ref()) {
        write_file(path, &calibration_csv(&cal))?;
    }
    if !cal.calibration.validity.passes() {
        return Err(Error::ValidityFailed(cal.calibration.validity.summary()).into());
    }
    Ok(())
}

fn cmd_validate(args: &Common, stdout: &mut impl Write) -> Result<(), CliError> {
    let cfg = args.load()?;
    let cal = calibrate(&cfg)?;
    let validity = &cal.calibration.validity;
    let text = validity_text(validity);
    print(stdout, &text)?;
    if let Some(path) = &args.out {
        write_file(path, &text)?;
    }
    if !validity.passes() {
        return Err(Error::ValidityFailed(validity.summary()).into());
    }
    Ok(())
}

fn cmd_simulate(args: &Common, stdout: &mut impl Write) -> Result<(), CliError> {
    let cfg = args.load()?;
    let outcome = simulate(&cfg)?;
    let csv = trajectory_csv(&outcome.trajectory);
    let r = outcome.final_report;
    let summary = format!(
        "final fidelity {:.6} at t = {:.4} ns (phase-optimised {:.6}, with vacuum {:.6}); \
         dim {}, max trace error {:.3e}\n",
        outcome.final_fidelity(),
        to_ns(outcome.t_final),
        r.phase_optimized,
        r.with_vacuum,
        outcome.dim,
        outcome.trajectory.max_trace_error()
    );
    match args.out.as_ref().or(cfg.output.trajectory.as_ref()) {
        Some(path) => {
            write_file(path, &csv)?;
            print(stdout, &summary)
        }
        None => {
            eprint!("{summary}");
            print(stdout, &csv)
        }
    }
}

/// Final values of one sweep point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    /// Whether the rotating-wave check passed; the run happens either way.
    pub valid: bool,
    pub fidelity: f64,
    pub max_trace_error: f64,
    pub purity: f64,
}

pub const SWEEP_HEADER: &str = "value,valid,final_fidelity,max_trace_error,final_purity";

fn with_axis(cfg: &ScenarioConfig, axis: Axis, value: f64) -> Result<ScenarioConfig, CliError> {
    let mut c = cfg.clone();
    match axis {
        Axis::Truncation => {
            if value.fract() != 0.0 || value < 2.0 {
                return Err(CliError::Config(format!("truncation value {value} is not an integer >= 2")));
            }
            c.truncation.levels = value as usize;
        }
        Axis::J => c.device.j = value,
        Axis::OmegaZ => c.calibration.omega_z = value,
        Axis::Dt => c.integration.steps_per_period = value,
    }
    Ok(c)
}

/// Runs every value in parallel; rows come back sorted by value.
pub fn sweep(cfg: &ScenarioConfig, axis: Axis, values: &[f64]) -> Result<Vec<SweepRow>, CliError> {
    if values.len() < 2 {
        return Err(CliError::Config("a sweep needs at least two values".into()));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(CliError::Config("sweep values must be finite".into()));
    }
    let mut values = values.to_vec();
    values.sort_by(f64::total_cmp);
    values
        .par_iter()
        .map(|&value| {
            let c = with_axis(cfg, axis, value)?;
            let cal = calibrate(&c)?;
            let valid = cal.calibration.validity.passes();
            let out = simulate_calibrated(&c, cal)?;
            Ok(SweepRow {
                value,
                valid,
                fidelity: out.final_fidelity(),
                max_trace_error: out.trajectory.max_trace_error(),
                purity: out.trajectory.final_record().purity,
            })
        })
        .collect()
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{:.14e},{},{:.14e},{:.14e},{:.14e}\n",
            r.value, r.valid, r.fidelity, r.max_trace_error, r.purity
        ));
    }
    out
}

/// Successive fidelity changes along a refinement axis, and whether they
/// shrink monotonically.
pub fn convergence_report(rows: &[SweepRow]) -> String {
    let deltas: Vec<f64> = rows.windows(2).map(|w| (w[1].fidelity - w[0].fidelity).abs()).collect();
    let mut out = String::new();
    for (w, d) in rows.windows(2).zip(&deltas) {
        out.push_str(&format!("|F({}) - F({})| = {:.3e}\n", w[1].value, w[0].value, d));
    }
    let monotone = deltas.windows(2).all(|d| d[1] <= d[0]);
    out.push_str(&format!(
        "convergence: {}\n",
        if monotone { "monotonic" } else { "not monotonic" }
    ));
    out
}

fn cmd_sweep(args: &SweepArgs, stdout: &mut impl Write) -> Result<(), CliError> {
    let cfg = args.common.load()?;
    let rows = sweep(&cfg, args.axis, &args.values)?;
    let csv = sweep_csv(&rows);
    let report = match args.axis {
        Axis::Truncation | Axis::Dt => convergence_report(&rows),
        Axis::J | Axis::OmegaZ => String::new(),
    };
    match args.common.out.as_ref().or(cfg.output.sweep.as_ref()) {
        Some(path) => {
            write_file(path, &csv)?;
            print(stdout, &report)
        }
        None => {
            print(stdout, &csv)?;
            eprint!("{report}");
            Ok(())
        }
    }
}
