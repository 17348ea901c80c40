//! Scenario execution: calibration, model construction and integration.

use cavity_ghz::calibration::{calibrate_report, CalibrationResult};
use cavity_ghz::device::{DeviceParams, DriveParams};
use cavity_ghz::dynamics::{evolve, evolve_pure, IntegrationConfig, Trajectory};
use cavity_ghz::ghz::{ghz_target, FidelityReport, FrameSpec, GhzObserver};
use cavity_ghz::hamiltonian::{
    build_effective, build_full, build_reduced, collapse_set, HamiltonianModel, TermHamiltonian,
};
use cavity_ghz::quantum::DensityMatrix;
use cavity_ghz::Error;

use crate::config::{MethodName, ScenarioConfig, TierName};
use crate::CliError;

/// A calibrated device ready to be simulated.
#[derive(Clone, Debug)]
pub struct Calibrated {
    pub device: DeviceParams<f64>,
    pub calibration: CalibrationResult<f64>,
    pub drive: DriveParams<f64>,
}

/// Solves the calibration and attaches the validity report without
/// rejecting on it.
pub fn calibrate(cfg: &ScenarioConfig) -> Result<Calibrated, CliError> {
    let device = cfg.device()?;
    let calibration = calibrate_report(
        &device,
        cfg.targets(),
        cfg.calibration.phi_rad,
        cfg.calibration.phi_d_rad,
        cfg.calibration.m_range,
        cfg.thresholds(),
    )?;
    let drive = calibration.drive_params(&device, cfg.calibration.phi_rad, cfg.calibration.phi_d_rad);
    Ok(Calibrated {
        device,
        calibration,
        drive,
    })
}

/// As [`calibrate`], failing when the validity check does.
pub fn calibrate_strict(cfg: &ScenarioConfig) -> Result<Calibrated, CliError> {
    let cal = calibrate(cfg)?;
    if !cal.calibration.validity.passes() {
        return Err(Error::ValidityFailed(cal.calibration.validity.summary()).into());
    }
    Ok(cal)
}

/// The Hamiltonian of the configured tier and the frame its qubit state
/// lives in.
pub fn model(cfg: &ScenarioConfig, cal: &Calibrated) -> Result<(TermHamiltonian<f64>, FrameSpec<f64>), CliError> {
    let levels = cfg.truncation.levels;
    Ok(match cfg.integration.tier {
        TierName::Full => (
            build_full(&cal.device, &cal.drive, cfg.truncation()?)?,
            FrameSpec::new(&cal.device, &cal.drive)?,
        ),
        TierName::Effective => (
            build_effective(&cal.device, &cal.drive, levels)?,
            FrameSpec::new(&cal.device, &cal.drive)?,
        ),
        TierName::Reduced => (
            build_reduced(&cal.calibration, levels)?,
            FrameSpec::identity(cal.device.n_qubits()),
        ),
    })
}

pub fn integration(cfg: &ScenarioConfig, h: &TermHamiltonian<f64>, t_final: f64) -> Result<IntegrationConfig<f64>, CliError> {
    let int = &cfg.integration;
    Ok(match int.method {
        MethodName::Rk4 => IntegrationConfig::for_model(h, t_final, int.steps_per_period, int.samples)?,
        MethodName::Adaptive => IntegrationConfig::adaptive(t_final, int.rtol, int.atol, int.samples),
    })
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub calibrated: Calibrated,
    pub trajectory: Trajectory<f64>,
    /// Every fidelity variant at the final time.
    pub final_report: FidelityReport<f64>,
    pub t_final: f64,
    pub dim: usize,
    pub steps: Option<usize>,
}

impl RunOutcome {
    pub fn final_fidelity(&self) -> f64 {
        self.trajectory.final_fidelity()
    }
}

/// Integrates a calibrated scenario from the ground state. Runs with every
/// rate at zero use the Schrödinger equation.
pub fn simulate_calibrated(cfg: &ScenarioConfig, cal: Calibrated) -> Result<RunOutcome, CliError> {
    let (h, frame) = model(cfg, &cal)?;
    let layout = h.layout().clone();
    let target = ghz_target(cal.device.n_per_cavity(), cal.device.topology)?;
    let observer = GhzObserver::new(layout.clone(), target, frame)?;
    let t_final = cfg.t_final(cal.calibration.tau);
    let int = integration(cfg, &h, t_final)?;
    let psi0 = layout.ground_state::<f64>();
    let collapse = collapse_set(&layout, cfg.rates())?;
    let (trajectory, final_report) = if collapse.is_dissipation_free() {
        let tr = evolve_pure(&psi0, &h, &int, &observer)?;
        let report = observer.report_pure(t_final, tr.final_ket().expect("pure run"))?;
        (tr, report)
    } else {
        let tr = evolve(&DensityMatrix::from_pure(&psi0), &h, &collapse, &int, &observer)?;
        let report = observer.report(t_final, tr.final_density().expect("density run").matrix())?;
        (tr, report)
    };
    Ok(RunOutcome {
        calibrated: cal,
        trajectory,
        final_report,
        t_final,
        dim: layout.dim(),
        steps: int.steps(),
    })
}

/// Strict calibration followed by the run.
pub fn simulate(cfg: &ScenarioConfig) -> Result<RunOutcome, CliError> {
    let cal = calibrate_strict(cfg)?;
    simulate_calibrated(cfg, cal)
}
