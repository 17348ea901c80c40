//! Scenario configuration: a TOML document with one table per concern.
//!
//! Frequencies are entered as `f/2π` with the unit in the key name
//! (`*_over_2pi_MHz`, `*_over_2pi_kHz`) and converted to rad/s on use.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use cavity_ghz::calibration::CalibrationTargets;
use cavity_ghz::device::{DeviceParams, Thresholds, Topology};
use cavity_ghz::hamiltonian::{Rates, Truncation};
use cavity_ghz::units::{khz, mhz, ns};

use crate::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    /// Free-form label echoed in reports.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub device: DeviceSection,
    pub calibration: CalibrationSection,
    #[serde(default)]
    pub truncation: TruncationSection,
    #[serde(default)]
    pub integration: IntegrationSection,
    #[serde(default)]
    pub rates: RatesSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TopologyName {
    TwoCavity,
    OneCavity,
}

impl From<TopologyName> for Topology {
    fn from(t: TopologyName) -> Self {
        match t {
            TopologyName::TwoCavity => Topology::TwoCavity,
            TopologyName::OneCavity => Topology::OneCavity,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviceSection {
    pub topology: TopologyName,
    #[serde(rename = "omega_r_over_2pi_MHz")]
    pub omega_r: f64,
    /// Inter-cavity hopping; ignored for one cavity.
    #[serde(rename = "J_over_2pi_MHz", default)]
    pub j: f64,
    /// Bare couplings, cavity A qubits first.
    #[serde(rename = "g_over_2pi_MHz")]
    pub g: Vec<f64>,
    /// Qubit frequencies; when absent every qubit sits at
    /// `ω_mode − ω_z − δ`.
    #[serde(rename = "omega_q_over_2pi_MHz", default, skip_serializing_if = "Option::is_none")]
    pub omega_q: Option<Vec<f64>>,
}

fn default_k() -> u32 {
    1
}

fn default_phi() -> f64 {
    std::f64::consts::FRAC_PI_2
}

fn default_m_range() -> i32 {
    cavity_ghz::device::DEFAULT_M_RANGE
}

fn default_threshold() -> f64 {
    3.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CalibrationSection {
    #[serde(rename = "g_target_over_2pi_MHz")]
    pub g_target: f64,
    #[serde(rename = "Omega_target_over_2pi_MHz")]
    pub omega_target: f64,
    #[serde(rename = "omega_z_over_2pi_MHz")]
    pub omega_z: f64,
    /// Revival index: `δ = √k g`.
    #[serde(default = "default_k")]
    pub k: u32,
    /// z-drive phase `φ`.
    #[serde(default = "default_phi")]
    pub phi_rad: f64,
    /// x-drive phase `φ_d`.
    #[serde(default)]
    pub phi_d_rad: f64,
    #[serde(default = "default_m_range")]
    pub m_range: i32,
    #[serde(default = "default_threshold")]
    pub sideband_threshold: f64,
    #[serde(default = "default_threshold")]
    pub drive_threshold: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TruncationSection {
    /// Fock levels of `P_−` (or the single mode).
    #[serde(default = "default_levels")]
    pub levels: usize,
    /// Fock levels of the spectator `P_+` mode; unused for one cavity.
    #[serde(default = "default_spectator_levels")]
    pub spectator_levels: usize,
}

fn default_levels() -> usize {
    10
}

fn default_spectator_levels() -> usize {
    3
}

impl Default for TruncationSection {
    fn default() -> Self {
        Self {
            levels: default_levels(),
            spectator_levels: default_spectator_levels(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TierName {
    Full,
    Effective,
    Reduced,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodName {
    Rk4,
    Adaptive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntegrationSection {
    pub tier: TierName,
    pub method: MethodName,
    /// RK4 steps per period of the fastest frequency in the model.
    pub steps_per_period: f64,
    /// Number of trajectory samples after `t = 0`.
    pub samples: usize,
    /// End time; defaults to the gate time `τ`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_final_ns: Option<f64>,
    pub rtol: f64,
    pub atol: f64,
}

impl Default for IntegrationSection {
    fn default() -> Self {
        Self {
            tier: TierName::Full,
            method: MethodName::Rk4,
            steps_per_period: cavity_ghz::dynamics::DEFAULT_STEPS_PER_PERIOD,
            samples: 100,
            t_final_ns: None,
            rtol: 1e-9,
            atol: 1e-11,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RatesSection {
    #[serde(rename = "kappa_over_2pi_kHz")]
    pub kappa: f64,
    #[serde(rename = "beta_over_2pi_kHz")]
    pub beta: f64,
    #[serde(rename = "gamma_over_2pi_kHz")]
    pub gamma: f64,
}

impl Default for RatesSection {
    fn default() -> Self {
        Self {
            kappa: 4.0,
            beta: 4.0,
            gamma: 4.0,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trajectory: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub calibration: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<PathBuf>,
}

impl ScenarioConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        Self::parse_with_overrides(text, &[])
    }

    /// Parses `text`, applies `section.key=value` overrides, then validates
    /// against the schema.
    pub fn parse_with_overrides(text: &str, overrides: &[String]) -> Result<Self, CliError> {
        let mut table: toml::Table = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        for item in overrides {
            apply_override(&mut table, item)?;
        }
        let cfg: Self = toml::Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| CliError::Config(e.to_string()))?;
        cfg.check()?;
        Ok(cfg)
    }

    pub fn load(path: &Path, overrides: &[String]) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::parse_with_overrides(&text, overrides)
            .map_err(|e| CliError::Config(format!("{}: {}", path.display(), e.message())))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serialises")
    }

    /// Range checks that the schema alone cannot express.
    fn check(&self) -> Result<(), CliError> {
        let bad = |field: &str, why: &str| Err(CliError::Config(format!("{field}: {why}")));
        let finite_positive = |x: f64| x.is_finite() && x > 0.0;
        if self.device.g.is_empty() {
            return bad("device.g_over_2pi_MHz", "at least two qubits are required");
        }
        if !self.device.g.iter().all(|&g| finite_positive(g)) {
            return bad("device.g_over_2pi_MHz", "couplings must be positive");
        }
        if let Some(wq) = &self.device.omega_q {
            if wq.len() != self.device.g.len() {
                return bad("device.omega_q_over_2pi_MHz", "needs one entry per coupling");
            }
        }
        if !finite_positive(self.calibration.g_target) {
            return bad("calibration.g_target_over_2pi_MHz", "must be positive");
        }
        if !finite_positive(self.calibration.omega_target) {
            return bad("calibration.Omega_target_over_2pi_MHz", "must be positive");
        }
        if !finite_positive(self.calibration.omega_z) {
            return bad("calibration.omega_z_over_2pi_MHz", "must be positive");
        }
        if self.calibration.k == 0 {
            return bad("calibration.k", "must be at least 1");
        }
        if self.truncation.levels < 2 || self.truncation.spectator_levels < 2 {
            return bad("truncation", "every mode needs at least 2 levels");
        }
        if !finite_positive(self.integration.steps_per_period) {
            return bad("integration.steps_per_period", "must be positive");
        }
        if self.integration.samples == 0 {
            return bad("integration.samples", "must be at least 1");
        }
        if let Some(t) = self.integration.t_final_ns {
            if !finite_positive(t) {
                return bad("integration.t_final_ns", "must be positive");
            }
        }
        for (field, r) in [
            ("rates.kappa_over_2pi_kHz", self.rates.kappa),
            ("rates.beta_over_2pi_kHz", self.rates.beta),
            ("rates.gamma_over_2pi_kHz", self.rates.gamma),
        ] {
            if !(r.is_finite() && r >= 0.0) {
                return bad(field, "must be non-negative");
            }
        }
        Ok(())
    }

    pub fn topology(&self) -> Topology {
        self.device.topology.into()
    }

    pub fn targets(&self) -> CalibrationTargets<f64> {
        CalibrationTargets {
            g: mhz(self.calibration.g_target),
            omega: mhz(self.calibration.omega_target),
            omega_z: mhz(self.calibration.omega_z),
            k: self.calibration.k,
        }
    }

    pub fn thresholds(&self) -> Thresholds<f64> {
        Thresholds {
            sideband: self.calibration.sideband_threshold,
            drive: self.calibration.drive_threshold,
        }
    }

    pub fn device(&self) -> Result<DeviceParams<f64>, CliError> {
        let g: Vec<f64> = self.device.g.iter().copied().map(mhz).collect();
        let dev = match &self.device.omega_q {
            Some(wq) => DeviceParams::new(
                self.topology(),
                mhz(self.device.omega_r),
                mhz(self.device.j),
                wq.iter().copied().map(mhz).collect(),
                g,
            )?,
            None => {
                let targets = self.targets();
                let delta = cavity_ghz::calibration::revival_detuning(targets.g, targets.k);
                DeviceParams::with_uniform_qubits(
                    self.topology(),
                    mhz(self.device.omega_r),
                    mhz(self.device.j),
                    g,
                    targets.omega_z,
                    delta,
                )?
            }
        };
        Ok(dev)
    }

    pub fn truncation(&self) -> Result<Truncation, CliError> {
        Ok(Truncation::new(self.truncation.levels, self.truncation.spectator_levels)?)
    }

    pub fn rates(&self) -> Rates<f64> {
        Rates {
            kappa: khz(self.rates.kappa),
            beta: khz(self.rates.beta),
            gamma: khz(self.rates.gamma),
        }
    }

    pub fn t_final(&self, tau: f64) -> f64 {
        self.integration.t_final_ns.map(ns).unwrap_or(tau)
    }
}

/// `section.key=value`; the value is read as a TOML value, or as a bare
/// string when it does not parse as one.
fn apply_override(table: &mut toml::Table, item: &str) -> Result<(), CliError> {
    let (path, raw) = item
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("override `{item}` is not of the form key=value")))?;
    let value = match toml::from_str::<toml::Table>(&format!("v = {}", raw.trim())) {
        Ok(mut t) => t.remove("v").expect("single key"),
        Err(_) => toml::Value::String(raw.trim().to_string()),
    };
    let keys: Vec<&str> = path.trim().split('.').collect();
    let (last, parents) = keys.split_last().expect("split yields at least one item");
    let mut node = table;
    for key in parents {
        node = node
            .entry(key.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()))
            .as_table_mut()
            .ok_or_else(|| CliError::Config(format!("override `{path}`: `{key}` is not a table")))?;
    }
    node.insert(last.to_string(), value);
    Ok(())
}
