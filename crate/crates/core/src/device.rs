//! Hardware and drive parameters, normal modes, and the rotating-wave
//! validity check on the drive sidebands.
//!
//! All frequencies are angular (rad/s).

use std::fmt;

use crate::bessel::j1;
use crate::{Error, Real, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Topology {
    /// All qubits share a single cavity mode.
    OneCavity,
    /// Half of the qubits sit in cavity A, the other half in cavity B.
    TwoCavity,
}

impl Topology {
    pub fn name(self) -> &'static str {
        match self {
            Topology::OneCavity => "one-cavity",
            Topology::TwoCavity => "two-cavity",
        }
    }
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Bosonic modes the qubits couple to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CavityMode {
    /// Symmetric normal mode `(a + b)/√2` at `ω_r + J`.
    Plus,
    /// Antisymmetric normal mode `(a − b)/√2` at `ω_r − J`.
    Minus,
    /// The bare mode of the one-cavity layout.
    Single,
}

impl fmt::Display for CavityMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CavityMode::Plus => "P+",
            CavityMode::Minus => "P-",
            CavityMode::Single => "a",
        })
    }
}

/// Static hardware description.
#[derive(Clone, Debug, PartialEq)]
pub struct DeviceParams<T> {
    pub topology: Topology,
    /// Bare cavity frequency.
    pub omega_r: T,
    /// Inter-cavity coupling; ignored for one cavity.
    pub j_coupling: T,
    /// Qubit transition frequencies, qubits `1..N` in cavity A first.
    pub omega_q: Vec<T>,
    /// Bare qubit-cavity couplings.
    pub g: Vec<T>,
}

impl<T: Real> DeviceParams<T> {
    pub fn new(topology: Topology, omega_r: T, j_coupling: T, omega_q: Vec<T>, g: Vec<T>) -> Result<Self> {
        let dev = Self {
            topology,
            omega_r,
            j_coupling,
            omega_q,
            g,
        };
        dev.validate()?;
        Ok(dev)
    }

    /// Places every qubit so that the coupled mode sits `omega_z + delta`
    /// above it: `ω_− − ω_q = ω_z + δ` for two cavities, `ω_r − ω_q = ω_z + δ`
    /// for one.
    pub fn with_uniform_qubits(
        topology: Topology,
        omega_r: T,
        j_coupling: T,
        g: Vec<T>,
        omega_z: T,
        delta: T,
    ) -> Result<Self> {
        let mode = match topology {
            Topology::TwoCavity => omega_r - j_coupling,
            Topology::OneCavity => omega_r,
        };
        let omega_q = vec![mode - omega_z - delta; g.len()];
        Self::new(topology, omega_r, j_coupling, omega_q, g)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.g.len();
        if n == 0 || !n.is_multiple_of(2) {
            return Err(Error::Parameter(format!(
                "the qubit count must be even and positive, got {n}"
            )));
        }
        if self.omega_q.len() != n {
            return Err(Error::Dimension {
                expected: n,
                found: self.omega_q.len(),
            });
        }
        if let Some(j) = self.g.iter().position(|&g| !(g > T::zero()) || !g.is_finite()) {
            return Err(Error::Parameter(format!("coupling g of qubit {} must be positive", j + 1)));
        }
        if self.topology == Topology::TwoCavity && !(self.j_coupling > T::zero()) {
            return Err(Error::Parameter(
                "the inter-cavity coupling J must be positive for two cavities".into(),
            ));
        }
        if !self.omega_r.is_finite() || self.omega_q.iter().any(|w| !w.is_finite()) {
            return Err(Error::Parameter("frequencies must be finite".into()));
        }
        Ok(())
    }

    pub fn n_qubits(&self) -> usize {
        self.g.len()
    }

    /// `N`, the number of qubits per cavity (half the total).
    pub fn n_per_cavity(&self) -> usize {
        self.g.len() / 2
    }

    /// `+1` for qubits in cavity A, `−1` for cavity B; always `+1` with one
    /// cavity. This is the sign with which a qubit couples to `P_−`.
    pub fn minus_mode_sign(&self, qubit: usize) -> T {
        match self.topology {
            Topology::TwoCavity if qubit >= self.n_per_cavity() => -T::one(),
            _ => T::one(),
        }
    }

    /// Modes a qubit couples to, with their frequencies.
    pub fn coupled_modes(&self) -> Vec<(CavityMode, T)> {
        match self.topology {
            Topology::TwoCavity => vec![
                (CavityMode::Minus, self.omega_r - self.j_coupling),
                (CavityMode::Plus, self.omega_r + self.j_coupling),
            ],
            Topology::OneCavity => vec![(CavityMode::Single, self.omega_r)],
        }
    }
}

/// `(ω_+, ω_−) = (ω_r + J, ω_r − J)`.
pub fn normal_mode_frequencies<T: Real>(dev: &DeviceParams<T>) -> Result<(T, T)> {
    match dev.topology {
        Topology::TwoCavity => Ok((dev.omega_r + dev.j_coupling, dev.omega_r - dev.j_coupling)),
        Topology::OneCavity => Err(Error::NotApplicable(
            "normal modes exist only for two coupled cavities".into(),
        )),
    }
}

/// Per-qubit classical drives.
#[derive(Clone, Debug, PartialEq)]
pub struct DriveParams<T> {
    /// z-drive amplitudes `A_j`.
    pub a: Vec<T>,
    /// z-drive frequencies `ω_j`.
    pub omega_z: Vec<T>,
    /// z-drive phase `φ`.
    pub phi: T,
    /// x-drive Rabi rates `Ω_j`.
    pub rabi: Vec<T>,
    /// x-drive frequencies `ω_dj`.
    pub omega_d: Vec<T>,
    /// x-drive phase `φ_d`.
    pub phi_d: T,
}

impl<T: Real> DriveParams<T> {
    /// `α_j = A_j / ω_j`.
    pub fn alpha(&self, qubit: usize) -> T {
        self.a[qubit] / self.omega_z[qubit]
    }

    pub fn alphas(&self) -> Vec<T> {
        (0..self.a.len()).map(|j| self.alpha(j)).collect()
    }

    /// Checks lengths, `α_j ≥ 0` and the resonant x-drive `ω_dj = ω_qj`.
    pub fn validate_for(&self, dev: &DeviceParams<T>) -> Result<()> {
        let n = dev.n_qubits();
        for len in [self.a.len(), self.omega_z.len(), self.rabi.len(), self.omega_d.len()] {
            if len != n {
                return Err(Error::Dimension { expected: n, found: len });
            }
        }
        for j in 0..n {
            let alpha = self.alpha(j);
            if !alpha.is_finite() || alpha < T::zero() {
                return Err(Error::Parameter(format!(
                    "alpha of qubit {} must be finite and non-negative",
                    j + 1
                )));
            }
            let scale = T::one().max(dev.omega_q[j].abs());
            if (self.omega_d[j] - dev.omega_q[j]).abs() > T::lit(1e-9) * scale {
                return Err(Error::Parameter(format!(
                    "x-drive of qubit {} must be resonant with the qubit",
                    j + 1
                )));
            }
        }
        Ok(())
    }
}

/// Ratio thresholds the validity check compares against.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Thresholds<T> {
    /// Minimum `|sideband detuning| / max(|δ|, g_j J_1(α_j))`.
    pub sideband: T,
    /// Minimum `J_0(α_j) Ω_j / max(|δ|, g_j J_1(α_j))`.
    pub drive: T,
}

impl<T: Real> Default for Thresholds<T> {
    fn default() -> Self {
        Self {
            sideband: T::lit(3.0),
            drive: T::lit(3.0),
        }
    }
}

/// Default sideband range `m ∈ [−3, 3]`.
pub const DEFAULT_M_RANGE: i32 = 3;

/// One sideband term `|ω_mode − ω_qj + m ω_j|`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SidebandMargin<T> {
    pub qubit: usize,
    pub mode: CavityMode,
    pub m: i32,
    pub detuning: T,
    /// `max(|δ|, g_j J_1(α_j))`.
    pub scale: T,
    /// `detuning / scale`.
    pub ratio: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ValidityReport<T> {
    pub m_range: i32,
    pub thresholds: Thresholds<T>,
    /// Every checked sideband, ordered by qubit, mode, then `m`.
    pub sidebands: Vec<SidebandMargin<T>>,
    /// Smallest-ratio sideband for each qubit.
    pub per_qubit_worst: Vec<SidebandMargin<T>>,
    /// Smallest-ratio sideband overall.
    pub worst: SidebandMargin<T>,
    /// `J_0(α_j) Ω_j / max(|δ|, g_j J_1(α_j))` per qubit.
    pub drive_ratios: Vec<T>,
    pub sidebands_pass: bool,
    pub drive_pass: bool,
}

impl<T: Real> ValidityReport<T> {
    pub fn passes(&self) -> bool {
        self.sidebands_pass && self.drive_pass
    }

    /// One-line summary naming the worst sideband.
    pub fn summary(&self) -> String {
        let w = &self.worst;
        format!(
            "worst sideband: qubit {} mode {} m = {}: |detuning|/2pi = {:.4} MHz, ratio {:.4} (threshold {}); \
             min drive ratio {:.4} (threshold {})",
            w.qubit + 1,
            w.mode,
            w.m,
            crate::units::to_mhz(w.detuning),
            w.ratio,
            self.thresholds.sideband,
            self.drive_ratios.iter().copied().fold(T::infinity(), T::min),
            self.thresholds.drive
        )
    }
}

/// Scans `m ∈ [−m_range, m_range]` for every qubit and coupled mode.
///
/// The `m = −1` term of the coupled mode (`P_−`, or the single mode) is the
/// retained near-resonant coupling and is skipped. The `m = −1` term of
/// `P_+` is a genuine off-resonant sideband at `δ + 2J` and is kept.
pub fn check_validity<T: Real>(
    dev: &DeviceParams<T>,
    drv: &DriveParams<T>,
    delta: T,
    m_range: i32,
    thresholds: Thresholds<T>,
) -> Result<ValidityReport<T>> {
    if m_range < 3 {
        return Err(Error::Usage(format!("m_range must be at least 3, got {m_range}")));
    }
    drv.validate_for(dev)?;
    let n = dev.n_qubits();
    let mut sidebands = Vec::new();
    let mut per_qubit_worst = Vec::with_capacity(n);
    let mut drive_ratios = Vec::with_capacity(n);
    for j in 0..n {
        let alpha = drv.alpha(j);
        let coupling = dev.g[j] * j1(alpha)?;
        let scale = delta.abs().max(coupling);
        let mut worst: Option<SidebandMargin<T>> = None;
        for (mode, omega_mode) in dev.coupled_modes() {
            for m in -m_range..=m_range {
                if m == -1 && mode != CavityMode::Plus {
                    continue;
                }
                let detuning =
                    (omega_mode - dev.omega_q[j] + T::lit(f64::from(m)) * drv.omega_z[j]).abs();
                let entry = SidebandMargin {
                    qubit: j,
                    mode,
                    m,
                    detuning,
                    scale,
                    ratio: detuning / scale,
                };
                if worst.is_none_or(|w| entry.ratio < w.ratio) {
                    worst = Some(entry);
                }
                sidebands.push(entry);
            }
        }
        per_qubit_worst.push(worst.expect("at least one sideband per qubit"));
        drive_ratios.push(crate::bessel::j0(alpha)? * drv.rabi[j] / scale);
    }
    let worst = *per_qubit_worst
        .iter()
        .min_by(|a, b| a.ratio.partial_cmp(&b.ratio).unwrap_or(std::cmp::Ordering::Equal))
        .expect("at least one qubit");
    let sidebands_pass = sidebands.iter().all(|s| s.ratio >= thresholds.sideband);
    let drive_pass = drive_ratios.iter().all(|&r| r >= thresholds.drive);
    Ok(ValidityReport {
        m_range,
        thresholds,
        sidebands,
        per_qubit_worst,
        worst,
        drive_ratios,
        sidebands_pass,
        drive_pass,
    })
}
