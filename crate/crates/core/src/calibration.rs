//! Drive homogenisation: choose each z-drive amplitude so every qubit sees
//! the same effective coupling, then derive the gate schedule.

use crate::bessel::{j0, j1, J1_FIRST_MAX, J1_FIRST_MAX_ARG};
use crate::device::{check_validity, DeviceParams, DriveParams, Thresholds, Topology, ValidityReport};
use crate::units::to_mhz;
use crate::{Error, Real, Result};

/// Relative tolerance on the solved coupling condition.
pub const ALPHA_REL_TOL: f64 = 1e-10;

/// Tolerance for calling `Ω_eff τ / 2π` an integer.
pub const COMMENSURABILITY_TOL: f64 = 1e-6;

/// `c_j` in the condition `c_j J_1(α_j) = g`: `g_j/√2` for two cavities
/// (normal-mode factor), `g_j` for one.
pub fn coupling_prefactor<T: Real>(g_j: T, topology: Topology) -> T {
    match topology {
        Topology::TwoCavity => g_j / T::SQRT_2(),
        Topology::OneCavity => g_j,
    }
}

/// Largest effective coupling reachable on the monotone branch of `J_1`.
pub fn max_effective_coupling<T: Real>(g_j: T, topology: Topology) -> T {
    coupling_prefactor(g_j, topology) * T::lit(J1_FIRST_MAX)
}

/// Smallest `α ∈ [0, 1.8412)` with `c_j J_1(α) = g_target`.
pub fn solve_alpha<T: Real>(g_j: T, g_target: T, topology: Topology) -> Result<T> {
    solve_alpha_bracketed(g_j, g_target, topology, T::zero(), T::lit(J1_FIRST_MAX_ARG))
}

/// Bisection on a caller-supplied bracket inside the monotone branch.
pub fn solve_alpha_bracketed<T: Real>(
    g_j: T,
    g_target: T,
    topology: Topology,
    lo: T,
    hi: T,
) -> Result<T> {
    let (g_j, g_target) = (g_j.to_f64_lossy(), g_target.to_f64_lossy());
    let (mut lo, mut hi) = (lo.to_f64_lossy(), hi.to_f64_lossy());
    if !(g_j > 0.0) || !(g_target >= 0.0) {
        return Err(Error::Parameter(format!(
            "couplings must be positive (g_j = {g_j:e}, target = {g_target:e})"
        )));
    }
    if !(0.0 <= lo && lo < hi && hi <= J1_FIRST_MAX_ARG) {
        return Err(Error::Usage(format!(
            "bracket [{lo}, {hi}] must lie inside [0, {J1_FIRST_MAX_ARG}]"
        )));
    }
    let c = coupling_prefactor(g_j, topology);
    let max = c * J1_FIRST_MAX;
    if g_target > max {
        return Err(Error::Infeasible {
            qubit: 0,
            target: g_target,
            max_achievable: max,
            max_mhz: to_mhz(max),
        });
    }
    if g_target == 0.0 {
        return Ok(T::zero());
    }
    let f = |a: f64| -> Result<f64> { Ok(c * j1(a)? - g_target) };
    if f(lo)? > 0.0 || f(hi)? < 0.0 {
        return Err(Error::Usage("bracket does not contain the root".into()));
    }
    while hi - lo > 1e-16 * hi.max(1.0) {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let alpha = 0.5 * (lo + hi);
    let residual = (c * j1(alpha)? - g_target).abs() / g_target;
    if residual > ALPHA_REL_TOL {
        return Err(Error::Integration(format!(
            "bisection stalled with relative residual {residual:e}"
        )));
    }
    Ok(T::lit(alpha))
}

/// Targets of a calibration run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CalibrationTargets<T> {
    /// Common effective coupling `g`.
    pub g: T,
    /// Common dressed Rabi rate `Ω`.
    pub omega: T,
    /// z-drive frequency shared by all qubits.
    pub omega_z: T,
    /// Revival index, `δ = √k g`.
    pub k: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CalibrationResult<T> {
    pub topology: Topology,
    pub alpha: Vec<T>,
    /// z-drive amplitudes `A_j = α_j ω_z`.
    pub a: Vec<T>,
    /// x-drive Rabi rates `Ω_j = Ω / J_0(α_j)`.
    pub rabi: Vec<T>,
    pub g_eff: T,
    pub omega_eff: T,
    pub omega_z: T,
    pub delta: T,
    pub tau: T,
    pub k: u32,
    pub validity: ValidityReport<T>,
}

impl<T: Real> CalibrationResult<T> {
    /// Drive parameters realising this calibration on `dev`.
    pub fn drive_params(&self, dev: &DeviceParams<T>, phi: T, phi_d: T) -> DriveParams<T> {
        DriveParams {
            a: self.a.clone(),
            omega_z: vec![self.omega_z; self.a.len()],
            phi,
            rabi: self.rabi.clone(),
            omega_d: dev.omega_q.clone(),
            phi_d,
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.alpha.len()
    }

    /// `Ω_eff τ / 2π`.
    pub fn commensurability(&self) -> Commensurability<T> {
        frame_commensurability_check(self.omega_eff, self.tau)
            .expect("calibrated Rabi rate is positive")
    }
}

/// `δ = √k g`.
pub fn revival_detuning<T: Real>(g: T, k: u32) -> T {
    T::from_u32(k).expect("small integer").sqrt() * g
}

/// `τ = 2π √k / g`, the first instant with `δτ = 2kπ`.
pub fn gate_time<T: Real>(g: T, k: u32) -> T {
    T::TAU() * T::from_u32(k).expect("small integer").sqrt() / g
}

/// Solves every qubit, builds the schedule and attaches the validity
/// report; does not reject on validity.
pub fn calibrate_report<T: Real>(
    dev: &DeviceParams<T>,
    targets: CalibrationTargets<T>,
    phi: T,
    phi_d: T,
    m_range: i32,
    thresholds: Thresholds<T>,
) -> Result<CalibrationResult<T>> {
    dev.validate()?;
    if targets.k == 0 {
        return Err(Error::Parameter("revival index k must be at least 1".into()));
    }
    if !(targets.omega > T::zero()) || !(targets.omega_z > T::zero()) {
        return Err(Error::Parameter("Rabi rate and z-drive frequency must be positive".into()));
    }
    let mut alpha = Vec::with_capacity(dev.n_qubits());
    for (j, &g_j) in dev.g.iter().enumerate() {
        let a = solve_alpha(g_j, targets.g, dev.topology).map_err(|e| match e {
            Error::Infeasible {
                target,
                max_achievable,
                max_mhz,
                ..
            } => Error::Infeasible {
                qubit: j + 1,
                target,
                max_achievable,
                max_mhz,
            },
            other => other,
        })?;
        alpha.push(a);
    }
    let a: Vec<T> = alpha.iter().map(|&x| x * targets.omega_z).collect();
    let rabi = alpha
        .iter()
        .map(|&x| Ok(targets.omega / j0(x)?))
        .collect::<Result<Vec<T>>>()?;
    let delta = revival_detuning(targets.g, targets.k);
    let tau = gate_time(targets.g, targets.k);
    let drv = DriveParams {
        a,
        omega_z: vec![targets.omega_z; dev.n_qubits()],
        phi,
        rabi,
        omega_d: dev.omega_q.clone(),
        phi_d,
    };
    let validity = check_validity(dev, &drv, delta, m_range, thresholds)?;
    Ok(CalibrationResult {
        topology: dev.topology,
        alpha,
        a: drv.a,
        rabi: drv.rabi,
        g_eff: targets.g,
        omega_eff: targets.omega,
        omega_z: targets.omega_z,
        delta,
        tau,
        k: targets.k,
        validity,
    })
}

/// As [`calibrate_report`] with default thresholds and `m ∈ [−3, 3]`;
/// fails when the validity check does.
pub fn calibrate<T: Real>(
    dev: &DeviceParams<T>,
    targets: CalibrationTargets<T>,
    phi: T,
    phi_d: T,
) -> Result<CalibrationResult<T>> {
    let result = calibrate_report(
        dev,
        targets,
        phi,
        phi_d,
        crate::device::DEFAULT_M_RANGE,
        Thresholds::default(),
    )?;
    if !result.validity.passes() {
        return Err(Error::ValidityFailed(result.validity.summary()));
    }
    Ok(result)
}

/// Number of x-drive cycles completed during the gate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Commensurability<T> {
    pub cycles: T,
    /// Whether `cycles` is an integer within [`COMMENSURABILITY_TOL`].
    pub integer: bool,
}

/// `Ω_eff τ / 2π`, flagged when not an integer.
pub fn frame_commensurability_check<T: Real>(omega_eff: T, tau: T) -> Result<Commensurability<T>> {
    if !(omega_eff > T::zero()) {
        return Err(Error::Parameter("effective Rabi rate must be positive".into()));
    }
    let cycles = omega_eff * tau / T::TAU();
    let integer = (cycles - cycles.round()).abs() <= T::lit(COMMENSURABILITY_TOL);
    Ok(Commensurability { cycles, integer })
}
