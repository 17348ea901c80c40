use num_complex::Complex;

use super::{Coefficient, Layout, Term, TermHamiltonian, Tier};
use crate::bessel::{j0, j1};
use crate::calibration::CalibrationResult;
use crate::device::{CavityMode, DeviceParams, DriveParams, Topology};
use crate::quantum::{annihilation, embed, sigma_minus, sigma_x, OperatorMatrix, SparseMatrix};
use crate::scalar::{c, cis, cr, Real};
use crate::{Error, Result};

/// Fock truncation of the bosonic modes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Truncation {
    /// Levels of the mode that mediates the gate (`P_−`, or the single mode).
    pub levels: usize,
    /// Levels of the spectator normal mode `P_+` (full two-cavity tier only).
    pub spectator_levels: usize,
}

impl Truncation {
    pub fn new(levels: usize, spectator_levels: usize) -> Result<Self> {
        if levels < 2 || spectator_levels < 2 {
            return Err(Error::Usage(format!(
                "truncation needs at least 2 levels per mode, got {levels} and {spectator_levels}"
            )));
        }
        Ok(Self {
            levels,
            spectator_levels,
        })
    }

    /// Same number of levels for every mode.
    pub fn uniform(levels: usize) -> Result<Self> {
        Self::new(levels, levels)
    }
}

fn sparse(op: &OperatorMatrix<f64>) -> SparseMatrix<f64> {
    SparseMatrix::from_dense(op)
}

fn cast_sparse<T: Real>(m: &SparseMatrix<f64>) -> SparseMatrix<T> {
    m.to_precision()
}

struct Ops {
    dims: Vec<usize>,
    layout: Layout,
}

impl Ops {
    fn new(layout: Layout) -> Self {
        Self {
            dims: layout.dims(),
            layout,
        }
    }

    fn mode_lowering(&self, mode: CavityMode) -> Result<OperatorMatrix<f64>> {
        let slot = self
            .layout
            .mode_slot(mode)
            .ok_or_else(|| Error::Usage(format!("layout has no {mode} mode")))?;
        embed(&annihilation(self.dims[slot])?, slot, &self.dims)
    }

    fn qubit(&self, op: &OperatorMatrix<f64>, j: usize) -> Result<OperatorMatrix<f64>> {
        embed(op, self.layout.qubit_slot(j), &self.dims)
    }

    /// `mode† σ_j⁻`.
    fn absorb(&self, mode: CavityMode, j: usize) -> Result<SparseMatrix<f64>> {
        let a = self.mode_lowering(mode)?;
        let sm = self.qubit(&sigma_minus(), j)?;
        Ok(sparse(&(&a.dagger() * &sm)))
    }
}

fn full_layout<T: Real>(dev: &DeviceParams<T>, trunc: Truncation) -> Layout {
    let modes = match dev.topology {
        Topology::TwoCavity => vec![
            (CavityMode::Plus, trunc.spectator_levels),
            (CavityMode::Minus, trunc.levels),
        ],
        Topology::OneCavity => vec![(CavityMode::Single, trunc.levels)],
    };
    Layout {
        modes,
        n_qubits: dev.n_qubits(),
    }
}

fn coupled_layout(topology: Topology, n_qubits: usize, levels: usize) -> Layout {
    let mode = match topology {
        Topology::TwoCavity => CavityMode::Minus,
        Topology::OneCavity => CavityMode::Single,
    };
    Layout {
        modes: vec![(mode, levels)],
        n_qubits,
    }
}

/// Coupling prefactor of `mode† σ_j⁻` before any Bessel factor:
/// `±g_j/(2√2)` on the normal modes, `g_j/2` on a single mode.
fn bare_coupling<T: Real>(dev: &DeviceParams<T>, mode: CavityMode, j: usize) -> T {
    let g = dev.g[j];
    match mode {
        CavityMode::Plus => g / (T::lit(2.0) * T::SQRT_2()),
        CavityMode::Minus => dev.minus_mode_sign(j) * g / (T::lit(2.0) * T::SQRT_2()),
        CavityMode::Single => g / T::lit(2.0),
    }
}

/// The full interaction-picture Hamiltonian with the exact z-drive phase
/// factor `exp(iα_j cos(ω_j t + φ))`.
///
/// Two cavities are represented in the normal-mode basis `(P_+, P_−)`; the
/// spectator mode `P_+` gets its own truncation.
pub fn build_full<T: Real>(
    dev: &DeviceParams<T>,
    drv: &DriveParams<T>,
    trunc: Truncation,
) -> Result<TermHamiltonian<T>> {
    dev.validate()?;
    drv.validate_for(dev)?;
    let layout = full_layout(dev, trunc);
    let ops = Ops::new(layout.clone());
    let mut terms = Vec::new();
    for j in 0..dev.n_qubits() {
        let alpha = drv.alpha(j);
        for (mode, omega_mode) in dev.coupled_modes() {
            terms.push(Term {
                label: format!("{mode}+ s{}-", j + 1),
                operator: cast_sparse(&ops.absorb(mode, j)?),
                coefficient: Coefficient {
                    amplitude: cr(bare_coupling(dev, mode, j)),
                    frequency: omega_mode - dev.omega_q[j],
                    modulation: alpha,
                    omega_z: drv.omega_z[j],
                    phi: drv.phi,
                },
            });
        }
        let sp = ops.qubit(&sigma_minus(), j)?.dagger();
        terms.push(Term {
            label: format!("s{}+", j + 1),
            operator: cast_sparse(&sparse(&sp)),
            coefficient: Coefficient {
                amplitude: cis(-drv.phi_d) * (drv.rabi[j] / T::lit(2.0)),
                frequency: drv.omega_d[j] - dev.omega_q[j],
                modulation: -alpha,
                omega_z: drv.omega_z[j],
                phi: drv.phi,
            },
        });
    }
    let empty = SparseMatrix::from_triplets(layout.dim(), &[])?;
    TermHamiltonian::new(Tier::Full, layout, empty, terms)
}

/// The single-mode effective Hamiltonian after dropping every fast
/// sideband: a static dressed x-drive plus the `J_1` coupling to `P_−`
/// (or the single mode) rotating at `δ`.
pub fn build_effective<T: Real>(
    dev: &DeviceParams<T>,
    drv: &DriveParams<T>,
    levels: usize,
) -> Result<TermHamiltonian<T>> {
    dev.validate()?;
    drv.validate_for(dev)?;
    let layout = coupled_layout(dev.topology, dev.n_qubits(), levels);
    let mode = layout.modes[0].0;
    let omega_mode = dev
        .coupled_modes()
        .into_iter()
        .find(|&(m, _)| m == mode)
        .map(|(_, w)| w)
        .expect("coupled mode present");
    let ops = Ops::new(layout.clone());
    let mut drive = OperatorMatrix::<f64>::zeros(layout.dim());
    let mut terms = Vec::new();
    for j in 0..dev.n_qubits() {
        let alpha = drv.alpha(j);
        let rabi = (j0(alpha)? * drv.rabi[j] / T::lit(2.0)).to_f64_lossy();
        let phase = Complex::new(0.0, -drv.phi_d.to_f64_lossy()).exp();
        let sm = ops.qubit(&sigma_minus(), j)?;
        drive = &drive + &(&sm.dagger().scale(phase * rabi) + &sm.scale(phase.conj() * rabi));
        // m = −1 Jacobi–Anger component: i J_1(α) e^{−i(ω_j t + φ)}
        let amplitude = cis(-drv.phi) * c(T::zero(), bare_coupling(dev, mode, j) * j1(alpha)?);
        terms.push(Term {
            label: format!("{mode}+ s{}-", j + 1),
            operator: cast_sparse(&ops.absorb(mode, j)?),
            coefficient: Coefficient::constant_rotation(
                amplitude,
                omega_mode - dev.omega_q[j] - drv.omega_z[j],
            ),
        });
    }
    TermHamiltonian::new(Tier::Effective, layout, cast_sparse(&sparse(&drive)), terms)
}

/// Collective `Σ_j s_j σ_j^x / 2` on the `2^n` qubit space, with `s_j = −1`
/// for cavity-B qubits of the two-cavity layout and `+1` otherwise.
pub fn collective_x<T: Real>(n_qubits: usize, topology: Topology) -> Result<OperatorMatrix<T>> {
    if n_qubits == 0 || !n_qubits.is_multiple_of(2) {
        return Err(Error::Usage(format!(
            "collective spin needs an even, positive qubit count, got {n_qubits}"
        )));
    }
    let dims = vec![2; n_qubits];
    let mut jx = OperatorMatrix::<T>::zeros(1 << n_qubits);
    for j in 0..n_qubits {
        let sign = if topology == Topology::TwoCavity && j >= n_qubits / 2 {
            -0.5
        } else {
            0.5
        };
        jx = &jx + &embed(&sigma_x::<T>(), j, &dims)?.scale_real(T::lit(sign));
    }
    Ok(jx)
}

/// `H = (g/2) P_−† J_x e^{iδt} + h.c.` on `P_− ⊗ qubits`.
pub fn build_reduced<T: Real>(calib: &CalibrationResult<T>, levels: usize) -> Result<TermHamiltonian<T>> {
    let layout = coupled_layout(calib.topology, calib.n_qubits(), levels);
    let jx = collective_x::<f64>(calib.n_qubits(), calib.topology)?;
    let a = annihilation::<f64>(levels)?;
    let op = a.dagger().kron(&jx);
    let term = Term {
        label: format!("{}+ Jx", layout.modes[0].0),
        operator: cast_sparse(&sparse(&op)),
        coefficient: Coefficient::constant_rotation(cr(calib.g_eff / T::lit(2.0)), calib.delta),
    };
    let empty = SparseMatrix::from_triplets(layout.dim(), &[])?;
    TermHamiltonian::new(Tier::Reduced, layout, empty, vec![term])
}
