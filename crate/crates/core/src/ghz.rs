//! GHZ targets, the x-drive frame and fidelities.

use num_complex::Complex;

use crate::calibration::CalibrationResult;
use crate::device::{DeviceParams, DriveParams, Topology};
use crate::dynamics::Observer;
use crate::hamiltonian::{collective_x, Layout};
use crate::quantum::{
    hermitian_function, qubit_register_index, OperatorMatrix, QubitLevel, StateVector,
};
use crate::scalar::{c, cis, cr, Real};
use crate::{Error, Result};

/// Relative phase convention: which collective spin generated the state.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PhaseConvention {
    /// `J_x = (Σ_A σ^x − Σ_B σ^x)/2`: relative phase `−i` for every `N`.
    Difference,
    /// `J_x = Σ σ^x / 2`: relative phase `(−1)^{N+1} i`.
    Sum,
}

impl PhaseConvention {
    pub fn for_topology(topology: Topology) -> Self {
        match topology {
            Topology::TwoCavity => Self::Difference,
            Topology::OneCavity => Self::Sum,
        }
    }
}

/// `(|0…0⟩ + e^{iθ}|1…1⟩)/√2` over `2N` qubits, where `|0⟩` is the ground
/// state. The common factor `e^{iπ/4}` produced by `exp(i(π/2)J_x²)` is
/// dropped.
#[derive(Clone, Debug, PartialEq)]
pub struct GhzTarget<T> {
    pub n_per_cavity: usize,
    pub topology: Topology,
    pub convention: PhaseConvention,
    /// `e^{iθ}` multiplying `|1…1⟩`.
    pub relative_phase: Complex<T>,
    pub state: StateVector<T>,
}

impl<T: Real> GhzTarget<T> {
    pub fn n_qubits(&self) -> usize {
        2 * self.n_per_cavity
    }

    /// Register index of `|0…0⟩` (all ground).
    pub fn ground_index(&self) -> usize {
        qubit_register_index(&vec![QubitLevel::Ground; self.n_qubits()])
    }

    /// Register index of `|1…1⟩` (all excited).
    pub fn excited_index(&self) -> usize {
        qubit_register_index(&vec![QubitLevel::Excited; self.n_qubits()])
    }

    /// Same state with the `P_−` (or single-mode) vacuum prepended for a
    /// layout whose modes come before the qubits.
    pub fn with_vacuum(&self, layout: &Layout) -> Result<StateVector<T>> {
        if layout.n_qubits != self.n_qubits() {
            return Err(Error::Dimension {
                expected: self.n_qubits(),
                found: layout.n_qubits,
            });
        }
        let mut amps = vec![cr(T::zero()); layout.dim()];
        amps[..layout.qubit_dim()].copy_from_slice(self.state.amplitudes());
        Ok(StateVector::from_raw(amps))
    }
}

/// GHZ target reached by `exp(i(π/2)J_x²)` from the all-ground state.
pub fn ghz_target<T: Real>(n_per_cavity: usize, topology: Topology) -> Result<GhzTarget<T>> {
    if n_per_cavity < 1 {
        return Err(Error::Parameter("at least one qubit per cavity is required".into()));
    }
    let convention = PhaseConvention::for_topology(topology);
    let relative_phase = match convention {
        PhaseConvention::Difference => c(T::zero(), -T::one()),
        PhaseConvention::Sum if n_per_cavity % 2 == 1 => c(T::zero(), T::one()),
        PhaseConvention::Sum => c(T::zero(), -T::one()),
    };
    let n = 2 * n_per_cavity;
    let mut amps = vec![cr(T::zero()); 1 << n];
    let h = T::FRAC_1_SQRT_2();
    amps[qubit_register_index(&vec![QubitLevel::Ground; n])] = cr(h);
    amps[qubit_register_index(&vec![QubitLevel::Excited; n])] = relative_phase * h;
    Ok(GhzTarget {
        n_per_cavity,
        topology,
        convention,
        relative_phase,
        state: StateVector::from_raw(amps),
    })
}

/// `Tr_modes ρ` for a layout whose bosonic modes precede the qubits.
pub fn trace_out_modes<T: Real>(rho: &OperatorMatrix<T>, layout: &Layout) -> Result<OperatorMatrix<T>> {
    if rho.dim() != layout.dim() {
        return Err(Error::Dimension {
            expected: layout.dim(),
            found: rho.dim(),
        });
    }
    let q = layout.qubit_dim();
    let mut out = OperatorMatrix::zeros(q);
    for m in 0..layout.mode_dim() {
        for a in 0..q {
            let row = rho.row(m * q + a);
            for b in 0..q {
                out.set(a, b, out.get(a, b) + row[m * q + b]);
            }
        }
    }
    Ok(out)
}

/// `⟨ψ|ρ|ψ⟩`.
pub fn fidelity<T: Real>(rho: &OperatorMatrix<T>, target: &StateVector<T>) -> Result<T> {
    let v = rho.apply(target.amplitudes())?;
    let f: Complex<T> = target
        .amplitudes()
        .iter()
        .zip(&v)
        .map(|(a, b)| a.conj() * b)
        .sum();
    Ok(f.re)
}

/// `max_θ ⟨ψ_θ|ρ|ψ_θ⟩` over the relative phase of the two branches.
pub fn fidelity_phase_optimized<T: Real>(rho: &OperatorMatrix<T>, target: &GhzTarget<T>) -> Result<T> {
    if rho.dim() != target.state.dim() {
        return Err(Error::Dimension {
            expected: target.state.dim(),
            found: rho.dim(),
        });
    }
    let (g, e) = (target.ground_index(), target.excited_index());
    let pops = rho.get(g, g).re + rho.get(e, e).re;
    Ok(pops * T::lit(0.5) + rho.get(g, e).norm())
}

/// `⟨vac ⊗ ψ|ρ|vac ⊗ ψ⟩` on the full layout.
pub fn fidelity_with_vacuum<T: Real>(
    rho: &OperatorMatrix<T>,
    layout: &Layout,
    target: &GhzTarget<T>,
) -> Result<T> {
    fidelity(rho, &target.with_vacuum(layout)?)
}

/// The x-drive rotation accumulated in the interaction frame, together with
/// the Schrödinger-picture qubit phases `Θ_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct FrameSpec<T> {
    /// Dressed Rabi rate `J_0(α_j) Ω_j` of each qubit.
    pub omega_eff: Vec<T>,
    /// Drive phase `φ_d`.
    pub phi_d: T,
    pub omega_q: Vec<T>,
    pub alpha: Vec<T>,
    pub omega_z: Vec<T>,
    pub phi: T,
}

impl<T: Real> FrameSpec<T> {
    pub fn new(dev: &DeviceParams<T>, drv: &DriveParams<T>) -> Result<Self> {
        drv.validate_for(dev)?;
        let omega_eff = (0..dev.n_qubits())
            .map(|j| Ok(crate::bessel::j0(drv.alpha(j))? * drv.rabi[j]))
            .collect::<Result<_>>()?;
        Ok(Self {
            omega_eff,
            phi_d: drv.phi_d,
            omega_q: dev.omega_q.clone(),
            alpha: drv.alphas(),
            omega_z: drv.omega_z.clone(),
            phi: drv.phi,
        })
    }

    pub fn from_calibration(calib: &CalibrationResult<T>, dev: &DeviceParams<T>, phi: T, phi_d: T) -> Result<Self> {
        Self::new(dev, &calib.drive_params(dev, phi, phi_d))
    }

    /// No rotation: the frame of the reduced model.
    pub fn identity(n_qubits: usize) -> Self {
        let z = vec![T::zero(); n_qubits];
        Self {
            omega_eff: z.clone(),
            phi_d: T::zero(),
            omega_q: z.clone(),
            alpha: z.clone(),
            omega_z: z,
            phi: T::zero(),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.omega_eff.len()
    }

    /// `Θ_n(t) = ω_{q_n} t/2 − α_n cos(ω_n t + φ)/2`.
    pub fn theta(&self, qubit: usize, t: T) -> T {
        let half = T::lit(0.5);
        self.omega_q[qubit] * t * half - self.alpha[qubit] * (self.omega_z[qubit] * t + self.phi).cos() * half
    }

    /// Collective rotation angle `Ω_eff t` of each qubit.
    pub fn angles(&self, t: T) -> Vec<T> {
        self.omega_eff.iter().map(|&w| w * t).collect()
    }

    /// `R(t) = ⊗_j exp(−i Ω_j t (e^{−iφ_d}σ^+ + e^{iφ_d}σ^−)/2)` on the qubit
    /// register.
    pub fn rotation(&self, t: T) -> OperatorMatrix<T> {
        let half = T::lit(0.5);
        let mut r = OperatorMatrix::identity(1);
        for theta in self.angles(t) {
            let (s, co) = (theta * half).sin_cos();
            // −i sin(θ/2) n·σ with n·σ = e^{−iφ_d}|1⟩⟨0| + e^{iφ_d}|0⟩⟨1|
            let off = c(T::zero(), -s);
            let single = OperatorMatrix::from_fn(2, |row, col| match (row, col) {
                (0, 1) => off * cis(-self.phi_d),
                (1, 0) => off * cis(self.phi_d),
                _ => cr(co),
            });
            r = r.kron(&single);
        }
        r
    }
}

/// Undoes the x-drive rotation: `R(t)† ρ_q R(t)` on the qubit register.
pub fn frame_restore<T: Real>(rho: &OperatorMatrix<T>, frame: &FrameSpec<T>, t: T) -> Result<OperatorMatrix<T>> {
    let r = frame.rotation(t);
    r.dagger().try_matmul(&rho.try_matmul(&r)?)
}

/// Inverse of [`frame_restore`]: `R(t) ρ_q R(t)†`.
pub fn frame_apply<T: Real>(rho: &OperatorMatrix<T>, frame: &FrameSpec<T>, t: T) -> Result<OperatorMatrix<T>> {
    let r = frame.rotation(t);
    r.try_matmul(&rho.try_matmul(&r.dagger())?)
}

/// Outcome of the brute-force evaluation of `exp(i(π/2)J_x²)|0…0⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct BruteforceReport {
    pub n_per_cavity: usize,
    pub topology: Topology,
    /// The state with the `e^{iπ/4}` global factor removed.
    pub state: StateVector<f64>,
    /// `max |ψ_sum − ψ_target|`.
    pub max_deviation: f64,
    /// Deviation from `exp(i(π/2)J_x²)|0…0⟩` built by diagonalisation.
    pub matrix_deviation: f64,
}

/// Expands the all-ground state in the `σ^x` eigenbasis, multiplies each
/// product state by `exp(i(π/2)(M_1 ∓ M_2)²)` and transforms back.
pub fn ghz_bruteforce_check(n_per_cavity: usize, topology: Topology) -> Result<BruteforceReport> {
    if !(1..=4).contains(&n_per_cavity) {
        return Err(Error::Parameter(format!(
            "brute-force check supports 1 to 4 qubits per cavity, got {n_per_cavity}"
        )));
    }
    let n = 2 * n_per_cavity;
    let dim = 1usize << n;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    // |±⟩ = (|1⟩ ± |0⟩)/√2 in the (excited, ground) basis; ⟨±|0⟩ = ±1/√2
    let plus_minus = [[h, h], [h, -h]];
    let ground = QubitLevel::Ground.index();
    let target = ghz_target::<f64>(n_per_cavity, topology)?;
    let mut out = vec![cr(0.0); dim];
    for pattern in 0..dim {
        let signs: Vec<usize> = (0..n).map(|j| (pattern >> (n - 1 - j)) & 1).collect();
        let overlap: f64 = signs.iter().map(|&s| plus_minus[s][ground]).product();
        let m = |range: std::ops::Range<usize>| -> f64 {
            range.map(|j| if signs[j] == 0 { 0.5 } else { -0.5 }).sum()
        };
        let (m1, m2) = (m(0..n_per_cavity), m(n_per_cavity..n));
        let jx = match topology {
            Topology::TwoCavity => m1 - m2,
            Topology::OneCavity => m1 + m2,
        };
        let weight = cis(std::f64::consts::FRAC_PI_2 * jx * jx) * overlap;
        for (basis, amp) in out.iter_mut().enumerate() {
            let component: f64 = (0..n)
                .map(|j| plus_minus[signs[j]][(basis >> (n - 1 - j)) & 1])
                .product();
            *amp += weight * component;
        }
    }
    let global = cis(-std::f64::consts::FRAC_PI_4);
    out.iter_mut().for_each(|z| *z *= global);
    let max_deviation = out
        .iter()
        .zip(target.state.amplitudes())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);

    let jx = collective_x::<f64>(n, topology)?;
    let u = hermitian_function(&jx, |x| cis(std::f64::consts::FRAC_PI_2 * x * x));
    let via_matrix = u.apply(ground_register(n).amplitudes())?;
    let matrix_deviation = via_matrix
        .iter()
        .zip(&out)
        .map(|(a, b)| (a * global - b).norm())
        .fold(0.0, f64::max);
    Ok(BruteforceReport {
        n_per_cavity,
        topology,
        state: StateVector::from_raw(out),
        max_deviation,
        matrix_deviation,
    })
}

/// `|0…0⟩` on `n` qubits.
pub fn ground_register<T: Real>(n: usize) -> StateVector<T> {
    let mut amps = vec![cr(T::zero()); 1 << n];
    amps[qubit_register_index(&vec![QubitLevel::Ground; n])] = cr(T::one());
    StateVector::from_raw(amps)
}

/// Fidelities of one sample.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FidelityReport<T> {
    /// Against the fixed-phase target after tracing out the modes.
    pub fixed: T,
    /// Relative phase optimised.
    pub phase_optimized: T,
    /// Against target ⊗ vacuum.
    pub with_vacuum: T,
}

/// Records the fixed-phase GHZ fidelity of the frame-restored qubit state.
#[derive(Clone, Debug)]
pub struct GhzObserver<T> {
    pub layout: Layout,
    pub target: GhzTarget<T>,
    pub frame: FrameSpec<T>,
}

impl<T: Real> GhzObserver<T> {
    pub fn new(layout: Layout, target: GhzTarget<T>, frame: FrameSpec<T>) -> Result<Self> {
        if layout.n_qubits != target.n_qubits() || frame.n_qubits() != target.n_qubits() {
            return Err(Error::Dimension {
                expected: target.n_qubits(),
                found: layout.n_qubits,
            });
        }
        Ok(Self { layout, target, frame })
    }

    /// `R(t)|ψ⟩`, so that `⟨ψ|R†ρR|ψ⟩ = ⟨Rψ|ρ|Rψ⟩`.
    fn rotated_branches(&self, t: T) -> (Vec<Complex<T>>, Vec<Complex<T>>) {
        let r = self.frame.rotation(t);
        let column = |col: usize| (0..r.dim()).map(|row| r.get(row, col)).collect();
        (column(self.target.ground_index()), column(self.target.excited_index()))
    }

    /// All three fidelity variants for a full-layout density matrix.
    pub fn report(&self, t: T, rho: &OperatorMatrix<T>) -> Result<FidelityReport<T>> {
        let reduced = trace_out_modes(rho, &self.layout)?;
        let restored = frame_restore(&reduced, &self.frame, t)?;
        let fixed = fidelity(&restored, &self.target.state)?;
        let phase_optimized = fidelity_phase_optimized(&restored, &self.target)?;
        let r = self.frame.rotation(t);
        let rotated = StateVector::from_raw(r.apply(self.target.state.amplitudes())?);
        let with_vacuum = fidelity_with_vacuum(rho, &self.layout, &GhzTarget {
            state: rotated,
            ..self.target.clone()
        })?;
        Ok(FidelityReport {
            fixed,
            phase_optimized,
            with_vacuum,
        })
    }

    /// [`Self::report`] for a pure state.
    pub fn report_pure(&self, t: T, psi: &StateVector<T>) -> Result<FidelityReport<T>> {
        if psi.dim() != self.layout.dim() {
            return Err(Error::Dimension {
                expected: self.layout.dim(),
                found: psi.dim(),
            });
        }
        let (g, e) = self.rotated_branches(t);
        let q = self.layout.qubit_dim();
        let phase = self.target.relative_phase;
        let h = T::FRAC_1_SQRT_2();
        let mut fixed = T::zero();
        let mut gg = T::zero();
        let mut ee = T::zero();
        let mut ge = cr(T::zero());
        let mut vac = T::zero();
        for (m, slice) in psi.amplitudes().chunks(q).enumerate() {
            let og = dot(&g, slice);
            let oe = dot(&e, slice);
            let amp = (og + phase.conj() * oe) * h;
            fixed = fixed + amp.norm_sqr();
            if m == 0 {
                vac = amp.norm_sqr();
            }
            gg = gg + og.norm_sqr();
            ee = ee + oe.norm_sqr();
            ge = ge + og * oe.conj();
        }
        Ok(FidelityReport {
            fixed,
            phase_optimized: (gg + ee) * T::lit(0.5) + ge.norm(),
            with_vacuum: vac,
        })
    }
}

/// `⟨a|b⟩`.
fn dot<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Complex<T> {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

impl<T: Real> Observer<T> for GhzObserver<T> {
    fn on_density(&self, t: T, rho: &OperatorMatrix<T>) -> T {
        let reduced = trace_out_modes(rho, &self.layout).expect("layout matches the model");
        let (g, e) = self.rotated_branches(t);
        let phase = self.target.relative_phase;
        let h = T::FRAC_1_SQRT_2();
        let psi: Vec<Complex<T>> = g.iter().zip(&e).map(|(&a, &b)| (a + phase * b) * h).collect();
        fidelity(&reduced, &StateVector::from_raw(psi)).expect("qubit dimensions agree")
    }

    fn on_pure(&self, t: T, psi: &StateVector<T>) -> T {
        self.report_pure(t, psi).expect("layout matches the model").fixed
    }
}
