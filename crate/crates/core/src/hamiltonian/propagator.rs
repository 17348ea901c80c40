use num_complex::Complex;

use super::builders::collective_x;
use crate::calibration::CalibrationResult;
use crate::device::Topology;
use crate::quantum::{annihilation, exp_series, hermitian_eigen, OperatorMatrix};
use crate::scalar::{c, cis, cr, Real};
use crate::Result;

/// Closed-form evolution under `H = (g/2) P† J_x e^{iδt} + h.c.`:
///
/// ```text
/// U(t) = exp(iγ J_x²) · exp(−iB P† J_x) · exp(−iB* P J_x)
/// γ(t) = (g²/4δ) [t + (e^{−iδt} − 1)/(iδ)]
/// B(t) = (g/2iδ) (e^{iδt} − 1)
/// ```
///
/// `Im γ = |B|²/2` is the normal-ordering correction, so `γ` is real exactly
/// when `B = 0`. Because `P†` is nilpotent on a truncated space, the product
/// equals the truncated block of the untruncated propagator.
#[derive(Clone, Debug, PartialEq)]
pub struct AnalyticPropagator<T> {
    pub g: T,
    pub delta: T,
    pub n_qubits: usize,
    pub topology: Topology,
    pub levels: usize,
    jx: OperatorMatrix<T>,
    jx_eigen: (Vec<T>, OperatorMatrix<T>),
}

impl<T: Real> AnalyticPropagator<T> {
    pub fn new(g: T, delta: T, n_qubits: usize, topology: Topology, levels: usize) -> Result<Self> {
        annihilation::<T>(levels)?;
        let jx = collective_x::<T>(n_qubits, topology)?;
        let jx_eigen = hermitian_eigen(&jx);
        Ok(Self {
            g,
            delta,
            n_qubits,
            topology,
            levels,
            jx,
            jx_eigen,
        })
    }

    pub fn from_calibration(calib: &CalibrationResult<T>, levels: usize) -> Result<Self> {
        Self::new(calib.g_eff, calib.delta, calib.n_qubits(), calib.topology, levels)
    }

    pub fn gamma(&self, t: T) -> Complex<T> {
        let (g, d) = (self.g, self.delta);
        let bracket = cr(t) + (cis(-d * t) - cr(T::one())) / c(T::zero(), d);
        bracket * (g * g / (T::lit(4.0) * d))
    }

    pub fn b(&self, t: T) -> Complex<T> {
        let (g, d) = (self.g, self.delta);
        (cis(d * t) - cr(T::one())) * g / c(T::zero(), T::lit(2.0) * d)
    }

    /// Collective operator on the qubit space.
    pub fn jx(&self) -> &OperatorMatrix<T> {
        &self.jx
    }

    /// `exp(iγ J_x²)` on the qubit space.
    pub fn qubit_phase(&self, gamma: Complex<T>) -> OperatorMatrix<T> {
        let (values, v) = &self.jx_eigen;
        let n = self.jx.dim();
        let f: Vec<Complex<T>> = values
            .iter()
            .map(|&l| (c(T::zero(), T::one()) * gamma * (l * l)).exp())
            .collect();
        OperatorMatrix::from_fn(n, |r, col| {
            (0..n).fold(cr(T::zero()), |acc, k| acc + v.get(r, k) * f[k] * v.get(col, k).conj())
        })
    }

    /// `U(t)` on `mode ⊗ qubits`.
    pub fn propagator(&self, t: T) -> Result<OperatorMatrix<T>> {
        let b = self.b(t);
        let minus_i = c(T::zero(), -T::one());
        let a = annihilation::<T>(self.levels)?;
        let up = a.dagger().kron(&self.jx);
        let down = a.kron(&self.jx);
        let raise = exp_series(&up.scale(minus_i * b));
        let lower = exp_series(&down.scale(minus_i * b.conj()));
        let phase = OperatorMatrix::identity(self.levels).kron(&self.qubit_phase(self.gamma(t)));
        Ok(&(&phase * &raise) * &lower)
    }
}
