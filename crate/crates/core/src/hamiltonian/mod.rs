//! Time-dependent Hamiltonians of the three model tiers, the closed-form
//! propagator of the reduced tier, and the dissipation channels.
//!
//! Every Hamiltonian has the form `H(t) = H_s + Σ_k [c_k(t) O_k + h.c.]` with
//! a static Hermitian part `H_s`, fixed sparse operators `O_k` and scalar
//! coefficients
//!
//! ```text
//! c_k(t) = A_k · exp(i ν_k t) · exp(i μ_k cos(ω_z t + φ)).
//! ```
//!
//! The full tier keeps the exact `exp(iα cos)` modulation; the effective and
//! reduced tiers have `μ_k = 0`.

mod builders;
mod collapse;
mod propagator;

pub use builders::{build_effective, build_full, build_reduced, collective_x, Truncation};
pub use collapse::{collapse_set, CollapseOp, CollapseSet, Rates};
pub use propagator::AnalyticPropagator;

use num_complex::Complex;

use crate::device::CavityMode;
use crate::quantum::{
    ops::QubitLevel, product_index, OperatorMatrix, SparseMatrix, StateVector,
};
use crate::scalar::{cis, cr, Real};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Tier {
    Full,
    Effective,
    Reduced,
}

/// Subsystem layout: bosonic modes first, then one slot per qubit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Layout {
    pub modes: Vec<(CavityMode, usize)>,
    pub n_qubits: usize,
}

impl Layout {
    pub fn dims(&self) -> Vec<usize> {
        self.modes
            .iter()
            .map(|&(_, d)| d)
            .chain(std::iter::repeat_n(2, self.n_qubits))
            .collect()
    }

    pub fn dim(&self) -> usize {
        self.mode_dim() * self.qubit_dim()
    }

    /// Product of the bosonic dimensions.
    pub fn mode_dim(&self) -> usize {
        self.modes.iter().map(|&(_, d)| d).product()
    }

    pub fn qubit_dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn mode_slot(&self, mode: CavityMode) -> Option<usize> {
        self.modes.iter().position(|&(m, _)| m == mode)
    }

    pub fn qubit_slot(&self, qubit: usize) -> usize {
        self.modes.len() + qubit
    }

    /// Index of `|vacuum⟩ ⊗ |q_1 … q_n⟩`.
    pub fn index_of(&self, photons: &[usize], qubits: &[QubitLevel]) -> Result<usize> {
        let idx: Vec<usize> = photons
            .iter()
            .copied()
            .chain(qubits.iter().map(|l| l.index()))
            .collect();
        product_index(&idx, &self.dims())
    }

    /// Cavity vacuum with every qubit in its ground level.
    pub fn ground_state<T: Real>(&self) -> StateVector<T> {
        let idx = self
            .index_of(&vec![0; self.modes.len()], &vec![QubitLevel::Ground; self.n_qubits])
            .expect("valid levels");
        StateVector::basis(self.dim(), idx).expect("index inside the space")
    }
}

/// `A · exp(i ν t) · exp(i μ cos(ω_z t + φ))`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Coefficient<T> {
    pub amplitude: Complex<T>,
    pub frequency: T,
    pub modulation: T,
    pub omega_z: T,
    pub phi: T,
}

impl<T: Real> Coefficient<T> {
    pub fn constant_rotation(amplitude: Complex<T>, frequency: T) -> Self {
        Self {
            amplitude,
            frequency,
            modulation: T::zero(),
            omega_z: T::zero(),
            phi: T::zero(),
        }
    }

    #[inline]
    pub fn eval(&self, t: T) -> Complex<T> {
        let phase = self.frequency * t + self.modulation * (self.omega_z * t + self.phi).cos();
        self.amplitude * cis(phase)
    }

    /// Largest sideband frequency `|ν| + 3ω_z` carried by the coefficient
    /// (`|ν|` when unmodulated).
    pub fn max_frequency(&self) -> T {
        if self.modulation == T::zero() {
            self.frequency.abs()
        } else {
            self.frequency.abs() + T::lit(3.0) * self.omega_z.abs()
        }
    }
}

/// One `c(t) O + h.c.` term.
#[derive(Clone, Debug, PartialEq)]
pub struct Term<T> {
    pub label: String,
    pub operator: SparseMatrix<T>,
    pub coefficient: Coefficient<T>,
}

/// Interface the integrators need from a Hamiltonian.
pub trait HamiltonianModel<T: Real> {
    fn tier(&self) -> Tier;
    fn layout(&self) -> &Layout;

    fn dim(&self) -> usize {
        self.layout().dim()
    }

    /// Sparsity pattern shared by every `H(t)`.
    fn pattern(&self) -> &SparseMatrix<T>;

    /// Writes the values of `H(t)` in the order of [`Self::pattern`].
    fn fill(&self, t: T, values: &mut [Complex<T>]);

    /// Fastest angular frequency relevant for step-size selection.
    fn max_frequency(&self) -> T;

    /// Bound on `‖H(t)‖` over all `t`; by default the frequency bound.
    fn norm_bound(&self) -> T {
        self.max_frequency()
    }

    fn evaluate_sparse(&self, t: T) -> SparseMatrix<T> {
        let mut h = self.pattern().clone();
        self.fill(t, h.values_mut());
        h
    }

    fn evaluate(&self, t: T) -> OperatorMatrix<T> {
        self.evaluate_sparse(t).to_dense()
    }
}

/// Where one operator entry lands in the union pattern.
#[derive(Clone, Copy, Debug, PartialEq)]
struct Slot<T> {
    position: usize,
    value: Complex<T>,
    adjoint: bool,
}

/// `H(t) = H_s + Σ_k [c_k(t) O_k + h.c.]` on a union sparsity pattern.
#[derive(Clone, Debug, PartialEq)]
pub struct TermHamiltonian<T> {
    tier: Tier,
    layout: Layout,
    static_part: SparseMatrix<T>,
    terms: Vec<Term<T>>,
    pattern: SparseMatrix<T>,
    static_slots: Vec<Slot<T>>,
    term_slots: Vec<Vec<Slot<T>>>,
    max_frequency: T,
    norm_bound: T,
}

impl<T: Real> TermHamiltonian<T> {
    pub fn new(
        tier: Tier,
        layout: Layout,
        static_part: SparseMatrix<T>,
        terms: Vec<Term<T>>,
    ) -> Result<Self> {
        let dim = layout.dim();
        if static_part.dim() != dim {
            return Err(Error::Dimension {
                expected: dim,
                found: static_part.dim(),
            });
        }
        crate::quantum::require_hermitian(&static_part.to_dense())?;
        let mut triplets: Vec<(usize, usize, Complex<T>)> =
            static_part.triplets().map(|(r, c, _)| (r, c, cr(T::zero()))).collect();
        for term in &terms {
            if term.operator.dim() != dim {
                return Err(Error::Dimension {
                    expected: dim,
                    found: term.operator.dim(),
                });
            }
            for (r, c, _) in term.operator.triplets() {
                triplets.push((r, c, cr(T::zero())));
                triplets.push((c, r, cr(T::zero())));
            }
        }
        let pattern = SparseMatrix::from_triplets(dim, &triplets)?;
        let locate = |r, c| pattern.position(r, c).expect("entry is in the union pattern");
        let static_slots = static_part
            .triplets()
            .map(|(r, c, v)| Slot {
                position: locate(r, c),
                value: v,
                adjoint: false,
            })
            .collect();
        let term_slots = terms
            .iter()
            .map(|term| {
                term.operator
                    .triplets()
                    .flat_map(|(r, c, v)| {
                        [
                            Slot {
                                position: locate(r, c),
                                value: v,
                                adjoint: false,
                            },
                            Slot {
                                position: locate(c, r),
                                value: v.conj(),
                                adjoint: true,
                            },
                        ]
                    })
                    .collect()
            })
            .collect();
        let sideband = terms
            .iter()
            .map(|t| t.coefficient.max_frequency())
            .fold(T::zero(), T::max);
        let norm = norm_bound(&static_part, &terms);
        let max_frequency = sideband.max(norm);
        Ok(Self {
            tier,
            layout,
            static_part,
            terms,
            pattern,
            static_slots,
            term_slots,
            max_frequency,
            norm_bound: norm,
        })
    }

    pub fn terms(&self) -> &[Term<T>] {
        &self.terms
    }

    pub fn static_part(&self) -> &SparseMatrix<T> {
        &self.static_part
    }

}

/// Row-sum bound on `‖H(t)‖` valid at every `t`.
fn norm_bound<T: Real>(static_part: &SparseMatrix<T>, terms: &[Term<T>]) -> T {
    let dim = static_part.dim();
    let mut rows = vec![T::zero(); dim];
    for (r, _, v) in static_part.triplets() {
        rows[r] = rows[r] + v.norm();
    }
    for term in terms {
        let a = term.coefficient.amplitude.norm();
        for (r, c, v) in term.operator.triplets() {
            rows[r] = rows[r] + a * v.norm();
            rows[c] = rows[c] + a * v.norm();
        }
    }
    rows.into_iter().fold(T::zero(), T::max)
}

impl<T: Real> HamiltonianModel<T> for TermHamiltonian<T> {
    fn tier(&self) -> Tier {
        self.tier
    }

    fn layout(&self) -> &Layout {
        &self.layout
    }

    fn pattern(&self) -> &SparseMatrix<T> {
        &self.pattern
    }

    fn fill(&self, t: T, values: &mut [Complex<T>]) {
        values.iter_mut().for_each(|v| *v = cr(T::zero()));
        for s in &self.static_slots {
            values[s.position] = values[s.position] + s.value;
        }
        for (term, slots) in self.terms.iter().zip(&self.term_slots) {
            let c = term.coefficient.eval(t);
            let cc = c.conj();
            for s in slots {
                let w = if s.adjoint { cc } else { c };
                values[s.position] = values[s.position] + w * s.value;
            }
        }
    }

    fn max_frequency(&self) -> T {
        self.max_frequency
    }

    fn norm_bound(&self) -> T {
        self.norm_bound
    }
}
