use super::Layout;
use crate::device::CavityMode;
use crate::quantum::{annihilation, embed, sigma_minus, sigma_z, SparseMatrix};
use crate::scalar::Real;
use crate::{Error, Result};

/// Decay and dephasing rates (1/s).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rates<T> {
    /// Cavity photon loss `κ`.
    pub kappa: T,
    /// Qubit relaxation `β`.
    pub beta: T,
    /// Qubit dephasing `γ`, applied through `σ_z`.
    pub gamma: T,
}

impl<T: Real> Rates<T> {
    pub fn uniform(rate: T) -> Self {
        Self {
            kappa: rate,
            beta: rate,
            gamma: rate,
        }
    }

    pub fn zero() -> Self {
        Self::uniform(T::zero())
    }

    /// `2π × 4 kHz` for every channel.
    pub fn paper_default() -> Self {
        Self::uniform(crate::units::khz(T::lit(4.0)))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CollapseOp<T> {
    pub label: String,
    pub operator: SparseMatrix<T>,
    pub rate: T,
}

/// Lindblad channels `rate · L(B)` with `L(B)ρ = BρB† − {B†B, ρ}/2`.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct CollapseSet<T> {
    pub ops: Vec<CollapseOp<T>>,
}

impl<T: Real> CollapseSet<T> {
    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// Channels with a non-zero rate.
    pub fn active(&self) -> impl Iterator<Item = &CollapseOp<T>> {
        self.ops.iter().filter(|op| op.rate > T::zero())
    }

    /// True when no channel dissipates.
    pub fn is_dissipation_free(&self) -> bool {
        self.active().next().is_none()
    }
}

/// Cavity loss on every bosonic mode of `layout`, then relaxation and
/// dephasing on every qubit.
///
/// With equal cavity rates, `κL(a) + κL(b) = κL(P_+) + κL(P_−)`, so the
/// normal-mode layout carries the same dissipator as the bare cavities.
pub fn collapse_set<T: Real>(layout: &Layout, rates: Rates<T>) -> Result<CollapseSet<T>> {
    for (name, r) in [("kappa", rates.kappa), ("beta", rates.beta), ("gamma", rates.gamma)] {
        if !(r >= T::zero()) || !r.is_finite() {
            return Err(Error::Parameter(format!("rate {name} must be non-negative, got {r}")));
        }
    }
    let dims = layout.dims();
    let mut ops = Vec::new();
    for (slot, &(mode, levels)) in layout.modes.iter().enumerate() {
        let label = match mode {
            CavityMode::Plus => "P+",
            CavityMode::Minus => "P-",
            CavityMode::Single => "a",
        };
        ops.push(CollapseOp {
            label: label.to_string(),
            operator: SparseMatrix::from_dense(&embed(&annihilation::<f64>(levels)?, slot, &dims)?).to_precision(),
            rate: rates.kappa,
        });
    }
    for j in 0..layout.n_qubits {
        let slot = layout.qubit_slot(j);
        ops.push(CollapseOp {
            label: format!("s{}-", j + 1),
            operator: SparseMatrix::from_dense(&embed(&sigma_minus::<f64>(), slot, &dims)?).to_precision(),
            rate: rates.beta,
        });
        ops.push(CollapseOp {
            label: format!("s{}z", j + 1),
            operator: SparseMatrix::from_dense(&embed(&sigma_z::<f64>(), slot, &dims)?).to_precision(),
            rate: rates.gamma,
        });
    }
    Ok(CollapseSet { ops })
}
