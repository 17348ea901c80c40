//! Elementary operators on qubits and truncated bosonic modes.
//!
//! Qubit basis ordering: index 0 is the excited level `|1⟩`, index 1 the
//! ground level `|0⟩`, so that `σ_z = |1⟩⟨1| − |0⟩⟨0| = diag(1, −1)`.

use super::OperatorMatrix;
use crate::scalar::{c, cr, Real};
use crate::{Error, Result};

/// The two levels of a qubit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum QubitLevel {
    Ground,
    Excited,
}

impl QubitLevel {
    /// Position of the level in the qubit basis.
    pub const fn index(self) -> usize {
        match self {
            QubitLevel::Excited => 0,
            QubitLevel::Ground => 1,
        }
    }

    pub const fn flipped(self) -> Self {
        match self {
            QubitLevel::Excited => QubitLevel::Ground,
            QubitLevel::Ground => QubitLevel::Excited,
        }
    }
}

/// Kronecker product of an ordered, non-empty list of operators.
pub fn tensor_product<T: Real>(ops: &[OperatorMatrix<T>]) -> Result<OperatorMatrix<T>> {
    let (first, rest) = ops
        .split_first()
        .ok_or_else(|| Error::Usage("tensor product of an empty list".into()))?;
    Ok(rest.iter().fold(first.clone(), |acc, op| acc.kron(op)))
}

/// Truncated annihilation operator on `n_max` Fock levels.
pub fn annihilation<T: Real>(n_max: usize) -> Result<OperatorMatrix<T>> {
    if n_max < 2 {
        return Err(Error::Usage(format!(
            "a bosonic mode needs at least 2 Fock levels, got {n_max}"
        )));
    }
    let mut a = OperatorMatrix::zeros(n_max);
    for n in 1..n_max {
        a.set(n - 1, n, cr(T::from_usize_lossy(n).sqrt()));
    }
    Ok(a)
}

pub fn creation<T: Real>(n_max: usize) -> Result<OperatorMatrix<T>> {
    Ok(annihilation::<T>(n_max)?.dagger())
}

/// `a†a` on `n_max` levels.
pub fn number<T: Real>(n_max: usize) -> Result<OperatorMatrix<T>> {
    if n_max < 2 {
        return Err(Error::Usage(format!(
            "a bosonic mode needs at least 2 Fock levels, got {n_max}"
        )));
    }
    let diag: Vec<_> = (0..n_max).map(|n| cr(T::from_usize_lossy(n))).collect();
    Ok(OperatorMatrix::from_diagonal(&diag))
}

pub fn sigma_x<T: Real>() -> OperatorMatrix<T> {
    OperatorMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).expect("2x2")
}

pub fn sigma_y<T: Real>() -> OperatorMatrix<T> {
    let mut m = OperatorMatrix::zeros(2);
    m.set(0, 1, c(T::zero(), -T::one()));
    m.set(1, 0, c(T::zero(), T::one()));
    m
}

pub fn sigma_z<T: Real>() -> OperatorMatrix<T> {
    OperatorMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]]).expect("2x2")
}

/// `σ⁺ = |1⟩⟨0|`.
pub fn sigma_plus<T: Real>() -> OperatorMatrix<T> {
    let mut m = OperatorMatrix::zeros(2);
    m.set(QubitLevel::Excited.index(), QubitLevel::Ground.index(), cr(T::one()));
    m
}

/// `σ⁻ = |0⟩⟨1|`.
pub fn sigma_minus<T: Real>() -> OperatorMatrix<T> {
    sigma_plus::<T>().dagger()
}

/// `I ⊗ … ⊗ op ⊗ … ⊗ I` with `op` in position `slot` of `dims`.
pub fn embed<T: Real>(op: &OperatorMatrix<T>, slot: usize, dims: &[usize]) -> Result<OperatorMatrix<T>> {
    if slot >= dims.len() {
        return Err(Error::SlotOutOfRange {
            index: slot,
            len: dims.len(),
        });
    }
    if op.dim() != dims[slot] {
        return Err(Error::Dimension {
            expected: dims[slot],
            found: op.dim(),
        });
    }
    let before: usize = dims[..slot].iter().product();
    let after: usize = dims[slot + 1..].iter().product();
    let left = OperatorMatrix::identity(before).kron(op);
    Ok(left.kron(&OperatorMatrix::identity(after)))
}

/// Index of a product basis state given per-subsystem indices.
pub fn product_index(indices: &[usize], dims: &[usize]) -> Result<usize> {
    if indices.len() != dims.len() {
        return Err(Error::Dimension {
            expected: dims.len(),
            found: indices.len(),
        });
    }
    let mut idx = 0;
    for (slot, (&i, &d)) in indices.iter().zip(dims).enumerate() {
        if i >= d {
            return Err(Error::Usage(format!(
                "level {i} of subsystem {slot} exceeds its dimension {d}"
            )));
        }
        idx = idx * d + i;
    }
    Ok(idx)
}

/// Index of a qubit register state within the `2^n` qubit space.
pub fn qubit_register_index(levels: &[QubitLevel]) -> usize {
    levels.iter().fold(0, |acc, l| acc * 2 + l.index())
}
