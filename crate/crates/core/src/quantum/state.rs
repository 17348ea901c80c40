use num_complex::Complex;

use super::linalg::{hermitian_eigen, is_positive_within};
use super::OperatorMatrix;
use crate::scalar::{cr, Real};
use crate::{Error, Result};

pub const NORM_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-8;
pub const HERMITIAN_TOL: f64 = 1e-10;
pub const NEGATIVITY_TOL: f64 = 1e-8;

/// Normalised pure state.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector<T> {
    amplitudes: Vec<Complex<T>>,
}

impl<T: Real> StateVector<T> {
    /// Wraps amplitudes that must already have unit norm (within 1e-10).
    pub fn new(amplitudes: Vec<Complex<T>>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::Usage("state vector must be non-empty".into()));
        }
        let norm = norm_of(&amplitudes);
        if (norm - T::one()).abs() > T::lit(NORM_TOL) {
            return Err(Error::Validation(format!("state norm {norm} differs from 1")));
        }
        Ok(Self { amplitudes })
    }

    /// Rescales arbitrary non-zero amplitudes to unit norm.
    pub fn normalized(amplitudes: Vec<Complex<T>>) -> Result<Self> {
        let norm = norm_of(&amplitudes);
        if amplitudes.is_empty() || norm == T::zero() || !norm.is_finite() {
            return Err(Error::Validation("cannot normalise a zero state".into()));
        }
        let inv = T::one() / norm;
        Ok(Self {
            amplitudes: amplitudes.into_iter().map(|z| z * inv).collect(),
        })
    }

    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::SlotOutOfRange { index, len: dim });
        }
        let mut amplitudes = vec![cr(T::zero()); dim];
        amplitudes[index] = cr(T::one());
        Ok(Self { amplitudes })
    }

    /// Used by integrators, whose output is checked separately.
    pub(crate) fn from_raw(amplitudes: Vec<Complex<T>>) -> Self {
        Self { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amplitudes
    }

    pub fn norm(&self) -> T {
        norm_of(&self.amplitudes)
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Result<Complex<T>> {
        if self.dim() != other.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .fold(cr(T::zero()), |acc, (a, b)| acc + a.conj() * b))
    }

    pub fn tensor(&self, other: &Self) -> Self {
        let mut amplitudes = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amplitudes {
            for b in &other.amplitudes {
                amplitudes.push(a * b);
            }
        }
        Self { amplitudes }
    }

    pub fn apply(&self, op: &OperatorMatrix<T>) -> Result<Self> {
        Ok(Self {
            amplitudes: op.apply(&self.amplitudes)?,
        })
    }

    pub fn projector(&self) -> DensityMatrix<T> {
        let n = self.dim();
        DensityMatrix {
            matrix: OperatorMatrix::from_fn(n, |r, c| self.amplitudes[r] * self.amplitudes[c].conj()),
        }
    }

    /// `max_i |ψ_i − φ_i|`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<T> {
        if self.dim() != other.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .fold(T::zero(), |m, (a, b)| m.max((a - b).norm())))
    }
}

fn norm_of<T: Real>(v: &[Complex<T>]) -> T {
    v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
}

/// Physicality diagnostics of a density matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityCheck<T> {
    pub trace_error: T,
    pub hermiticity_error: T,
    /// Whether the smallest eigenvalue is at least `−NEGATIVITY_TOL`.
    pub positive: bool,
}

impl<T: Real> DensityCheck<T> {
    pub fn passes(&self) -> bool {
        self.trace_error <= T::lit(TRACE_TOL)
            && self.hermiticity_error <= T::lit(HERMITIAN_TOL)
            && self.positive
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix<T> {
    matrix: OperatorMatrix<T>,
}

impl<T: Real> DensityMatrix<T> {
    /// Validates trace, Hermiticity and positivity before wrapping.
    pub fn new(matrix: OperatorMatrix<T>) -> Result<Self> {
        let rho = Self { matrix };
        let check = rho.check();
        if !check.passes() {
            return Err(Error::Validation(format!(
                "not a density matrix: |tr-1| = {:e}, hermiticity {:e}, positive = {}",
                check.trace_error, check.hermiticity_error, check.positive
            )));
        }
        Ok(rho)
    }

    /// Wraps without validation. Integrators use this and monitor the
    /// invariants themselves.
    pub fn from_matrix_unchecked(matrix: OperatorMatrix<T>) -> Self {
        Self { matrix }
    }

    pub fn from_pure(psi: &StateVector<T>) -> Self {
        psi.projector()
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: OperatorMatrix::identity(dim).scale_real(T::one() / T::from_usize_lossy(dim)),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &OperatorMatrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> OperatorMatrix<T> {
        self.matrix
    }

    pub fn trace(&self) -> T {
        self.matrix.trace().re
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> T {
        purity(&self.matrix)
    }

    pub fn min_eigenvalue(&self) -> T {
        let (values, _) = hermitian_eigen(&self.matrix);
        values.first().copied().unwrap_or_else(T::zero)
    }

    pub fn check(&self) -> DensityCheck<T> {
        DensityCheck {
            trace_error: (self.matrix.trace().re - T::one()).abs().max(self.matrix.trace().im.abs()),
            hermiticity_error: self.matrix.hermiticity_error(),
            positive: is_positive_within(&self.matrix, T::lit(NEGATIVITY_TOL)),
        }
    }

    /// `Tr(op·ρ)`.
    pub fn expectation(&self, op: &OperatorMatrix<T>) -> Result<Complex<T>> {
        expectation(op, self)
    }
}

/// `Tr ρ²` of a Hermitian matrix.
pub(crate) fn purity<T: Real>(m: &OperatorMatrix<T>) -> T {
    m.as_slice().iter().map(|z| z.norm_sqr()).sum()
}

/// `Tr(op·ρ)`.
pub fn expectation<T: Real>(op: &OperatorMatrix<T>, rho: &DensityMatrix<T>) -> Result<Complex<T>> {
    let n = op.dim();
    if rho.dim() != n {
        return Err(Error::Dimension {
            expected: n,
            found: rho.dim(),
        });
    }
    let m = rho.matrix();
    let mut acc = cr(T::zero());
    for r in 0..n {
        for c in 0..n {
            acc = acc + op.get(r, c) * m.get(c, r);
        }
    }
    Ok(acc)
}
