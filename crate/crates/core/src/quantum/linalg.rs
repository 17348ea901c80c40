//! Spectral functions of Hermitian operators, matrix exponentials and a
//! Cholesky-based positivity test.

use nalgebra::DMatrix;
use num_complex::Complex;

use super::OperatorMatrix;
use crate::scalar::{cis, cr, from_c64, to_c64, Real};
use crate::{Error, Result};

/// Relative Hermiticity tolerance accepted by the spectral routines.
pub const HERMITIAN_REL_TOL: f64 = 1e-12;

/// Eigen-decomposition `H = V diag(λ) V†` of a Hermitian operator.
///
/// Eigenvalues are returned in ascending order; column `k` of `V` is the
/// eigenvector of `λ_k`. The decomposition itself runs in double precision.
pub fn hermitian_eigen<T: Real>(h: &OperatorMatrix<T>) -> (Vec<T>, OperatorMatrix<T>) {
    let n = h.dim();
    let mat = DMatrix::<Complex<f64>>::from_fn(n, n, |r, c| {
        // symmetrise so rounding noise cannot leak into the solver
        let a = to_c64(h.get(r, c));
        let b = to_c64(h.get(c, r)).conj();
        (a + b) * 0.5
    });
    let eig = mat.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| T::lit(eig.eigenvalues[k])).collect();
    let vectors = OperatorMatrix::from_fn(n, |r, c| from_c64(eig.eigenvectors[(r, order[c])]));
    (values, vectors)
}

/// `f(H) = V diag(f(λ)) V†` for Hermitian `H`.
pub fn hermitian_function<T: Real>(
    h: &OperatorMatrix<T>,
    f: impl Fn(T) -> Complex<T>,
) -> OperatorMatrix<T> {
    let (values, v) = hermitian_eigen(h);
    let n = h.dim();
    let fv: Vec<Complex<T>> = values.into_iter().map(f).collect();
    OperatorMatrix::from_fn(n, |r, c| {
        (0..n).fold(cr(T::zero()), |acc, k| acc + v.get(r, k) * fv[k] * v.get(c, k).conj())
    })
}

pub(crate) fn require_hermitian<T: Real>(h: &OperatorMatrix<T>) -> Result<()> {
    let err = h.hermiticity_error();
    let scale = T::one().max(h.max_abs());
    if err > T::lit(HERMITIAN_REL_TOL) * scale {
        return Err(Error::Validation(format!(
            "operator is not Hermitian: max|H - H^dagger| = {err:e}"
        )));
    }
    Ok(())
}

/// `exp(−iHt)` via the Hermitian eigen-decomposition of `H`.
pub fn matrix_exponential_unitary<T: Real>(h: &OperatorMatrix<T>, t: T) -> Result<OperatorMatrix<T>> {
    require_hermitian(h)?;
    Ok(hermitian_function(h, |lambda| cis(-lambda * t)))
}

/// Taylor series exponential with scaling and squaring, for general
/// (non-normal) operators. Exact up to rounding for nilpotent input.
pub fn exp_series<T: Real>(a: &OperatorMatrix<T>) -> OperatorMatrix<T> {
    let n = a.dim();
    // infinity-norm bound picks the number of halvings
    let norm = (0..n)
        .map(|r| a.row(r).iter().map(|z| z.norm()).sum::<T>())
        .fold(T::zero(), T::max);
    let mut squarings = 0u32;
    let mut s = T::one();
    while norm * s > T::lit(0.5) {
        s = s * T::lit(0.5);
        squarings += 1;
    }
    let scaled = a.scale_real(s);
    let mut result = OperatorMatrix::identity(n);
    let mut term = OperatorMatrix::identity(n);
    for k in 1..64 {
        term = (&term * &scaled).scale_real(T::one() / T::from_usize_lossy(k));
        let size = term.max_abs();
        result = &result + &term;
        if size <= T::epsilon() * T::lit(1e-3) {
            break;
        }
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

/// True when `M + shift·I` admits a Cholesky factorisation, i.e. the smallest
/// eigenvalue of the Hermitian matrix `M` exceeds `−shift`.
pub fn is_positive_within<T: Real>(m: &OperatorMatrix<T>, shift: T) -> bool {
    let n = m.dim();
    let mut l = vec![cr(T::zero()); n * n];
    for j in 0..n {
        let mut diag = m.get(j, j).re + shift;
        for k in 0..j {
            diag = diag - l[j * n + k].norm_sqr();
        }
        if diag.is_nan() || diag <= T::zero() {
            return false;
        }
        let ljj = diag.sqrt();
        l[j * n + j] = cr(ljj);
        for i in (j + 1)..n {
            let mut s = m.get(i, j);
            for k in 0..j {
                s = s - l[i * n + k] * l[j * n + k].conj();
            }
            l[i * n + j] = s / ljj;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::ops::{sigma_x, sigma_z};

    #[test]
    fn pauli_exponential_at_quarter_turn() {
        let x = sigma_x::<f64>();
        let u = matrix_exponential_unitary(&x, std::f64::consts::FRAC_PI_2).unwrap();
        let expected = x.scale(Complex::new(0.0, -1.0));
        assert!(u.max_abs_diff(&expected).unwrap() < 1e-14);
    }

    #[test]
    fn zero_time_is_identity_and_inverse_cancels() {
        let h = &sigma_x::<f64>() + &sigma_z::<f64>().scale_real(0.3);
        let u0 = matrix_exponential_unitary(&h, 0.0).unwrap();
        assert!(u0.max_abs_diff(&OperatorMatrix::identity(2)).unwrap() < 1e-15);
        let fwd = matrix_exponential_unitary(&h, 1.7).unwrap();
        let back = matrix_exponential_unitary(&h, -1.7).unwrap();
        assert!((&fwd * &back).max_abs_diff(&OperatorMatrix::identity(2)).unwrap() < 1e-10);
    }

    #[test]
    fn non_hermitian_input_is_rejected() {
        let mut h = sigma_x::<f64>();
        h.set(0, 1, Complex::new(1.0, 0.2));
        assert!(matches!(
            matrix_exponential_unitary(&h, 1.0),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn series_matches_spectral_exponential() {
        let h = &sigma_x::<f64>().scale_real(2.3) + &sigma_z::<f64>().scale_real(-0.7);
        let spectral = matrix_exponential_unitary(&h, 0.9).unwrap();
        let series = exp_series(&h.scale(Complex::new(0.0, -0.9)));
        assert!(spectral.max_abs_diff(&series).unwrap() < 1e-13);
    }

    #[test]
    fn cholesky_positivity() {
        let p = OperatorMatrix::<f64>::from_real_rows(&[&[0.5, 0.5], &[0.5, 0.5]]).unwrap();
        assert!(is_positive_within(&p, 1e-8));
        let q = OperatorMatrix::<f64>::from_real_rows(&[&[0.5, 0.6], &[0.6, 0.5]]).unwrap();
        assert!(!is_positive_within(&q, 1e-8));
    }
}
