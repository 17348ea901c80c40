use num_complex::Complex;

use super::OperatorMatrix;
use crate::scalar::{cr, Real};
use crate::{Error, Result};

/// Square complex matrix in compressed sparse row form.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix<T> {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    values: Vec<Complex<T>>,
}

impl<T: Real> SparseMatrix<T> {
    /// Builds from `(row, col, value)` triplets; duplicates are summed and
    /// explicit zeros kept, so the pattern depends only on the positions.
    pub fn from_triplets(dim: usize, triplets: &[(usize, usize, Complex<T>)]) -> Result<Self> {
        for &(r, c, _) in triplets {
            if r >= dim || c >= dim {
                return Err(Error::SlotOutOfRange {
                    index: r.max(c),
                    len: dim,
                });
            }
        }
        let mut sorted: Vec<_> = triplets.to_vec();
        sorted.sort_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0usize; dim + 1];
        let mut cols = Vec::with_capacity(sorted.len());
        let mut values: Vec<Complex<T>> = Vec::with_capacity(sorted.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in sorted {
            if last == Some((r, c)) {
                let end = values.len() - 1;
                values[end] = values[end] + v;
                continue;
            }
            last = Some((r, c));
            row_ptr[r + 1] += 1;
            cols.push(c);
            values.push(v);
        }
        for r in 0..dim {
            row_ptr[r + 1] += row_ptr[r];
        }
        Ok(Self {
            dim,
            row_ptr,
            cols,
            values,
        })
    }

    /// Keeps entries whose modulus is non-zero.
    pub fn from_dense(m: &OperatorMatrix<T>) -> Self {
        let n = m.dim();
        let mut triplets = Vec::new();
        for r in 0..n {
            for (c, &v) in m.row(r).iter().enumerate() {
                if v.norm_sqr() > T::zero() {
                    triplets.push((r, c, v));
                }
            }
        }
        Self::from_triplets(n, &triplets).expect("indices within the dense dimension")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.values
    }

    /// Iterates `(row, col, value)` in row-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, Complex<T>)> + '_ {
        (0..self.dim).flat_map(move |r| {
            (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |k| (r, self.cols[k], self.values[k]))
        })
    }

    /// Storage position of entry `(r, c)` if it is in the pattern.
    pub fn position(&self, r: usize, c: usize) -> Option<usize> {
        let lo = self.row_ptr[r];
        let hi = self.row_ptr[r + 1];
        self.cols[lo..hi].binary_search(&c).ok().map(|k| lo + k)
    }

    pub fn to_dense(&self) -> OperatorMatrix<T> {
        let mut m = OperatorMatrix::zeros(self.dim);
        for (r, c, v) in self.triplets() {
            m.set(r, c, m.get(r, c) + v);
        }
        m
    }

    pub fn dagger(&self) -> Self {
        let t: Vec<_> = self.triplets().map(|(r, c, v)| (c, r, v.conj())).collect();
        Self::from_triplets(self.dim, &t).expect("transpose keeps indices in range")
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        let mut out = self.clone();
        for v in &mut out.values {
            *v = *v * s;
        }
        out
    }

    /// `out = S·x`.
    pub fn apply_into(&self, x: &[Complex<T>], out: &mut [Complex<T>]) {
        for (r, o) in out.iter_mut().enumerate().take(self.dim) {
            let mut acc = cr(T::zero());
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc = acc + self.values[k] * x[self.cols[k]];
            }
            *o = acc;
        }
    }

    pub fn apply(&self, x: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        self.check_len(x.len())?;
        let mut out = vec![cr(T::zero()); self.dim];
        self.apply_into(x, &mut out);
        Ok(out)
    }

    /// `out = S·M` for a row-major dense `M` of the same dimension.
    pub fn mul_dense_into(&self, m: &[Complex<T>], out: &mut [Complex<T>]) {
        let n = self.dim;
        for r in 0..n {
            let out_row = &mut out[r * n..(r + 1) * n];
            out_row.iter_mut().for_each(|z| *z = cr(T::zero()));
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                let v = self.values[k];
                let src = &m[self.cols[k] * n..(self.cols[k] + 1) * n];
                for (o, &s) in out_row.iter_mut().zip(src) {
                    *o = *o + v * s;
                }
            }
        }
    }

    /// [`Self::mul_dense_into`] on a split real/imaginary layout.
    pub fn mul_dense_split_into(&self, m_re: &[T], m_im: &[T], out_re: &mut [T], out_im: &mut [T]) {
        let n = self.dim;
        for r in 0..n {
            let o_re = &mut out_re[r * n..(r + 1) * n];
            let o_im = &mut out_im[r * n..(r + 1) * n];
            o_re.iter_mut().for_each(|z| *z = T::zero());
            o_im.iter_mut().for_each(|z| *z = T::zero());
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                let (vr, vi) = (self.values[k].re, self.values[k].im);
                let base = self.cols[k] * n;
                let s_re = &m_re[base..base + n];
                let s_im = &m_im[base..base + n];
                for (((o_r, o_i), &x), &y) in o_re.iter_mut().zip(o_im.iter_mut()).zip(s_re).zip(s_im) {
                    *o_r = *o_r + vr * x - vi * y;
                    *o_i = *o_i + vr * y + vi * x;
                }
            }
        }
    }

    pub fn mul_dense(&self, m: &OperatorMatrix<T>) -> Result<OperatorMatrix<T>> {
        self.check_len(m.dim())?;
        let mut out = vec![cr(T::zero()); self.dim * self.dim];
        self.mul_dense_into(m.as_slice(), &mut out);
        OperatorMatrix::from_vec(self.dim, out)
    }

    /// `out += rate · (S·M)·S†`, given the product `sm = S·M` already formed.
    pub fn add_right_adjoint(&self, sm: &[Complex<T>], rate: T, out: &mut [Complex<T>]) {
        let n = self.dim;
        // (SM S†)_{ij} = Σ_k (SM)_{ik} conj(S_{jk}), one output row at a time
        let weights: Vec<Complex<T>> = self.values.iter().map(|v| v.conj() * rate).collect();
        for i in 0..n {
            let src = &sm[i * n..(i + 1) * n];
            let dst = &mut out[i * n..(i + 1) * n];
            for (j, d) in dst.iter_mut().enumerate() {
                let mut acc = *d;
                for k in self.row_ptr[j]..self.row_ptr[j + 1] {
                    acc = acc + src[self.cols[k]] * weights[k];
                }
                *d = acc;
            }
        }
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.dim {
            return Err(Error::Dimension {
                expected: self.dim,
                found: len,
            });
        }
        Ok(())
    }
}

impl SparseMatrix<f64> {
    /// Same matrix in another working precision.
    pub fn to_precision<T: Real>(&self) -> SparseMatrix<T> {
        SparseMatrix {
            dim: self.dim,
            row_ptr: self.row_ptr.clone(),
            cols: self.cols.clone(),
            values: self
                .values
                .iter()
                .map(|v| Complex::new(T::lit(v.re), T::lit(v.im)))
                .collect(),
        }
    }
}
