//! Right-hand sides of the Schrödinger and Lindblad equations.

use num_complex::Complex;

use super::ode::Rhs;
use crate::hamiltonian::{CollapseSet, HamiltonianModel};
use crate::quantum::SparseMatrix;
use crate::scalar::{c, cr, Real};

/// `dψ/dt = −i H(t) ψ`.
pub(crate) struct SchrodingerRhs<'a, T, H> {
    model: &'a H,
    h: SparseMatrix<T>,
}

impl<'a, T: Real, H: HamiltonianModel<T>> SchrodingerRhs<'a, T, H> {
    pub fn new(model: &'a H) -> Self {
        Self {
            model,
            h: model.pattern().clone(),
        }
    }
}

impl<T: Real, H: HamiltonianModel<T>> Rhs<T> for SchrodingerRhs<'_, T, H> {
    fn eval(&mut self, t: T, y: &[Complex<T>], dy: &mut [Complex<T>]) {
        self.model.fill(t, self.h.values_mut());
        self.h.apply_into(y, dy);
        let minus_i = c(T::zero(), -T::one());
        dy.iter_mut().for_each(|z| *z = *z * minus_i);
    }
}

/// `dρ/dt = −i(H_eff ρ − ρ H_eff†) + Σ r_k L_k ρ L_k†` with
/// `H_eff = H − (i/2) Σ r_k L_k† L_k`.
///
/// Works on a split real/imaginary copy of `ρ` and forms `M = H_eff ρ`, so
/// that the commutator part is `−iM + (−iM)†`. Jump terms `K` (Hermitian) are
/// folded into `M` as `iK` on the strict upper triangle and `iK/2` on the
/// diagonal, which the same expression turns back into `K`. Real diagonal
/// jumps reduce to one elementwise weight.
pub(crate) struct LindbladRhs<'a, T, H> {
    model: &'a H,
    /// `H_eff` on the union of the Hamiltonian and damping patterns.
    h_eff: SparseMatrix<T>,
    /// Position in `h_eff` of each Hamiltonian pattern entry.
    h_positions: Vec<usize>,
    /// `H_eff` values with the Hamiltonian part zeroed.
    damping_values: Vec<Complex<T>>,
    h_values: Vec<Complex<T>>,
    /// `Σ r d_i d_j` over the real diagonal jump operators, row-major.
    diagonal_weights: Option<Vec<T>>,
    /// `(row, source column, √r · value)` of each real monomial jump.
    monomial: Vec<Vec<(usize, usize, T)>>,
    general: Vec<(SparseMatrix<T>, T)>,
    scratch: Vec<Complex<T>>,
    /// `Re ρ`, `Im ρ`, `Re M`, `Im M`.
    split: [Vec<T>; 4],
}

enum JumpShape {
    Diagonal,
    Monomial,
    General,
}

fn shape<T: Real>(l: &SparseMatrix<T>) -> JumpShape {
    let mut row_seen = vec![false; l.dim()];
    let mut col_seen = vec![false; l.dim()];
    let mut diagonal = true;
    for (r, col, v) in l.triplets() {
        if row_seen[r] || col_seen[col] || v.im != T::zero() {
            return JumpShape::General;
        }
        row_seen[r] = true;
        col_seen[col] = true;
        diagonal &= r == col;
    }
    if diagonal {
        JumpShape::Diagonal
    } else {
        JumpShape::Monomial
    }
}

impl<'a, T: Real, H: HamiltonianModel<T>> LindbladRhs<'a, T, H> {
    pub fn new(model: &'a H, collapse: &CollapseSet<T>) -> Self {
        let dim = model.dim();
        let jumps: Vec<(SparseMatrix<T>, T)> =
            collapse.active().map(|op| (op.operator.clone(), op.rate)).collect();
        // −(i/2) Σ r L†L, accumulated as triplets
        let mut triplets: Vec<(usize, usize, Complex<T>)> = Vec::new();
        let half = c(T::zero(), -T::lit(0.5));
        for (l, rate) in &jumps {
            // (L†L)_{ij} = Σ_k conj(L_{ki}) L_{kj}; iterate rows k of L
            let mut by_row: Vec<Vec<(usize, Complex<T>)>> = vec![Vec::new(); dim];
            for (r, col, v) in l.triplets() {
                by_row[r].push((col, v));
            }
            for row in &by_row {
                for &(i, vi) in row {
                    for &(j, vj) in row {
                        triplets.push((i, j, half * vi.conj() * vj * *rate));
                    }
                }
            }
        }
        for (r, col, _) in model.pattern().triplets() {
            triplets.push((r, col, cr(T::zero())));
        }
        let h_eff = SparseMatrix::from_triplets(dim, &triplets).expect("indices inside the space");
        let h_positions = model
            .pattern()
            .triplets()
            .map(|(r, col, _)| h_eff.position(r, col).expect("pattern entry present"))
            .collect();
        let damping_values = h_eff.values().to_vec();
        let mut diagonal_weights: Option<Vec<T>> = None;
        let mut monomial = Vec::new();
        let mut general = Vec::new();
        for (l, rate) in jumps {
            match shape(&l) {
                JumpShape::Diagonal => {
                    let mut d = vec![T::zero(); dim];
                    for (r, _, v) in l.triplets() {
                        d[r] = v.re;
                    }
                    let w = diagonal_weights.get_or_insert_with(|| vec![T::zero(); dim * dim]);
                    for i in 0..dim {
                        for j in 0..dim {
                            w[i * dim + j] = w[i * dim + j] + d[i] * d[j] * rate;
                        }
                    }
                }
                JumpShape::Monomial => {
                    let root = rate.sqrt();
                    monomial.push(l.triplets().map(|(r, col, v)| (r, col, v.re * root)).collect());
                }
                JumpShape::General => general.push((l, rate)),
            }
        }
        Self {
            model,
            h_values: vec![cr(T::zero()); model.pattern().nnz()],
            h_eff,
            h_positions,
            damping_values,
            diagonal_weights,
            monomial,
            general,
            scratch: vec![cr(T::zero()); dim * dim],
            split: std::array::from_fn(|_| vec![T::zero(); dim * dim]),
        }
    }
}

impl<T: Real, H: HamiltonianModel<T>> Rhs<T> for LindbladRhs<'_, T, H> {
    fn eval(&mut self, t: T, rho: &[Complex<T>], out: &mut [Complex<T>]) {
        let n = self.h_eff.dim();
        self.model.fill(t, &mut self.h_values);
        let values = self.h_eff.values_mut();
        values.copy_from_slice(&self.damping_values);
        for (&p, &v) in self.h_positions.iter().zip(&self.h_values) {
            values[p] = values[p] + v;
        }
        let [rho_re, rho_im, m_re, m_im] = &mut self.split;
        for ((z, re), im) in rho.iter().zip(rho_re.iter_mut()).zip(rho_im.iter_mut()) {
            *re = z.re;
            *im = z.im;
        }
        self.h_eff.mul_dense_split_into(rho_re, rho_im, m_re, m_im);
        let half = T::lit(0.5);
        if let Some(w) = &self.diagonal_weights {
            // (i/2) D∘ρ everywhere
            for ((((m_r, m_i), &r_r), &r_i), &d) in
                m_re.iter_mut().zip(m_im.iter_mut()).zip(rho_re.iter()).zip(rho_im.iter()).zip(w)
            {
                let d = d * half;
                *m_r = *m_r - d * r_i;
                *m_i = *m_i + d * r_r;
            }
        }
        // entries are sorted by row, so `b > a` is the strict upper triangle
        for entries in &self.monomial {
            for (a, &(i, pi, li)) in entries.iter().enumerate() {
                let src_re = &rho_re[pi * n..(pi + 1) * n];
                let src_im = &rho_im[pi * n..(pi + 1) * n];
                let dst_re = &mut m_re[i * n..(i + 1) * n];
                let dst_im = &mut m_im[i * n..(i + 1) * n];
                let w = li * li * half;
                dst_re[i] = dst_re[i] - w * src_im[pi];
                dst_im[i] = dst_im[i] + w * src_re[pi];
                for &(j, pj, lj) in &entries[a + 1..] {
                    let w = li * lj;
                    dst_re[j] = dst_re[j] - w * src_im[pj];
                    dst_im[j] = dst_im[j] + w * src_re[pj];
                }
            }
        }
        // out = −iM + (−iM)†
        const BLOCK: usize = 32;
        for bi in (0..n).step_by(BLOCK) {
            for bj in (0..n).step_by(BLOCK) {
                for i in bi..(bi + BLOCK).min(n) {
                    for j in bj..(bj + BLOCK).min(n) {
                        let (ij, ji) = (i * n + j, j * n + i);
                        out[ij] = c(m_im[ij] + m_im[ji], m_re[ji] - m_re[ij]);
                    }
                }
            }
        }
        for (l, rate) in &self.general {
            l.mul_dense_into(rho, &mut self.scratch);
            l.add_right_adjoint(&self.scratch, *rate, out);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::device::CavityMode;
    use crate::hamiltonian::{collapse_set, CollapseOp, Coefficient, Layout, Rates, Term, TermHamiltonian, Tier};
    use crate::quantum::{annihilation, embed, sigma_minus, OperatorMatrix};

    #[test]
    fn matches_dense_master_equation() {
        let layout = Layout {
            modes: vec![(CavityMode::Single, 3)],
            n_qubits: 2,
        };
        let dims = layout.dims();
        let a = embed(&annihilation::<f64>(3).unwrap(), 0, &dims).unwrap();
        let sm = embed(&sigma_minus::<f64>(), 1, &dims).unwrap();
        let coupling = &a.dagger() * &sm;
        let h = TermHamiltonian::new(
            Tier::Reduced,
            layout.clone(),
            SparseMatrix::from_dense(&(&sm + &sm.dagger())),
            vec![Term {
                label: "a+ s-".into(),
                operator: SparseMatrix::from_dense(&coupling),
                coefficient: Coefficient::constant_rotation(c(0.3, 0.2), 1.7),
            }],
        )
        .unwrap();
        let mut collapse = collapse_set(&layout, Rates::uniform(0.4)).unwrap();
        collapse.ops.push(CollapseOp {
            label: "mixed".into(),
            operator: SparseMatrix::from_dense(&(&a + &sm)),
            rate: 0.7,
        });
        let n = layout.dim();
        let x = OperatorMatrix::from_fn(n, |r, col| c((r * 7 + col * 3) as f64 % 5.0, (r + 2 * col) as f64 % 3.0));
        let rho = (&x * &x.dagger()).scale_real(0.01);
        let t = 0.37;

        let hd = h.evaluate(t);
        let minus_i = c(0.0, -1.0);
        let mut expected = (&(&hd * &rho) + &(&rho * &hd).scale_real(-1.0)).scale(minus_i);
        for op in collapse.active() {
            let l = op.operator.to_dense();
            let ldl = &l.dagger() * &l;
            let jump = &(&l * &rho) * &l.dagger();
            let anti = &(&ldl * &rho) + &(&rho * &ldl);
            expected = &expected + &(&jump + &anti.scale_real(-0.5)).scale_real(op.rate);
        }

        let mut rhs = LindbladRhs::new(&h, &collapse);
        let mut out = vec![cr(0.0); n * n];
        rhs.eval(t, rho.as_slice(), &mut out);
        let got = OperatorMatrix::from_vec(n, out).unwrap();
        assert!(got.max_abs_diff(&expected).unwrap() < 1e-13);
    }
}
