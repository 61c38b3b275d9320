//! Dense helpers plus a nonzero-list view used to apply the (very sparse)
//! ladder-operator products quickly.

use nalgebra::SymmetricEigen;

use crate::scalar::{zero, CMatrix, CVector, Modulus, Real, C};

/// Eigenvalues of a Hermitian matrix in ascending order. Only the lower
/// triangle is read, so the input is symmetrised first.
pub fn hermitian_eigenvalues<T: Real>(m: &CMatrix<T>) -> Vec<T> {
    let sym = hermitian_part(m);
    let mut vals: Vec<T> = SymmetricEigen::new(sym).eigenvalues.iter().copied().collect();
    vals.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
    vals
}

/// `(M + M†)/2`.
pub fn hermitian_part<T: Real>(m: &CMatrix<T>) -> CMatrix<T> {
    let half = T::lit(0.5);
    (m + m.adjoint()).map(|z| z * half)
}

/// Largest entry modulus of `a - b`.
pub fn max_abs_diff<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> T {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).modulus())
        .fold(T::zero(), |acc, v| if v > acc { v } else { acc })
}

pub fn frobenius<T: Real>(m: &CMatrix<T>) -> T {
    m.iter().map(|z| z.norm_sqr()).fold(T::zero(), |a, b| a + b).sqrt()
}

pub fn trace<T: Real>(m: &CMatrix<T>) -> C<T> {
    (0..m.nrows().min(m.ncols())).fold(zero(), |acc, i| acc + m[(i, i)])
}

/// Row-sorted list of the nonzero entries of a square matrix.
#[derive(Clone, Debug)]
pub(crate) struct Sparse<T: Real> {
    dim: usize,
    entries: Vec<(usize, usize, C<T>)>,
}

impl<T: Real> Sparse<T> {
    pub fn from_dense(m: &CMatrix<T>) -> Self {
        let mut entries = Vec::new();
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                let v = m[(i, j)];
                if v.re != T::zero() || v.im != T::zero() {
                    entries.push((i, j, v));
                }
            }
        }
        Self { dim: m.nrows(), entries }
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `out += coeff · S · v`.
    pub fn mul_vec_acc(&self, v: &CVector<T>, coeff: C<T>, out: &mut CVector<T>) {
        for &(i, j, s) in &self.entries {
            out[i] += coeff * s * v[j];
        }
    }

    pub fn mul_vec(&self, v: &CVector<T>) -> CVector<T> {
        let mut out = CVector::zeros(self.dim);
        self.mul_vec_acc(v, crate::scalar::one(), &mut out);
        out
    }

    /// `out += coeff · S · m`.
    pub fn left_mul_acc(&self, m: &CMatrix<T>, coeff: C<T>, out: &mut CMatrix<T>) {
        for col in 0..m.ncols() {
            for &(i, j, s) in &self.entries {
                out[(i, col)] += coeff * s * m[(j, col)];
            }
        }
    }

    /// `out += coeff · m · S`.
    pub fn right_mul_acc(&self, m: &CMatrix<T>, coeff: C<T>, out: &mut CMatrix<T>) {
        for &(i, j, s) in &self.entries {
            let f = coeff * s;
            for row in 0..m.nrows() {
                out[(row, j)] += m[(row, i)] * f;
            }
        }
    }
}
