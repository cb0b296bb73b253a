//! Dense complex matrix helpers shared by the numerical modules.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMat = DMatrix<Complex64>;

pub const HERMITIAN_TOL: f64 = 1e-12;

pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn is_hermitian(m: &CMat, tol: f64) -> bool {
    if !m.is_square() {
        return false;
    }
    let n = m.nrows();
    let scale = m.norm().max(1.0);
    for i in 0..n {
        for j in i..n {
            if (m[(i, j)] - m[(j, i)].conj()).norm() > tol * scale {
                return false;
            }
        }
    }
    true
}

/// Eigen-decomposition of a hermitian matrix, eigenvalues ascending.
pub fn eigh(m: &CMat) -> (Vec<f64>, CMat) {
    let h = (m + m.adjoint()) * c64(0.5, 0.0);
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vecs = CMat::from_fn(m.nrows(), m.ncols(), |i, j| eig.eigenvectors[(i, order[j])]);
    (vals, vecs)
}

/// All eigenvalues of a general square matrix, via complex Schur form.
pub fn eigvals(m: &CMat) -> Vec<Complex64> {
    if m.nrows() == 1 {
        return vec![m[(0, 0)]];
    }
    let (_, t) = m.clone().schur().unpack();
    t.diagonal().iter().copied().collect()
}

pub fn spectral_norm(m: &CMat) -> f64 {
    m.singular_values().iter().fold(0.0, |a: f64, &b| a.max(b))
}

/// `exp(m)` by Padé scaling and squaring.
pub fn expm(m: &CMat) -> CMat {
    m.exp()
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

/// LU factorisation with partial pivoting on a reusable row-major buffer.
///
/// Used in the inner loops of the plane-wave quadrature where allocating a
/// fresh `DMatrix` per node dominates the cost.
#[derive(Debug, Clone)]
pub struct SmallLu {
    n: usize,
    lu: Vec<Complex64>,
    piv: Vec<usize>,
}

impl SmallLu {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            lu: vec![Complex64::new(0.0, 0.0); n * n],
            piv: vec![0; n],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Factorises the row-major matrix `a`.
    pub fn factor(&mut self, a: &[Complex64]) -> Result<()> {
        let n = self.n;
        self.lu.copy_from_slice(a);
        for k in 0..n {
            let mut p = k;
            let mut best = self.lu[k * n + k].norm();
            for i in k + 1..n {
                let v = self.lu[i * n + k].norm();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == 0.0 || !best.is_finite() {
                return Err(Error::Numerical("singular matrix in LU".into()));
            }
            self.piv[k] = p;
            if p != k {
                for j in 0..n {
                    self.lu.swap(k * n + j, p * n + j);
                }
            }
            let inv = Complex64::new(1.0, 0.0) / self.lu[k * n + k];
            for i in k + 1..n {
                let f = self.lu[i * n + k] * inv;
                self.lu[i * n + k] = f;
                for j in k + 1..n {
                    let u = self.lu[k * n + j];
                    self.lu[i * n + j] -= f * u;
                }
            }
        }
        Ok(())
    }

    /// Solves in place for every column of the row-major `n x m` block `b`.
    pub fn solve_cols(&self, b: &mut [Complex64], m: usize) {
        let n = self.n;
        for k in 0..n {
            let p = self.piv[k];
            if p != k {
                for j in 0..m {
                    b.swap(k * m + j, p * m + j);
                }
            }
        }
        for i in 0..n {
            for k in 0..i {
                let f = self.lu[i * n + k];
                for j in 0..m {
                    let v = b[k * m + j];
                    b[i * m + j] -= f * v;
                }
            }
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                let f = self.lu[i * n + k];
                for j in 0..m {
                    let v = b[k * m + j];
                    b[i * m + j] -= f * v;
                }
            }
            let inv = Complex64::new(1.0, 0.0) / self.lu[i * n + i];
            for j in 0..m {
                b[i * m + j] *= inv;
            }
        }
    }
}

/// Row-major copy of a square matrix.
pub fn to_row_major(m: &CMat) -> Vec<Complex64> {
    let n = m.nrows();
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..m.ncols() {
            out.push(m[(i, j)]);
        }
    }
    out
}

pub fn from_row_major(n: usize, v: &[Complex64]) -> CMat {
    CMat::from_fn(n, n, |i, j| v[i * n + j])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_lu_inverts() {
        let a = CMat::from_row_slice(
            3,
            3,
            &[
                c64(0.0, 1.0),
                c64(2.0, 0.0),
                c64(1.0, -1.0),
                c64(1.0, 0.0),
                c64(0.0, 0.0),
                c64(3.0, 0.5),
                c64(-1.0, 0.0),
                c64(1.0, 1.0),
                c64(0.5, 0.0),
            ],
        );
        let mut lu = SmallLu::new(3);
        lu.factor(&to_row_major(&a)).unwrap();
        let mut b = to_row_major(&identity(3));
        lu.solve_cols(&mut b, 3);
        let inv = from_row_major(3, &b);
        assert!((a * inv - identity(3)).norm() < 1e-14);
    }

    #[test]
    fn eigh_sorted_and_orthonormal() {
        let m = CMat::from_row_slice(
            2,
            2,
            &[c64(0.0, 0.0), c64(0.0, -1.0), c64(0.0, 1.0), c64(0.0, 0.0)],
        );
        let (vals, vecs) = eigh(&m);
        assert!((vals[0] + 1.0).abs() < 1e-14 && (vals[1] - 1.0).abs() < 1e-14);
        assert!((vecs.adjoint() * &vecs - identity(2)).norm() < 1e-14);
    }

    #[test]
    fn eigvals_of_rotation() {
        let m = CMat::from_row_slice(
            2,
            2,
            &[c64(0.0, 0.0), c64(1.0, 0.0), c64(-1.0, 0.0), c64(0.0, 0.0)],
        );
        let mut im: Vec<f64> = eigvals(&m).iter().map(|z| z.im).collect();
        im.sort_by(f64::total_cmp);
        assert!((im[0] + 1.0).abs() < 1e-12 && (im[1] - 1.0).abs() < 1e-12);
    }
}
