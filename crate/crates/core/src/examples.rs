//! Named tuples used throughout the tests and the bundled fixtures.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::linalg::{c64, CMat};
use crate::pencil::MatrixTuple;

pub fn sigma1() -> CMat {
    CMat::from_row_slice(2, 2, &[c64(0.0, 0.0), c64(1.0, 0.0), c64(1.0, 0.0), c64(0.0, 0.0)])
}

pub fn sigma2() -> CMat {
    CMat::from_row_slice(2, 2, &[c64(0.0, 0.0), c64(0.0, -1.0), c64(0.0, 1.0), c64(0.0, 0.0)])
}

pub fn sigma3() -> CMat {
    CMat::from_row_slice(2, 2, &[c64(1.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(-1.0, 0.0)])
}

/// `(sigma_1, sigma_2, sigma_3)`.
pub fn pauli() -> MatrixTuple {
    MatrixTuple::new(vec![sigma1(), sigma2(), sigma3()])
        .expect("valid tuple")
        .with_name("pauli")
}

/// `(sigma_1, sigma_2)`.
pub fn pauli_pair() -> MatrixTuple {
    MatrixTuple::new(vec![sigma1(), sigma2()])
        .expect("valid tuple")
        .with_name("pauli_pair")
}

/// `(diag(1, 0), diag(0, 1))`.
pub fn diagpair() -> MatrixTuple {
    MatrixTuple::from_real(2, &[&[1.0, 0.0, 0.0, 0.0], &[0.0, 0.0, 0.0, 1.0]])
        .expect("valid tuple")
        .with_name("diagpair")
}

/// Non-hermitian pair with real spectrum: `[[0,1],[0,0]]`, `[[0,1],[0,1]]`.
pub fn nilpair() -> MatrixTuple {
    MatrixTuple::from_real(2, &[&[0.0, 1.0, 0.0, 0.0], &[0.0, 1.0, 0.0, 1.0]])
        .expect("valid tuple")
        .with_name("nilpair")
}

/// `A_1 = diag(1,-1,-1)`, `A_2 = [[0,0,1],[0,0,1],[1,1,0]]`: a pair whose
/// numerical range has a flat edge on the line `x_1 = -1`.
pub fn example63() -> MatrixTuple {
    MatrixTuple::from_real(
        3,
        &[
            &[1.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, -1.0],
            &[0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 1.0, 1.0, 0.0],
        ],
    )
    .expect("valid tuple")
    .with_name("example63")
}

/// `(a_1 ⊕ sigma_1, a_2 ⊕ sigma_2)`, block diagonal `3 x 3`.
pub fn pauli2(a: [f64; 2]) -> MatrixTuple {
    let block = |s: CMat, ai: f64| {
        let mut m = CMat::zeros(3, 3);
        m[(0, 0)] = c64(ai, 0.0);
        m.view_mut((1, 1), (2, 2)).copy_from(&s);
        m
    };
    MatrixTuple::new(vec![block(sigma1(), a[0]), block(sigma2(), a[1])])
        .expect("valid tuple")
        .with_name("pauli2")
}

/// Random hermitian matrix with standard complex Gaussian entries.
pub fn random_hermitian(dim: usize, rng: &mut ChaCha8Rng) -> CMat {
    let g = DMatrix::<Complex64>::from_fn(dim, dim, |_, _| {
        c64(StandardNormal.sample(rng), StandardNormal.sample(rng))
    });
    (&g + g.adjoint()) * c64(0.5, 0.0)
}

/// Tuple of `n` random hermitian `dim x dim` matrices.
pub fn random_hermitian_tuple(n: usize, dim: usize, seed: u64) -> MatrixTuple {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    MatrixTuple::new((0..n).map(|_| random_hermitian(dim, &mut rng)).collect())
        .expect("valid tuple")
}
