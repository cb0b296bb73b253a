//! Numerical tools for the Weyl functional calculus of matrix tuples.
//!
//! A tuple `A = (A_1, ..., A_n)` of `N x N` matrices defines the matrix-valued
//! distribution `W_A` with `<W_A, f> = (2 pi)^{-n} ∫ e^{i<A, xi>} f̂(xi) dxi`.
//! The modules cover the Clifford algebra used by the Cauchy kernel, the
//! determinant pencil and its localisations, the Weyl calculus itself, the
//! plane-wave Cauchy kernel `G_x(A)` and its jumps across `R^n`, Kippenhahn
//! curves of pairs, and the numerical-range measure.

pub mod cauchy;
pub mod clifford;
pub mod error;
pub mod examples;
pub mod geometry;
pub mod kippenhahn;
pub mod linalg;
pub mod numrange;
pub mod pencil;
pub mod quadrature;
pub mod weyl;

pub use error::{Error, Result};
pub use pencil::MatrixTuple;
