//! Complex Clifford algebra `C_(n)` over generators `e_1..e_n` with `e_j^2 = -1`.
//!
//! Blades are stored as bit masks: bit `j-1` set means `e_j` is a factor, so
//! the mask `0` is the identity `e_0`. Elements are dense coefficient vectors of
//! length `2^n`.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::OnceLock;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::CMat;

pub const MAX_GENERATORS: usize = 8;
const TABLE_GENERATORS: usize = 5;

fn reorder_parity(a: u32, b: u32) -> u32 {
    // number of pairs (i in a, j in b) with i > j
    let mut s = 0;
    let mut a = a >> 1;
    while a != 0 {
        s += (a & b).count_ones();
        a >>= 1;
    }
    s
}

fn sign_uncached(a: u32, b: u32) -> f64 {
    if (reorder_parity(a, b) + (a & b).count_ones()) % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn sign_table() -> &'static [i8] {
    static TABLE: OnceLock<Vec<i8>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let m = 1usize << TABLE_GENERATORS;
        let mut t = vec![0i8; m * m];
        for a in 0..m {
            for b in 0..m {
                t[a * m + b] = sign_uncached(a as u32, b as u32) as i8;
            }
        }
        t
    })
}

/// Product of two blades: `e_a e_b = sign * e_{a xor b}`.
pub fn blade_product(a: u32, b: u32) -> (f64, u32) {
    let m = 1u32 << TABLE_GENERATORS;
    let sign = if a < m && b < m {
        sign_table()[(a * m + b) as usize] as f64
    } else {
        sign_uncached(a, b)
    };
    (sign, a ^ b)
}

/// Sign `c` with `conj(e_S) = c e_S`, fixed by `e_S conj(e_S) = 1`.
pub fn blade_conj_sign(mask: u32) -> f64 {
    let s = mask.count_ones();
    // (-1)^s from the generators, (-1)^{s(s-1)/2} from reversing them
    if (s + s * s.saturating_sub(1) / 2) % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn check_generators(n: usize) -> Result<()> {
    if n > MAX_GENERATORS {
        return Err(Error::InvalidInput(format!(
            "at most {MAX_GENERATORS} generators supported, got {n}"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct CliffordElement {
    n: usize,
    coeffs: Vec<Complex64>,
}

impl CliffordElement {
    pub fn zero(n: usize) -> Self {
        assert!(n <= MAX_GENERATORS, "too many generators");
        Self {
            n,
            coeffs: vec![Complex64::new(0.0, 0.0); 1 << n],
        }
    }

    pub fn from_coeffs(n: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        check_generators(n)?;
        if coeffs.len() != 1 << n {
            return Err(Error::DimensionMismatch(format!(
                "expected {} coefficients, got {}",
                1 << n,
                coeffs.len()
            )));
        }
        Ok(Self { n, coeffs })
    }

    pub fn scalar(n: usize, c: Complex64) -> Self {
        let mut e = Self::zero(n);
        e.coeffs[0] = c;
        e
    }

    pub fn blade(n: usize, mask: u32, c: Complex64) -> Self {
        let mut e = Self::zero(n);
        e.coeffs[mask as usize] = c;
        e
    }

    /// `sum_j v_j e_j` for `v` of length `n`.
    pub fn vector(v: &[f64]) -> Self {
        let mut e = Self::zero(v.len());
        for (j, &vj) in v.iter().enumerate() {
            e.coeffs[1 << j] = Complex64::new(vj, 0.0);
        }
        e
    }

    /// Paired vector `x0 e_0 + sum_j x_j e_j`.
    pub fn paired(x0: f64, x: &[f64]) -> Self {
        let mut e = Self::vector(x);
        e.coeffs[0] = Complex64::new(x0, 0.0);
        e
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff(&self, mask: u32) -> Complex64 {
        self.coeffs[mask as usize]
    }

    pub fn set_coeff(&mut self, mask: u32, c: Complex64) {
        self.coeffs[mask as usize] = c;
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            n: self.n,
            coeffs: self.coeffs.iter().map(|&a| a * c).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "generator count mismatch");
        let mut out = Self::zero(self.n);
        for (a, &ca) in self.coeffs.iter().enumerate() {
            if ca == Complex64::new(0.0, 0.0) {
                continue;
            }
            for (b, &cb) in other.coeffs.iter().enumerate() {
                if cb == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let (s, m) = blade_product(a as u32, b as u32);
                out.coeffs[m as usize] += ca * cb * s;
            }
        }
        out
    }

    /// Conjugation: complex conjugate coefficients and `e_S -> conj(e_S)`.
    pub fn conj(&self) -> Self {
        Self {
            n: self.n,
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(m, c)| c.conj() * blade_conj_sign(m as u32))
                .collect(),
        }
    }

    /// `(u, v) = sum_S u_S conj(v_S)`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        assert_eq!(self.n, other.n, "generator count mismatch");
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a * b.conj())
            .sum()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }
}

impl Add for &CliffordElement {
    type Output = CliffordElement;
    fn add(self, rhs: Self) -> CliffordElement {
        assert_eq!(self.n, rhs.n, "generator count mismatch");
        CliffordElement {
            n: self.n,
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &CliffordElement {
    type Output = CliffordElement;
    fn sub(self, rhs: Self) -> CliffordElement {
        assert_eq!(self.n, rhs.n, "generator count mismatch");
        CliffordElement {
            n: self.n,
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &CliffordElement {
    type Output = CliffordElement;
    fn neg(self) -> CliffordElement {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Mul for &CliffordElement {
    type Output = CliffordElement;
    fn mul(self, rhs: Self) -> CliffordElement {
        CliffordElement::mul(self, rhs)
    }
}

pub fn clifford_mul(u: &CliffordElement, v: &CliffordElement) -> CliffordElement {
    u.mul(v)
}

pub fn clifford_conj(u: &CliffordElement) -> CliffordElement {
    u.conj()
}

pub fn clifford_inner(u: &CliffordElement, v: &CliffordElement) -> Complex64 {
    u.inner(v)
}

fn check_paired(x0: f64, x: &[f64]) -> Result<f64> {
    check_generators(x.len())?;
    let r2 = x0 * x0 + x.iter().map(|v| v * v).sum::<f64>();
    if r2 == 0.0 {
        return Err(Error::InvalidInput("paired vector must be nonzero".into()));
    }
    Ok(r2)
}

/// `x^{-1} = conj(x) / |x|^2` for a nonzero paired vector.
pub fn kelvin_inverse(x0: f64, x: &[f64]) -> Result<CliffordElement> {
    let r2 = check_paired(x0, x)?;
    Ok(CliffordElement::paired(x0, x)
        .conj()
        .scale(Complex64::new(1.0 / r2, 0.0)))
}

/// `f(ix) = f(|x|) chi_+(x) + f(-|x|) chi_-(x)`, `chi_±(x) = (e_0 ± i x/|x|)/2`.
pub fn vector_func_calc<F>(f: F, x: &[f64]) -> Result<CliffordElement>
where
    F: Fn(f64) -> Complex64,
{
    check_generators(x.len())?;
    let n = x.len();
    let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if r == 0.0 {
        return Ok(CliffordElement::scalar(n, f(0.0)));
    }
    let (fp, fm) = (f(r), f(-r));
    let mut out = CliffordElement::scalar(n, (fp + fm) * 0.5);
    let i = Complex64::new(0.0, 1.0);
    for (j, &xj) in x.iter().enumerate() {
        out.coeffs[1 << j] = (fp - fm) * i * (0.5 * xj / r);
    }
    Ok(out)
}

/// Surface area of the unit sphere `S^n` in `R^{n+1}`.
pub fn sphere_area(n: usize) -> f64 {
    // 2 pi^{(n+1)/2} / Gamma((n+1)/2), using exact half-integer Gamma values
    let k = n + 1;
    let gamma_half_k = if k % 2 == 0 {
        (1..k / 2).map(|j| j as f64).product::<f64>()
    } else {
        let m = (k - 1) / 2;
        (0..m).map(|j| j as f64 + 0.5).product::<f64>() * PI.sqrt()
    };
    2.0 * PI.powf(k as f64 / 2.0) / gamma_half_k
}

/// Cauchy kernel `E(x) = conj(x) / (Sigma_n |x|^{n+1})`.
pub fn cauchy_kernel_e(x0: f64, x: &[f64]) -> Result<CliffordElement> {
    let r2 = check_paired(x0, x)?;
    let n = x.len();
    let scale = 1.0 / (sphere_area(n) * r2.powf((n as f64 + 1.0) / 2.0));
    Ok(CliffordElement::paired(x0, x)
        .conj()
        .scale(Complex64::new(scale, 0.0)))
}

/// `sum_S T_S e_S` with complex `N x N` coefficient matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct CliffordMatrix {
    n: usize,
    dim: usize,
    coeffs: Vec<CMat>,
}

impl CliffordMatrix {
    pub fn zero(n: usize, dim: usize) -> Self {
        assert!(n <= MAX_GENERATORS, "too many generators");
        Self {
            n,
            dim,
            coeffs: vec![DMatrix::zeros(dim, dim); 1 << n],
        }
    }

    pub fn from_coeffs(n: usize, coeffs: Vec<CMat>) -> Result<Self> {
        check_generators(n)?;
        if coeffs.len() != 1 << n {
            return Err(Error::DimensionMismatch(format!(
                "expected {} coefficient matrices, got {}",
                1 << n,
                coeffs.len()
            )));
        }
        let dim = coeffs[0].nrows();
        if coeffs.iter().any(|m| m.nrows() != dim || m.ncols() != dim) {
            return Err(Error::DimensionMismatch(
                "coefficient matrices must share one square shape".into(),
            ));
        }
        Ok(Self { n, dim, coeffs })
    }

    /// `e ⊗ I`: an algebra element times the identity matrix.
    pub fn from_element(e: &CliffordElement, dim: usize) -> Self {
        let id = CMat::identity(dim, dim);
        Self {
            n: e.n,
            dim,
            coeffs: e.coeffs.iter().map(|&c| &id * c).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn component(&self, mask: u32) -> &CMat {
        &self.coeffs[mask as usize]
    }

    pub fn component_mut(&mut self, mask: u32) -> &mut CMat {
        &mut self.coeffs[mask as usize]
    }

    pub fn components(&self) -> &[CMat] {
        &self.coeffs
    }

    /// `(sum_S ||T_S||_F^2)^{1/2}`.
    pub fn norm(&self) -> f64 {
        self.coeffs
            .iter()
            .map(|m| m.norm_squared())
            .sum::<f64>()
            .sqrt()
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            n: self.n,
            dim: self.dim,
            coeffs: self.coeffs.iter().map(|m| m * c).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.n, self.dim), (other.n, other.dim), "shape mismatch");
        Self {
            n: self.n,
            dim: self.dim,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    /// `(sum T_S e_S)(sum U_R e_R) = sum T_S U_R e_S e_R`.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!((self.n, self.dim), (other.n, other.dim), "shape mismatch");
        let mut out = Self::zero(self.n, self.dim);
        for (a, ta) in self.coeffs.iter().enumerate() {
            if ta.iter().all(|c| *c == Complex64::new(0.0, 0.0)) {
                continue;
            }
            for (b, ub) in other.coeffs.iter().enumerate() {
                let (s, m) = blade_product(a as u32, b as u32);
                out.coeffs[m as usize] += (ta * ub) * Complex64::new(s, 0.0);
            }
        }
        out
    }

    /// Left multiplication by an algebra element (acting as `e ⊗ I`).
    pub fn left_mul(&self, e: &CliffordElement) -> Self {
        assert_eq!(self.n, e.n, "generator count mismatch");
        let mut out = Self::zero(self.n, self.dim);
        for (a, &ca) in e.coeffs.iter().enumerate() {
            if ca == Complex64::new(0.0, 0.0) {
                continue;
            }
            for (b, tb) in self.coeffs.iter().enumerate() {
                let (s, m) = blade_product(a as u32, b as u32);
                out.coeffs[m as usize] += tb * (ca * s);
            }
        }
        out
    }

    /// Applies `g` to every coefficient matrix.
    pub fn map_components<F: Fn(&CMat) -> CMat>(&self, g: F) -> Self {
        Self {
            n: self.n,
            dim: self.dim,
            coeffs: self.coeffs.iter().map(g).collect(),
        }
    }
}
