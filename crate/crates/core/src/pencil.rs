//! Matrix tuples `A = (A_1, ..., A_n)`, the pencil `<A, xi>`, its determinant
//! polynomial `P^A(zeta) = det(zeta_0 I + sum_j zeta_j A_j)` and localisations.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::clifford::MAX_GENERATORS;
use crate::error::{Error, Result};
use crate::linalg::{c64, eigh, eigvals, is_hermitian, spectral_norm, CMat, HERMITIAN_TOL};

#[derive(Debug, Clone)]
pub struct MatrixTuple {
    mats: Vec<CMat>,
    hermitian: bool,
    name: Option<String>,
}

impl MatrixTuple {
    pub fn new(mats: Vec<CMat>) -> Result<Self> {
        if mats.is_empty() {
            return Err(Error::InvalidInput("tuple needs at least one matrix".into()));
        }
        if mats.len() > MAX_GENERATORS {
            return Err(Error::InvalidInput(format!(
                "at most {MAX_GENERATORS} matrices supported, got {}",
                mats.len()
            )));
        }
        let dim = mats[0].nrows();
        if dim == 0 {
            return Err(Error::InvalidInput("matrices must be non-empty".into()));
        }
        for (j, m) in mats.iter().enumerate() {
            if m.nrows() != dim || m.ncols() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "matrix {} is {}x{}, expected {dim}x{dim}",
                    j + 1,
                    m.nrows(),
                    m.ncols()
                )));
            }
            if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::InvalidInput(format!(
                    "matrix {} has non-finite entries",
                    j + 1
                )));
            }
        }
        let hermitian = mats.iter().all(|m| is_hermitian(m, HERMITIAN_TOL));
        Ok(Self {
            mats,
            hermitian,
            name: None,
        })
    }

    /// Tuple of real matrices given row-major.
    pub fn from_real(dim: usize, mats: &[&[f64]]) -> Result<Self> {
        Self::new(
            mats.iter()
                .map(|m| {
                    if m.len() != dim * dim {
                        return Err(Error::DimensionMismatch(format!(
                            "expected {} entries, got {}",
                            dim * dim,
                            m.len()
                        )));
                    }
                    Ok(CMat::from_fn(dim, dim, |i, j| c64(m[i * dim + j], 0.0)))
                })
                .collect::<Result<Vec<_>>>()?,
        )
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn n(&self) -> usize {
        self.mats.len()
    }

    pub fn dim(&self) -> usize {
        self.mats[0].nrows()
    }

    pub fn matrices(&self) -> &[CMat] {
        &self.mats
    }

    pub fn matrix(&self, j: usize) -> &CMat {
        &self.mats[j]
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    /// `(sum_j ||A_j||^2)^{1/2}` with spectral norms.
    pub fn norm(&self) -> f64 {
        self.mats
            .iter()
            .map(|m| spectral_norm(m).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// Image of the tuple under the affine map `x -> T x + a` of `R^n -> R^m`:
    /// `B_i = sum_j T_ij A_j + a_i I`.
    pub fn affine_image(&self, t: &[Vec<f64>], a: &[f64]) -> Result<Self> {
        if t.len() != a.len() || t.iter().any(|row| row.len() != self.n()) {
            return Err(Error::DimensionMismatch("affine map shape".into()));
        }
        let id = CMat::identity(self.dim(), self.dim());
        Self::new(
            t.iter()
                .zip(a)
                .map(|(row, &ai)| {
                    let mut m = &id * c64(ai, 0.0);
                    for (tij, aj) in row.iter().zip(&self.mats) {
                        m += aj * c64(*tij, 0.0);
                    }
                    m
                })
                .collect(),
        )
    }

    fn check_len(&self, len: usize, what: &str) -> Result<()> {
        if len != self.n() {
            return Err(Error::DimensionMismatch(format!(
                "{what} has length {len}, tuple has n = {}",
                self.n()
            )));
        }
        Ok(())
    }

    /// `<A, xi> = sum_j A_j xi_j` for real `xi`.
    pub fn pencil(&self, xi: &[f64]) -> Result<CMat> {
        self.check_len(xi.len(), "xi")?;
        let mut m = CMat::zeros(self.dim(), self.dim());
        for (a, &x) in self.mats.iter().zip(xi) {
            if x != 0.0 {
                m += a * c64(x, 0.0);
            }
        }
        Ok(m)
    }

    /// `<A, xi>` for complex `xi`.
    pub fn pencil_complex(&self, xi: &[Complex64]) -> Result<CMat> {
        self.check_len(xi.len(), "xi")?;
        let mut m = CMat::zeros(self.dim(), self.dim());
        for (a, &x) in self.mats.iter().zip(xi) {
            m += a * x;
        }
        Ok(m)
    }

    /// `P^A(zeta)` for `zeta = (zeta_0, ..., zeta_n)`.
    pub fn det_poly(&self, zeta: &[Complex64]) -> Result<Complex64> {
        if zeta.len() != self.n() + 1 {
            return Err(Error::DimensionMismatch(format!(
                "zeta has length {}, expected {}",
                zeta.len(),
                self.n() + 1
            )));
        }
        let mut m = self.pencil_complex(&zeta[1..])?;
        for i in 0..self.dim() {
            m[(i, i)] += zeta[0];
        }
        Ok(m.lu().determinant())
    }

    pub fn det_poly_real(&self, zeta: &[f64]) -> Result<Complex64> {
        let z: Vec<Complex64> = zeta.iter().map(|&v| c64(v, 0.0)).collect();
        self.det_poly(&z)
    }
}

pub fn pencil_eval(a: &MatrixTuple, xi: &[f64]) -> Result<CMat> {
    a.pencil(xi)
}

pub fn det_poly_eval(a: &MatrixTuple, zeta: &[Complex64]) -> Result<Complex64> {
    a.det_poly(zeta)
}

pub fn hermitian_flag(a: &MatrixTuple) -> bool {
    a.is_hermitian()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HyperbolicityVerdict {
    Hyperbolic,
    NotHyperbolic,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HyperbolicityReport {
    pub verdict: HyperbolicityVerdict,
    /// Largest `|Im lambda|` seen over the sampled directions.
    pub max_imag: f64,
    /// Direction attaining `max_imag`.
    pub worst_direction: Vec<f64>,
    pub directions_checked: usize,
}

pub const DEFAULT_DIRECTIONS: usize = 256;

/// Deterministic, roughly uniform directions on `S^{n-1}`, one per
/// antipodal pair where that is cheap.
pub fn sample_directions(n: usize, count: usize) -> Vec<Vec<f64>> {
    let count = count.max(1);
    match n {
        1 => vec![vec![1.0]],
        2 => (0..count)
            .map(|k| {
                let t = PI * k as f64 / count as f64;
                vec![t.cos(), t.sin()]
            })
            .collect(),
        3 => {
            let golden = PI * (3.0 - 5f64.sqrt());
            (0..count)
                .map(|k| {
                    let z = 1.0 - (2.0 * k as f64 + 1.0) / count as f64;
                    let r = (1.0 - z * z).sqrt();
                    let phi = golden * k as f64;
                    vec![r * phi.cos(), r * phi.sin(), z]
                })
                .collect()
        }
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
            (0..count)
                .map(|_| {
                    let v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
                    let r = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                    v.into_iter().map(|x| x / r).collect()
                })
                .collect()
        }
    }
}

/// Real-spectrum test for `<A, xi>` over sampled directions. Hermitian
/// tuples short-circuit to hyperbolic.
pub fn hyperbolicity_check(a: &MatrixTuple, dirs: usize, tol: f64) -> HyperbolicityReport {
    if a.is_hermitian() {
        return HyperbolicityReport {
            verdict: HyperbolicityVerdict::Hyperbolic,
            max_imag: 0.0,
            worst_direction: vec![0.0; a.n()],
            directions_checked: 0,
        };
    }
    let directions = sample_directions(a.n(), dirs);
    let mut max_imag = 0.0;
    let mut worst = directions[0].clone();
    for d in &directions {
        let m = a.pencil(d).expect("direction length matches tuple");
        let scale = spectral_norm(&m).max(1.0);
        let im = eigvals(&m)
            .iter()
            .fold(0.0f64, |acc, z| acc.max(z.im.abs() / scale));
        if im > max_imag {
            max_imag = im;
            worst = d.clone();
        }
    }
    let verdict = if max_imag > tol {
        HyperbolicityVerdict::NotHyperbolic
    } else {
        HyperbolicityVerdict::Inconclusive
    };
    HyperbolicityReport {
        verdict,
        max_imag,
        worst_direction: worst,
        directions_checked: directions.len(),
    }
}

/// `h(s) = lambda_max(<A, s>)` for hermitian tuples.
pub fn support_function(a: &MatrixTuple, s: &[f64]) -> Result<f64> {
    if !a.is_hermitian() {
        return Err(Error::NotHermitian);
    }
    let (vals, _) = eigh(&a.pencil(s)?);
    Ok(*vals.last().expect("non-empty spectrum"))
}

const LOCALISATION_REL_TOL: f64 = 1e-9;

/// Coefficients of `t -> P^A(xi + t zeta)` in powers of `t`, returned with
/// the scaled coefficients used for thresholding.
fn line_coefficients(
    a: &MatrixTuple,
    xi: &[f64],
    zeta: &[f64],
) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    let m = a.n() + 1;
    if xi.len() != m || zeta.len() != m {
        return Err(Error::DimensionMismatch(format!(
            "xi and zeta must have length {m}"
        )));
    }
    let deg = a.dim();
    let r = 1.0 / (1.0 + xi.iter().map(|v| v * v).sum::<f64>().sqrt());
    let nodes: Vec<f64> = (0..=deg)
        .map(|k| (PI * (2 * k + 1) as f64 / (2 * (deg + 1)) as f64).cos())
        .collect();
    let mut vals = DVector::<Complex64>::zeros(deg + 1);
    let mut point = vec![0.0; m];
    for (k, &u) in nodes.iter().enumerate() {
        for j in 0..m {
            point[j] = xi[j] + r * u * zeta[j];
        }
        vals[k] = a.det_poly_real(&point)?;
    }
    let vander = DMatrix::<Complex64>::from_fn(deg + 1, deg + 1, |k, j| c64(nodes[k].powi(j as i32), 0.0));
    let scaled = vander
        .lu()
        .solve(&vals)
        .ok_or_else(|| Error::Numerical("Chebyshev Vandermonde solve failed".into()))?;
    let scaled: Vec<Complex64> = scaled.iter().copied().collect();
    let coeffs = scaled
        .iter()
        .enumerate()
        .map(|(j, c)| c / r.powi(j as i32))
        .collect();
    Ok((coeffs, scaled))
}

fn first_significant(scaled: &[Complex64]) -> Option<usize> {
    let total: f64 = scaled.iter().map(|c| c.norm()).sum();
    scaled
        .iter()
        .position(|c| c.norm() > LOCALISATION_REL_TOL * total)
}

/// Multiplicity along the line `xi + t zeta` and the lowest non-vanishing
/// coefficient, which is `P^A_xi(zeta)` when `zeta` is generic.
pub fn localisation(a: &MatrixTuple, xi: &[f64], zeta: &[f64]) -> Result<(usize, Complex64)> {
    let (coeffs, scaled) = line_coefficients(a, xi, zeta)?;
    let mu = first_significant(&scaled).ok_or_else(|| {
        Error::Degenerate("all coefficients of P(xi + t zeta) vanish".into())
    })?;
    Ok((mu, coeffs[mu]))
}

/// The localisation `P^A_xi` as a homogeneous polynomial of degree `mu_xi`.
#[derive(Debug, Clone)]
pub struct Localisation {
    tuple: MatrixTuple,
    xi: Vec<f64>,
    multiplicity: usize,
}

impl Localisation {
    /// Determines `mu_xi` as the smallest line multiplicity over a few fixed
    /// generic directions.
    pub fn new(a: &MatrixTuple, xi: &[f64]) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(0x10ca1);
        let mut best: Option<usize> = None;
        for _ in 0..4 {
            let zeta: Vec<f64> = (0..xi.len()).map(|_| StandardNormal.sample(&mut rng)).collect();
            if let Ok((mu, _)) = localisation(a, xi, &zeta) {
                best = Some(best.map_or(mu, |b| b.min(mu)));
            }
        }
        let multiplicity = best.ok_or_else(|| {
            Error::Degenerate("P^A vanishes identically along every sampled line".into())
        })?;
        Ok(Self {
            tuple: a.clone(),
            xi: xi.to_vec(),
            multiplicity,
        })
    }

    pub fn multiplicity(&self) -> usize {
        self.multiplicity
    }

    pub fn base_point(&self) -> &[f64] {
        &self.xi
    }

    /// `P^A_xi(zeta)`: the coefficient of `t^mu` in `P^A(xi + t zeta)`.
    pub fn eval(&self, zeta: &[f64]) -> Result<Complex64> {
        let (coeffs, _) = line_coefficients(&self.tuple, &self.xi, zeta)?;
        Ok(coeffs[self.multiplicity])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples;

    #[test]
    fn pauli_determinant_is_lorentz_form() {
        let a = examples::pauli();
        let z = [1.3, 0.2, -0.7, 0.5];
        let p = a.det_poly_real(&z).unwrap();
        let expected = z[0] * z[0] - z[1] * z[1] - z[2] * z[2] - z[3] * z[3];
        assert!((p - c64(expected, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn skew_tuple_is_not_hyperbolic() {
        let a = MatrixTuple::from_real(2, &[&[0.0, 1.0, -1.0, 0.0], &[1.0, 0.0, 0.0, -1.0]]).unwrap();
        let r = hyperbolicity_check(&a, 64, 1e-10);
        assert_eq!(r.verdict, HyperbolicityVerdict::NotHyperbolic);
        assert!(r.max_imag > 0.1);
    }

    #[test]
    fn nilpotent_pair_is_inconclusive() {
        let r = hyperbolicity_check(&examples::nilpair(), 64, 1e-10);
        assert_eq!(r.verdict, HyperbolicityVerdict::Inconclusive);
    }

    #[test]
    fn pauli_support_function_is_norm() {
        let s = [0.6, 0.0, 0.8];
        assert!((support_function(&examples::pauli(), &s).unwrap() - 1.0).abs() < 1e-14);
        assert!(support_function(&examples::nilpair(), &[1.0, 0.0]).is_err());
    }

    #[test]
    fn localisations_of_known_examples() {
        let (mu, v) = localisation(&examples::pauli(), &[1.0, 1.0, 0.0, 0.0], &[1.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(mu, 1);
        assert!((v - c64(2.0, 0.0)).norm() < 1e-10);
        let (mu, v) = localisation(&examples::example63(), &[1.0, 1.0, 0.0], &[1.0, 0.0, 0.0]).unwrap();
        assert_eq!(mu, 2);
        assert!((v - c64(2.0, 0.0)).norm() < 1e-10);
        let (mu, _) = localisation(&examples::pauli(), &[1.0, 0.0, 0.0, 0.0], &[0.3, 1.0, 0.0, 0.0]).unwrap();
        assert_eq!(mu, 0);
    }
}
