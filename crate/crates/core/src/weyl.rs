//! The Weyl calculus `<W_A, f> = (2 pi)^{-n} ∫ f̂(xi) e^{i<A, xi>} dxi`
//! evaluated from gridded test functions, plus closed forms used to check it.

use std::collections::HashMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::examples;
use crate::linalg::{c64, eigh, expm, CMat};
use crate::numrange::sample_unit_vector;
use crate::pencil::{
    hyperbolicity_check, sample_directions, support_function, HyperbolicityVerdict, MatrixTuple,
    DEFAULT_DIRECTIONS,
};
use crate::quadrature::SphericalQuadrature;

/// Samples of `f` on a regular grid; the last axis varies fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    pub origin: Vec<f64>,
    pub spacing: Vec<f64>,
    pub shape: Vec<usize>,
    pub values: Vec<Complex64>,
}

impl GridFunction {
    pub fn new(
        origin: Vec<f64>,
        spacing: Vec<f64>,
        shape: Vec<usize>,
        values: Vec<Complex64>,
    ) -> Result<Self> {
        let n = origin.len();
        if n == 0 || spacing.len() != n || shape.len() != n {
            return Err(Error::DimensionMismatch(
                "origin, spacing and shape must have the same length".into(),
            ));
        }
        if spacing.iter().any(|h| !(*h > 0.0)) || shape.iter().any(|m| *m < 2) {
            return Err(Error::InvalidInput(
                "grid needs positive spacing and at least two points per axis".into(),
            ));
        }
        if values.len() != shape.iter().product::<usize>() {
            return Err(Error::DimensionMismatch(format!(
                "{} values for a grid of {} points",
                values.len(),
                shape.iter().product::<usize>()
            )));
        }
        Ok(Self {
            origin,
            spacing,
            shape,
            values,
        })
    }

    pub fn from_fn<F>(origin: Vec<f64>, spacing: Vec<f64>, shape: Vec<usize>, f: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> f64 + Sync,
    {
        let total: usize = shape.iter().product();
        let probe = Self::new(origin, spacing, shape, vec![c64(0.0, 0.0); total])?;
        let values = (0..total)
            .into_par_iter()
            .map(|k| c64(f(&probe.point(k)), 0.0))
            .collect();
        Ok(Self { values, ..probe })
    }

    /// Grid centred at `center` for a function vanishing beyond `reach` of
    /// it. The period is long enough that the periodic images of `f` implied
    /// by the discrete transform stay away from the support of `W_A`.
    pub fn around<F>(a: &MatrixTuple, center: &[f64], reach: f64, h: f64, f: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> f64 + Sync,
    {
        if center.len() != a.n() {
            return Err(Error::DimensionMismatch("center length differs from n".into()));
        }
        let cmax = center.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        let period = (2.0 * reach).max(support_radius(a) + cmax + reach) + 2.0 * h;
        let m = ((period / h).ceil() as usize).max(8);
        let m = m + m % 2;
        let origin = center.iter().map(|c| c - h * (m / 2) as f64).collect();
        Self::from_fn(origin, vec![h; a.n()], vec![m; a.n()], f)
    }

    pub fn n(&self) -> usize {
        self.shape.len()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn point(&self, mut k: usize) -> Vec<f64> {
        let mut p = vec![0.0; self.n()];
        for d in (0..self.n()).rev() {
            p[d] = self.origin[d] + self.spacing[d] * (k % self.shape[d]) as f64;
            k /= self.shape[d];
        }
        p
    }

    fn on_boundary(&self, mut k: usize) -> bool {
        let mut edge = false;
        for d in (0..self.n()).rev() {
            let i = k % self.shape[d];
            edge |= i == 0 || i + 1 == self.shape[d];
            k /= self.shape[d];
        }
        edge
    }
}

/// Radius of a ball containing the support of `W_A`: the largest value of
/// the support function for hermitian tuples, `||A||` otherwise.
pub fn support_radius(a: &MatrixTuple) -> f64 {
    if !a.is_hermitian() {
        return a.norm();
    }
    if a.n() == 1 {
        return crate::linalg::spectral_norm(a.matrix(0));
    }
    let dirs = sample_directions(a.n(), 1024);
    let h = dirs
        .iter()
        .flat_map(|d| {
            let neg: Vec<f64> = d.iter().map(|v| -v).collect();
            [support_function(a, d), support_function(a, &neg)]
        })
        .filter_map(|v| v.ok())
        .fold(0.0f64, f64::max);
    // sampled maximum undershoots by at most the covering angle
    (h * 1.05 + 1e-3).min(a.norm() + 1e-3)
}

fn fft_nd(data: &mut [Complex64], shape: &[usize]) {
    let mut planner = FftPlanner::<f64>::new();
    let n = shape.len();
    for axis in 0..n {
        let len = shape[axis];
        let stride: usize = shape[axis + 1..].iter().product();
        let fft = planner.plan_fft_forward(len);
        let outer = data.len() / (len * stride);
        let mut line = vec![c64(0.0, 0.0); len];
        for o in 0..outer {
            for i in 0..stride {
                let base = o * len * stride + i;
                for (t, v) in line.iter_mut().enumerate() {
                    *v = data[base + t * stride];
                }
                fft.process(&mut line);
                for (t, v) in line.iter().enumerate() {
                    data[base + t * stride] = *v;
                }
            }
        }
    }
}

/// `exp(i B)` for `B = <A, xi>` with a shortcut for hermitian `2 x 2` pencils.
enum ExpKernel {
    Pauli2 { coef: Vec<[f64; 4]> },
    Hermitian,
    General,
}

impl ExpKernel {
    fn new(a: &MatrixTuple) -> Self {
        if !a.is_hermitian() {
            return ExpKernel::General;
        }
        if a.dim() == 2 {
            // B = b0 I + b1 s1 + b2 s2 + b3 s3
            let coef = a
                .matrices()
                .iter()
                .map(|m| {
                    [
                        0.5 * (m[(0, 0)].re + m[(1, 1)].re),
                        m[(0, 1)].re,
                        -m[(0, 1)].im,
                        0.5 * (m[(0, 0)].re - m[(1, 1)].re),
                    ]
                })
                .collect();
            return ExpKernel::Pauli2 { coef };
        }
        ExpKernel::Hermitian
    }

    fn eval(&self, a: &MatrixTuple, xi: &[f64], out: &mut [Complex64]) {
        match self {
            ExpKernel::Pauli2 { coef } => {
                let mut b = [0.0; 4];
                for (c, x) in coef.iter().zip(xi) {
                    for r in 0..4 {
                        b[r] += c[r] * x;
                    }
                }
                let r = (b[1] * b[1] + b[2] * b[2] + b[3] * b[3]).sqrt();
                let (sr, cr) = r.sin_cos();
                let sinc = if r > 1e-12 { sr / r } else { 1.0 - r * r / 6.0 };
                let phase = c64(b[0].cos(), b[0].sin());
                let i = c64(0.0, 1.0);
                out[0] = phase * (c64(cr, 0.0) + i * sinc * b[3]);
                out[1] = phase * (i * sinc * c64(b[1], -b[2]));
                out[2] = phase * (i * sinc * c64(b[1], b[2]));
                out[3] = phase * (c64(cr, 0.0) - i * sinc * b[3]);
            }
            ExpKernel::Hermitian => {
                let (vals, vecs) = eigh(&a.pencil(xi).expect("xi length matches"));
                let dim = vals.len();
                for r in 0..dim {
                    for c in 0..dim {
                        out[r * dim + c] = (0..dim)
                            .map(|j| vecs[(r, j)] * vecs[(c, j)].conj() * c64(vals[j].cos(), vals[j].sin()))
                            .sum();
                    }
                }
            }
            ExpKernel::General => {
                let m = expm(&(a.pencil(xi).expect("xi length matches") * c64(0.0, 1.0)));
                let dim = m.nrows();
                for r in 0..dim {
                    for c in 0..dim {
                        out[r * dim + c] = m[(r, c)];
                    }
                }
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct WeylResult {
    pub value: CMat,
    /// Omitted-frequency tail plus the mass of `f` on the grid boundary.
    pub error_estimate: f64,
    pub cutoff: f64,
    pub nodes_used: usize,
    pub warnings: Vec<String>,
}

const CHUNK: usize = 4096;
const CUTOFF_REL: f64 = 1e-8;
const BOUNDARY_DECAY: f64 = 1e-6;

/// `<W_A, f>` by trapezoidal integration of `f̂(xi) e^{i<A, xi>}` over the
/// frequency lattice of the grid, restricted to `|xi| <= cutoff`.
pub fn weyl_apply(a: &MatrixTuple, f: &GridFunction, cutoff: Option<f64>) -> Result<WeylResult> {
    if f.n() != a.n() {
        return Err(Error::DimensionMismatch(format!(
            "grid function on R^{}, tuple has n = {}",
            f.n(),
            a.n()
        )));
    }
    let mut warnings = Vec::new();
    if !a.is_hermitian() {
        let report = hyperbolicity_check(a, DEFAULT_DIRECTIONS, 1e-8);
        match report.verdict {
            HyperbolicityVerdict::NotHyperbolic => {
                return Err(Error::NotHyperbolic(format!(
                    "<A, xi> has eigenvalues with relative imaginary part {:.3e} at xi = {:?}",
                    report.max_imag, report.worst_direction
                )))
            }
            HyperbolicityVerdict::Inconclusive => warnings.push(
                "non-hermitian tuple: real spectrum on sampled directions only".to_string(),
            ),
            HyperbolicityVerdict::Hyperbolic => {}
        }
    }
    let n = a.n();
    let dim = a.dim();
    let mut spec = f.values.clone();
    fft_nd(&mut spec, &f.shape);

    let cell: f64 = f.spacing.iter().product();
    let weight: f64 = f
        .shape
        .iter()
        .zip(&f.spacing)
        .map(|(m, h)| 1.0 / (*m as f64 * h))
        .product();
    // frequency of each lattice index, dropping the unpaired Nyquist index
    let freq = |k: usize| -> Option<Vec<f64>> {
        let mut xi = vec![0.0; n];
        let mut rest = k;
        for d in (0..n).rev() {
            let m = f.shape[d];
            let i = rest % m;
            rest /= m;
            if m % 2 == 0 && i == m / 2 {
                return None;
            }
            let kk = if i < m.div_ceil(2) { i as f64 } else { i as f64 - m as f64 };
            xi[d] = 2.0 * PI * kk / (m as f64 * f.spacing[d]);
        }
        Some(xi)
    };
    let mut nodes: Vec<(Vec<f64>, Complex64)> = (0..spec.len())
        .filter_map(|k| {
            freq(k).map(|xi| {
                let phase: f64 = xi.iter().zip(&f.origin).map(|(x, o)| x * o).sum();
                (xi, spec[k] * cell * c64(phase.cos(), -phase.sin()))
            })
        })
        .collect();
    let fmax = nodes.iter().fold(0.0f64, |m, (_, v)| m.max(v.norm()));
    if fmax == 0.0 {
        return Ok(WeylResult {
            value: CMat::zeros(dim, dim),
            error_estimate: 0.0,
            cutoff: 0.0,
            nodes_used: 0,
            warnings,
        });
    }
    let radius = |xi: &[f64]| xi.iter().map(|v| v * v).sum::<f64>().sqrt();
    let cutoff = match cutoff {
        Some(c) if c > 0.0 => c,
        Some(_) => return Err(Error::InvalidInput("cutoff must be positive".into())),
        None => nodes
            .iter()
            .filter(|(_, v)| v.norm() >= CUTOFF_REL * fmax)
            .map(|(xi, _)| radius(xi))
            .fold(0.0, f64::max),
    };
    let (inside, outside): (Vec<_>, Vec<_>) =
        nodes.drain(..).partition(|(xi, _)| radius(xi) <= cutoff);

    let kernel = ExpKernel::new(a);
    let sum_chunk = |chunk: &[(Vec<f64>, Complex64)], with_norm: bool| {
        let mut acc = vec![c64(0.0, 0.0); dim * dim];
        let mut e = vec![c64(0.0, 0.0); dim * dim];
        let mut tail = 0.0;
        for (xi, fh) in chunk {
            if with_norm {
                let norm = if a.is_hermitian() {
                    (dim as f64).sqrt()
                } else {
                    kernel.eval(a, xi, &mut e);
                    e.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
                };
                tail += fh.norm() * norm;
            } else {
                kernel.eval(a, xi, &mut e);
                for (s, v) in acc.iter_mut().zip(&e) {
                    *s += fh * v;
                }
            }
        }
        (acc, tail)
    };
    let partials: Vec<Vec<Complex64>> = inside
        .par_chunks(CHUNK)
        .map(|c| sum_chunk(c, false).0)
        .collect();
    let mut total = vec![c64(0.0, 0.0); dim * dim];
    for p in partials {
        for (t, v) in total.iter_mut().zip(p) {
            *t += v;
        }
    }
    let tails: Vec<f64> = outside
        .par_chunks(CHUNK)
        .map(|c| sum_chunk(c, true).1)
        .collect();
    let tail: f64 = tails.iter().sum::<f64>() * weight;
    let edge = (0..f.len())
        .filter(|&k| f.on_boundary(k))
        .fold(0.0f64, |m, k| m.max(f.values[k].norm()));
    let peak = f.values.iter().fold(0.0f64, |m, v| m.max(v.norm()));
    if edge > BOUNDARY_DECAY * peak {
        warnings.push(format!(
            "f is {:.1e} of its peak on the grid boundary; wrap-around may contaminate the result",
            edge / peak
        ));
    }
    let volume: f64 = f
        .shape
        .iter()
        .zip(&f.spacing)
        .map(|(m, h)| *m as f64 * h)
        .product();
    Ok(WeylResult {
        value: CMat::from_fn(dim, dim, |r, c| total[r * dim + c] * weight),
        error_estimate: tail + edge * volume * (dim as f64).sqrt(),
        cutoff,
        nodes_used: inside.len(),
        warnings,
    })
}

/// Smooth test function with an analytic gradient.
pub trait TestFunction: Sync {
    fn value(&self, x: &[f64]) -> f64;
    fn gradient(&self, x: &[f64]) -> Vec<f64>;
}

/// `amplitude * exp(-|x - center|^2 / (2 width^2))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gaussian {
    pub center: Vec<f64>,
    pub width: f64,
    pub amplitude: f64,
}

impl Gaussian {
    pub fn new(center: Vec<f64>, width: f64) -> Self {
        Self {
            center,
            width,
            amplitude: 1.0,
        }
    }

    pub fn unit_mass(center: Vec<f64>, width: f64) -> Self {
        let n = center.len() as f64;
        let amplitude = (2.0 * PI * width * width).powf(-n / 2.0);
        Self {
            center,
            width,
            amplitude,
        }
    }

    /// Beyond this distance the value is below `1e-10` of the peak.
    pub fn reach(&self) -> f64 {
        7.0 * self.width
    }

    /// Grid resolving `f̂` down to `1e-10` of its peak.
    pub fn grid_for(&self, a: &MatrixTuple) -> Result<GridFunction> {
        let h = 0.45 * self.width;
        GridFunction::around(a, &self.center, self.reach(), h, |x| self.value(x))
    }

    /// `f̂` at `xi`, exact.
    pub fn fourier(&self, xi: &[f64]) -> Complex64 {
        let n = self.center.len() as f64;
        let xi2: f64 = xi.iter().map(|v| v * v).sum();
        let phase: f64 = xi.iter().zip(&self.center).map(|(a, b)| a * b).sum();
        let mag = self.amplitude
            * (2.0 * PI * self.width * self.width).powf(n / 2.0)
            * (-0.5 * self.width * self.width * xi2).exp();
        c64(mag * phase.cos(), -mag * phase.sin())
    }
}

impl TestFunction for Gaussian {
    fn value(&self, x: &[f64]) -> f64 {
        let r2: f64 = x.iter().zip(&self.center).map(|(a, b)| (a - b).powi(2)).sum();
        self.amplitude * (-0.5 * r2 / (self.width * self.width)).exp()
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let v = self.value(x);
        x.iter()
            .zip(&self.center)
            .map(|(a, b)| -v * (a - b) / (self.width * self.width))
            .collect()
    }
}

/// `<W_{t sigma}, f>` for the Pauli triple through its surface form
/// `∫ (f + x . grad f) dmu_t I + t sum_j sigma_j ∫ d_j f dmu_t`, with `mu_t`
/// the normalised surface measure of the sphere of radius `t`.
pub fn weyl_pauli_surface(t: f64, f: &dyn TestFunction, quad: &SphericalQuadrature) -> Result<CMat> {
    if quad.n() != 3 {
        return Err(Error::DimensionMismatch("Pauli surface form needs a rule on S^2".into()));
    }
    let total = quad.total_weight();
    let mut scalar = 0.0;
    let mut grad = [0.0; 3];
    for k in 0..quad.len() {
        let w = quad.weight(k) / total;
        let x: Vec<f64> = quad.node(k).iter().map(|s| t * s).collect();
        let g = f.gradient(&x);
        scalar += w * (f.value(&x) + x.iter().zip(&g).map(|(a, b)| a * b).sum::<f64>());
        for j in 0..3 {
            grad[j] += w * g[j];
        }
    }
    Ok(pauli_combination(t, scalar, grad))
}

fn pauli_combination(t: f64, scalar: f64, grad: [f64; 3]) -> CMat {
    let mut m = CMat::identity(2, 2) * c64(scalar, 0.0);
    m += examples::sigma1() * c64(t * grad[0], 0.0);
    m += examples::sigma2() * c64(t * grad[1], 0.0);
    m += examples::sigma3() * c64(t * grad[2], 0.0);
    m
}

#[derive(Debug, Clone)]
pub struct MonteCarloEstimate {
    pub mean: CMat,
    /// Entrywise standard error of `mean`.
    pub stderr: CMat,
    pub samples: usize,
}

/// Monte Carlo form of the Pauli surface integral, sampling the sphere of
/// radius `t` through `t <sigma h, h>` for random unit `h in C^2`.
pub fn nelson_pauli_pairing(t: f64, f: &dyn TestFunction, m: usize, seed: u64) -> Result<MonteCarloEstimate> {
    if m < 2 {
        return Err(Error::InvalidInput("need at least two samples".into()));
    }
    let sigma = [examples::sigma1(), examples::sigma2(), examples::sigma3()];
    let samples: Vec<[f64; 4]> = (0..m as u64)
        .into_par_iter()
        .map(|k| {
            let h = sample_unit_vector(2, seed, k);
            let x: Vec<f64> = sigma
                .iter()
                .map(|s| t * (h.adjoint() * s * &h)[(0, 0)].re)
                .collect();
            let g = f.gradient(&x);
            let dot: f64 = x.iter().zip(&g).map(|(a, b)| a * b).sum();
            [f.value(&x) + dot, g[0], g[1], g[2]]
        })
        .collect();
    let mf = m as f64;
    let mut mean = [0.0; 4];
    for s in &samples {
        for r in 0..4 {
            mean[r] += s[r] / mf;
        }
    }
    let mut var = [0.0; 4];
    for s in &samples {
        for r in 0..4 {
            var[r] += (s[r] - mean[r]).powi(2) / (mf - 1.0);
        }
    }
    let se: Vec<f64> = var.iter().map(|v| (v / mf).sqrt()).collect();
    let value = pauli_combination(t, mean[0], [mean[1], mean[2], mean[3]]);
    // entry (r, c) is a sum of at most two of the four estimated means
    let stderr = CMat::from_fn(2, 2, |r, c| {
        let v = if r == c {
            se[0] * se[0] + (t * se[3]).powi(2)
        } else {
            (t * se[1]).powi(2) + (t * se[2]).powi(2)
        };
        c64(v.sqrt(), 0.0)
    });
    Ok(MonteCarloEstimate {
        mean: value,
        stderr,
        samples: m,
    })
}

pub const MAX_MONOMIAL_DEGREE: usize = 12;

/// Symmetrised product `S_k`: the average of `A_{w_1} ... A_{w_|k|}` over all
/// words with `k_j` letters `j`. Equals `<W_A, x^k>`.
pub fn symmetrized_monomial(a: &MatrixTuple, k: &[usize]) -> Result<CMat> {
    if k.len() != a.n() {
        return Err(Error::DimensionMismatch("multi-index length differs from n".into()));
    }
    if k.iter().sum::<usize>() > MAX_MONOMIAL_DEGREE {
        return Err(Error::InvalidInput(format!(
            "degree above {MAX_MONOMIAL_DEGREE} is not supported"
        )));
    }
    let mut memo = HashMap::new();
    Ok(sym_rec(a, k.to_vec(), &mut memo))
}

fn sym_rec(a: &MatrixTuple, k: Vec<usize>, memo: &mut HashMap<Vec<usize>, CMat>) -> CMat {
    let deg: usize = k.iter().sum();
    if deg == 0 {
        return CMat::identity(a.dim(), a.dim());
    }
    if let Some(m) = memo.get(&k) {
        return m.clone();
    }
    let mut s = CMat::zeros(a.dim(), a.dim());
    for j in 0..k.len() {
        if k[j] == 0 {
            continue;
        }
        let mut sub = k.clone();
        sub[j] -= 1;
        let rest = sym_rec(a, sub, memo);
        s += a.matrix(j) * rest * c64(k[j] as f64 / deg as f64, 0.0);
    }
    memo.insert(k, s.clone());
    s
}

/// `C^infinity` step: 1 for `r <= r0`, 0 for `r >= r1`.
pub fn plateau(r: f64, r0: f64, r1: f64) -> f64 {
    if r <= r0 {
        return 1.0;
    }
    if r >= r1 {
        return 0.0;
    }
    let t = (r1 - r) / (r1 - r0);
    let g = |u: f64| if u > 0.0 { (-1.0 / u).exp() } else { 0.0 };
    g(t) / (g(t) + g(1.0 - t))
}

/// `<W_A, x^k chi>` with `chi` a smooth plateau equal to 1 on a ball holding
/// the support of `W_A`.
pub fn moment_via_weyl(a: &MatrixTuple, k: &[usize], h: f64) -> Result<WeylResult> {
    if k.len() != a.n() {
        return Err(Error::DimensionMismatch("multi-index length differs from n".into()));
    }
    let r0 = support_radius(a) + 0.5;
    let r1 = r0 + 1.5;
    let center = vec![0.0; a.n()];
    let grid = GridFunction::around(a, &center, r1, h, |x| {
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let mono: f64 = x.iter().zip(k).map(|(v, p)| v.powi(*p as i32)).product();
        mono * plateau(r, r0, r1)
    })?;
    weyl_apply(a, &grid, None)
}

/// `||<W_A, phi>||` for a unit-mass Gaussian `phi` of width `radius / 5`
/// centred at `center`; small values mean `center` lies outside
/// `supp W_A` by more than `radius`.
pub fn support_probe(a: &MatrixTuple, center: &[f64], radius: f64) -> Result<f64> {
    if radius <= 0.0 {
        return Err(Error::InvalidInput("probe radius must be positive".into()));
    }
    let g = Gaussian::unit_mass(center.to_vec(), radius / 5.0);
    let grid = g.grid_for(a)?;
    Ok(weyl_apply(a, &grid, None)?.value.norm())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn commuting_pair_evaluates_at_joint_eigenvalues() {
        let a = examples::diagpair();
        let g = Gaussian::new(vec![0.6, 0.3], 0.4);
        let r = weyl_apply(&a, &g.grid_for(&a).unwrap(), None).unwrap();
        let expect_11 = g.value(&[1.0, 0.0]);
        let expect_22 = g.value(&[0.0, 1.0]);
        let err = (r.value[(0, 0)].re - expect_11).abs() + (r.value[(1, 1)].re - expect_22).abs();
        assert!(err < 1e-8, "{err}");
        assert!(err < r.error_estimate, "{err} vs {}", r.error_estimate);
        assert!(r.value[(0, 1)].norm() < 1e-12);
    }

    #[test]
    fn kernels_agree() {
        let a = examples::pauli_pair();
        let xi = [0.7, -1.3];
        let mut fast = vec![c64(0.0, 0.0); 4];
        ExpKernel::new(&a).eval(&a, &xi, &mut fast);
        let mut slow = vec![c64(0.0, 0.0); 4];
        ExpKernel::General.eval(&a, &xi, &mut slow);
        for (x, y) in fast.iter().zip(&slow) {
            assert!((x - y).norm() < 1e-13);
        }
    }

    #[test]
    fn symmetrised_products() {
        let a = examples::pauli_pair();
        // (s1 s2 + s2 s1) / 2 = 0
        assert!(symmetrized_monomial(&a, &[1, 1]).unwrap().norm() < 1e-15);
        let s = symmetrized_monomial(&a, &[2, 0]).unwrap();
        assert!((s - CMat::identity(2, 2)).norm() < 1e-15);
        assert!(symmetrized_monomial(&a, &[7, 6]).is_err());
    }

    #[test]
    fn plateau_is_smooth_step() {
        assert_eq!(plateau(0.5, 1.0, 2.0), 1.0);
        assert_eq!(plateau(2.5, 1.0, 2.0), 0.0);
        assert!((plateau(1.5, 1.0, 2.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn refuses_non_hyperbolic() {
        let skew = MatrixTuple::from_real(2, &[&[1.0, 0.0, 0.0, -1.0], &[0.0, 1.0, -1.0, 0.0]]).unwrap();
        let g = Gaussian::new(vec![0.0, 0.0], 0.5);
        let grid = GridFunction::around(&skew, &[0.0, 0.0], 3.5, 0.25, |x| g.value(x)).unwrap();
        assert!(matches!(weyl_apply(&skew, &grid, None), Err(Error::NotHyperbolic(_))));
    }
}
