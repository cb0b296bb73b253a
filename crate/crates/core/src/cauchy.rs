//! Plane-wave representation of the Cauchy kernel `G_x(A)` and its jump
//! across `R^n`, which recovers `W_A`.
//!
//! For `x = x_0 e_0 + x` with `x_0 > 0`,
//! `G_x(A) = c_n ∫_{S^{n-1}} (e_0 + i s) ((<x, s> - x_0 s) I - <A, s>)^{-n} ds`
//! with `c_n = ((n-1)!/2) (i/2 pi)^n`; for `x_0 < 0` the sign `(-1)^{n+1}` is
//! applied. Since `s (e_0 + i s) = -i (e_0 + i s)`, the integrand also equals
//! `(e_0 + i s) ((<x, s> + i x_0) I - <A, s>)^{-n}`, which is the form used by
//! the fast paths.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clifford::CliffordMatrix;
use crate::error::{Error, Result};
use crate::linalg::{c64, eigh, from_row_major, to_row_major, CMat, SmallLu};
use crate::pencil::MatrixTuple;
use crate::quadrature::SphericalQuadrature;
use crate::weyl::{weyl_apply, GridFunction};

fn kernel_prefactor(n: usize, x0: f64) -> Complex64 {
    let fact: f64 = (1..n).map(|k| k as f64).product();
    let c = c64(0.0, 1.0 / (2.0 * PI)).powu(n as u32) * (fact / 2.0);
    if x0 < 0.0 && n % 2 == 0 {
        -c
    } else {
        c
    }
}

fn check_point(a: &MatrixTuple, x: &[f64], quad: Option<&SphericalQuadrature>) -> Result<()> {
    if x.len() != a.n() {
        return Err(Error::DimensionMismatch(format!(
            "point has {} coordinates, tuple has n = {}",
            x.len(),
            a.n()
        )));
    }
    if let Some(q) = quad {
        if q.n() != a.n() {
            return Err(Error::DimensionMismatch(format!(
                "quadrature lives on S^{}, tuple needs S^{}",
                q.n() - 1,
                a.n() - 1
            )));
        }
    }
    Ok(())
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Which part of the factor `e_0 + i s` is kept in the integrand.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelFactor {
    Full,
    /// `e_0` only; equal to `Full` after integration when `n` is even.
    ScalarOnly,
    /// `i s` only; equal to `Full` after integration when `n` is odd.
    VectorOnly,
}

/// `G_x(A)` evaluated with the real Clifford form of the integrand:
/// `((a I - <A,s>) e_0 - x_0 s)^{-1} = ((a I - <A,s>) + x_0 s)((a I - <A,s>)^2 + x_0^2)^{-1}`.
pub fn plane_wave_kernel(
    a: &MatrixTuple,
    x0: f64,
    x: &[f64],
    quad: &SphericalQuadrature,
) -> Result<CliffordMatrix> {
    plane_wave_kernel_with(a, x0, x, quad, KernelFactor::Full)
}

pub fn plane_wave_kernel_with(
    a: &MatrixTuple,
    x0: f64,
    x: &[f64],
    quad: &SphericalQuadrature,
    factor: KernelFactor,
) -> Result<CliffordMatrix> {
    check_point(a, x, Some(quad))?;
    if x0 == 0.0 {
        return Err(Error::InvalidInput("x_0 must be nonzero".into()));
    }
    let n = a.n();
    let dim = a.dim();
    let id = CMat::identity(dim, dim);
    let i = c64(0.0, 1.0);
    let mut scalar = CMat::zeros(dim, dim);
    let mut vector = vec![CMat::zeros(dim, dim); n];
    for k in 0..quad.len() {
        let s = quad.node(k);
        let w = quad.weight(k);
        let c = &id * c64(dot(x, s), 0.0) - a.pencil(s)?;
        // (C + x_0 s)^n = U + s V, using s^2 = -1 and s central over matrices
        let (mut u, mut v) = (id.clone(), CMat::zeros(dim, dim));
        for _ in 0..n {
            let nu = &u * &c - &v * c64(x0, 0.0);
            let nv = &u * c64(x0, 0.0) + &v * &c;
            u = nu;
            v = nv;
        }
        // (C^2 + x_0^2)^{-n} through the factors C ± i|x_0|, n solves each
        let plus = (&c + &id * c64(0.0, x0.abs())).lu();
        let minus = (&c - &id * c64(0.0, x0.abs())).lu();
        for _ in 0..n {
            for m in [&mut u, &mut v] {
                let y = minus
                    .solve(m)
                    .ok_or_else(|| Error::Numerical("singular plane-wave factor".into()))?;
                *m = plus
                    .solve(&y)
                    .ok_or_else(|| Error::Numerical("singular plane-wave factor".into()))?;
            }
        }
        let (e0_part, s_part) = match factor {
            KernelFactor::Full => (&u - &v * i, &v + &u * i),
            KernelFactor::ScalarOnly => (u, v),
            KernelFactor::VectorOnly => (&v * (-i), &u * i),
        };
        scalar += e0_part * c64(w, 0.0);
        for (j, sj) in s.iter().enumerate() {
            vector[j] += &s_part * c64(w * sj, 0.0);
        }
    }
    let pre = kernel_prefactor(n, x0);
    assemble(n, dim, scalar * pre, vector.into_iter().map(|m| m * pre).collect())
}

fn assemble(n: usize, dim: usize, scalar: CMat, vector: Vec<CMat>) -> Result<CliffordMatrix> {
    let mut g = CliffordMatrix::zero(n, dim);
    *g.component_mut(0) = scalar;
    for (j, m) in vector.into_iter().enumerate() {
        *g.component_mut(1 << j) = m;
    }
    Ok(g)
}

/// Per-node pencils `<A, s_k>` in row-major layout.
fn node_pencils(a: &MatrixTuple, quad: &SphericalQuadrature) -> Result<Vec<Vec<Complex64>>> {
    (0..quad.len())
        .map(|k| Ok(to_row_major(&a.pencil(quad.node(k))?)))
        .collect()
}

/// `((z I - B)^{-1})^n` into `out` (row-major).
fn resolvent_power(
    lu: &mut SmallLu,
    work: &mut [Complex64],
    b: &[Complex64],
    z: Complex64,
    n: usize,
    out: &mut [Complex64],
) -> Result<()> {
    let dim = lu.dim();
    for (w, &bv) in work.iter_mut().zip(b) {
        *w = -bv;
    }
    for r in 0..dim {
        work[r * dim + r] += z;
    }
    lu.factor(work)?;
    out.iter_mut().for_each(|v| *v = c64(0.0, 0.0));
    for r in 0..dim {
        out[r * dim + r] = c64(1.0, 0.0);
    }
    for _ in 0..n {
        lu.solve_cols(out, dim);
    }
    Ok(())
}

/// `G_x(A)` via the complex-shift form `(e_0 + i s)((<x,s> + i x_0) I - <A,s>)^{-n}`.
pub fn plane_wave_kernel_shift(
    a: &MatrixTuple,
    x0: f64,
    x: &[f64],
    quad: &SphericalQuadrature,
) -> Result<CliffordMatrix> {
    check_point(a, x, Some(quad))?;
    if x0 == 0.0 {
        return Err(Error::InvalidInput("x_0 must be nonzero".into()));
    }
    let (n, dim) = (a.n(), a.dim());
    let pencils = node_pencils(a, quad)?;
    let mut lu = SmallLu::new(dim);
    let mut work = vec![c64(0.0, 0.0); dim * dim];
    let mut r = vec![c64(0.0, 0.0); dim * dim];
    let mut scalar = vec![c64(0.0, 0.0); dim * dim];
    let mut vector = vec![vec![c64(0.0, 0.0); dim * dim]; n];
    for k in 0..quad.len() {
        let s = quad.node(k);
        let w = quad.weight(k);
        resolvent_power(&mut lu, &mut work, &pencils[k], c64(dot(x, s), x0), n, &mut r)?;
        for (acc, v) in scalar.iter_mut().zip(&r) {
            *acc += v * w;
        }
        for (j, sj) in s.iter().enumerate() {
            let f = c64(0.0, w * sj);
            for (acc, v) in vector[j].iter_mut().zip(&r) {
                *acc += v * f;
            }
        }
    }
    let pre = kernel_prefactor(n, x0);
    assemble(
        n,
        dim,
        from_row_major(dim, &scalar) * pre,
        vector.iter().map(|v| from_row_major(dim, v) * pre).collect(),
    )
}

/// `G(x + eps e_0) - G(x - eps e_0)` on a fixed rule.
pub fn jump_on_rule(
    a: &MatrixTuple,
    x: &[f64],
    eps: f64,
    quad: &SphericalQuadrature,
) -> Result<CliffordMatrix> {
    check_point(a, x, Some(quad))?;
    if eps <= 0.0 {
        return Err(Error::InvalidInput("eps must be positive".into()));
    }
    let (n, dim) = (a.n(), a.dim());
    let hermitian = a.is_hermitian();
    // the lower kernel carries (-1)^{n+1}; J = c_n ∫ (e_0 + i s)(R_+^n - (-1)^{n+1} R_-^n)
    let lower_sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    let mut lu = SmallLu::new(dim);
    let mut work = vec![c64(0.0, 0.0); dim * dim];
    let mut rp = vec![c64(0.0, 0.0); dim * dim];
    let mut rm = vec![c64(0.0, 0.0); dim * dim];
    let mut d = vec![c64(0.0, 0.0); dim * dim];
    let mut scalar = vec![c64(0.0, 0.0); dim * dim];
    let mut vector = vec![vec![c64(0.0, 0.0); dim * dim]; n];
    for k in 0..quad.len() {
        let s = quad.node(k);
        let w = quad.weight(k);
        let b = to_row_major(&a.pencil(s)?);
        let av = dot(x, s);
        resolvent_power(&mut lu, &mut work, &b, c64(av, eps), n, &mut rp)?;
        if hermitian {
            // R_- = R_+^* for hermitian pencils
            for r in 0..dim {
                for c in 0..dim {
                    rm[r * dim + c] = rp[c * dim + r].conj();
                }
            }
        } else {
            resolvent_power(&mut lu, &mut work, &b, c64(av, -eps), n, &mut rm)?;
        }
        for ((dv, p), m) in d.iter_mut().zip(&rp).zip(&rm) {
            *dv = p + m * lower_sign;
        }
        for (acc, v) in scalar.iter_mut().zip(&d) {
            *acc += v * w;
        }
        for (j, sj) in s.iter().enumerate() {
            let f = c64(0.0, w * sj);
            for (acc, v) in vector[j].iter_mut().zip(&d) {
                *acc += v * f;
            }
        }
    }
    let pre = kernel_prefactor(n, 1.0);
    assemble(
        n,
        dim,
        from_row_major(dim, &scalar) * pre,
        vector.iter().map(|v| from_row_major(dim, v) * pre).collect(),
    )
}

/// Step sizes and quadrature sizing for jump evaluation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JumpSchedule {
    /// Decreasing offsets from `R^n`.
    pub eps: Vec<f64>,
    /// Nodes per unit of `(|x| + ||A||) / eps`; the integrand has poles at
    /// distance `~ eps / (|x| + ||A||)` from the real sphere.
    pub kappa: f64,
    /// Minimum circle nodes for `n = 2`.
    pub min_nodes: usize,
}

impl Default for JumpSchedule {
    fn default() -> Self {
        Self {
            eps: vec![0.2, 0.1, 0.05, 0.025, 0.0125],
            kappa: 16.0,
            min_nodes: 512,
        }
    }
}

impl JumpSchedule {
    pub fn with_eps(eps: Vec<f64>) -> Self {
        Self {
            eps,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.eps.len() < 3 {
            return Err(Error::InvalidInput("need at least three eps values".into()));
        }
        if self.eps.iter().any(|e| *e <= 0.0) || self.eps.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::InvalidInput(
                "eps values must be positive and strictly decreasing".into(),
            ));
        }
        Ok(())
    }

    fn circle_nodes(&self, radius: f64, eps: f64) -> usize {
        let m = (self.kappa * radius / eps).ceil() as usize;
        m.max(self.min_nodes).div_ceil(4) * 4
    }

    /// Quadrature used for the jump at `x` with offset `eps`.
    pub fn rule_for(&self, a: &MatrixTuple, x: &[f64], eps: f64) -> Result<SphericalQuadrature> {
        let radius = x.iter().map(|v| v * v).sum::<f64>().sqrt() + a.norm();
        match a.n() {
            1 => Ok(SphericalQuadrature::points()),
            2 => Ok(SphericalQuadrature::circle(self.circle_nodes(radius, eps))),
            3 => {
                let m_polar = ((0.5 * self.kappa * radius / eps).ceil() as usize).max(48);
                let m_az = ((2.0 * self.kappa * a.norm()).ceil() as usize).max(128);
                let axis = if x.iter().any(|v| *v != 0.0) {
                    Some([x[0], x[1], x[2]])
                } else {
                    None
                };
                Ok(SphericalQuadrature::sphere_product(m_polar, m_az, axis))
            }
            n => Err(Error::InvalidInput(format!(
                "jump evaluation supports n <= 3, got {n}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Vanishing,
    ConvergentDensity,
    Divergent,
}

impl Classification {
    pub fn as_str(&self) -> &'static str {
        match self {
            Classification::Vanishing => "vanishing",
            Classification::ConvergentDensity => "convergent_density",
            Classification::Divergent => "divergent",
        }
    }
}

/// Growth exponent threshold: `||J||` is treated as `O(eps)` (the smooth
/// odd part of `G` across `R^n`) when it decays at least like `eps^0.6`.
const VANISH_EXPONENT: f64 = 0.6;
const DIVERGE_GROWTH: f64 = 1.8;
const CAUCHY_RATIO: f64 = 0.75;
const ABS_FLOOR: f64 = 1e-13;

/// Classifies a jump sequence from its norms and successive differences.
///
/// `norms[k] = ||J(eps[k])||`, `diffs[k] = ||J(eps[k+1]) - J(eps[k])||`.
pub fn classify_jumps(eps: &[f64], norms: &[f64], diffs: &[f64]) -> Classification {
    let k = norms.len();
    if norms[k - 1] < ABS_FLOOR && norms[k - 2] < ABS_FLOOR {
        return Classification::Vanishing;
    }
    let exponent = |i: usize| (norms[i] / norms[i + 1]).ln() / (eps[i] / eps[i + 1]).ln();
    if exponent(k - 2) >= VANISH_EXPONENT && exponent(k - 3) >= VANISH_EXPONENT {
        return Classification::Vanishing;
    }
    let grows = |i: usize| {
        let halvings = (eps[i] / eps[i + 1]).log2();
        norms[i + 1] >= norms[i] * DIVERGE_GROWTH.powf(halvings)
    };
    if grows(k - 2) && grows(k - 3) {
        return Classification::Divergent;
    }
    if diffs[k - 2] <= CAUCHY_RATIO * diffs[k - 3] {
        Classification::ConvergentDensity
    } else {
        Classification::Divergent
    }
}

#[derive(Debug, Clone)]
pub struct JumpDensity {
    pub x: Vec<f64>,
    pub eps: Vec<f64>,
    /// `J(eps_k) = G(x + eps_k e_0) - G(x - eps_k e_0)`.
    pub jumps: Vec<CliffordMatrix>,
    pub norms: Vec<f64>,
    pub classification: Classification,
    pub jump_at_eps_min: CliffordMatrix,
    /// Linear extrapolation to `eps = 0` from the two smallest offsets.
    pub extrapolated: CliffordMatrix,
}

fn finish_jumps(x: &[f64], eps: &[f64], jumps: Vec<CliffordMatrix>) -> JumpDensity {
    let norms: Vec<f64> = jumps.iter().map(|j| j.norm()).collect();
    let diffs: Vec<f64> = jumps.windows(2).map(|w| w[1].sub(&w[0]).norm()).collect();
    let classification = classify_jumps(eps, &norms, &diffs);
    let k = eps.len();
    let (ea, eb) = (eps[k - 2], eps[k - 1]);
    let extrapolated = jumps[k - 1]
        .scale(c64(ea / (ea - eb), 0.0))
        .sub(&jumps[k - 2].scale(c64(eb / (ea - eb), 0.0)));
    JumpDensity {
        x: x.to_vec(),
        eps: eps.to_vec(),
        norms,
        classification,
        jump_at_eps_min: jumps[k - 1].clone(),
        extrapolated,
        jumps,
    }
}

/// Jump of `G_x(A)` across `R^n` at `x`, classified over the schedule.
pub fn jump_density(a: &MatrixTuple, x: &[f64], schedule: &JumpSchedule) -> Result<JumpDensity> {
    check_point(a, x, None)?;
    schedule.validate()?;
    let jumps = schedule
        .eps
        .iter()
        .map(|&e| jump_on_rule(a, x, e, &schedule.rule_for(a, x, e)?))
        .collect::<Result<Vec<_>>>()?;
    Ok(finish_jumps(x, &schedule.eps, jumps))
}

/// Half-circle spectral data of a hermitian pair for the `n = 2` fast path.
struct SpectralCircle {
    cos_sin: Vec<[f64; 2]>,
    weight: f64,
    eigenvalues: Vec<Vec<f64>>,
    /// Row-major rank-one projectors, `dim` per node.
    projectors: Vec<Vec<Vec<Complex64>>>,
}

impl SpectralCircle {
    fn new(a: &MatrixTuple, m: usize) -> Result<Self> {
        let half = m / 2;
        let dim = a.dim();
        let mut cos_sin = Vec::with_capacity(half);
        let mut eigenvalues = Vec::with_capacity(half);
        let mut projectors = Vec::with_capacity(half);
        for k in 0..half {
            let t = 2.0 * PI * k as f64 / m as f64;
            let s = [t.cos(), t.sin()];
            let (vals, vecs) = eigh(&a.pencil(&s)?);
            let mut p = Vec::with_capacity(dim);
            for j in 0..dim {
                let v = vecs.column(j);
                let mut pj = Vec::with_capacity(dim * dim);
                for r in 0..dim {
                    for c in 0..dim {
                        pj.push(v[r] * v[c].conj());
                    }
                }
                p.push(pj);
            }
            cos_sin.push(s);
            eigenvalues.push(vals);
            projectors.push(p);
        }
        Ok(Self {
            cos_sin,
            weight: 2.0 * PI / m as f64,
            eigenvalues,
            projectors,
        })
    }

    /// Scalar part of the jump; the vector part cancels between `s` and `-s`.
    fn jump(&self, x: &[f64], eps: f64, dim: usize) -> CMat {
        let mut acc = vec![0.0f64; 2 * dim * dim];
        for k in 0..self.cos_sin.len() {
            let s = self.cos_sin[k];
            let av = x[0] * s[0] + x[1] * s[1];
            for (j, &lam) in self.eigenvalues[k].iter().enumerate() {
                let z = c64(av - lam, eps);
                let f = 2.0 * (z * z).inv().re;
                for (q, p) in self.projectors[k][j].iter().enumerate() {
                    acc[2 * q] += f * p.re;
                    acc[2 * q + 1] += f * p.im;
                }
            }
        }
        // factor 2 for the antipodal half, c_2 = -1/(8 pi^2)
        let pre = 2.0 * self.weight * (-1.0 / (8.0 * PI * PI));
        CMat::from_fn(dim, dim, |r, c| {
            let q = r * dim + c;
            c64(acc[2 * q] * pre, acc[2 * q + 1] * pre)
        })
    }
}

/// Regular grid `lo:hi:count` per axis, first axis slowest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridAxis {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl GridAxis {
    pub fn step(&self) -> f64 {
        if self.count > 1 {
            (self.hi - self.lo) / (self.count - 1) as f64
        } else {
            0.0
        }
    }

    pub fn value(&self, i: usize) -> f64 {
        self.lo + self.step() * i as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanGrid {
    pub axes: Vec<GridAxis>,
}

impl ScanGrid {
    pub fn new(axes: Vec<GridAxis>) -> Result<Self> {
        if axes.is_empty() || axes.iter().any(|a| a.count == 0 || !(a.lo <= a.hi)) {
            return Err(Error::InvalidInput("grid axes need lo <= hi and count >= 1".into()));
        }
        Ok(Self { axes })
    }

    /// Parses `lo:hi:count` specs joined by `x`, e.g. `-2:2:200x-2:2:200`.
    pub fn parse(spec: &str) -> Result<Self> {
        let bad = || Error::InvalidInput(format!("bad grid spec '{spec}'"));
        let mut axes = Vec::new();
        for part in spec.split('x') {
            let f: Vec<&str> = part.split(':').collect();
            if f.len() != 3 {
                return Err(bad());
            }
            axes.push(GridAxis {
                lo: f[0].trim().parse().map_err(|_| bad())?,
                hi: f[1].trim().parse().map_err(|_| bad())?,
                count: f[2].trim().parse().map_err(|_| bad())?,
            });
        }
        Self::new(axes)
    }

    pub fn dims(&self) -> usize {
        self.axes.len()
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.count).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn point(&self, mut k: usize) -> Vec<f64> {
        let mut p = vec![0.0; self.dims()];
        for (d, axis) in self.axes.iter().enumerate().rev() {
            p[d] = axis.value(k % axis.count);
            k /= axis.count;
        }
        p
    }

    pub fn cell_volume(&self) -> f64 {
        self.axes.iter().map(|a| a.step()).product()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScanPoint {
    pub x: Vec<f64>,
    pub classification: Classification,
    pub jump_norm_at_eps_min: f64,
    pub extrapolated_density_norm: f64,
}

#[derive(Debug, Clone)]
pub struct JumpScan {
    pub points: Vec<ScanPoint>,
    /// Scalar part of the extrapolated density at each point.
    pub densities: Vec<CMat>,
}

/// Jump classification over every grid point.
pub fn singular_scan(a: &MatrixTuple, grid: &ScanGrid, schedule: &JumpSchedule) -> Result<JumpScan> {
    scan_points(a, grid, schedule, &vec![true; grid.len()])
}

/// Like [`singular_scan`] but only at points where `mask` is set; the
/// remaining entries are `None`.
pub fn scan_points(
    a: &MatrixTuple,
    grid: &ScanGrid,
    schedule: &JumpSchedule,
    mask: &[bool],
) -> Result<JumpScan> {
    schedule.validate()?;
    if grid.dims() != a.n() {
        return Err(Error::DimensionMismatch(format!(
            "grid has {} axes, tuple has n = {}",
            grid.dims(),
            a.n()
        )));
    }
    let dim = a.dim();
    let spectral: Option<Vec<SpectralCircle>> = if a.n() == 2 && a.is_hermitian() {
        let reach = (0..grid.len())
            .filter(|&k| mask[k])
            .map(|k| grid.point(k).iter().map(|v| v * v).sum::<f64>().sqrt())
            .fold(0.0, f64::max);
        let radius = reach + a.norm();
        Some(
            schedule
                .eps
                .iter()
                .map(|&e| SpectralCircle::new(a, schedule.circle_nodes(radius, e)))
                .collect::<Result<_>>()?,
        )
    } else {
        None
    };
    let results: Vec<Result<Option<(ScanPoint, CMat)>>> = (0..grid.len())
        .into_par_iter()
        .map(|k| {
            if !mask[k] {
                return Ok(None);
            }
            let x = grid.point(k);
            let jd = match &spectral {
                Some(circles) => {
                    let jumps = circles
                        .iter()
                        .zip(&schedule.eps)
                        .map(|(c, &e)| {
                            let mut g = CliffordMatrix::zero(2, dim);
                            *g.component_mut(0) = c.jump(&x, e, dim);
                            g
                        })
                        .collect();
                    finish_jumps(&x, &schedule.eps, jumps)
                }
                None => jump_density(a, &x, schedule)?,
            };
            let density = jd.extrapolated.component(0).clone();
            Ok(Some((
                ScanPoint {
                    x,
                    classification: jd.classification,
                    jump_norm_at_eps_min: jd.jump_at_eps_min.norm(),
                    extrapolated_density_norm: jd.extrapolated.norm(),
                },
                density,
            )))
        })
        .collect();
    let mut points = Vec::with_capacity(grid.len());
    let mut densities = Vec::with_capacity(grid.len());
    for r in results {
        match r? {
            Some((p, d)) => {
                points.push(p);
                densities.push(d);
            }
            None => {
                points.push(ScanPoint {
                    x: Vec::new(),
                    classification: Classification::Vanishing,
                    jump_norm_at_eps_min: f64::NAN,
                    extrapolated_density_norm: f64::NAN,
                });
                densities.push(CMat::zeros(dim, dim));
            }
        }
    }
    Ok(JumpScan { points, densities })
}

#[derive(Debug, Clone)]
pub struct PairingCheck {
    /// `sum_x rho(x) f(x) dV` over the grid.
    pub jump_pairing: CMat,
    pub weyl_value: CMat,
    pub difference: f64,
}

/// Pairs the extrapolated jump density with `f` on `grid` and compares with
/// `weyl_apply(A, f)`. Refuses when a point where `|f|` is not negligible
/// classifies as divergent.
pub fn crosscheck_jump_vs_weyl<F>(
    a: &MatrixTuple,
    f: F,
    grid: &ScanGrid,
    schedule: &JumpSchedule,
    weyl_grid: &GridFunction,
) -> Result<PairingCheck>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let values: Vec<f64> = (0..grid.len()).map(|k| f(&grid.point(k))).collect();
    let fmax = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mask: Vec<bool> = values.iter().map(|v| v.abs() > 1e-10 * fmax).collect();
    let scan = scan_points(a, grid, schedule, &mask)?;
    let dim = a.dim();
    let mut pairing = CMat::zeros(dim, dim);
    for k in 0..grid.len() {
        if !mask[k] {
            continue;
        }
        if scan.points[k].classification == Classification::Divergent {
            return Err(Error::NonConvergent(format!(
                "jump diverges at {:?} inside the support of f",
                scan.points[k].x
            )));
        }
        if scan.points[k].classification == Classification::ConvergentDensity {
            pairing += &scan.densities[k] * c64(values[k] * grid.cell_volume(), 0.0);
        }
    }
    let weyl = weyl_apply(a, weyl_grid, None)?;
    Ok(PairingCheck {
        difference: (&pairing - &weyl.value).norm(),
        jump_pairing: pairing,
        weyl_value: weyl.value,
    })
}

/// `|| sum_{j=0}^n e_j (g(x + h e_j) - g(x - h e_j)) / 2h ||` for a Clifford
/// matrix valued `g(x_0, x)`.
pub fn dirac_residual<G>(g: G, x0: f64, x: &[f64], h: f64) -> Result<f64>
where
    G: Fn(f64, &[f64]) -> Result<CliffordMatrix>,
{
    let n = x.len();
    let mut total: Option<CliffordMatrix> = None;
    for j in 0..=n {
        let (mut xp, mut xm) = (x.to_vec(), x.to_vec());
        let (mut x0p, mut x0m) = (x0, x0);
        if j == 0 {
            x0p += h;
            x0m -= h;
        } else {
            xp[j - 1] += h;
            xm[j - 1] -= h;
        }
        let diff = g(x0p, &xp)?.sub(&g(x0m, &xm)?).scale(c64(0.5 / h, 0.0));
        let mask = if j == 0 { 0 } else { 1u32 << (j - 1) };
        let e = crate::clifford::CliffordElement::blade(n, mask, c64(1.0, 0.0));
        let term = diff.left_mul(&e);
        total = Some(match total {
            Some(t) => t.add(&term),
            None => term,
        });
    }
    Ok(total.map_or(0.0, |t| t.norm()))
}
