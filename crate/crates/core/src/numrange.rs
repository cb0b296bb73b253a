//! The numerical-range measure `nu_A`: the law of `n_A(h) = (<A_j h, h>)_j`
//! for `h` uniform on the unit sphere of `C^N`.

use std::f64::consts::PI;

use nalgebra::DVector;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::examples;
use crate::linalg::c64;
use crate::pencil::MatrixTuple;
use crate::quadrature::integrate_adaptive;

/// Uniform unit vector in `C^dim` for sample `index` of stream `seed`.
///
/// Each sample owns an independent ChaCha stream, so results do not depend
/// on how samples are scheduled across threads.
pub fn sample_unit_vector(dim: usize, seed: u64, index: u64) -> DVector<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    loop {
        let v = DVector::<Complex64>::from_fn(dim, |_, _| {
            c64(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng))
        });
        let r = v.norm();
        if r > 1e-300 {
            return v / c64(r, 0.0);
        }
    }
}

/// `n_A(h) = (<A_1 h, h>, ..., <A_n h, h>)`.
pub fn range_point(a: &MatrixTuple, h: &DVector<Complex64>) -> Vec<Complex64> {
    a.matrices()
        .iter()
        .map(|m| h.dotc(&(m * h)))
        .collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EmpiricalMeasure {
    pub n: usize,
    pub dim: usize,
    pub seed: u64,
    /// Row-major `samples x n` real parts of `n_A(h)`.
    pub points: Vec<f64>,
    /// Imaginary parts, present only for non-hermitian tuples.
    pub imag: Option<Vec<f64>>,
}

impl EmpiricalMeasure {
    pub fn len(&self) -> usize {
        if self.n == 0 {
            0
        } else {
            self.points.len() / self.n
        }
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, k: usize) -> &[f64] {
        &self.points[k * self.n..(k + 1) * self.n]
    }

    /// Sample mean and standard error of each coordinate.
    pub fn mean_and_stderr(&self) -> (Vec<f64>, Vec<f64>) {
        let m = self.len() as f64;
        let mut mean = vec![0.0; self.n];
        for k in 0..self.len() {
            for (j, v) in self.point(k).iter().enumerate() {
                mean[j] += v;
            }
        }
        mean.iter_mut().for_each(|v| *v /= m);
        let mut var = vec![0.0; self.n];
        for k in 0..self.len() {
            for (j, v) in self.point(k).iter().enumerate() {
                var[j] += (v - mean[j]).powi(2);
            }
        }
        let se = var.iter().map(|v| (v / (m - 1.0) / m).sqrt()).collect();
        (mean, se)
    }
}

/// Draws `m` samples of `nu_A`.
pub fn sample_range(a: &MatrixTuple, m: usize, seed: u64) -> Result<EmpiricalMeasure> {
    if m == 0 {
        return Err(Error::InvalidInput("sample count must be positive".into()));
    }
    let n = a.n();
    let dim = a.dim();
    let rows: Vec<Vec<Complex64>> = (0..m as u64)
        .into_par_iter()
        .map(|i| range_point(a, &sample_unit_vector(dim, seed, i)))
        .collect();
    let points = rows.iter().flat_map(|r| r.iter().map(|z| z.re)).collect();
    let imag = if a.is_hermitian() {
        None
    } else {
        Some(rows.iter().flat_map(|r| r.iter().map(|z| z.im)).collect())
    };
    Ok(EmpiricalMeasure {
        n,
        dim,
        seed,
        points,
        imag,
    })
}

/// Exact mean `tr(A_j)/N` and variance `(tr(A_j^2) - tr(A_j)^2/N)/(N(N+1))`
/// of `<A_j h, h>` for hermitian `A_j`.
pub fn range_moments(a: &MatrixTuple) -> Result<(Vec<f64>, Vec<f64>)> {
    if !a.is_hermitian() {
        return Err(Error::NotHermitian);
    }
    let nn = a.dim() as f64;
    let mut means = Vec::new();
    let mut vars = Vec::new();
    for m in a.matrices() {
        let tr = m.trace().re;
        let tr2 = (m * m).trace().re;
        means.push(tr / nn);
        vars.push((tr2 - tr * tr / nn) / (nn * (nn + 1.0)));
    }
    Ok((means, vars))
}

/// Two-sided Kolmogorov–Smirnov statistic of `samples` against `cdf`.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> f64 {
    let mut s = samples.to_vec();
    s.sort_by(f64::total_cmp);
    let m = s.len() as f64;
    s.iter().enumerate().fold(0.0, |d, (k, &x)| {
        let f = cdf(x);
        d.max((k as f64 + 1.0) / m - f).max(f - k as f64 / m)
    })
}

/// Asymptotic p-value of a KS statistic `d` from `m` samples.
pub fn ks_pvalue(d: f64, m: usize) -> f64 {
    let sm = (m as f64).sqrt();
    let lambda = (sm + 0.12 + 0.11 / sm) * d;
    if lambda < 1e-3 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=200 {
        let term = (-2.0 * (k * k) as f64 * lambda * lambda).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PauliUniformityReport {
    pub samples: usize,
    pub ks_x3: f64,
    pub p_x3: f64,
    pub ks_azimuth: f64,
    pub p_azimuth: f64,
    /// `max_h | |n_sigma(h)| - 1 |`.
    pub max_radius_deviation: f64,
}

/// KS tests of `nu_sigma` against the uniform law on `S^2`: the third
/// coordinate against `U[-1, 1]` and the azimuth against `U[0, 2 pi)`.
pub fn nu_pauli_uniformity(m: usize, seed: u64) -> Result<PauliUniformityReport> {
    let meas = sample_range(&examples::pauli(), m, seed)?;
    let mut x3 = Vec::with_capacity(m);
    let mut az = Vec::with_capacity(m);
    let mut dev = 0.0f64;
    for k in 0..meas.len() {
        let p = meas.point(k);
        x3.push(p[2]);
        az.push(p[1].atan2(p[0]).rem_euclid(2.0 * PI));
        let r = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
        dev = dev.max((r - 1.0).abs());
    }
    let ks_x3 = ks_statistic(&x3, |t| ((t + 1.0) / 2.0).clamp(0.0, 1.0));
    let ks_azimuth = ks_statistic(&az, |t| (t / (2.0 * PI)).clamp(0.0, 1.0));
    Ok(PauliUniformityReport {
        samples: m,
        ks_x3,
        p_x3: ks_pvalue(ks_x3, m),
        ks_azimuth,
        p_azimuth: ks_pvalue(ks_azimuth, m),
        max_radius_deviation: dev,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pauli2Regime {
    /// The quadratic under the root is never positive.
    Empty,
    /// `|x| > 1` and both roots lie in `(0, 1)`: the arcsine span is `pi`.
    Exterior,
    /// `|x| > 1` and both roots lie beyond `y = 1`.
    Shadow,
    /// `|x| <= 1`: one root in `(0, 1)`, integration up to `y = 1`.
    Interior,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Pauli2Closed {
    pub regime: Pauli2Regime,
    /// Difference of arcsines across the integration range.
    pub arcsin_span: f64,
    /// `arcsin_span / sqrt(|a|^2 - 1)`.
    pub value: f64,
}

fn dot2(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

fn pauli2_check(a: [f64; 2]) -> Result<f64> {
    let k = dot2(a, a) - 1.0;
    if k <= 0.0 || !k.is_finite() {
        return Err(Error::InvalidInput("pauli2 needs |a| > 1".into()));
    }
    Ok(k)
}

/// Closed form of `I(a, x) = ∫_0^1 (y^2 - |x - (1-y) a|^2)_+^{-1/2} dy` in
/// the regimes where it is known; other inputs give `Error::Unresolved`.
pub fn pauli2_e_closed(a: [f64; 2], x: [f64; 2]) -> Result<Pauli2Closed> {
    let k = pauli2_check(a)?;
    let xa = [x[0] - a[0], x[1] - a[1]];
    let b = dot2(a, xa);
    let disc = b * b - k * dot2(xa, xa);
    let rx = dot2(x, x).sqrt();
    let zero = |regime| Pauli2Closed {
        regime,
        arcsin_span: 0.0,
        value: 0.0,
    };
    if disc < 0.0 {
        return Ok(zero(Pauli2Regime::Empty));
    }
    if rx <= 1.0 {
        if disc == 0.0 {
            return Err(Error::Unresolved("degenerate discriminant inside the disk".into()));
        }
        let arg = ((dot2(a, x) - 1.0) / disc.sqrt()).clamp(-1.0, 1.0);
        let span = PI / 2.0 + arg.asin();
        return Ok(Pauli2Closed {
            regime: Pauli2Regime::Interior,
            arcsin_span: span,
            value: span / k.sqrt(),
        });
    }
    if disc > 0.0 && b < 0.0 && -b < k {
        return Ok(Pauli2Closed {
            regime: Pauli2Regime::Exterior,
            arcsin_span: PI,
            value: PI / k.sqrt(),
        });
    }
    if disc > 0.0 && -b > k {
        return Ok(zero(Pauli2Regime::Shadow));
    }
    Err(Error::Unresolved(format!(
        "no closed form for x = ({}, {}) with a = ({}, {})",
        x[0], x[1], a[0], a[1]
    )))
}

/// Adaptive-quadrature value of `I(a, x)`, independent of the closed form.
pub fn pauli2_e_oracle(a: [f64; 2], x: [f64; 2]) -> Result<f64> {
    pauli2_check(a)?;
    let p = |y: f64| {
        let d = [x[0] - (1.0 - y) * a[0], x[1] - (1.0 - y) * a[1]];
        y * y - dot2(d, d)
    };
    // p is concave in y; locate its maximum on [0, 1] by ternary search
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if p(m1) < p(m2) {
            lo = m1;
        } else {
            hi = m2;
        }
    }
    let ymax = 0.5 * (lo + hi);
    if p(ymax) <= 0.0 {
        return Ok(0.0);
    }
    let bisect = |mut neg: f64, mut pos: f64| {
        for _ in 0..200 {
            let mid = 0.5 * (neg + pos);
            if p(mid) > 0.0 {
                pos = mid;
            } else {
                neg = mid;
            }
        }
        pos
    };
    let left = if p(0.0) > 0.0 { None } else { Some(bisect(0.0, ymax)) };
    let right = if p(1.0) > 0.0 { None } else { Some(bisect(1.0, ymax)) };
    let l = left.unwrap_or(0.0);
    let r = right.unwrap_or(1.0);
    let mid = 0.5 * (l + r);
    // p(y) = -k y^2 - 2 b y - c, so p(root + d) - p(root) = d (p'(root) - k d)
    // without cancellation
    let k = dot2(a, a) - 1.0;
    let xa = [x[0] - a[0], x[1] - a[1]];
    let b = dot2(a, xa);
    let slope = |y: f64| -2.0 * k * y - 2.0 * b;
    let tol = 1e-12;
    let mut total = 0.0;
    // y = root ± u^2 removes the inverse square root at a root endpoint
    total += match left {
        Some(root) => integrate_adaptive(
            |u| {
                let v = slope(root) - k * u * u;
                if v > 0.0 { 2.0 / v.sqrt() } else { 0.0 }
            },
            0.0,
            (mid - root).sqrt(),
            tol,
        )?,
        None => integrate_adaptive(|y| 1.0 / p(y).sqrt(), l, mid, tol)?,
    };
    total += match right {
        Some(root) => integrate_adaptive(
            |u| {
                let v = -slope(root) - k * u * u;
                if v > 0.0 { 2.0 / v.sqrt() } else { 0.0 }
            },
            0.0,
            (root - mid).sqrt(),
            tol,
        )?,
        None => integrate_adaptive(|y| 1.0 / p(y).sqrt(), mid, r, tol)?,
    };
    Ok(total)
}
