//! Quadrature rules: Gauss–Legendre, rules on `S^0`, `S^1`, `S^2`, and an
//! adaptive Gauss–Kronrod integrator for scalar integrands.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(m > 0, "need at least one node");
    let mut x = vec![0.0; m];
    let mut w = vec![0.0; m];
    let half = m.div_ceil(2);
    for i in 0..half {
        let mut z = (PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=m {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = m as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[m - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[m - 1 - i] = wi;
    }
    (x, w)
}

/// Nodes on the unit sphere `S^{n-1}` with weights summing to its area.
#[derive(Debug, Clone)]
pub struct SphericalQuadrature {
    n: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl SphericalQuadrature {
    pub fn from_parts(n: usize, nodes: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if n == 0 || nodes.len() != n * weights.len() {
            return Err(Error::DimensionMismatch(
                "node array must hold n coordinates per weight".into(),
            ));
        }
        Ok(Self { n, nodes, weights })
    }

    /// `S^0 = {-1, +1}` with counting measure.
    pub fn points() -> Self {
        Self {
            n: 1,
            nodes: vec![1.0, -1.0],
            weights: vec![1.0, 1.0],
        }
    }

    /// Uniform `m`-point rule on the unit circle.
    pub fn circle(m: usize) -> Self {
        let mut nodes = Vec::with_capacity(2 * m);
        for k in 0..m {
            let t = 2.0 * PI * k as f64 / m as f64;
            nodes.push(t.cos());
            nodes.push(t.sin());
        }
        Self {
            n: 2,
            nodes,
            weights: vec![2.0 * PI / m as f64; m],
        }
    }

    /// Product rule on `S^2`: Gauss–Legendre in the polar cosine and uniform
    /// in azimuth, with the pole along `axis` (normalised; `None` means `e_3`).
    pub fn sphere_product(m_polar: usize, m_azimuth: usize, axis: Option<[f64; 3]>) -> Self {
        let (u, wu) = gauss_legendre(m_polar);
        let frame = pole_frame(axis.unwrap_or([0.0, 0.0, 1.0]));
        let mut nodes = Vec::with_capacity(3 * m_polar * m_azimuth);
        let mut weights = Vec::with_capacity(m_polar * m_azimuth);
        let dphi = 2.0 * PI / m_azimuth as f64;
        for (ui, wi) in u.iter().zip(&wu) {
            let st = (1.0 - ui * ui).max(0.0).sqrt();
            for k in 0..m_azimuth {
                let phi = dphi * (k as f64 + 0.5);
                let local = [st * phi.cos(), st * phi.sin(), *ui];
                for r in 0..3 {
                    nodes.push(
                        frame[0][r] * local[0] + frame[1][r] * local[1] + frame[2][r] * local[2],
                    );
                }
                weights.push(wi * dphi);
            }
        }
        Self {
            n: 3,
            nodes,
            weights,
        }
    }

    /// Default rule for `S^{n-1}`, `n <= 3`.
    pub fn default_for(n: usize) -> Result<Self> {
        match n {
            1 => Ok(Self::points()),
            2 => Ok(Self::circle(512)),
            3 => Ok(Self::sphere_product(48, 96, None)),
            _ => Err(Error::InvalidInput(format!(
                "no sphere quadrature for n = {n} (supported: 1, 2, 3)"
            ))),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn node(&self, k: usize) -> &[f64] {
        &self.nodes[k * self.n..(k + 1) * self.n]
    }

    pub fn weight(&self, k: usize) -> f64 {
        self.weights[k]
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// Orthonormal frame whose third vector is `axis`.
fn pole_frame(axis: [f64; 3]) -> [[f64; 3]; 3] {
    let norm = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
    let z = if norm > 0.0 {
        [axis[0] / norm, axis[1] / norm, axis[2] / norm]
    } else {
        [0.0, 0.0, 1.0]
    };
    let helper = if z[0].abs() < 0.9 {
        [1.0, 0.0, 0.0]
    } else {
        [0.0, 1.0, 0.0]
    };
    let d = helper[0] * z[0] + helper[1] * z[1] + helper[2] * z[2];
    let mut x = [helper[0] - d * z[0], helper[1] - d * z[1], helper[2] - d * z[2]];
    let xn = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
    for v in &mut x {
        *v /= xn;
    }
    let y = [
        z[1] * x[2] - z[2] * x[1],
        z[2] * x[0] - z[0] * x[2],
        z[0] * x[1] - z[1] * x[0],
    ];
    [x, y, z]
}

const GK_XK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const GK_WK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728_0,
];
const GK_WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * GK_WK[7];
    let mut gauss = fc * GK_WG[3];
    for j in 0..7 {
        let x = h * GK_XK[j];
        let s = f(c - x) + f(c + x);
        kron += GK_WK[j] * s;
        if j % 2 == 1 {
            gauss += GK_WG[j / 2] * s;
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

/// Adaptive Gauss–Kronrod (7/15) integration of `f` over `[a, b]`.
pub fn integrate_adaptive<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    let mut stack = vec![(a, b, tol, 0usize)];
    let mut total = 0.0;
    while let Some((lo, hi, t, depth)) = stack.pop() {
        let (v, err) = gk15(&f, lo, hi);
        if !v.is_finite() {
            return Err(Error::Numerical(format!(
                "non-finite integrand on [{lo}, {hi}]"
            )));
        }
        if err <= t.max(1e-15 * v.abs()) || depth >= 60 {
            if depth >= 60 && err > t {
                return Err(Error::NonConvergent(format!(
                    "adaptive quadrature stalled on [{lo}, {hi}]"
                )));
            }
            total += v;
        } else {
            let mid = 0.5 * (lo + hi);
            stack.push((lo, mid, 0.5 * t, depth + 1));
            stack.push((mid, hi, 0.5 * t, depth + 1));
        }
    }
    Ok(total)
}
