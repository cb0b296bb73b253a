//! Kippenhahn curves of hermitian pairs, numerical-range hulls, wave fronts
//! and lacunas.
//!
//! For `A(theta) = cos(theta) A_1 + sin(theta) A_2` with eigenpair
//! `(lambda, u)`, the line `[cos theta : sin theta : -lambda]` is tangent to the
//! curve `C(A)` at `lambda (c, s) + lambda' (-s, c)`, which also equals
//! `(<A_1 u, u>, <A_2 u, u>)`.

use std::f64::consts::PI;

use nalgebra::{Matrix3, SymmetricEigen, Vector3};
use serde::{Deserialize, Serialize};

use crate::cauchy::{scan_points, Classification, JumpSchedule, ScanGrid};
use crate::error::{Error, Result};
use crate::geometry::{ConvexPolygon, Point2};
use crate::linalg::{c64, eigh, CMat};
use crate::pencil::{support_function, Localisation, MatrixTuple};

pub const DEFAULT_THETA_COUNT: usize = 2048;
pub const CROSSING_GAP: f64 = 1e-6;
const OVERLAP_MIN: f64 = 0.7;

fn check_pair(a: &MatrixTuple) -> Result<()> {
    if a.n() != 2 {
        return Err(Error::InvalidInput(format!(
            "Kippenhahn curves need a pair, got n = {}",
            a.n()
        )));
    }
    if !a.is_hermitian() {
        return Err(Error::NotHermitian);
    }
    Ok(())
}

/// Eigenvalues (ascending) and eigenvectors of `A(theta)`.
pub fn pencil_branches(a: &MatrixTuple, theta: f64) -> (Vec<f64>, CMat) {
    let m = a.matrix(0) * c64(theta.cos(), 0.0) + a.matrix(1) * c64(theta.sin(), 0.0);
    eigh(&m)
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CurveSample {
    pub theta: f64,
    pub branch: usize,
    pub eigenvalue: f64,
    /// `lambda (c, s) + lambda' (-s, c)`.
    pub point: Point2,
    /// `(<A_1 u, u>, <A_2 u, u>)`.
    pub rayleigh_point: Point2,
    /// Tangent line `[c : d : mu]`, i.e. `c x_1 + d x_2 + mu = 0`.
    pub tangent: [f64; 3],
    /// Set when another eigenvalue is within the crossing gap.
    pub crossing: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundaryCurve {
    pub theta_count: usize,
    pub branches: usize,
    pub samples: Vec<CurveSample>,
}

impl BoundaryCurve {
    pub fn points(&self) -> Vec<Point2> {
        self.samples.iter().map(|s| s.point).collect()
    }

    /// Convex hull of the curve samples.
    pub fn hull(&self) -> ConvexPolygon {
        ConvexPolygon::hull(&self.points())
    }
}

fn rayleigh(m: &CMat, u: &CMat, col: usize) -> f64 {
    let v = u.column(col);
    v.dotc(&(m * v)).re
}

/// Samples `C(A)` on `theta_count` equally spaced angles in `[0, pi)`.
pub fn boundary_curve(a: &MatrixTuple, theta_count: usize) -> Result<BoundaryCurve> {
    check_pair(a)?;
    if theta_count < 4 {
        return Err(Error::InvalidInput("theta_count must be at least 4".into()));
    }
    let nn = a.dim();
    let scale = a.norm().max(1.0);
    let mut samples = Vec::with_capacity(theta_count * nn);
    let mut prev: Option<CMat> = None;
    for i in 0..theta_count {
        let theta = PI * i as f64 / theta_count as f64;
        let (c, s) = (theta.cos(), theta.sin());
        let (vals, vecs) = pencil_branches(a, theta);
        let deriv = a.matrix(0) * c64(-s, 0.0) + a.matrix(1) * c64(c, 0.0);
        // branch k of this step takes sorted eigenpair order[k]
        let order = match &prev {
            Some(p) => match_branches(p, &vecs),
            None => (0..nn).collect(),
        };
        let mut matched = CMat::zeros(nn, nn);
        for (k, &j) in order.iter().enumerate() {
            matched.set_column(k, &vecs.column(j));
            let lambda = vals[j];
            let dl = rayleigh(&deriv, &vecs, j);
            let point = [lambda * c - dl * s, lambda * s + dl * c];
            let rp = [rayleigh(a.matrix(0), &vecs, j), rayleigh(a.matrix(1), &vecs, j)];
            let gap = vals
                .iter()
                .enumerate()
                .filter(|&(q, _)| q != j)
                .map(|(_, v)| (v - lambda).abs())
                .fold(f64::INFINITY, f64::min);
            samples.push(CurveSample {
                theta,
                branch: k,
                eigenvalue: lambda,
                point,
                rayleigh_point: rp,
                tangent: [c, s, -lambda],
                crossing: gap < CROSSING_GAP * scale,
            });
        }
        prev = Some(matched);
    }
    Ok(BoundaryCurve {
        theta_count,
        branches: nn,
        samples,
    })
}

/// Greedy eigenvector-overlap matching; falls back to sorted order when
/// some branch has no clear continuation.
fn match_branches(prev: &CMat, vecs: &CMat) -> Vec<usize> {
    let nn = prev.ncols();
    let mut taken = vec![false; nn];
    let mut order = vec![0; nn];
    let overlaps = prev.adjoint() * vecs;
    for k in 0..nn {
        let mut best = (0usize, -1.0f64);
        for j in 0..nn {
            let o = overlaps[(k, j)].norm();
            if !taken[j] && o > best.1 {
                best = (j, o);
            }
        }
        if best.1 < OVERLAP_MIN {
            return (0..nn).collect();
        }
        taken[best.0] = true;
        order[k] = best.0;
    }
    order
}

/// Outer polygon `{x : <x, s_k> <= h(s_k)}` over `direction_count` directions.
pub fn numerical_range_hull(a: &MatrixTuple, direction_count: usize) -> Result<ConvexPolygon> {
    check_pair(a)?;
    if direction_count < 3 {
        return Err(Error::InvalidInput("need at least 3 directions".into()));
    }
    let mut normals = Vec::with_capacity(direction_count);
    let mut offsets = Vec::with_capacity(direction_count);
    for k in 0..direction_count {
        let t = 2.0 * PI * k as f64 / direction_count as f64;
        let s = [t.cos(), t.sin()];
        offsets.push(support_function(a, &s)?);
        normals.push(s);
    }
    Ok(ConvexPolygon::from_half_planes(&normals, &offsets))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum WaveFrontShape {
    /// Simple zero: the dual point of the tangent line.
    Point(Point2),
    /// Double zero whose localisation splits into two real lines
    /// `zeta_0 + <b_i, zeta>`: the segment `co{b_1, b_2}`.
    Segment(Point2, Point2),
    /// Higher-order zero the heuristic could not resolve.
    Unresolved,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WaveFrontPiece {
    /// Unit vector `xi` on the real zero set of `P^A`.
    pub direction: [f64; 3],
    pub multiplicity: usize,
    pub shape: WaveFrontShape,
}

/// Eigenvalue crossing of `A(theta)` located by minimising the gap.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Crossing {
    pub theta: f64,
    pub eigenvalue: f64,
    pub gap: f64,
}

fn gap_at(a: &MatrixTuple, theta: f64, k: usize) -> (f64, f64) {
    let (vals, _) = pencil_branches(a, theta);
    (vals[k + 1] - vals[k], 0.5 * (vals[k + 1] + vals[k]))
}

/// Finds angles in `[0, pi)` where two eigenvalues of `A(theta)` coincide.
pub fn find_crossings(a: &MatrixTuple, theta_count: usize) -> Result<Vec<Crossing>> {
    check_pair(a)?;
    let nn = a.dim();
    let scale = a.norm().max(1.0);
    let step = PI / theta_count as f64;
    let mut out = Vec::new();
    for k in 0..nn.saturating_sub(1) {
        let gaps: Vec<f64> = (0..=theta_count + 1)
            .map(|i| gap_at(a, (i as f64 - 1.0) * step, k).0)
            .collect();
        for i in 1..=theta_count {
            if gaps[i] > gaps[i - 1] || gaps[i] > gaps[i + 1] {
                continue;
            }
            // golden-section search on the bracketing interval
            let (mut lo, mut hi) = ((i as f64 - 2.0) * step, i as f64 * step);
            let g = 0.5 * (5f64.sqrt() - 1.0);
            let mut x1 = hi - g * (hi - lo);
            let mut x2 = lo + g * (hi - lo);
            let (mut f1, mut f2) = (gap_at(a, x1, k).0, gap_at(a, x2, k).0);
            for _ in 0..200 {
                if f1 < f2 {
                    hi = x2;
                    x2 = x1;
                    f2 = f1;
                    x1 = hi - g * (hi - lo);
                    f1 = gap_at(a, x1, k).0;
                } else {
                    lo = x1;
                    x1 = x2;
                    f1 = f2;
                    x2 = lo + g * (hi - lo);
                    f2 = gap_at(a, x2, k).0;
                }
                if hi - lo < 1e-15 {
                    break;
                }
            }
            let theta = 0.5 * (lo + hi);
            let (gap, eigenvalue) = gap_at(a, theta, k);
            if gap < 1e-8 * scale {
                // A(theta + pi) = -A(theta): the same line seen from both ends
                let dup = out.iter().any(|c: &Crossing| {
                    let d = (c.theta - theta).abs();
                    (d < 2.0 * step && (c.eigenvalue - eigenvalue).abs() < 1e-6 * scale)
                        || ((d - PI).abs() < 2.0 * step
                            && (c.eigenvalue + eigenvalue).abs() < 1e-6 * scale)
                });
                if !dup {
                    out.push(Crossing {
                        theta,
                        eigenvalue,
                        gap,
                    });
                }
            }
        }
    }
    Ok(out)
}

/// Quadratic form `q(zeta) = P^A_xi(zeta)` recovered by polarisation.
fn localised_quadratic(loc: &Localisation) -> Result<Matrix3<f64>> {
    let e = |i: usize| {
        let mut v = [0.0; 3];
        v[i] = 1.0;
        v
    };
    let mut q = Matrix3::zeros();
    for i in 0..3 {
        q[(i, i)] = loc.eval(&e(i))?.re;
    }
    for i in 0..3 {
        for j in i + 1..3 {
            let mut v = e(i);
            v[j] = 1.0;
            let s = loc.eval(&v)?.re;
            q[(i, j)] = 0.5 * (s - q[(i, i)] - q[(j, j)]);
            q[(j, i)] = q[(i, j)];
        }
    }
    Ok(q)
}

const SPLIT_DISCRIMINANT: f64 = 1e-8;

/// Splits a rank-2 indefinite form into `(zeta_0 + <b_1, .>)(zeta_0 + <b_2, .>)`.
fn split_quadratic(q: &Matrix3<f64>) -> Option<(Point2, Point2)> {
    let eig = SymmetricEigen::new(*q);
    let mut idx = [0usize, 1, 2];
    idx.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let (lm, l0, lp) = (
        eig.eigenvalues[idx[0]],
        eig.eigenvalues[idx[1]],
        eig.eigenvalues[idx[2]],
    );
    let big = lm.abs().max(lp.abs());
    if big == 0.0 || l0.abs() > 1e-6 * big || -lm * lp / (big * big) <= SPLIT_DISCRIMINANT {
        return None;
    }
    let vm: Vector3<f64> = eig.eigenvectors.column(idx[0]).into();
    let vp: Vector3<f64> = eig.eigenvectors.column(idx[2]).into();
    let w1 = vp * lp.sqrt() - vm * (-lm).sqrt();
    let w2 = vp * lp.sqrt() + vm * (-lm).sqrt();
    let dual = |w: Vector3<f64>| {
        if w[0].abs() < 1e-12 * w.norm() {
            None
        } else {
            Some([w[1] / w[0], w[2] / w[0]])
        }
    };
    Some((dual(w1)?, dual(w2)?))
}

/// Wave front of a hermitian pair: dual points of simple tangent lines and
/// segments spanned at double tangent lines.
pub fn wave_front(a: &MatrixTuple, theta_count: usize) -> Result<Vec<WaveFrontPiece>> {
    let curve = boundary_curve(a, theta_count)?;
    let mut pieces: Vec<WaveFrontPiece> = curve
        .samples
        .iter()
        .filter(|s| !s.crossing)
        .map(|s| {
            let [c, d, mu] = s.tangent;
            let r = (c * c + d * d + mu * mu).sqrt();
            WaveFrontPiece {
                direction: [mu / r, c / r, d / r],
                multiplicity: 1,
                shape: WaveFrontShape::Point(s.point),
            }
        })
        .collect();
    for cr in find_crossings(a, theta_count)? {
        let (c, d, mu) = (cr.theta.cos(), cr.theta.sin(), -cr.eigenvalue);
        let r = (c * c + d * d + mu * mu).sqrt();
        let xi = [mu / r, c / r, d / r];
        let loc = Localisation::new(a, &xi)?;
        let shape = if loc.multiplicity() == 2 {
            match split_quadratic(&localised_quadratic(&loc)?) {
                Some((b1, b2)) => WaveFrontShape::Segment(b1, b2),
                None => WaveFrontShape::Unresolved,
            }
        } else {
            WaveFrontShape::Unresolved
        };
        pieces.push(WaveFrontPiece {
            direction: xi,
            multiplicity: loc.multiplicity(),
            shape,
        });
    }
    Ok(pieces)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Lacuna {
    /// Grid indices `(i, j)` of the component's cells.
    pub cells: Vec<(usize, usize)>,
    pub area: f64,
    pub centroid: Point2,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LacunaReport {
    pub lacunas: Vec<Lacuna>,
    /// Classification per grid point, row-major in `(i, j)`; `None` for
    /// points outside the shrunken hull, which are not scanned.
    pub classes: Vec<Option<Classification>>,
    pub inside_hull: Vec<bool>,
}

/// Connected regions strictly inside the numerical-range hull where the jump
/// of `G_x(A)` vanishes. Components with fewer than `min_cells` cells are
/// discarded as noise.
pub fn lacuna_detect(
    a: &MatrixTuple,
    grid: &ScanGrid,
    schedule: &JumpSchedule,
    min_cells: usize,
) -> Result<LacunaReport> {
    check_pair(a)?;
    if grid.dims() != 2 {
        return Err(Error::DimensionMismatch("lacuna grid must be 2-D".into()));
    }
    let hull = numerical_range_hull(a, 512)?;
    let (nx, ny) = (grid.axes[0].count, grid.axes[1].count);
    let (hx, hy) = (grid.axes[0].step(), grid.axes[1].step());
    let margin = 2.0 * hx.max(hy);
    let inside: Vec<bool> = (0..nx * ny)
        .map(|k| {
            let p = grid.point(k);
            hull.signed_distance([p[0], p[1]]) < -margin
        })
        .collect();
    let scan = scan_points(a, grid, schedule, &inside)?;
    let classes: Vec<Option<Classification>> = (0..nx * ny)
        .map(|k| inside[k].then_some(scan.points[k].classification))
        .collect();
    let flag: Vec<bool> = classes
        .iter()
        .map(|c| *c == Some(Classification::Vanishing))
        .collect();
    let mut seen = vec![false; nx * ny];
    let mut lacunas = Vec::new();
    for start in 0..nx * ny {
        if !flag[start] || seen[start] {
            continue;
        }
        let mut stack = vec![start];
        seen[start] = true;
        let mut cells = Vec::new();
        while let Some(k) = stack.pop() {
            let (i, j) = (k / ny, k % ny);
            cells.push((i, j));
            let mut push = |ii: usize, jj: usize| {
                let q = ii * ny + jj;
                if flag[q] && !seen[q] {
                    seen[q] = true;
                    stack.push(q);
                }
            };
            if i > 0 {
                push(i - 1, j);
            }
            if i + 1 < nx {
                push(i + 1, j);
            }
            if j > 0 {
                push(i, j - 1);
            }
            if j + 1 < ny {
                push(i, j + 1);
            }
        }
        if cells.len() < min_cells {
            continue;
        }
        let m = cells.len() as f64;
        let centroid = cells.iter().fold([0.0, 0.0], |acc, &(i, j)| {
            let p = grid.point(i * ny + j);
            [acc[0] + p[0] / m, acc[1] + p[1] / m]
        });
        lacunas.push(Lacuna {
            area: m * hx * hy,
            cells,
            centroid,
        });
    }
    lacunas.sort_by(|a, b| b.area.total_cmp(&a.area));
    Ok(LacunaReport {
        lacunas,
        classes,
        inside_hull: inside,
    })
}
