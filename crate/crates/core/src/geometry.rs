//! Convex polygons in the plane: hulls, half-plane clipping, Hausdorff
//! distance.

pub type Point2 = [f64; 2];

fn cross(o: Point2, a: Point2, b: Point2) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Convex polygon with counter-clockwise vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexPolygon {
    vertices: Vec<Point2>,
}

impl ConvexPolygon {
    /// Convex hull of a point cloud (monotone chain).
    pub fn hull(points: &[Point2]) -> Self {
        let mut p: Vec<Point2> = points
            .iter()
            .copied()
            .filter(|q| q[0].is_finite() && q[1].is_finite())
            .collect();
        p.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
        p.dedup();
        if p.len() < 3 {
            return Self { vertices: p };
        }
        let mut lower: Vec<Point2> = Vec::new();
        for &q in &p {
            while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], q) <= 0.0 {
                lower.pop();
            }
            lower.push(q);
        }
        let mut upper: Vec<Point2> = Vec::new();
        for &q in p.iter().rev() {
            while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], q) <= 0.0 {
                upper.pop();
            }
            upper.push(q);
        }
        lower.pop();
        upper.pop();
        lower.extend(upper);
        Self { vertices: lower }
    }

    /// Intersection of the half-planes `<x, s_k> <= h_k`.
    pub fn from_half_planes(normals: &[Point2], offsets: &[f64]) -> Self {
        let big = offsets.iter().fold(1.0f64, |m, h| m.max(h.abs())) * 4.0 + 1.0;
        let mut poly = vec![[-big, -big], [big, -big], [big, big], [-big, big]];
        for (s, &h) in normals.iter().zip(offsets) {
            poly = clip(&poly, *s, h);
            if poly.is_empty() {
                break;
            }
        }
        Self { vertices: poly }
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn area(&self) -> f64 {
        let v = &self.vertices;
        if v.len() < 3 {
            return 0.0;
        }
        0.5 * (0..v.len())
            .map(|i| {
                let (a, b) = (v[i], v[(i + 1) % v.len()]);
                a[0] * b[1] - a[1] * b[0]
            })
            .sum::<f64>()
    }

    /// Signed distance: negative inside, positive outside.
    pub fn signed_distance(&self, p: Point2) -> f64 {
        let v = &self.vertices;
        match v.len() {
            0 => f64::INFINITY,
            1 => dist(p, v[0]),
            _ => {
                let mut d = f64::INFINITY;
                let mut inside = v.len() >= 3;
                for i in 0..v.len() {
                    let (a, b) = (v[i], v[(i + 1) % v.len()]);
                    d = d.min(segment_distance(p, a, b));
                    if cross(a, b, p) < 0.0 {
                        inside = false;
                    }
                }
                if inside {
                    -d
                } else {
                    d
                }
            }
        }
    }

    pub fn contains(&self, p: Point2, tol: f64) -> bool {
        self.signed_distance(p) <= tol
    }

    /// Hausdorff distance between two convex polygons. Attained at vertices
    /// because the distance to a convex set is a convex function.
    pub fn hausdorff(&self, other: &Self) -> f64 {
        let one = |a: &Self, b: &Self| {
            a.vertices
                .iter()
                .map(|&p| b.signed_distance(p).max(0.0))
                .fold(0.0, f64::max)
        };
        one(self, other).max(one(other, self))
    }
}

fn clip(poly: &[Point2], s: Point2, h: f64) -> Vec<Point2> {
    let f = |p: Point2| p[0] * s[0] + p[1] * s[1] - h;
    let mut out = Vec::with_capacity(poly.len() + 1);
    for i in 0..poly.len() {
        let (a, b) = (poly[i], poly[(i + 1) % poly.len()]);
        let (fa, fb) = (f(a), f(b));
        if fa <= 0.0 {
            out.push(a);
        }
        if (fa < 0.0 && fb > 0.0) || (fa > 0.0 && fb < 0.0) {
            let t = fa / (fa - fb);
            out.push([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]);
        }
    }
    out
}

pub fn dist(a: Point2, b: Point2) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

pub fn segment_distance(p: Point2, a: Point2, b: Point2) -> f64 {
    let ab = [b[0] - a[0], b[1] - a[1]];
    let len2 = ab[0] * ab[0] + ab[1] * ab[1];
    if len2 == 0.0 {
        return dist(p, a);
    }
    let t = (((p[0] - a[0]) * ab[0] + (p[1] - a[1]) * ab[1]) / len2).clamp(0.0, 1.0);
    dist(p, [a[0] + t * ab[0], a[1] + t * ab[1]])
}
