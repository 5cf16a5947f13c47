//! Convex polygons in the plane.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Point2 = [f64; 2];

#[inline]
fn cross(o: Point2, a: Point2, b: Point2) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

#[inline]
fn sub(a: Point2, b: Point2) -> Point2 {
    [a[0] - b[0], a[1] - b[1]]
}

#[inline]
fn len(a: Point2) -> f64 {
    a[0].hypot(a[1])
}

/// Strictly convex polygon with counter-clockwise vertices, treated cyclically.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PolygonJson", into = "PolygonJson")]
pub struct ConvexPolygon2D {
    vertices: Vec<Point2>,
}

/// JSON form: `{"vertices": [[x, y], ...]}`.
#[derive(Serialize, Deserialize)]
struct PolygonJson {
    vertices: Vec<Point2>,
}

impl TryFrom<PolygonJson> for ConvexPolygon2D {
    type Error = Error;
    fn try_from(j: PolygonJson) -> Result<Self> {
        ConvexPolygon2D::new(j.vertices)
    }
}

impl From<ConvexPolygon2D> for PolygonJson {
    fn from(p: ConvexPolygon2D) -> Self {
        PolygonJson {
            vertices: p.vertices,
        }
    }
}

impl ConvexPolygon2D {
    /// Validates a CCW, strictly convex vertex list.
    pub fn new(vertices: Vec<Point2>) -> Result<Self> {
        let n = vertices.len();
        if n < 3 {
            return Err(Error::DegeneratePolygon);
        }
        if vertices.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("non-finite polygon vertex".into()));
        }
        for i in 0..n {
            let c = cross(vertices[i], vertices[(i + 1) % n], vertices[(i + 2) % n]);
            if c <= 0.0 {
                return Err(Error::InvalidInput(format!(
                    "vertices are not strictly convex counter-clockwise at index {}",
                    (i + 1) % n
                )));
            }
        }
        Ok(Self { vertices })
    }

    /// Builds a polygon from the boundary of a convex region listed in cyclic
    /// order (either orientation), dropping repeated and collinear vertices.
    pub fn from_cyclic_boundary(points: &[Point2]) -> Result<Self> {
        let scale = points
            .iter()
            .map(|p| p[0].abs().max(p[1].abs()))
            .fold(0.0, f64::max);
        if scale == 0.0 {
            return Err(Error::DegeneratePolygon);
        }
        let eps = 1e-12 * scale;
        let mut pts: Vec<Point2> = Vec::with_capacity(points.len());
        for &p in points {
            if pts.last().is_none_or(|q: &Point2| len(sub(p, *q)) > eps) {
                pts.push(p);
            }
        }
        while pts.len() > 1 && len(sub(pts[0], *pts.last().unwrap())) <= eps {
            pts.pop();
        }
        let signed: f64 = (0..pts.len())
            .map(|i| {
                let (a, b) = (pts[i], pts[(i + 1) % pts.len()]);
                a[0] * b[1] - a[1] * b[0]
            })
            .sum();
        if signed < 0.0 {
            pts.reverse();
        }
        // Drop collinear vertices until none remain.
        let area_eps = 1e-12 * scale * scale;
        loop {
            let n = pts.len();
            if n < 3 {
                return Err(Error::DegeneratePolygon);
            }
            let drop =
                (0..n).find(|&i| cross(pts[(i + n - 1) % n], pts[i], pts[(i + 1) % n]) <= area_eps);
            match drop {
                Some(i) => {
                    pts.remove(i);
                }
                None => break,
            }
        }
        Self::new(pts)
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    fn edges(&self) -> impl Iterator<Item = (Point2, Point2)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    pub fn area(&self) -> f64 {
        0.5 * self
            .edges()
            .map(|(a, b)| a[0] * b[1] - a[1] * b[0])
            .sum::<f64>()
    }

    pub fn perimeter(&self) -> f64 {
        self.edges().map(|(a, b)| len(sub(b, a))).sum()
    }

    pub fn centroid(&self) -> Point2 {
        let a = self.area();
        let (mut cx, mut cy) = (0.0, 0.0);
        for (p, q) in self.edges() {
            let w = p[0] * q[1] - q[0] * p[1];
            cx += (p[0] + q[0]) * w;
            cy += (p[1] + q[1]) * w;
        }
        [cx / (6.0 * a), cy / (6.0 * a)]
    }

    pub fn diameter(&self) -> f64 {
        let v = &self.vertices;
        let mut best = 0.0_f64;
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                best = best.max(len(sub(v[i], v[j])));
            }
        }
        best
    }

    pub fn bounding_box(&self) -> (Point2, Point2) {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for v in &self.vertices {
            for k in 0..2 {
                lo[k] = lo[k].min(v[k]);
                hi[k] = hi[k].max(v[k]);
            }
        }
        (lo, hi)
    }

    pub fn contains(&self, y: Point2) -> bool {
        self.edges().all(|(a, b)| cross(a, b, y) >= 0.0)
    }

    /// Euclidean distance from `y` to the polygon (zero inside).
    pub fn distance(&self, y: Point2) -> f64 {
        if self.contains(y) {
            return 0.0;
        }
        self.edges()
            .map(|(a, b)| point_segment_distance(y, a, b))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn translated(&self, t: Point2) -> Self {
        Self {
            vertices: self
                .vertices
                .iter()
                .map(|v| [v[0] + t[0], v[1] + t[1]])
                .collect(),
        }
    }

    /// Parameter interval `[s_min, s_max]` of the line `origin + s * dir`
    /// inside the polygon, or `None` if the line misses it. `dir` need not be
    /// unit; the interval is in units of `dir`.
    pub fn line_interval(&self, origin: Point2, dir: Point2) -> Option<(f64, f64)> {
        let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
        for (a, b) in self.edges() {
            // Inside half-plane: cross(a, b, p) >= 0, affine in s.
            let c0 = cross(a, b, origin);
            let e = sub(b, a);
            let slope = e[0] * dir[1] - e[1] * dir[0];
            if slope.abs() < 1e-300 {
                if c0 < 0.0 {
                    return None;
                }
            } else {
                let s = -c0 / slope;
                if slope > 0.0 {
                    lo = lo.max(s);
                } else {
                    hi = hi.min(s);
                }
            }
        }
        (lo <= hi).then_some((lo, hi))
    }

    /// Area of the intersection with the axis-aligned rectangle `[lo, hi]`.
    pub fn clipped_area(&self, lo: Point2, hi: Point2) -> f64 {
        let mut poly = self.vertices.clone();
        // (axis, bound, keep_greater)
        let planes = [
            (0, lo[0], true),
            (0, hi[0], false),
            (1, lo[1], true),
            (1, hi[1], false),
        ];
        for (axis, bound, greater) in planes {
            if poly.is_empty() {
                return 0.0;
            }
            let inside = |p: &Point2| {
                if greater {
                    p[axis] >= bound
                } else {
                    p[axis] <= bound
                }
            };
            let mut out = Vec::with_capacity(poly.len() + 2);
            for i in 0..poly.len() {
                let cur = poly[i];
                let prev = poly[(i + poly.len() - 1) % poly.len()];
                let (ci, pi) = (inside(&cur), inside(&prev));
                if ci != pi {
                    let t = (bound - prev[axis]) / (cur[axis] - prev[axis]);
                    out.push([
                        prev[0] + t * (cur[0] - prev[0]),
                        prev[1] + t * (cur[1] - prev[1]),
                    ]);
                }
                if ci {
                    out.push(cur);
                }
            }
            poly = out;
        }
        if poly.len() < 3 {
            return 0.0;
        }
        let n = poly.len();
        0.5 * (0..n)
            .map(|i| {
                let (a, b) = (poly[i], poly[(i + 1) % n]);
                a[0] * b[1] - a[1] * b[0]
            })
            .sum::<f64>()
    }

    pub fn unit_square() -> Self {
        Self::new(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).unwrap()
    }
}

fn point_segment_distance(y: Point2, a: Point2, b: Point2) -> f64 {
    let ab = sub(b, a);
    let ay = sub(y, a);
    let denom = ab[0] * ab[0] + ab[1] * ab[1];
    let t = if denom > 0.0 {
        ((ay[0] * ab[0] + ay[1] * ab[1]) / denom).clamp(0.0, 1.0)
    } else {
        0.0
    };
    len([ay[0] - t * ab[0], ay[1] - t * ab[1]])
}
