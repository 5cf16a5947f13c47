use crate::error::{Error, Result};
use crate::linalg;

/// `n` sample points in `R^d`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    dim: usize,
    coords: Vec<f64>,
}

impl PointCloud {
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self> {
        let first = points
            .first()
            .ok_or_else(|| Error::InvalidInput("point cloud is empty".into()))?;
        let dim = first.len();
        if dim == 0 {
            return Err(Error::InvalidInput(
                "points must have dimension >= 1".into(),
            ));
        }
        let mut coords = Vec::with_capacity(points.len() * dim);
        for p in &points {
            if p.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: p.len(),
                });
            }
            if p.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidInput("non-finite coordinate".into()));
            }
            coords.extend_from_slice(p);
        }
        Ok(Self { dim, coords })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    pub fn to_vecs(&self) -> Vec<Vec<f64>> {
        self.points().map(<[f64]>::to_vec).collect()
    }

    pub fn centroid(&self) -> Vec<f64> {
        let n = self.len() as f64;
        let mut c = vec![0.0; self.dim];
        for p in self.points() {
            for (ci, pi) in c.iter_mut().zip(p) {
                *ci += pi / n;
            }
        }
        c
    }

    /// Coordinate-wise median (lower-upper average for even counts).
    pub fn coordinate_median(&self) -> Vec<f64> {
        (0..self.dim)
            .map(|k| {
                let mut col: Vec<f64> = self.points().map(|p| p[k]).collect();
                col.sort_by(f64::total_cmp);
                let n = col.len();
                if n % 2 == 1 {
                    col[n / 2]
                } else {
                    0.5 * (col[n / 2 - 1] + col[n / 2])
                }
            })
            .collect()
    }

    /// Axis-aligned bounding box as `(lower, upper)`.
    pub fn bounds(&self) -> (Vec<f64>, Vec<f64>) {
        let mut lo = vec![f64::INFINITY; self.dim];
        let mut hi = vec![f64::NEG_INFINITY; self.dim];
        for p in self.points() {
            for k in 0..self.dim {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        (lo, hi)
    }

    /// Root-mean-square distance to the centroid; a length scale for the cloud.
    pub fn spread(&self) -> f64 {
        let c = self.centroid();
        let ms = self
            .points()
            .map(|p| {
                let d = linalg::dist(p, &c);
                d * d
            })
            .sum::<f64>()
            / self.len() as f64;
        ms.sqrt()
    }

    /// Dimension of the affine hull of the points.
    pub fn affine_dim(&self) -> usize {
        let base = self.point(0);
        let diffs: Vec<Vec<f64>> = self
            .points()
            .skip(1)
            .map(|p| p.iter().zip(base).map(|(a, b)| a - b).collect())
            .collect();
        let rows: Vec<&[f64]> = diffs.iter().map(Vec::as_slice).collect();
        linalg::rank_of_rows(&rows, self.dim)
    }

    /// Applies `x -> f(x)` to every point.
    pub fn map(&self, f: impl Fn(&[f64]) -> Vec<f64>) -> Result<Self> {
        Self::new(self.points().map(f).collect())
    }

    pub(crate) fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: x.len(),
            });
        }
        Ok(())
    }
}
