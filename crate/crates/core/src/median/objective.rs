//! Size functionals of the discrepancy zonotope `Z(x)` as functions of `x`.

use rayon::prelude::*;

use crate::ball::unit_sphere_area;
use crate::cloud::PointCloud;
use crate::direction::Direction;
use crate::error::{Error, Result};
use crate::linalg;
use crate::rng;
use crate::zonotope::{McEstimate, Zonotope};

/// `V_j(Z(x))`: for `j = 1` the sum of distances, for `j = d` the sum of
/// `|det(x - x_{i_1}, ..., x - x_{i_d})|` over `d`-subsets.
pub fn vj_objective(x: &[f64], cloud: &PointCloud, j: usize) -> Result<f64> {
    if j == 0 || j > cloud.dim() {
        return Err(Error::InvalidInput(format!(
            "objective index j must satisfy 1 <= j <= d = {}, got {j}",
            cloud.dim()
        )));
    }
    Ok(Zonotope::discrepancy(x, cloud)?.intrinsic_volume(j))
}

/// Wills functional `W(Z(x)) = 1 + sum_j V_j(Z(x))`.
pub fn wills_objective(x: &[f64], cloud: &PointCloud) -> Result<f64> {
    Ok(Zonotope::discrepancy(x, cloud)?.wills_functional())
}

fn check_polar_span(x: &[f64], cloud: &PointCloud) -> Result<()> {
    let diffs: Vec<Vec<f64>> = cloud
        .points()
        .map(|p| x.iter().zip(p).map(|(a, b)| a - b).collect())
        .collect();
    let rows: Vec<&[f64]> = diffs.iter().map(Vec::as_slice).collect();
    if linalg::rank_of_rows(&rows, cloud.dim()) < cloud.dim() {
        return Err(Error::DivergentPolar { dim: cloud.dim() });
    }
    Ok(())
}

#[inline]
fn polar_integrand(u: &[f64], x: &[f64], cloud: &PointCloud) -> f64 {
    let h: f64 = cloud
        .points()
        .map(|p| {
            u.iter()
                .zip(x.iter().zip(p))
                .map(|(ui, (xi, pi))| ui * (xi - pi))
                .sum::<f64>()
                .abs()
        })
        .sum();
    h.powi(-(cloud.dim() as i32))
}

/// Monte Carlo estimate of `int_{S^{d-1}} (sum_i |<u, x - x_i>|)^{-d} du`
/// with uniform random directions.
pub fn polar_objective(
    x: &[f64],
    cloud: &PointCloud,
    sphere_samples: usize,
    seed: u64,
) -> Result<McEstimate> {
    cloud.check_point(x)?;
    check_polar_span(x, cloud)?;
    if sphere_samples == 0 {
        return Err(Error::InvalidInput("sphere_samples must be >= 1".into()));
    }
    let d = cloud.dim();
    let area = unit_sphere_area(d);
    const CHUNK: usize = 4096;
    let chunks = sphere_samples.div_ceil(CHUNK);
    let partial: Vec<(f64, f64)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut r = rng::stream(seed, c as u64);
            let count = CHUNK.min(sphere_samples - c * CHUNK);
            (0..count).fold((0.0, 0.0), |(s1, s2), _| {
                let u = Direction::random(d, &mut r);
                let f = area * polar_integrand(u.as_slice(), x, cloud);
                (s1 + f, s2 + f * f)
            })
        })
        .collect();
    Ok(crate::zonotope::finish_mean(&partial, sphere_samples))
}

/// Fixed quadrature directions on `S^{d-1}` with equal weights.
///
/// Equal-angle for `d = 2`, Fibonacci lattice for `d = 3`, seeded uniform
/// draws otherwise (and the pair `{-1, 1}` for `d = 1`).
#[derive(Debug, Clone)]
pub struct DirectionSet {
    dim: usize,
    dirs: Vec<f64>,
}

impl DirectionSet {
    pub fn new(dim: usize, count: usize, seed: u64) -> Self {
        let count = count.max(2);
        let dirs = match dim {
            1 => vec![1.0, -1.0],
            2 => (0..count)
                .flat_map(|k| {
                    let t = 2.0 * std::f64::consts::PI * (k as f64 + 0.5) / count as f64;
                    [t.cos(), t.sin()]
                })
                .collect(),
            3 => {
                let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
                (0..count)
                    .flat_map(|k| {
                        let z = 1.0 - 2.0 * (k as f64 + 0.5) / count as f64;
                        let r = (1.0 - z * z).sqrt();
                        let phi = golden * k as f64;
                        [r * phi.cos(), r * phi.sin(), z]
                    })
                    .collect()
            }
            _ => {
                let mut r = rng::seeded(seed);
                (0..count)
                    .flat_map(|_| Direction::random(dim, &mut r).as_slice().to_vec())
                    .collect()
            }
        };
        Self { dim, dirs }
    }

    pub fn len(&self) -> usize {
        self.dirs.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.dirs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.dirs.chunks_exact(self.dim)
    }

    /// Deterministic surrogate of the polar integral at `x`.
    pub fn polar_surrogate(&self, x: &[f64], cloud: &PointCloud) -> f64 {
        let area = unit_sphere_area(self.dim);
        let sum: f64 = self.iter().map(|u| polar_integrand(u, x, cloud)).sum();
        area * sum / self.len() as f64
    }
}

/// One `|a . x + b|` term of the V_d objective: `det(x - p_1, ..., x - p_d)`
/// is affine in `x`.
#[derive(Debug, Clone)]
pub(crate) struct AffineTerm {
    pub a: Vec<f64>,
    pub b: f64,
}

impl AffineTerm {
    #[inline]
    pub fn eval(&self, x: &[f64]) -> f64 {
        linalg::dot(&self.a, x) + self.b
    }
}

/// Determinant by Gaussian elimination with partial pivoting (row-major `n x n`).
pub(crate) fn small_det(mut m: Vec<f64>, n: usize) -> f64 {
    let mut det = 1.0;
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&a, &b| m[a * n + col].abs().total_cmp(&m[b * n + col].abs()))
            .unwrap();
        if m[piv * n + col] == 0.0 {
            return 0.0;
        }
        if piv != col {
            for k in 0..n {
                m.swap(piv * n + k, col * n + k);
            }
            det = -det;
        }
        let p = m[col * n + col];
        det *= p;
        for r in col + 1..n {
            let f = m[r * n + col] / p;
            if f != 0.0 {
                for k in col..n {
                    m[r * n + k] -= f * m[col * n + k];
                }
            }
        }
    }
    det
}

/// Affine forms of all `d`-subset determinants, from the cofactor expansion of
/// `det [[1, 1, ..., 1], [x, p_1, ..., p_d]]` along its first column.
pub(crate) fn oja_terms(cloud: &PointCloud) -> Vec<AffineTerm> {
    let d = cloud.dim();
    let mut terms = Vec::new();
    linalg::for_each_combination(cloud.len(), d, |s| {
        // (d+1) x d matrix Q: row 0 all ones, row r+1 = coordinate r of each point.
        let q = |row: usize, col: usize| {
            if row == 0 {
                1.0
            } else {
                cloud.point(s[col])[row - 1]
            }
        };
        let minor = |skip: usize| {
            let mut m = Vec::with_capacity(d * d);
            for row in (0..=d).filter(|&r| r != skip) {
                for col in 0..d {
                    m.push(q(row, col));
                }
            }
            small_det(m, d)
        };
        let b = minor(0);
        let a = (1..=d)
            .map(|k| if k % 2 == 1 { -minor(k) } else { minor(k) })
            .collect();
        terms.push(AffineTerm { a, b });
    });
    terms
}
