//! Zonotopes (Minkowski sums of segments) and their intrinsic volumes.
//!
//! A zonotope here is the point set `center + sum_i [-g_i / 2, g_i / 2]`.
//! Every size functional below is translation invariant, so the placement of
//! each segment (`[0, g_i]` versus the centred form) only matters for the
//! explicit 2D polygon.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ball::unit_ball_volume;
use crate::cloud::PointCloud;
use crate::error::{Error, Result};
use crate::linalg::{self, KahanSum};
use crate::polygon::ConvexPolygon2D;
use crate::rng;

/// Subset counts above this use compensated summation.
const KAHAN_THRESHOLD: f64 = 1e4;
const MC_CHUNK: usize = 4096;

#[derive(Debug, Clone, PartialEq)]
pub struct Zonotope {
    dim: usize,
    generators: Vec<f64>,
    center: Vec<f64>,
}

/// Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub samples: usize,
}

impl McEstimate {
    /// Number of standard errors separating the estimate from `exact`.
    pub fn z_score(&self, exact: f64) -> f64 {
        if self.std_error == 0.0 {
            if self.estimate == exact {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            (self.estimate - exact).abs() / self.std_error
        }
    }
}

impl Zonotope {
    /// Zonotope centred at the origin.
    pub fn new(dim: usize, generators: Vec<Vec<f64>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput(
                "zonotope dimension must be >= 1".into(),
            ));
        }
        let mut flat = Vec::with_capacity(generators.len() * dim);
        for g in &generators {
            if g.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: g.len(),
                });
            }
            if g.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidInput("non-finite generator".into()));
            }
            flat.extend_from_slice(g);
        }
        Ok(Self {
            dim,
            generators: flat,
            center: vec![0.0; dim],
        })
    }

    pub fn with_center(mut self, center: Vec<f64>) -> Result<Self> {
        if center.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: center.len(),
            });
        }
        self.center = center;
        Ok(self)
    }

    /// The discrepancy zonotope `Z(x)`: one segment per sample point with
    /// generator `x - x_i`, centred at the origin.
    pub fn discrepancy(x: &[f64], cloud: &PointCloud) -> Result<Self> {
        cloud.check_point(x)?;
        let dim = cloud.dim();
        let mut generators = Vec::with_capacity(cloud.len() * dim);
        for p in cloud.points() {
            generators.extend(x.iter().zip(p).map(|(a, b)| a - b));
        }
        Ok(Self {
            dim,
            generators,
            center: vec![0.0; dim],
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_generators(&self) -> usize {
        self.generators.len() / self.dim
    }

    pub fn generator(&self, i: usize) -> &[f64] {
        &self.generators[i * self.dim..(i + 1) * self.dim]
    }

    pub fn generators(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.generators.chunks_exact(self.dim)
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            dim: self.dim,
            generators: self.generators.iter().map(|g| g * s).collect(),
            center: self.center.clone(),
        }
    }

    /// `V_j`: sum over `j`-subsets of generators of the `j`-volume of the
    /// parallelotope they span. `V_0 = 1`; `V_j = 0` for `j > d`.
    pub fn intrinsic_volume(&self, j: usize) -> f64 {
        if j == 0 {
            return 1.0;
        }
        if j > self.dim {
            return 0.0;
        }
        let m = self.num_generators();
        let mut cols: Vec<&[f64]> = Vec::with_capacity(j);
        if linalg::binomial(m, j) > KAHAN_THRESHOLD {
            let mut acc = KahanSum::default();
            linalg::for_each_combination(m, j, |s| {
                cols.clear();
                cols.extend(s.iter().map(|&i| self.generator(i)));
                acc.add(linalg::parallelotope_volume(&cols, self.dim));
            });
            acc.value()
        } else {
            let mut acc = 0.0;
            linalg::for_each_combination(m, j, |s| {
                cols.clear();
                cols.extend(s.iter().map(|&i| self.generator(i)));
                acc += linalg::parallelotope_volume(&cols, self.dim);
            });
            acc
        }
    }

    /// `[V_0, V_1, ..., V_d]`.
    pub fn intrinsic_volumes(&self) -> Vec<f64> {
        (0..=self.dim).map(|j| self.intrinsic_volume(j)).collect()
    }

    /// Wills functional `1 + V_1 + ... + V_d`.
    pub fn wills_functional(&self) -> f64 {
        self.intrinsic_volumes().iter().sum()
    }

    /// Monte Carlo estimate of `V_j` from Gaussian projections:
    /// `V_j = (2 pi)^{j/2} E vol_j(M Z) / (j! kappa_j)` with `M` a `j x d`
    /// standard Gaussian matrix.
    pub fn mc_intrinsic_volume(&self, j: usize, samples: usize, seed: u64) -> Result<McEstimate> {
        if j == 0 || j > self.dim {
            return Err(Error::InvalidInput(format!(
                "Monte Carlo intrinsic volume needs 1 <= j <= d = {}, got {j}",
                self.dim
            )));
        }
        if samples == 0 {
            return Err(Error::InvalidInput("samples must be >= 1".into()));
        }
        let factorial: f64 = (1..=j).map(|k| k as f64).product();
        let scale =
            (2.0 * std::f64::consts::PI).powf(j as f64 / 2.0) / (factorial * unit_ball_volume(j));
        let m = self.num_generators();
        let d = self.dim;
        let chunks = samples.div_ceil(MC_CHUNK);
        let partial: Vec<(f64, f64)> = (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut r = rng::stream(seed, c as u64);
                let count = MC_CHUNK.min(samples - c * MC_CHUNK);
                let mut proj = vec![0.0; m * j];
                let mut mat = vec![0.0; j * d];
                let (mut s1, mut s2) = (0.0, 0.0);
                for _ in 0..count {
                    mat.iter_mut().for_each(|x| *x = r.sample(StandardNormal));
                    for (i, g) in self.generators().enumerate() {
                        for row in 0..j {
                            proj[i * j + row] = linalg::dot(&mat[row * d..(row + 1) * d], g);
                        }
                    }
                    let mut vol = 0.0;
                    let mut cols: Vec<&[f64]> = Vec::with_capacity(j);
                    linalg::for_each_combination(m, j, |s| {
                        cols.clear();
                        cols.extend(s.iter().map(|&i| &proj[i * j..(i + 1) * j]));
                        vol += linalg::parallelotope_volume(&cols, j);
                    });
                    let v = scale * vol;
                    s1 += v;
                    s2 += v * v;
                }
                (s1, s2)
            })
            .collect();
        Ok(finish_mean(&partial, samples))
    }

    /// Boundary polygon of a planar zonotope.
    pub fn to_polygon(&self) -> Result<ConvexPolygon2D> {
        if self.dim != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: self.dim,
            });
        }
        let max_norm = self.generators().map(linalg::norm).fold(0.0, f64::max);
        if max_norm == 0.0 {
            return Err(Error::FlatZonotope);
        }
        // Orient each generator into the upper half-plane, angle in [0, pi).
        let mut gens: Vec<[f64; 2]> = self
            .generators()
            .filter(|g| linalg::norm(g) > 1e-14 * max_norm)
            .map(|g| {
                if g[1] < 0.0 || (g[1] == 0.0 && g[0] < 0.0) {
                    [-g[0], -g[1]]
                } else {
                    [g[0], g[1]]
                }
            })
            .collect();
        gens.sort_by(|a, b| a[1].atan2(a[0]).total_cmp(&b[1].atan2(b[0])));
        let mut merged: Vec<[f64; 2]> = Vec::with_capacity(gens.len());
        for g in gens {
            if let Some(last) = merged.last_mut() {
                let cross = last[0] * g[1] - last[1] * g[0];
                if cross.abs() <= 1e-12 * linalg::norm(last) * linalg::norm(&g) {
                    last[0] += g[0];
                    last[1] += g[1];
                    continue;
                }
            }
            merged.push(g);
        }
        if merged.len() < 2 {
            return Err(Error::FlatZonotope);
        }
        let half: [f64; 2] = merged.iter().fold([0.0, 0.0], |acc, g| {
            [acc[0] + 0.5 * g[0], acc[1] + 0.5 * g[1]]
        });
        let mut p = [self.center[0] - half[0], self.center[1] - half[1]];
        let mut boundary = Vec::with_capacity(2 * merged.len());
        for sign in [1.0, -1.0] {
            for g in &merged {
                boundary.push(p);
                p = [p[0] + sign * g[0], p[1] + sign * g[1]];
            }
        }
        ConvexPolygon2D::new(boundary).or(Err(Error::FlatZonotope))
    }

    /// Monte Carlo estimate of `int exp(-pi dist^2(y, Z)) dy` over the plane.
    ///
    /// Stratified uniform sampling over the bounding box inflated by `r`,
    /// where `(perimeter + 2 pi r) exp(-pi r^2) < 1e-6` bounds the truncated
    /// tail.
    pub fn wills_mc_check(&self, samples: usize, seed: u64) -> Result<McEstimate> {
        let poly = self.to_polygon()?;
        if samples < 8 {
            return Err(Error::InvalidInput(
                "wills_mc_check needs at least 8 samples".into(),
            ));
        }
        let per = poly.perimeter();
        let r = wills_truncation_radius(per);
        let (lo, hi) = poly.bounding_box();
        let (x0, y0) = (lo[0] - r, lo[1] - r);
        let (w, h) = (hi[0] - lo[0] + 2.0 * r, hi[1] - lo[1] + 2.0 * r);
        let k = ((samples as f64 / 16.0).sqrt().floor() as usize).clamp(1, 256);
        let per_cell = (samples / (k * k)).max(2);
        let (cw, ch) = (w / k as f64, h / k as f64);
        let cell_area = cw * ch;
        let rows: Vec<(f64, f64)> = (0..k)
            .into_par_iter()
            .map(|row| {
                let mut r = rng::stream(seed, row as u64);
                let (mut est, mut var) = (0.0, 0.0);
                for col in 0..k {
                    let (s1, s2) = (0..per_cell).fold((0.0, 0.0), |(s1, s2), _| {
                        let y = [
                            x0 + (col as f64 + r.random::<f64>()) * cw,
                            y0 + (row as f64 + r.random::<f64>()) * ch,
                        ];
                        let dd = poly.distance(y);
                        let f = (-std::f64::consts::PI * dd * dd).exp();
                        (s1 + f, s2 + f * f)
                    });
                    let n = per_cell as f64;
                    let mean = s1 / n;
                    let sample_var = ((s2 - n * mean * mean) / (n - 1.0)).max(0.0);
                    est += cell_area * mean;
                    var += cell_area * cell_area * sample_var / n;
                }
                (est, var)
            })
            .collect();
        let estimate = rows.iter().map(|r| r.0).sum();
        let var: f64 = rows.iter().map(|r| r.1).sum();
        Ok(McEstimate {
            estimate,
            std_error: var.sqrt(),
            samples: per_cell * k * k,
        })
    }

    /// Area of the parallel body `Z + lambda B_2` computed geometrically
    /// (`lhs`) and from the Steiner polynomial in the intrinsic volumes (`rhs`).
    pub fn steiner_polynomial_check_2d(&self, lambda: f64) -> Result<(f64, f64)> {
        if !(lambda >= 0.0) {
            return Err(Error::InvalidInput(format!(
                "lambda must be >= 0, got {lambda}"
            )));
        }
        let poly = self.to_polygon()?;
        let pi = std::f64::consts::PI;
        let lhs = poly.area() + poly.perimeter() * lambda + pi * lambda * lambda;
        let rhs = (0..=2)
            .map(|j| self.intrinsic_volume(2 - j) * unit_ball_volume(j) * lambda.powi(j as i32))
            .sum();
        Ok((lhs, rhs))
    }
}

/// Smallest `r` (on a 1e-3 grid) with `(perimeter + 2 pi r) e^{-pi r^2} < 1e-6`.
pub fn wills_truncation_radius(perimeter: f64) -> f64 {
    let pi = std::f64::consts::PI;
    let mut r = 0.0;
    while (perimeter + 2.0 * pi * r) * (-pi * r * r).exp() >= 1e-6 {
        r += 1e-3;
    }
    r
}

pub(crate) fn finish_mean(partial: &[(f64, f64)], n: usize) -> McEstimate {
    let s1: f64 = partial.iter().map(|p| p.0).sum();
    let s2: f64 = partial.iter().map(|p| p.1).sum();
    let nf = n as f64;
    let mean = s1 / nf;
    let var = if n > 1 {
        ((s2 - nf * mean * mean) / (nf - 1.0)).max(0.0)
    } else {
        0.0
    };
    McEstimate {
        estimate: mean,
        std_error: (var / nf).sqrt(),
        samples: n,
    }
}
