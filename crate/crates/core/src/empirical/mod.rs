//! Steiner symmetrization of empirical samples.
//!
//! A draw `x` is split as `x = B p + y u` with `B` an orthonormal basis of
//! `u^perp`; the symmetral replaces `y` by `y - m(p)`, where `m` estimates
//! `E[u'X | Pi X]` from the sample itself.

mod explorer;
mod knn;
mod polygon;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::cloud::PointCloud;
use crate::direction::Direction;
use crate::error::{Error, Result};
use crate::linalg;

pub use explorer::{
    conjecture_explorer, conjecture_explorer_with, isotropy_report, DirectionPolicy, IsotropyReport,
};
pub use polygon::{
    polygon_steiner_symmetral_2d, sample_uniform_polygon, theorem1_check, Theorem1Report,
};

/// N draws in R^d, one per row.
pub type EmpiricalSample = PointCloud;

/// Estimator for the conditional mean of the `u`-coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum RegressorConfig {
    /// Mean over the `k` nearest rows in `u^perp`; `None` means `ceil(sqrt N)`.
    Knn { k: Option<usize> },
    /// Least squares with intercept.
    ExactLinear,
}

impl Default for RegressorConfig {
    fn default() -> Self {
        RegressorConfig::Knn { k: None }
    }
}

impl RegressorConfig {
    /// `k` actually used for a sample of size `n`.
    pub fn resolved_k(&self, n: usize) -> Option<usize> {
        match *self {
            RegressorConfig::Knn { k } => Some(k.unwrap_or_else(|| default_k(n))),
            RegressorConfig::ExactLinear => None,
        }
    }

    fn validate(&self, n: usize) -> Result<()> {
        if let Some(k) = self.resolved_k(n) {
            if k == 0 {
                return Err(Error::InvalidInput("k must be >= 1".into()));
            }
            if k > n {
                return Err(Error::KTooLarge { k, n });
            }
        }
        Ok(())
    }
}

pub fn default_k(n: usize) -> usize {
    ((n as f64).sqrt().ceil() as usize).clamp(1, n.max(1))
}

/// Coordinates `(p, y)` of every draw in the frame `(u^perp basis, u)`.
fn split_coordinates(sample: &EmpiricalSample, u: &Direction) -> (Vec<f64>, Vec<f64>) {
    let basis = u.complement_basis();
    let mut p = Vec::with_capacity(sample.len() * basis.len());
    let mut y = Vec::with_capacity(sample.len());
    for x in sample.points() {
        p.extend(basis.iter().map(|b| linalg::dot(b, x)));
        y.push(linalg::dot(u.as_slice(), x));
    }
    (p, y)
}

fn global_mean(y: &[f64]) -> f64 {
    let mut s = linalg::KahanSum::default();
    y.iter().for_each(|&v| s.add(v));
    s.value() / y.len() as f64
}

fn ols_fit(p: &[f64], m: usize, y: &[f64]) -> Vec<f64> {
    let n = y.len();
    let design = DMatrix::from_fn(n, m + 1, |r, c| if c == 0 { 1.0 } else { p[r * m + c - 1] });
    let rhs = DVector::from_column_slice(y);
    let svd = design.clone().svd(true, true);
    let eps = 1e-12 * svd.singular_values.max();
    let beta = svd.solve(&rhs, eps).expect("svd with both factors");
    (design * beta).iter().copied().collect()
}

/// Estimated `E[u'X | Pi X]` at every draw.
pub fn conditional_means(
    sample: &EmpiricalSample,
    u: &Direction,
    cfg: &RegressorConfig,
) -> Result<Vec<f64>> {
    sample.check_point(u.as_slice())?;
    cfg.validate(sample.len())?;
    let (p, y) = split_coordinates(sample, u);
    let m = sample.dim() - 1;
    let flat = m == 0 || {
        let first = &p[..m];
        p.chunks(m).all(|row| row == first)
    };
    if flat {
        return Ok(vec![global_mean(&y); y.len()]);
    }
    Ok(match cfg {
        RegressorConfig::ExactLinear => ols_fit(&p, m, &y),
        RegressorConfig::Knn { .. } => knn::knn_means(&p, m, &y, cfg.resolved_k(y.len()).unwrap()),
    })
}

/// Rows `x_r - u m(p_r)`.
pub fn symmetrize_sample(
    sample: &EmpiricalSample,
    u: &Direction,
    cfg: &RegressorConfig,
) -> Result<EmpiricalSample> {
    let m = conditional_means(sample, u, cfg)?;
    shift(sample, u, &m)
}

fn shift(sample: &EmpiricalSample, u: &Direction, m: &[f64]) -> Result<EmpiricalSample> {
    let u = u.as_slice();
    PointCloud::new(
        sample
            .points()
            .zip(m)
            .map(|(x, mr)| x.iter().zip(u).map(|(xi, ui)| xi - ui * mr).collect())
            .collect(),
    )
}

pub(crate) fn mean_square_norm(sample: &EmpiricalSample) -> f64 {
    let mut s = linalg::KahanSum::default();
    sample.points().for_each(|x| s.add(linalg::dot(x, x)));
    s.value() / sample.len() as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormReduction {
    pub before: f64,
    pub after: f64,
    /// `before - after`.
    pub decrease: f64,
    /// Sample mean of the squared fitted conditional means; equals
    /// `decrease` for least squares.
    pub fitted_mean_square: f64,
}

pub fn norm_reduction_check(
    sample: &EmpiricalSample,
    u: &Direction,
    cfg: &RegressorConfig,
) -> Result<NormReduction> {
    let m = conditional_means(sample, u, cfg)?;
    let out = shift(sample, u, &m)?;
    let before = mean_square_norm(sample);
    let after = mean_square_norm(&out);
    let mut s = linalg::KahanSum::default();
    m.iter().for_each(|v| s.add(v * v));
    Ok(NormReduction {
        before,
        after,
        decrease: before - after,
        fitted_mean_square: s.value() / m.len() as f64,
    })
}

/// Sample covariance (divisor `N`).
pub fn sample_covariance(sample: &EmpiricalSample) -> DMatrix<f64> {
    let d = sample.dim();
    let c = sample.centroid();
    let mut cov = DMatrix::zeros(d, d);
    for x in sample.points() {
        let v = DVector::from_iterator(d, x.iter().zip(&c).map(|(a, b)| a - b));
        cov += &v * v.transpose();
    }
    cov / sample.len() as f64
}

#[cfg(test)]
mod tests;
