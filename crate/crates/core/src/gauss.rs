//! Steiner symmetrization of Gaussian laws in closed form.
//!
//! For `X ~ N(mu, Sigma)` and a unit vector `u`, the symmetral is
//! `X_u = X - u E[u'X | Pi X]` with `Pi = I - uu'`. Writing
//! `c = -1 / (u' Sigma^{-1} u)` the conditional mean of the centred part is
//! `c u' Sigma^{-1} Pi X`, so `X_u` is again Gaussian with covariance
//! `A Sigma A'`, `A = I - c uu' Sigma^{-1} Pi`, and mean `Pi mu`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::direction::Direction;
use crate::error::{Error, Result};
use crate::linalg;

/// Inputs whose asymmetry exceeds this (relative to the largest entry) are
/// rejected instead of being symmetrized.
const ASYMMETRY_LIMIT: f64 = 1e-8;
const CONDITION_FLOOR: f64 = 1e-12;

#[derive(Serialize, Deserialize)]
struct StateJson {
    mean: Vec<f64>,
    covariance: Vec<Vec<f64>>,
}

/// A non-degenerate Gaussian law `N(mean, covariance)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StateJson", into = "StateJson")]
pub struct GaussianState {
    mean: DVector<f64>,
    covariance: DMatrix<f64>,
}

impl TryFrom<StateJson> for GaussianState {
    type Error = Error;

    fn try_from(s: StateJson) -> Result<Self> {
        let d = s.mean.len();
        if s.covariance.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: s.covariance.len(),
            });
        }
        if let Some(row) = s.covariance.iter().find(|r| r.len() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: row.len(),
            });
        }
        let cov = DMatrix::from_fn(d, d, |i, j| s.covariance[i][j]);
        GaussianState::new(DVector::from_vec(s.mean), cov)
    }
}

impl From<GaussianState> for StateJson {
    fn from(g: GaussianState) -> Self {
        let d = g.dim();
        StateJson {
            mean: g.mean.iter().copied().collect(),
            covariance: (0..d)
                .map(|i| (0..d).map(|j| g.covariance[(i, j)]).collect())
                .collect(),
        }
    }
}

impl GaussianState {
    /// Symmetrizes `covariance` (rejecting gross asymmetry) and checks that
    /// it is positive definite: `lambda_min > 1e-12 * lambda_max`.
    pub fn new(mean: DVector<f64>, covariance: DMatrix<f64>) -> Result<Self> {
        let d = mean.len();
        if d == 0 {
            return Err(Error::InvalidInput("dimension must be >= 1".into()));
        }
        if covariance.nrows() != d || covariance.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: covariance.nrows().max(covariance.ncols()),
            });
        }
        if mean.iter().chain(covariance.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite entry".into()));
        }
        let scale = covariance.amax();
        let asym = (&covariance - covariance.transpose()).amax();
        if asym > ASYMMETRY_LIMIT * scale {
            return Err(Error::NotSymmetric(asym));
        }
        let covariance = (&covariance + covariance.transpose()) * 0.5;
        let (vals, _) = linalg::sorted_symmetric_eigen(&covariance);
        let (max, min) = (vals[0], vals[d - 1]);
        if !(max > 0.0) || min <= CONDITION_FLOOR * max {
            return Err(Error::SingularCovariance);
        }
        Ok(Self { mean, covariance })
    }

    pub fn centered(covariance: DMatrix<f64>) -> Result<Self> {
        Self::new(DVector::zeros(covariance.nrows()), covariance)
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn covariance(&self) -> &DMatrix<f64> {
        &self.covariance
    }

    /// Eigenvalues of the covariance, descending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::sorted_symmetric_eigen(&self.covariance).0
    }

    pub fn determinant(&self) -> f64 {
        self.covariance.determinant()
    }

    /// `E|X|^2 = tr Sigma + |mu|^2`.
    pub fn mean_square_norm(&self) -> f64 {
        self.covariance.trace() + self.mean.norm_squared()
    }

    /// `lambda_max / lambda_min`.
    pub fn anisotropy(&self) -> f64 {
        let v = self.eigenvalues();
        v[0] / v[v.len() - 1]
    }

    fn check_dim(&self, u: &Direction) -> Result<()> {
        if u.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: u.dim(),
            });
        }
        Ok(())
    }
}

/// `Pi = I - uu'`.
pub fn make_projector(u: &Direction) -> DMatrix<f64> {
    u.projector()
}

fn inverse(sigma: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    sigma
        .clone()
        .cholesky()
        .map(|c| c.inverse())
        .ok_or(Error::SingularCovariance)
}

/// Returns `(c, w)` with `c = -1 / (u' Sigma^{-1} u)` and `w = c u' Sigma^{-1} Pi`,
/// so that `E[u'X | Pi X] = w Pi X` for centred `X`.
pub fn regression_coefficient(sigma: &DMatrix<f64>, u: &Direction) -> Result<(f64, DVector<f64>)> {
    if sigma.nrows() != u.dim() || sigma.ncols() != u.dim() {
        return Err(Error::DimensionMismatch {
            expected: sigma.nrows(),
            found: u.dim(),
        });
    }
    let inv = inverse(sigma)?;
    let uv = u.to_dvector();
    let siu = &inv * &uv;
    let q = uv.dot(&siu);
    if !(q > 0.0) {
        return Err(Error::SingularCovariance);
    }
    let c = -1.0 / q;
    let row = make_projector(u) * siu * c;
    Ok((c, row))
}

/// Closed-form symmetral of `state` along `u`.
pub fn symmetrize_gaussian(state: &GaussianState, u: &Direction) -> Result<GaussianState> {
    state.check_dim(u)?;
    let (_, w) = regression_coefficient(&state.covariance, u)?;
    let uv = u.to_dvector();
    let pi = make_projector(u);
    // X_u = X - u (w' Pi X); w already lies in u-perp so Pi w = w.
    let a = DMatrix::identity(state.dim(), state.dim()) - &uv * (pi * &w).transpose();
    let cov = &a * &state.covariance * a.transpose();
    let mean = make_projector(u) * &state.mean;
    GaussianState::new(mean, (&cov + cov.transpose()) * 0.5)
}

/// `E[(E[u'X | Pi X])^2] = w Sigma w' + (u'mu)^2`, the decrease of
/// `E|X|^2` under symmetrization along `u`.
pub fn norm_decrease(state: &GaussianState, u: &Direction) -> Result<f64> {
    state.check_dim(u)?;
    let (_, w) = regression_coefficient(&state.covariance, u)?;
    let um = u.to_dvector().dot(&state.mean);
    Ok((w.transpose() * &state.covariance * &w)[(0, 0)] + um * um)
}

/// `(v_{i1} + v_{i2}) / sqrt 2` for eigenvectors sorted by descending
/// eigenvalue, each with its first nonzero component positive.
pub fn eigenpair_direction(sigma: &DMatrix<f64>, i1: usize, i2: usize) -> Result<Direction> {
    let d = sigma.nrows();
    for i in [i1, i2] {
        if i >= d {
            return Err(Error::IndexOutOfRange { index: i, dim: d });
        }
    }
    if i1 == i2 {
        return Err(Error::InvalidInput("eigenpair indices must differ".into()));
    }
    let (_, vecs) = linalg::sorted_symmetric_eigen(sigma);
    let u = (&vecs[i1] + &vecs[i2]) / std::f64::consts::SQRT_2;
    Direction::new(u.iter().copied().collect())
}

/// Arithmetic and harmonic means of a positive pair.
pub fn double_mean_update(l1: f64, l2: f64) -> Result<(f64, f64)> {
    for l in [l1, l2] {
        if !(l > 0.0) {
            return Err(Error::NonPositive(l));
        }
    }
    Ok((0.5 * (l1 + l2), 2.0 * l1 * l2 / (l1 + l2)))
}

/// How `sphere_iterate` picks the direction for the `(max, min)` eigenpair.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SphereRule {
    /// Rotates `u` inside `span(v_max, v_min)` so that the pair becomes
    /// `(g, lambda_max lambda_min / g)` with `g = (det Sigma)^{1/d}`; every
    /// step pins one eigenvalue at its limit, so at most `d - 1` steps.
    #[default]
    GeometricSplit,
    /// `u = (v_max + v_min) / sqrt 2`: the pair is replaced by its arithmetic
    /// and harmonic means.
    DoubleMean,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    pub direction: Vec<f64>,
    pub eigenvalues_before: Vec<f64>,
    pub eigenvalues_after: Vec<f64>,
    pub det: f64,
    pub trace: f64,
    pub mean_norm: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SymmetrizationTrace {
    pub steps: Vec<TraceStep>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SphereOutcome {
    pub state: GaussianState,
    pub trace: SymmetrizationTrace,
    pub converged: bool,
    /// Eigen steps taken (the centering step is not counted).
    pub steps: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphereOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub rule: SphereRule,
}

impl Default for SphereOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 1000,
            rule: SphereRule::GeometricSplit,
        }
    }
}

fn geometric_split_direction(sigma: &DMatrix<f64>) -> Result<Direction> {
    let d = sigma.nrows();
    let (vals, vecs) = linalg::sorted_symmetric_eigen(sigma);
    let (la, lb) = (vals[0], vals[d - 1]);
    let g = vals.iter().map(|v| v.ln()).sum::<f64>() / d as f64;
    let g = g.exp().clamp(lb, la);
    // w = cos t v_a + sin t v_b has w' Sigma w = g; u is its complement.
    let s2 = ((la - g) / (la - lb)).clamp(0.0, 1.0);
    let (s, c) = (s2.sqrt(), (1.0 - s2).sqrt());
    let u = &vecs[d - 1] * c - &vecs[0] * s;
    Direction::new(u.iter().copied().collect())
}

/// Symmetrizes repeatedly until `lambda_max / lambda_min - 1 < tol`.
///
/// A nonzero mean is first removed by one step along `mu / |mu|`.
pub fn sphere_iterate(state: &GaussianState, opts: &SphereOptions) -> Result<SphereOutcome> {
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidInput("tol must be > 0".into()));
    }
    let d = state.dim();
    let mut trace = SymmetrizationTrace::default();
    let mut cur = state.clone();
    let mut record = |before: &GaussianState, after: &GaussianState, u: &Direction| {
        trace.steps.push(TraceStep {
            direction: u.as_slice().to_vec(),
            eigenvalues_before: before.eigenvalues(),
            eigenvalues_after: after.eigenvalues(),
            det: after.determinant(),
            trace: after.covariance.trace(),
            mean_norm: after.mean.norm(),
        });
    };
    if cur.mean.norm() > 0.0 {
        let u = Direction::new(cur.mean.iter().copied().collect())?;
        let next = symmetrize_gaussian(&cur, &u)?;
        record(&cur, &next, &u);
        cur = next;
    }
    let mut steps = 0;
    loop {
        if d == 1 || cur.anisotropy() - 1.0 < opts.tol {
            return Ok(SphereOutcome {
                state: cur,
                trace,
                converged: true,
                steps,
            });
        }
        if steps >= opts.max_iter {
            return Ok(SphereOutcome {
                state: cur,
                trace,
                converged: false,
                steps,
            });
        }
        let u = match opts.rule {
            SphereRule::DoubleMean => eigenpair_direction(&cur.covariance, 0, d - 1)?,
            SphereRule::GeometricSplit => geometric_split_direction(&cur.covariance)?,
        };
        let next = symmetrize_gaussian(&cur, &u)?;
        record(&cur, &next, &u);
        cur = next;
        steps += 1;
    }
}
