use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;

/// Unit vector in `R^d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Direction(Vec<f64>);

impl TryFrom<Vec<f64>> for Direction {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Direction::new(v)
    }
}

impl From<Direction> for Vec<f64> {
    fn from(d: Direction) -> Self {
        d.0
    }
}

impl Direction {
    /// Normalises `v`; fails for zero or non-finite input.
    pub fn new(v: Vec<f64>) -> Result<Self> {
        let n = linalg::norm(&v);
        if v.is_empty() || !n.is_finite() || n == 0.0 {
            return Err(Error::InvalidInput(
                "direction must be a nonzero finite vector".into(),
            ));
        }
        Ok(Self(v.into_iter().map(|x| x / n).collect()))
    }

    /// Accepts `v` only if it is already unit length within 1e-12.
    pub fn from_unit(v: Vec<f64>) -> Result<Self> {
        let n = linalg::norm(&v);
        if (n - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidInput(format!(
                "direction has norm {n}, expected 1"
            )));
        }
        Ok(Self(v))
    }

    pub fn axis(dim: usize, k: usize) -> Result<Self> {
        if k >= dim {
            return Err(Error::IndexOutOfRange { index: k, dim });
        }
        let mut v = vec![0.0; dim];
        v[k] = 1.0;
        Ok(Self(v))
    }

    /// Uniform on the sphere `S^{d-1}`.
    pub fn random<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Self {
        loop {
            let v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
            if let Ok(d) = Self::new(v) {
                return d;
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn to_dvector(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.0)
    }

    pub fn negated(&self) -> Self {
        Self(self.0.iter().map(|x| -x).collect())
    }

    /// Orthogonal projector onto the hyperplane `u^perp`, `I - u u'`.
    pub fn projector(&self) -> DMatrix<f64> {
        let u = self.to_dvector();
        DMatrix::identity(self.dim(), self.dim()) - &u * u.transpose()
    }

    /// Orthonormal basis of `u^perp` (d - 1 vectors).
    ///
    /// Gram-Schmidt over the standard basis in index order, skipping the axis
    /// where `|u_k|` is largest (lowest index on ties).
    pub fn complement_basis(&self) -> Vec<Vec<f64>> {
        let d = self.dim();
        let u = &self.0;
        let drop = (0..d)
            .max_by(|&a, &b| u[a].abs().total_cmp(&u[b].abs()).then(b.cmp(&a)))
            .unwrap_or(0);
        let mut basis: Vec<Vec<f64>> = Vec::with_capacity(d.saturating_sub(1));
        for k in (0..d).filter(|&k| k != drop) {
            let mut v = vec![0.0; d];
            v[k] = 1.0;
            for _pass in 0..2 {
                for q in std::iter::once(u.as_slice()).chain(basis.iter().map(Vec::as_slice)) {
                    let p = linalg::dot(q, &v);
                    for (vi, qi) in v.iter_mut().zip(q) {
                        *vi -= p * qi;
                    }
                }
            }
            let n = linalg::norm(&v);
            v.iter_mut().for_each(|x| *x /= n);
            basis.push(v);
        }
        basis
    }
}
