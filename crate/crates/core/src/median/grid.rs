//! Brute-force grid search, used as an independent check on the solvers.

use rayon::prelude::*;

use super::Evaluator;
use crate::error::{Error, Result};

/// Axis-aligned box `[lower, upper]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridBox {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl GridBox {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::DimensionMismatch {
                expected: lower.len(),
                found: upper.len(),
            });
        }
        if lower.iter().zip(&upper).any(|(l, u)| !(l <= u)) {
            return Err(Error::InvalidInput(
                "grid box lower bound exceeds upper bound".into(),
            ));
        }
        Ok(Self { lower, upper })
    }

    /// Bounding box of the cloud, padded by `pad` times its widest side.
    pub fn around(cloud: &crate::PointCloud, pad: f64) -> Self {
        let (lo, hi) = cloud.bounds();
        let w = lo
            .iter()
            .zip(&hi)
            .map(|(l, h)| h - l)
            .fold(0.0, f64::max)
            .max(1e-9);
        Self {
            lower: lo.iter().map(|l| l - pad * w).collect(),
            upper: hi.iter().map(|h| h + pad * w).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    /// Cell widths for `resolution` grid points per axis.
    pub fn cell(&self, resolution: usize) -> Vec<f64> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(l, u)| (u - l) / (resolution - 1) as f64)
            .collect()
    }
}

/// Best grid point of the objective on a regular `resolution^d` grid over
/// `bounds` (minimum, or maximum for the polar objective).
pub fn grid_oracle(
    eval: &Evaluator,
    bounds: &GridBox,
    resolution: usize,
) -> Result<(Vec<f64>, f64)> {
    if resolution < 2 {
        return Err(Error::InvalidInput("grid resolution must be >= 2".into()));
    }
    let d = bounds.dim();
    if d != eval.dim() {
        return Err(Error::DimensionMismatch {
            expected: eval.dim(),
            found: d,
        });
    }
    let cell = bounds.cell(resolution);
    let total = resolution
        .checked_pow(d as u32)
        .ok_or_else(|| Error::InvalidInput("grid too large".into()))?;
    let point = |mut idx: usize| -> Vec<f64> {
        (0..d)
            .map(|k| {
                let i = idx % resolution;
                idx /= resolution;
                bounds.lower[k] + i as f64 * cell[k]
            })
            .collect()
    };
    let sense = eval.sense();
    let best = (0..total)
        .into_par_iter()
        .map(|i| (i, sense * eval.value(&point(i))))
        .reduce(
            || (usize::MAX, f64::INFINITY),
            |a, b| match a.1.total_cmp(&b.1) {
                std::cmp::Ordering::Less => a,
                std::cmp::Ordering::Greater => b,
                std::cmp::Ordering::Equal => {
                    if a.0 <= b.0 {
                        a
                    } else {
                        b
                    }
                }
            },
        );
    Ok((point(best.0), sense * best.1))
}

/// Repeated grid search, each round re-centred on the previous best point
/// with a box of two cells on either side, until cells are at most
/// `target_cell` wide. Returns the best point, its value and the final cell.
pub fn refined_grid_oracle(
    eval: &Evaluator,
    bounds: &GridBox,
    resolution: usize,
    target_cell: f64,
) -> Result<(Vec<f64>, f64, Vec<f64>)> {
    if resolution < 5 {
        return Err(Error::InvalidInput(
            "refinement needs resolution >= 5".into(),
        ));
    }
    let mut bx = bounds.clone();
    loop {
        let (best, val) = grid_oracle(eval, &bx, resolution)?;
        let cell = bx.cell(resolution);
        if cell.iter().all(|&c| c <= target_cell) {
            return Ok((best, val, cell));
        }
        bx = GridBox {
            lower: best.iter().zip(&cell).map(|(b, c)| b - 2.0 * c).collect(),
            upper: best.iter().zip(&cell).map(|(b, c)| b + 2.0 * c).collect(),
        };
    }
}
