//! The V_j family of multivariate medians.
//!
//! For a sample `x_1..x_n` the V_j-median minimises `V_j(Z(x))`, where
//! `Z(x)` is the zonotope with generators `x - x_i`. `j = 1` gives the
//! spatial (L1) median and `j = d` the Oja median. The Wills median minimises
//! `1 + sum_j V_j(Z(x))`; the polar median maximises the polar-volume
//! integral `int_{S^{d-1}} (sum_i |<u, x - x_i>|)^{-d} du`.

mod grid;
mod nelder_mead;
mod objective;
mod oja;
mod weiszfeld;

use rand::seq::index::sample;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cloud::PointCloud;
use crate::error::{Error, Result};
use crate::linalg;
use crate::rng;

pub use grid::{grid_oracle, refined_grid_oracle, GridBox};
pub use objective::{polar_objective, vj_objective, wills_objective, DirectionSet};

use objective::{oja_terms, AffineTerm};

/// Which functional of `Z(x)` is optimised.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Objective {
    Vj { j: usize },
    Wills,
    Polar,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Step-norm tolerance.
    pub tolerance: f64,
    pub max_iter: usize,
    pub multistarts: usize,
    pub seed: u64,
    pub emit_trace: bool,
    /// Size of the fixed direction set for the polar objective.
    pub sphere_samples: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-8,
            max_iter: 10_000,
            multistarts: 8,
            seed: 0,
            emit_trace: false,
            sphere_samples: 2048,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0) {
            return Err(Error::InvalidInput("tolerance must be > 0".into()));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidInput("max_iter must be >= 1".into()));
        }
        if self.multistarts == 0 {
            return Err(Error::InvalidInput("multistarts must be >= 1".into()));
        }
        if self.sphere_samples < 2 {
            return Err(Error::InvalidInput("sphere_samples must be >= 2".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub point: Vec<f64>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MedianResult {
    pub argmin: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Set when the objective is flat around `argmin`, i.e. the optimiser is
    /// not unique.
    pub non_unique: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<TracePoint>>,
}

#[derive(Debug, Clone)]
pub struct MedianProblem {
    pub cloud: PointCloud,
    pub objective: Objective,
    pub options: SolverOptions,
}

impl MedianProblem {
    pub fn new(cloud: PointCloud, objective: Objective, options: SolverOptions) -> Result<Self> {
        options.validate()?;
        if let Objective::Vj { j } = objective {
            if j == 0 || j > cloud.dim() {
                return Err(Error::InvalidInput(format!(
                    "j must satisfy 1 <= j <= d = {}, got {j}",
                    cloud.dim()
                )));
            }
        }
        Ok(Self {
            cloud,
            objective,
            options,
        })
    }

    pub fn solve(&self) -> Result<MedianResult> {
        match self.objective {
            Objective::Vj { j } => vj_median(&self.cloud, j, &self.options),
            Objective::Wills => wills_median(&self.cloud, &self.options),
            Objective::Polar => polar_median(&self.cloud, &self.options),
        }
    }
}

enum EvalKind {
    Vj(usize),
    Oja(Vec<AffineTerm>),
    Wills,
    Polar(DirectionSet),
}

/// Deterministic objective evaluator shared by the solvers and the grid
/// oracle. The polar objective is replaced by its fixed-direction surrogate.
pub struct Evaluator<'a> {
    cloud: &'a PointCloud,
    kind: EvalKind,
}

impl<'a> Evaluator<'a> {
    pub fn new(
        cloud: &'a PointCloud,
        objective: Objective,
        options: &SolverOptions,
    ) -> Result<Self> {
        let d = cloud.dim();
        let kind = match objective {
            Objective::Vj { j } if j == 0 || j > d => {
                return Err(Error::InvalidInput(format!(
                    "j must satisfy 1 <= j <= d = {d}, got {j}"
                )))
            }
            Objective::Vj { j } if j == d && d > 1 && cloud.len() >= d => {
                EvalKind::Oja(oja_terms(cloud))
            }
            Objective::Vj { j } => EvalKind::Vj(j),
            Objective::Wills => EvalKind::Wills,
            Objective::Polar => {
                EvalKind::Polar(DirectionSet::new(d, options.sphere_samples, options.seed))
            }
        };
        Ok(Self { cloud, kind })
    }

    pub fn dim(&self) -> usize {
        self.cloud.dim()
    }

    /// `+1` for minimisation, `-1` for the maximised polar objective.
    pub fn sense(&self) -> f64 {
        match self.kind {
            EvalKind::Polar(_) => -1.0,
            _ => 1.0,
        }
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        match &self.kind {
            EvalKind::Vj(j) => objective::vj_objective(x, self.cloud, *j).unwrap_or(f64::INFINITY),
            EvalKind::Oja(terms) => oja::oja_value(terms, x),
            EvalKind::Wills => objective::wills_objective(x, self.cloud).unwrap_or(f64::INFINITY),
            EvalKind::Polar(dirs) => dirs.polar_surrogate(x, self.cloud),
        }
    }

    /// Value to minimise.
    fn loss(&self, x: &[f64]) -> f64 {
        self.sense() * self.value(x)
    }
}

fn length_scale(cloud: &PointCloud) -> f64 {
    let s = cloud.spread();
    if s > 0.0 {
        s
    } else {
        1.0
    }
}

/// Coordinate-wise median, then the centroid, then distinct random sample
/// points, `count` in total (duplicates of earlier starts are skipped).
fn starting_points(cloud: &PointCloud, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut starts = vec![cloud.coordinate_median()];
    let centroid = cloud.centroid();
    if centroid != starts[0] {
        starts.push(centroid);
    }
    let mut r = rng::seeded(seed);
    let n = cloud.len();
    for i in sample(&mut r, n, n).into_iter() {
        if starts.len() >= count {
            break;
        }
        let p = cloud.point(i).to_vec();
        if !starts.contains(&p) {
            starts.push(p);
        }
    }
    starts.truncate(count.max(1));
    starts
}

/// Flatness test around `x`: some probe point at distance `h` whose value
/// differs from `value` by less than `1e-9 * |value|`. Probes run along the
/// axes and towards every sample point, in both senses.
fn detect_flat(eval: &Evaluator, cloud: &PointCloud, x: &[f64], value: f64) -> bool {
    let h = 1e-3 * length_scale(cloud);
    let d = x.len();
    let thresh = 1e-9 * value.abs().max(f64::MIN_POSITIVE);
    let mut dirs: Vec<Vec<f64>> = (0..d)
        .map(|k| {
            let mut e = vec![0.0; d];
            e[k] = 1.0;
            e
        })
        .collect();
    for p in cloud.points() {
        let v: Vec<f64> = p.iter().zip(x).map(|(a, b)| a - b).collect();
        let n = linalg::norm(&v);
        if n > 1e-9 * h {
            dirs.push(v.iter().map(|c| c / n).collect());
        }
    }
    dirs.iter().any(|e| {
        [1.0, -1.0].iter().any(|s| {
            let y: Vec<f64> = x.iter().zip(e).map(|(xi, ei)| xi + s * h * ei).collect();
            (eval.value(&y) - value).abs() < thresh
        })
    })
}

struct StartOutcome {
    x: Vec<f64>,
    loss: f64,
    iterations: usize,
    converged: bool,
    trace: Vec<(Vec<f64>, f64)>,
}

/// Runs `solver` from every start concurrently; merges by lowest loss, ties
/// broken by the lexicographically smaller point.
fn best_of(starts: Vec<Vec<f64>>, solver: impl Fn(&[f64]) -> StartOutcome + Sync) -> StartOutcome {
    starts
        .par_iter()
        .map(|s| solver(s))
        .reduce_with(|a, b| {
            let ord = a.loss.total_cmp(&b.loss).then_with(|| {
                a.x.iter()
                    .zip(&b.x)
                    .map(|(p, q)| p.total_cmp(q))
                    .find(|o| o.is_ne())
                    .unwrap_or(std::cmp::Ordering::Equal)
            });
            if ord.is_le() {
                a
            } else {
                b
            }
        })
        .expect("at least one start")
}

fn finish(
    eval: &Evaluator,
    cloud: &PointCloud,
    out: StartOutcome,
    value: f64,
    options: &SolverOptions,
) -> MedianResult {
    let non_unique = detect_flat(eval, cloud, &out.x, value);
    MedianResult {
        non_unique,
        value,
        iterations: out.iterations,
        converged: out.converged,
        trace: options.emit_trace.then(|| {
            out.trace
                .into_iter()
                .map(|(point, v)| TracePoint {
                    point,
                    value: eval.sense() * v,
                })
                .collect()
        }),
        argmin: out.x,
    }
}

/// Spatial (L1) median via the modified Weiszfeld iteration.
pub fn v1_median(cloud: &PointCloud, options: &SolverOptions) -> Result<MedianResult> {
    options.validate()?;
    let eval = Evaluator::new(cloud, Objective::Vj { j: 1 }, options)?;
    let start = cloud.centroid();
    let w = weiszfeld::weiszfeld(
        cloud,
        &start,
        options.tolerance,
        options.max_iter,
        options.emit_trace,
    );
    let value = vj_objective(&w.x, cloud, 1)?;
    let out = StartOutcome {
        loss: value,
        x: w.x,
        iterations: w.iterations,
        converged: w.converged,
        trace: w.trace,
    };
    Ok(finish(&eval, cloud, out, value, options))
}

fn require_affine_span(cloud: &PointCloud, required: usize) -> Result<()> {
    let affine_dim = cloud.affine_dim();
    if affine_dim < required {
        return Err(Error::DegenerateCloud {
            affine_dim,
            required,
        });
    }
    Ok(())
}

/// Oja median: minimiser of `sum |det(x - x_{i_1}, ..., x - x_{i_d})|`.
pub fn vd_median(cloud: &PointCloud, options: &SolverOptions) -> Result<MedianResult> {
    options.validate()?;
    let d = cloud.dim();
    if d == 1 {
        return v1_median(cloud, options);
    }
    require_affine_span(cloud, d)?;
    let terms = oja_terms(cloud);
    let eval = Evaluator {
        cloud,
        kind: EvalKind::Oja(terms.clone()),
    };
    let scale = length_scale(cloud);
    let starts = starting_points(cloud, options.multistarts, options.seed);
    let best = best_of(starts, |s| {
        let o = oja::minimize_oja(
            &terms,
            s,
            scale,
            options.tolerance,
            options.max_iter,
            options.emit_trace,
        );
        StartOutcome {
            loss: oja::oja_value(&terms, &o.x),
            x: o.x,
            iterations: o.iterations,
            converged: o.converged,
            trace: o.trace,
        }
    });
    let value = vj_objective(&best.x, cloud, d)?;
    Ok(finish(&eval, cloud, best, value, options))
}

fn nelder_mead_multistart(
    eval: &Evaluator,
    cloud: &PointCloud,
    options: &SolverOptions,
) -> StartOutcome {
    let scale = length_scale(cloud);
    let starts = starting_points(cloud, options.multistarts, options.seed);
    best_of(starts, |s| {
        let o = nelder_mead::minimize(
            |x| eval.loss(x),
            s,
            0.1 * scale,
            options.tolerance,
            options.max_iter,
            options.emit_trace,
        );
        StartOutcome {
            x: o.x,
            loss: o.value,
            iterations: o.iterations,
            converged: o.converged,
            trace: o.trace,
        }
    })
}

/// V_j median; dispatches to [`v1_median`] for `j = 1`, [`vd_median`] for
/// `j = d`, and multistart Nelder-Mead otherwise.
pub fn vj_median(cloud: &PointCloud, j: usize, options: &SolverOptions) -> Result<MedianResult> {
    options.validate()?;
    let d = cloud.dim();
    if j == 0 || j > d {
        return Err(Error::InvalidInput(format!(
            "j must satisfy 1 <= j <= d = {d}, got {j}"
        )));
    }
    if j == 1 {
        return v1_median(cloud, options);
    }
    if j == d {
        return vd_median(cloud, options);
    }
    require_affine_span(cloud, j)?;
    let eval = Evaluator::new(cloud, Objective::Vj { j }, options)?;
    let best = nelder_mead_multistart(&eval, cloud, options);
    let value = vj_objective(&best.x, cloud, j)?;
    Ok(finish(&eval, cloud, best, value, options))
}

/// Minimiser of the Wills functional `W(Z(x))`.
pub fn wills_median(cloud: &PointCloud, options: &SolverOptions) -> Result<MedianResult> {
    options.validate()?;
    let eval = Evaluator::new(cloud, Objective::Wills, options)?;
    if cloud.len() == 1 {
        let x = cloud.point(0).to_vec();
        let out = StartOutcome {
            loss: 1.0,
            trace: if options.emit_trace {
                vec![(x.clone(), 1.0)]
            } else {
                vec![]
            },
            x,
            iterations: 0,
            converged: true,
        };
        return Ok(finish(&eval, cloud, out, 1.0, options));
    }
    let best = nelder_mead_multistart(&eval, cloud, options);
    let value = wills_objective(&best.x, cloud)?;
    Ok(finish(&eval, cloud, best, value, options))
}

/// Maximiser of the polar-volume integral, evaluated on a fixed direction
/// set so the search sees a deterministic objective.
pub fn polar_median(cloud: &PointCloud, options: &SolverOptions) -> Result<MedianResult> {
    options.validate()?;
    require_affine_span(cloud, cloud.dim())?;
    let eval = Evaluator::new(cloud, Objective::Polar, options)?;
    let best = nelder_mead_multistart(&eval, cloud, options);
    let value = eval.value(&best.x);
    Ok(finish(&eval, cloud, best, value, options))
}

#[cfg(test)]
mod tests;
