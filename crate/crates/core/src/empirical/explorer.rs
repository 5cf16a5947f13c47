//! Repeated symmetrization of a sample with isotropy diagnostics.

use serde::{Deserialize, Serialize};

use super::{
    mean_square_norm, sample_covariance, symmetrize_sample, EmpiricalSample, RegressorConfig,
};
use crate::direction::Direction;
use crate::error::{Error, Result};
use crate::linalg;
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DirectionPolicy {
    /// Independent uniform directions from a seeded stream.
    RandomSeeded,
    /// `e_0, e_1, ..., e_{d-1}, e_0, ...`
    CyclicAxes,
    /// `(v_max + v_min) / sqrt 2` from the current sample covariance.
    MaxAnisotropy,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsotropyReport {
    pub step: usize,
    /// Direction used to reach this state (`None` for the initial sample).
    pub direction: Option<Vec<f64>>,
    /// `lambda_max / lambda_min` of the sample covariance.
    pub anisotropy: f64,
    pub mean_norm: f64,
    pub mean_square_norm: f64,
    /// Largest `|mean of v'X|` over the two half-samples `w'X > 0`,
    /// `w'X < 0`, for probe pairs `v`, `w` of orthogonal axes and diagonals.
    /// Zero for laws spherically symmetric about the origin.
    pub symmetry_statistic: f64,
}

fn probe_pairs(d: usize) -> Vec<(Vec<f64>, Vec<f64>)> {
    let axis = |k: usize| {
        let mut e = vec![0.0; d];
        e[k] = 1.0;
        e
    };
    let mut out = Vec::new();
    for a in 0..d {
        for b in 0..d {
            if a == b {
                continue;
            }
            out.push((axis(a), axis(b)));
            if a < b {
                let h = std::f64::consts::FRAC_1_SQRT_2;
                let mut p = vec![0.0; d];
                let mut m = vec![0.0; d];
                p[a] = h;
                p[b] = h;
                m[a] = h;
                m[b] = -h;
                out.push((p.clone(), m.clone()));
                out.push((m, p));
            }
        }
    }
    out
}

pub fn isotropy_report(
    sample: &EmpiricalSample,
    step: usize,
    direction: Option<&Direction>,
) -> IsotropyReport {
    let d = sample.dim();
    let anisotropy = if d == 1 {
        1.0
    } else {
        let (vals, _) = linalg::sorted_symmetric_eigen(&sample_covariance(sample));
        vals[0] / vals[d - 1]
    };
    let mut symmetry_statistic = 0.0_f64;
    for (v, w) in probe_pairs(d) {
        let (mut s, mut c) = ([0.0; 2], [0usize; 2]);
        for x in sample.points() {
            let side = linalg::dot(&w, x);
            if side != 0.0 {
                let b = usize::from(side < 0.0);
                s[b] += linalg::dot(&v, x);
                c[b] += 1;
            }
        }
        for b in 0..2 {
            if c[b] > 0 {
                symmetry_statistic = symmetry_statistic.max((s[b] / c[b] as f64).abs());
            }
        }
    }
    IsotropyReport {
        step,
        direction: direction.map(|u| u.as_slice().to_vec()),
        anisotropy,
        mean_norm: linalg::norm(&sample.centroid()),
        mean_square_norm: mean_square_norm(sample),
        symmetry_statistic,
    }
}

fn pick_direction(
    sample: &EmpiricalSample,
    policy: DirectionPolicy,
    step: usize,
    seed: u64,
) -> Result<Direction> {
    let d = sample.dim();
    match policy {
        DirectionPolicy::RandomSeeded => {
            Ok(Direction::random(d, &mut rng::stream(seed, step as u64)))
        }
        DirectionPolicy::CyclicAxes => Direction::axis(d, step % d),
        DirectionPolicy::MaxAnisotropy => {
            if d == 1 {
                return Direction::axis(1, 0);
            }
            let (_, vecs) = linalg::sorted_symmetric_eigen(&sample_covariance(sample));
            let u = (&vecs[0] + &vecs[d - 1]) / std::f64::consts::SQRT_2;
            Direction::new(u.iter().copied().collect())
        }
    }
}

/// Applies `steps` symmetrizations with directions chosen by `policy`; the
/// first report describes the input, then one per step.
pub fn conjecture_explorer(
    sample: &EmpiricalSample,
    steps: usize,
    policy: DirectionPolicy,
    cfg: &RegressorConfig,
    seed: u64,
) -> Result<Vec<IsotropyReport>> {
    conjecture_explorer_with(sample, steps, policy, cfg, seed, |_| ())
}

/// As [`conjecture_explorer`], calling `on_report` as each report is produced.
pub fn conjecture_explorer_with(
    sample: &EmpiricalSample,
    steps: usize,
    policy: DirectionPolicy,
    cfg: &RegressorConfig,
    seed: u64,
    mut on_report: impl FnMut(&IsotropyReport),
) -> Result<Vec<IsotropyReport>> {
    if steps == 0 {
        return Err(Error::InvalidInput("steps must be >= 1".into()));
    }
    let mut cur = sample.clone();
    let first = isotropy_report(&cur, 0, None);
    on_report(&first);
    let mut out = vec![first];
    for step in 1..=steps {
        let u = pick_direction(&cur, policy, step, seed)?;
        cur = symmetrize_sample(&cur, &u, cfg)?;
        let rep = isotropy_report(&cur, step, Some(&u));
        on_report(&rep);
        out.push(rep);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cloud::PointCloud;
    use rand::Rng;
    use rand_distr::StandardNormal;

    #[test]
    fn isotropic_shell_stays_isotropic() {
        // Uniform on the annulus 1 <= |x| <= 2.
        let n = 100_000;
        let mut r = rng::seeded(6);
        let s = PointCloud::new(
            (0..n)
                .map(|_| {
                    let rad = (1.0 + 3.0 * r.random::<f64>()).sqrt();
                    Direction::random(2, &mut r)
                        .as_slice()
                        .iter()
                        .map(|v| v * rad)
                        .collect()
                })
                .collect(),
        )
        .unwrap();
        let reps = conjecture_explorer(
            &s,
            5,
            DirectionPolicy::RandomSeeded,
            &RegressorConfig::default(),
            1,
        )
        .unwrap();
        for rep in &reps {
            assert!(rep.anisotropy < 1.0 + 10.0 / (n as f64).sqrt(), "{rep:?}");
        }
    }

    #[test]
    fn gaussian_becomes_rounder() {
        let n = 20_000;
        let mut r = rng::seeded(7);
        let s = PointCloud::new(
            (0..n)
                .map(|_| {
                    vec![
                        r.sample::<f64, _>(StandardNormal),
                        3.0 * r.sample::<f64, _>(StandardNormal),
                    ]
                })
                .collect(),
        )
        .unwrap();
        let reps = conjecture_explorer(
            &s,
            30,
            DirectionPolicy::MaxAnisotropy,
            &RegressorConfig::ExactLinear,
            1,
        )
        .unwrap();
        assert!(reps[0].anisotropy > 8.0);
        assert!(reps.last().unwrap().anisotropy < 1.05);
        for w in reps.windows(2) {
            assert!(w[1].mean_square_norm <= w[0].mean_square_norm + 1e-9);
        }
    }

    #[test]
    fn zero_steps_rejected() {
        let s = PointCloud::new(vec![vec![0.0, 1.0]]).unwrap();
        assert!(conjecture_explorer(
            &s,
            0,
            DirectionPolicy::CyclicAxes,
            &RegressorConfig::ExactLinear,
            0
        )
        .is_err());
    }
}
