//! Exact Steiner symmetrals of convex polygons and the uniform-law check.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{symmetrize_sample, EmpiricalSample, RegressorConfig};
use crate::cloud::PointCloud;
use crate::direction::Direction;
use crate::error::{Error, Result};
use crate::polygon::{ConvexPolygon2D, Point2};
use crate::rng;

fn check_2d(u: &Direction) -> Result<()> {
    if u.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: u.dim(),
        });
    }
    Ok(())
}

/// Frame `(w, u)` with `w` spanning `u^perp`.
fn frame(u: &Direction) -> (Point2, Point2) {
    let w = &u.complement_basis()[0];
    ([w[0], w[1]], [u.as_slice()[0], u.as_slice()[1]])
}

/// Steiner symmetral of `p` about the line `u^perp` through the origin.
pub fn polygon_steiner_symmetral_2d(p: &ConvexPolygon2D, u: &Direction) -> Result<ConvexPolygon2D> {
    check_2d(u)?;
    let (w, uu) = frame(u);
    let ts: Vec<(f64, f64)> = p
        .vertices()
        .iter()
        .map(|v| (w[0] * v[0] + w[1] * v[1], uu[0] * v[0] + uu[1] * v[1]))
        .collect();
    let n = ts.len();
    let mut breaks: Vec<f64> = ts.iter().map(|v| v.0).collect();
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    // Chord length at each breakpoint from the edges crossing it.
    let chord = |t: f64| -> f64 {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for i in 0..n {
            let (a, b) = (ts[i], ts[(i + 1) % n]);
            let (t0, t1) = if a.0 <= b.0 { (a.0, b.0) } else { (b.0, a.0) };
            if t < t0 || t > t1 {
                continue;
            }
            let s = if a.0 == t {
                a.1
            } else if b.0 == t {
                b.1
            } else {
                a.1 + (t - a.0) / (b.0 - a.0) * (b.1 - a.1)
            };
            lo = lo.min(s);
            hi = hi.max(s);
            if a.0 == b.0 {
                lo = lo.min(a.1.min(b.1));
                hi = hi.max(a.1.max(b.1));
            }
        }
        (hi - lo).max(0.0)
    };
    let half: Vec<(f64, f64)> = breaks.iter().map(|&t| (t, 0.5 * chord(t))).collect();
    let to_xy = |t: f64, s: f64| [t * w[0] + s * uu[0], t * w[1] + s * uu[1]];
    let mut boundary: Vec<Point2> = half.iter().map(|&(t, h)| to_xy(t, h)).collect();
    boundary.extend(half.iter().rev().map(|&(t, h)| to_xy(t, -h)));
    ConvexPolygon2D::from_cyclic_boundary(&boundary)
}

/// `n` independent uniform draws from `p`.
pub fn sample_uniform_polygon(p: &ConvexPolygon2D, n: usize, seed: u64) -> Result<EmpiricalSample> {
    if n == 0 {
        return Err(Error::InvalidInput("sample size must be >= 1".into()));
    }
    let v = p.vertices();
    let tri: Vec<(Point2, Point2, Point2)> =
        (1..v.len() - 1).map(|i| (v[0], v[i], v[i + 1])).collect();
    let areas: Vec<f64> = tri
        .iter()
        .map(|(a, b, c)| {
            0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])).abs()
        })
        .collect();
    let pick = WeightedIndex::new(&areas).map_err(|_| Error::DegeneratePolygon)?;
    let mut r = rng::seeded(seed);
    let draws = (0..n)
        .map(|_| {
            let (a, b, c) = tri[pick.sample(&mut r)];
            let (mut s, mut t): (f64, f64) = (r.random(), r.random());
            if s + t > 1.0 {
                s = 1.0 - s;
                t = 1.0 - t;
            }
            vec![
                a[0] + s * (b[0] - a[0]) + t * (c[0] - a[0]),
                a[1] + s * (b[1] - a[1]) + t * (c[1] - a[1]),
            ]
        })
        .collect();
    PointCloud::new(draws)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Theorem1Report {
    pub n: usize,
    pub k: Option<usize>,
    /// Membership margin `3 diam(P) k^{-1/2}` (`0` for least squares).
    pub delta: f64,
    /// Fraction of symmetrized draws within `delta` of the exact symmetral.
    pub inside_fraction: f64,
    /// Pearson statistic over grid cells clipped to the symmetral, cells with
    /// expected count >= 5 only.
    pub chi_square: f64,
    pub chi_square_dof: usize,
    /// `(chi_square - dof) / sqrt(2 dof)`.
    pub chi_square_z: f64,
    pub area_polygon: f64,
    pub area_symmetral: f64,
    pub area_relative_error: f64,
    pub symmetral: ConvexPolygon2D,
}

/// Samples uniformly on `p`, symmetrizes the sample along `u` and compares
/// the result with the exact symmetral.
pub fn theorem1_check(
    p: &ConvexPolygon2D,
    u: &Direction,
    n: usize,
    cfg: &RegressorConfig,
    seed: u64,
) -> Result<Theorem1Report> {
    check_2d(u)?;
    let sample = sample_uniform_polygon(p, n, seed)?;
    let out = symmetrize_sample(&sample, u, cfg)?;
    let s = polygon_steiner_symmetral_2d(p, u)?;
    let k = cfg.resolved_k(n);
    let delta = k.map_or(0.0, |k| 3.0 * p.diameter() / (k as f64).sqrt());
    let inside = out
        .points()
        .filter(|x| s.distance([x[0], x[1]]) <= delta)
        .count();

    let (lo, hi) = s.bounding_box();
    let g = (((n as f64) / 50.0).sqrt().floor() as usize).clamp(2, 50);
    let (cw, ch) = ((hi[0] - lo[0]) / g as f64, (hi[1] - lo[1]) / g as f64);
    let mut counts = vec![0usize; g * g];
    for x in out.points() {
        let i = ((x[0] - lo[0]) / cw).floor();
        let j = ((x[1] - lo[1]) / ch).floor();
        if i >= 0.0 && j >= 0.0 && (i as usize) < g && (j as usize) < g {
            counts[j as usize * g + i as usize] += 1;
        }
    }
    let area_s = s.area();
    let (mut chi, mut cells) = (0.0, 0usize);
    for j in 0..g {
        for i in 0..g {
            let c_lo = [lo[0] + i as f64 * cw, lo[1] + j as f64 * ch];
            let c_hi = [c_lo[0] + cw, c_lo[1] + ch];
            let expected = n as f64 * s.clipped_area(c_lo, c_hi) / area_s;
            if expected >= 5.0 {
                let o = counts[j * g + i] as f64;
                chi += (o - expected).powi(2) / expected;
                cells += 1;
            }
        }
    }
    let dof = cells.saturating_sub(1);
    let area_p = p.area();
    Ok(Theorem1Report {
        n,
        k,
        delta,
        inside_fraction: inside as f64 / n as f64,
        chi_square: chi,
        chi_square_dof: dof,
        chi_square_z: if dof > 0 {
            (chi - dof as f64) / (2.0 * dof as f64).sqrt()
        } else {
            0.0
        },
        area_polygon: area_p,
        area_symmetral: area_s,
        area_relative_error: (area_s - area_p).abs() / area_p,
        symmetral: s,
    })
}
