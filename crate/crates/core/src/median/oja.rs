//! Minimisation of the V_d (Oja) objective `sum_S |a_S . x + b_S|`.
//!
//! The objective is convex and piecewise linear. A Polyak-type subgradient
//! method with an adaptive target level gets close; the result is then
//! refined by compass moves and snapped onto the vertex of the hyperplane
//! arrangement that minimises the objective nearby.

use super::objective::{small_det, AffineTerm};
use crate::linalg;

pub(crate) struct OjaOutcome {
    pub x: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub trace: Vec<(Vec<f64>, f64)>,
}

pub(crate) fn oja_value(terms: &[AffineTerm], x: &[f64]) -> f64 {
    terms.iter().map(|t| t.eval(x).abs()).sum()
}

fn subgradient(terms: &[AffineTerm], x: &[f64]) -> Vec<f64> {
    let mut g = vec![0.0; x.len()];
    for t in terms {
        let v = t.eval(x);
        if v != 0.0 {
            let s = v.signum();
            for (gk, ak) in g.iter_mut().zip(&t.a) {
                *gk += s * ak;
            }
        }
    }
    g
}

fn solve(mut m: Vec<f64>, mut rhs: Vec<f64>, n: usize) -> Option<Vec<f64>> {
    let scale = m.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    if scale == 0.0 {
        return None;
    }
    for col in 0..n {
        let piv =
            (col..n).max_by(|&a, &b| m[a * n + col].abs().total_cmp(&m[b * n + col].abs()))?;
        if m[piv * n + col].abs() <= 1e-12 * scale {
            return None;
        }
        if piv != col {
            for k in 0..n {
                m.swap(piv * n + k, col * n + k);
            }
            rhs.swap(piv, col);
        }
        for r in 0..n {
            if r != col {
                let f = m[r * n + col] / m[col * n + col];
                for k in col..n {
                    m[r * n + k] -= f * m[col * n + k];
                }
                rhs[r] -= f * rhs[col];
            }
        }
    }
    Some((0..n).map(|k| rhs[k] / m[k * n + k]).collect())
}

/// Moves to the best vertex formed by `d` of the hyperplanes nearest to `x`.
fn vertex_polish(terms: &[AffineTerm], x: &mut Vec<f64>, fx: &mut f64) -> bool {
    let d = x.len();
    let mut near: Vec<(f64, usize)> = terms
        .iter()
        .enumerate()
        .filter_map(|(i, t)| {
            let n = linalg::norm(&t.a);
            (n > 0.0).then(|| (t.eval(x).abs() / n, i))
        })
        .collect();
    near.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    near.truncate(d + 4);
    let mut best: Option<(Vec<f64>, f64)> = None;
    linalg::for_each_combination(near.len(), d, |s| {
        let mut m = Vec::with_capacity(d * d);
        let mut rhs = Vec::with_capacity(d);
        for &k in s {
            let t = &terms[near[k].1];
            m.extend_from_slice(&t.a);
            rhs.push(-t.b);
        }
        if small_det(m.clone(), d) == 0.0 {
            return;
        }
        if let Some(z) = solve(m, rhs, d) {
            let fz = oja_value(terms, &z);
            if best.as_ref().is_none_or(|b| fz < b.1) {
                best = Some((z, fz));
            }
        }
    });
    match best {
        Some((z, fz)) if fz < *fx - 1e-15 * fx.abs() => {
            *x = z;
            *fx = fz;
            true
        }
        _ => false,
    }
}

/// Axis-aligned pattern search; returns whether any move was accepted.
fn compass(terms: &[AffineTerm], x: &mut [f64], fx: &mut f64, start: f64, tol: f64) -> bool {
    let mut h = start;
    let mut moved = false;
    while h >= tol {
        let mut improved = false;
        for k in 0..x.len() {
            for sign in [1.0, -1.0] {
                let old = x[k];
                x[k] = old + sign * h;
                let f = oja_value(terms, x);
                if f < *fx {
                    *fx = f;
                    improved = true;
                    moved = true;
                } else {
                    x[k] = old;
                }
            }
        }
        if !improved {
            h *= 0.5;
        }
    }
    moved
}

pub(crate) fn minimize_oja(
    terms: &[AffineTerm],
    start: &[f64],
    scale: f64,
    tol: f64,
    max_iter: usize,
    record: bool,
) -> OjaOutcome {
    let mut trace = Vec::new();
    let mut x = start.to_vec();
    let mut fx = oja_value(terms, &x);
    let mut best = (x.clone(), fx);
    if record {
        trace.push(best.clone());
    }
    let budget = max_iter.min(2000 * x.len());
    let mut gap = 0.5 * fx;
    let mut stall = 0;
    let mut iterations = 0;
    let mut stationary = false;
    while iterations < budget {
        iterations += 1;
        let g = subgradient(terms, &x);
        let gg = linalg::dot(&g, &g);
        if gg == 0.0 {
            stationary = true;
            break;
        }
        let target = best.1 - gap;
        let step = (fx - target) / gg;
        for (xk, gk) in x.iter_mut().zip(&g) {
            *xk -= step * gk;
        }
        fx = oja_value(terms, &x);
        if fx < best.1 {
            best = (x.clone(), fx);
            stall = 0;
            if record {
                trace.push(best.clone());
            }
        } else {
            stall += 1;
            if stall > 10 {
                gap *= 0.5;
                x = best.0.clone();
                fx = best.1;
                stall = 0;
            }
        }
        if gap <= 1e-14 * best.1.abs().max(f64::MIN_POSITIVE) {
            break;
        }
    }
    let (mut x, mut fx) = best;
    if !stationary {
        for _round in 0..8 {
            let a = compass(terms, &mut x, &mut fx, 1e-3 * scale, tol);
            let b = vertex_polish(terms, &mut x, &mut fx);
            if record && (a || b) {
                trace.push((x.clone(), fx));
            }
            if !a && !b {
                break;
            }
        }
    }
    OjaOutcome {
        x,
        iterations,
        converged: true,
        trace,
    }
}
