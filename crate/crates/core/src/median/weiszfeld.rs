//! Weiszfeld iteration for the spatial (L1) median with the Vardi-Zhang
//! modification at sample points.

use crate::cloud::PointCloud;
use crate::linalg;

pub(crate) struct WeiszfeldOutcome {
    pub x: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub trace: Vec<(Vec<f64>, f64)>,
}

fn distance_sum(x: &[f64], cloud: &PointCloud) -> f64 {
    cloud.points().map(|p| linalg::dist(x, p)).sum()
}

/// Returns `(multiplicity, R(y))` where `R(y) = sum_{x_i != y} (x_i - y) / |x_i - y|`.
fn pull(y: &[f64], cloud: &PointCloud, coincide: f64) -> (usize, Vec<f64>) {
    let mut eta = 0;
    let mut r = vec![0.0; y.len()];
    for p in cloud.points() {
        let dist = linalg::dist(p, y);
        if dist <= coincide {
            eta += 1;
        } else {
            for k in 0..y.len() {
                r[k] += (p[k] - y[k]) / dist;
            }
        }
    }
    (eta, r)
}

pub(crate) fn weiszfeld(
    cloud: &PointCloud,
    start: &[f64],
    tol: f64,
    max_iter: usize,
    record: bool,
) -> WeiszfeldOutcome {
    let d = cloud.dim();
    let scale = cloud.spread().max(f64::MIN_POSITIVE);
    let coincide = 1e-12 * scale;
    let mut y = start.to_vec();
    let mut trace = Vec::new();
    if record {
        trace.push((y.clone(), distance_sum(&y, cloud)));
    }
    for it in 1..=max_iter {
        // Optimality test at the nearest sample point: x_k is the median iff
        // |R(x_k)| <= multiplicity(x_k).
        let nearest = cloud
            .points()
            .min_by(|a, b| linalg::dist(a, &y).total_cmp(&linalg::dist(b, &y)))
            .unwrap();
        let (eta_k, r_k) = pull(nearest, cloud, coincide);
        if linalg::norm(&r_k) <= eta_k as f64 {
            if linalg::dist(nearest, &y) > 0.0 {
                y = nearest.to_vec();
                if record {
                    trace.push((y.clone(), distance_sum(&y, cloud)));
                }
            }
            return WeiszfeldOutcome {
                x: y,
                iterations: it,
                converged: true,
                trace,
            };
        }

        let mut eta = 0usize;
        let mut wsum = 0.0;
        let mut t = vec![0.0; d];
        let mut r = vec![0.0; d];
        for p in cloud.points() {
            let dist = linalg::dist(p, &y);
            if dist <= coincide {
                eta += 1;
                continue;
            }
            let w = 1.0 / dist;
            wsum += w;
            for k in 0..d {
                t[k] += w * p[k];
                r[k] += w * (p[k] - y[k]);
            }
        }
        if wsum == 0.0 {
            return WeiszfeldOutcome {
                x: y,
                iterations: it,
                converged: true,
                trace,
            };
        }
        t.iter_mut().for_each(|v| *v /= wsum);
        let next: Vec<f64> = if eta == 0 {
            t
        } else {
            let rn = linalg::norm(&r);
            if rn <= eta as f64 {
                return WeiszfeldOutcome {
                    x: y,
                    iterations: it,
                    converged: true,
                    trace,
                };
            }
            let gamma = (eta as f64 / rn).min(1.0);
            t.iter()
                .zip(&y)
                .map(|(ti, yi)| (1.0 - gamma) * ti + gamma * yi)
                .collect()
        };
        let step = linalg::dist(&next, &y);
        y = next;
        if record {
            trace.push((y.clone(), distance_sum(&y, cloud)));
        }
        if step < tol {
            return WeiszfeldOutcome {
                x: y,
                iterations: it,
                converged: true,
                trace,
            };
        }
    }
    WeiszfeldOutcome {
        x: y,
        iterations: max_iter,
        converged: false,
        trace,
    }
}
