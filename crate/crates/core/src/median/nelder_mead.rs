//! Nelder-Mead simplex search with restarts.

use crate::linalg;

pub(crate) struct NmOutcome {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
    pub trace: Vec<(Vec<f64>, f64)>,
}

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;
const MAX_RESTARTS: usize = 12;

struct Simplex {
    pts: Vec<Vec<f64>>,
    vals: Vec<f64>,
}

impl Simplex {
    fn around(x0: &[f64], step: f64, f: &impl Fn(&[f64]) -> f64) -> Self {
        let n = x0.len();
        let mut pts = vec![x0.to_vec()];
        for k in 0..n {
            let mut p = x0.to_vec();
            p[k] += step;
            pts.push(p);
        }
        let vals = pts.iter().map(|p| f(p)).collect();
        Self { pts, vals }
    }

    fn sort(&mut self) {
        let mut idx: Vec<usize> = (0..self.pts.len()).collect();
        idx.sort_by(|&a, &b| self.vals[a].total_cmp(&self.vals[b]).then(a.cmp(&b)));
        self.pts = idx.iter().map(|&i| self.pts[i].clone()).collect();
        self.vals = idx.iter().map(|&i| self.vals[i]).collect();
    }

    fn diameter(&self) -> f64 {
        self.pts[1..]
            .iter()
            .map(|p| linalg::dist(p, &self.pts[0]))
            .fold(0.0, f64::max)
    }
}

/// One Nelder-Mead run until the simplex diameter drops below `tol`.
fn run(
    f: &impl Fn(&[f64]) -> f64,
    x0: &[f64],
    step: f64,
    tol: f64,
    budget: usize,
    trace: &mut Option<Vec<(Vec<f64>, f64)>>,
) -> (Vec<f64>, f64, usize, bool) {
    let n = x0.len();
    let mut s = Simplex::around(x0, step, f);
    s.sort();
    let mut it = 0;
    while it < budget {
        if s.diameter() < tol {
            return (s.pts[0].clone(), s.vals[0], it, true);
        }
        it += 1;
        let worst = n;
        let centroid: Vec<f64> = (0..n)
            .map(|k| s.pts[..n].iter().map(|p| p[k]).sum::<f64>() / n as f64)
            .collect();
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&s.pts[worst])
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };
        let xr = along(REFLECT);
        let fr = f(&xr);
        if fr < s.vals[0] {
            let xe = along(EXPAND);
            let fe = f(&xe);
            if fe < fr {
                s.pts[worst] = xe;
                s.vals[worst] = fe;
            } else {
                s.pts[worst] = xr;
                s.vals[worst] = fr;
            }
        } else if fr < s.vals[n - 1] {
            s.pts[worst] = xr;
            s.vals[worst] = fr;
        } else {
            let (xc, fc) = if fr < s.vals[worst] {
                let xc = along(CONTRACT);
                let fc = f(&xc);
                (xc, fc)
            } else {
                let xc = along(-CONTRACT);
                let fc = f(&xc);
                (xc, fc)
            };
            if fc < fr.min(s.vals[worst]) {
                s.pts[worst] = xc;
                s.vals[worst] = fc;
            } else {
                let best = s.pts[0].clone();
                for i in 1..=n {
                    let p: Vec<f64> = best
                        .iter()
                        .zip(&s.pts[i])
                        .map(|(b, q)| b + SHRINK * (q - b))
                        .collect();
                    s.vals[i] = f(&p);
                    s.pts[i] = p;
                }
            }
        }
        s.sort();
        if let Some(t) = trace.as_mut() {
            t.push((s.pts[0].clone(), s.vals[0]));
        }
    }
    (s.pts[0].clone(), s.vals[0], it, false)
}

/// Minimises `f` from `x0`, restarting with a fresh simplex at the incumbent
/// until a restart neither moves it by `tol` nor lowers the value.
pub(crate) fn minimize(
    f: impl Fn(&[f64]) -> f64,
    x0: &[f64],
    initial_step: f64,
    tol: f64,
    max_iter: usize,
    record: bool,
) -> NmOutcome {
    let mut trace = record.then(Vec::new);
    if let Some(t) = trace.as_mut() {
        t.push((x0.to_vec(), f(x0)));
    }
    let mut used = 0;
    let (mut x, mut fx, it, mut converged) = run(&f, x0, initial_step, tol, max_iter, &mut trace);
    used += it;
    let mut step = initial_step;
    for _ in 0..MAX_RESTARTS {
        if used >= max_iter {
            converged = false;
            break;
        }
        step = (step * 0.1).max(10.0 * tol);
        let (y, fy, it, ok) = run(&f, &x, step, tol, max_iter - used, &mut trace);
        used += it;
        let moved = linalg::dist(&x, &y);
        let improved = fy < fx;
        if improved {
            x = y;
            fx = fy;
        }
        converged = ok;
        if !improved || moved < tol {
            break;
        }
    }
    NmOutcome {
        x,
        value: fx,
        iterations: used,
        converged,
        trace: trace.unwrap_or_default(),
    }
}
