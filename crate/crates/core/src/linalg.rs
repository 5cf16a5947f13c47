//! Small dense helpers on slices plus thin wrappers over nalgebra.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[inline]
pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// j-dimensional volume of the parallelotope spanned by `cols`, each a vector
/// of length `dim`.
///
/// Computed as the product of the Gram-Schmidt residual norms, i.e.
/// `sqrt(det(G'G))`. For `cols.len() == dim` this is `|det G|`. Uses modified
/// Gram-Schmidt with one reorthogonalisation pass, so the result is never
/// negative and collapses to (numerically) zero for dependent columns.
pub fn parallelotope_volume(cols: &[&[f64]], dim: usize) -> f64 {
    let j = cols.len();
    if j == 0 {
        return 1.0;
    }
    if j > dim {
        return 0.0;
    }
    match (j, dim) {
        (1, _) => return norm(cols[0]),
        (2, 2) => return (cols[0][0] * cols[1][1] - cols[0][1] * cols[1][0]).abs(),
        (3, 3) => {
            let (a, b, c) = (cols[0], cols[1], cols[2]);
            let det = a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0])
                + a[2] * (b[0] * c[1] - b[1] * c[0]);
            return det.abs();
        }
        _ => {}
    }
    let mut q: Vec<f64> = Vec::with_capacity(j * dim);
    let mut vol = 1.0;
    let mut v = vec![0.0; dim];
    for col in cols {
        v.copy_from_slice(col);
        let scale = norm(&v);
        if scale == 0.0 {
            return 0.0;
        }
        for _pass in 0..2 {
            for k in 0..q.len() / dim {
                let qk = &q[k * dim..(k + 1) * dim];
                let p = dot(qk, &v);
                for (vi, qi) in v.iter_mut().zip(qk) {
                    *vi -= p * qi;
                }
            }
        }
        let r = norm(&v);
        if r <= 1e-14 * scale {
            return 0.0;
        }
        vol *= r;
        q.extend(v.iter().map(|x| x / r));
    }
    vol
}

/// Numerical rank of the row vectors in `rows` (each of length `dim`).
pub fn rank_of_rows(rows: &[&[f64]], dim: usize) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let m = DMatrix::from_fn(rows.len(), dim, |r, c| rows[r][c]);
    let sv = m.singular_values();
    let max = sv.iter().cloned().fold(0.0_f64, f64::max);
    if max == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > 1e-10 * max).count()
}

/// Eigen-decomposition of a symmetric matrix with eigenvalues sorted in
/// descending order and each eigenvector sign-normalised so that its first
/// nonzero component is positive.
pub fn sorted_symmetric_eigen(m: &DMatrix<f64>) -> (Vec<f64>, Vec<DVector<f64>>) {
    let eig = SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..m.nrows()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = order
        .iter()
        .map(|&i| {
            let mut v: DVector<f64> = eig.eigenvectors.column(i).into_owned();
            let scale = v.amax();
            if let Some(first) = v.iter().find(|x| x.abs() > 1e-12 * scale) {
                if *first < 0.0 {
                    v = -v;
                }
            }
            v
        })
        .collect();
    (values, vectors)
}

/// Compensated (Neumaier) running sum.
#[derive(Debug, Default, Clone, Copy)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Calls `f` with every `k`-subset of `0..n` in lexicographic order.
pub fn for_each_combination(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
            if i == 0 {
                return;
            }
        }
        idx[i] += 1;
        for t in i + 1..k {
            idx[t] = idx[t - 1] + 1;
        }
    }
}

pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}
