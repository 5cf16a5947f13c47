//! k-nearest-neighbour means. Neighbours are ranked by `(distance, row)`,
//! so ties always go to the lower row index.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rayon::prelude::*;

/// For every row `r` of `pts` (`n x dim`, row-major), the mean of `y` over
/// the `k` nearest rows (including `r` itself).
pub(crate) fn knn_means(pts: &[f64], dim: usize, y: &[f64], k: usize) -> Vec<f64> {
    let n = y.len();
    debug_assert!(k >= 1 && k <= n);
    if dim == 1 {
        line_means(pts, y, k)
    } else {
        let tree = KdTree::build(pts, dim);
        (0..n)
            .into_par_iter()
            .map(|r| {
                let nb = tree.nearest(&pts[r * dim..(r + 1) * dim], k);
                nb.iter().map(|&i| y[i]).sum::<f64>() / k as f64
            })
            .collect()
    }
}

fn line_means(p: &[f64], y: &[f64], k: usize) -> Vec<f64> {
    let n = p.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| p[a].total_cmp(&p[b]).then(a.cmp(&b)));
    let sorted: Vec<f64> = order.iter().map(|&i| p[i]).collect();
    let mut prefix = vec![0.0; n + 1];
    for (j, &i) in order.iter().enumerate() {
        prefix[j + 1] = prefix[j] + y[i];
    }
    let mut pos = vec![0usize; n];
    for (j, &i) in order.iter().enumerate() {
        pos[i] = j;
    }
    (0..n)
        .into_par_iter()
        .map(|r| {
            let c = p[r];
            let j = pos[r];
            // Radius of the k-th neighbour: merge the two sides outward.
            let (mut lo, mut hi) = (j, j + 1);
            let mut radius = 0.0_f64;
            while hi - lo < k {
                let dl = if lo > 0 {
                    c - sorted[lo - 1]
                } else {
                    f64::INFINITY
                };
                let dr = if hi < n {
                    sorted[hi] - c
                } else {
                    f64::INFINITY
                };
                if dl <= dr {
                    lo -= 1;
                    radius = radius.max(dl);
                } else {
                    hi += 1;
                    radius = radius.max(dr);
                }
            }
            // Rows strictly inside the radius form a contiguous block, as do
            // rows within it; the difference is the tie set at the boundary.
            let in_lt = |v: f64| (v - c).abs() < radius;
            let in_le = |v: f64| (v - c).abs() <= radius;
            let lt_lo = sorted[..j].partition_point(|&v| !in_lt(v));
            let lt_hi = j + sorted[j..].partition_point(|&v| in_lt(v));
            let le_lo = sorted[..j].partition_point(|&v| !in_le(v));
            let le_hi = j + sorted[j..].partition_point(|&v| in_le(v));
            let (lt_lo, lt_hi) = if radius == 0.0 {
                (j, j)
            } else {
                (lt_lo, lt_hi)
            };
            let mut sum = prefix[lt_hi] - prefix[lt_lo];
            let need = k - (lt_hi - lt_lo);
            if need > 0 {
                let mut ties: Vec<usize> = (le_lo..lt_lo)
                    .chain(lt_hi..le_hi)
                    .map(|q| order[q])
                    .collect();
                ties.sort_unstable();
                sum += ties[..need].iter().map(|&i| y[i]).sum::<f64>();
            }
            sum / k as f64
        })
        .collect()
}

const LEAF: usize = 16;

enum Node {
    Leaf(Vec<usize>),
    Split {
        axis: usize,
        value: f64,
        left: Box<Node>,
        right: Box<Node>,
    },
}

pub(crate) struct KdTree<'a> {
    pts: &'a [f64],
    dim: usize,
    root: Node,
}

#[derive(PartialEq)]
struct Cand(f64, usize);

impl Eq for Cand {}

impl PartialOrd for Cand {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Cand {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0).then(self.1.cmp(&other.1))
    }
}

impl<'a> KdTree<'a> {
    pub fn build(pts: &'a [f64], dim: usize) -> Self {
        let idx: Vec<usize> = (0..pts.len() / dim).collect();
        let root = Self::split(pts, dim, idx);
        Self { pts, dim, root }
    }

    fn split(pts: &[f64], dim: usize, mut idx: Vec<usize>) -> Node {
        if idx.len() <= LEAF {
            return Node::Leaf(idx);
        }
        let spread = |a: usize| {
            let (lo, hi) = idx
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &i| {
                    let v = pts[i * dim + a];
                    (lo.min(v), hi.max(v))
                });
            hi - lo
        };
        let axis = (0..dim)
            .max_by(|&a, &b| spread(a).total_cmp(&spread(b)).then(b.cmp(&a)))
            .unwrap();
        if spread(axis) == 0.0 {
            return Node::Leaf(idx);
        }
        let mid = idx.len() / 2;
        idx.select_nth_unstable_by(mid, |&a, &b| {
            pts[a * dim + axis]
                .total_cmp(&pts[b * dim + axis])
                .then(a.cmp(&b))
        });
        let value = pts[idx[mid] * dim + axis];
        let right = idx.split_off(mid);
        Node::Split {
            axis,
            value,
            left: Box::new(Self::split(pts, dim, idx)),
            right: Box::new(Self::split(pts, dim, right)),
        }
    }

    fn dist2(&self, i: usize, q: &[f64]) -> f64 {
        self.pts[i * self.dim..(i + 1) * self.dim]
            .iter()
            .zip(q)
            .map(|(a, b)| (a - b) * (a - b))
            .sum()
    }

    /// Indices of the `k` nearest rows to `q`, nearest first.
    pub fn nearest(&self, q: &[f64], k: usize) -> Vec<usize> {
        let mut heap = BinaryHeap::with_capacity(k + 1);
        self.visit(&self.root, q, k, &mut heap);
        heap.into_sorted_vec().into_iter().map(|c| c.1).collect()
    }

    fn visit(&self, node: &Node, q: &[f64], k: usize, heap: &mut BinaryHeap<Cand>) {
        match node {
            Node::Leaf(idx) => {
                for &i in idx {
                    let c = Cand(self.dist2(i, q), i);
                    if heap.len() < k {
                        heap.push(c);
                    } else if c < *heap.peek().unwrap() {
                        heap.pop();
                        heap.push(c);
                    }
                }
            }
            Node::Split {
                axis,
                value,
                left,
                right,
            } => {
                let diff = q[*axis] - value;
                let (near, far) = if diff < 0.0 {
                    (left, right)
                } else {
                    (right, left)
                };
                self.visit(near, q, k, heap);
                // `<=` keeps equal-distance rows with lower indices reachable.
                if heap.len() < k || diff * diff <= heap.peek().unwrap().0 {
                    self.visit(far, q, k, heap);
                }
            }
        }
    }
}
