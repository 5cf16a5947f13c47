use super::*;
use rand::Rng as _;
use rand_distr::StandardNormal;

fn cloud(pts: &[&[f64]]) -> PointCloud {
    PointCloud::new(pts.iter().map(|p| p.to_vec()).collect()).unwrap()
}

fn random_cloud(n: usize, d: usize, seed: u64) -> PointCloud {
    let mut r = rng::seeded(seed);
    PointCloud::new(
        (0..n)
            .map(|_| (0..d).map(|_| r.sample::<f64, _>(StandardNormal)).collect())
            .collect(),
    )
    .unwrap()
}

fn opts() -> SolverOptions {
    SolverOptions {
        seed: 7,
        ..SolverOptions::default()
    }
}

fn diag(cell: &[f64]) -> f64 {
    cell.iter().map(|c| c * c).sum::<f64>().sqrt()
}

#[test]
fn problem_validation() {
    let c = random_cloud(4, 2, 1);
    assert!(MedianProblem::new(c.clone(), Objective::Vj { j: 3 }, opts()).is_err());
    assert!(MedianProblem::new(c.clone(), Objective::Vj { j: 0 }, opts()).is_err());
    let bad = SolverOptions {
        tolerance: 0.0,
        ..opts()
    };
    assert!(MedianProblem::new(c.clone(), Objective::Wills, bad).is_err());
    let bad = SolverOptions {
        multistarts: 0,
        ..opts()
    };
    assert!(MedianProblem::new(c, Objective::Wills, bad).is_err());
}

#[test]
fn v1_middle_point() {
    let c = cloud(&[&[0.0, 0.0], &[1.0, 0.0], &[10.0, 0.0]]);
    let r = v1_median(&c, &opts()).unwrap();
    assert_eq!(r.argmin, vec![1.0, 0.0]);
    assert!(r.converged);
    assert!((r.value - 10.0).abs() < 1e-12);
}

#[test]
fn v1_equilateral_centroid() {
    let h = 3f64.sqrt() / 2.0;
    let c = cloud(&[&[0.0, 0.0], &[1.0, 0.0], &[0.5, h]]);
    let r = v1_median(&c, &opts()).unwrap();
    assert!(
        linalg::dist(&r.argmin, &c.centroid()) < 1e-7,
        "{:?}",
        r.argmin
    );
    assert!(!r.non_unique);
}

#[test]
fn v1_even_collinear_is_flagged() {
    let c = cloud(&[&[0.0, 0.0], &[1.0, 0.0], &[2.0, 0.0], &[5.0, 0.0]]);
    let r = v1_median(&c, &opts()).unwrap();
    assert!(r.converged);
    assert!(r.non_unique);
    assert!(r.argmin[0] >= 1.0 - 1e-9 && r.argmin[0] <= 2.0 + 1e-9);
}

#[test]
fn v1_matches_grid_oracle() {
    let c = random_cloud(7, 2, 11);
    let r = v1_median(&c, &opts()).unwrap();
    let eval = Evaluator::new(&c, Objective::Vj { j: 1 }, &opts()).unwrap();
    let (g, gv, cell) = refined_grid_oracle(&eval, &GridBox::around(&c, 0.0), 21, 1e-3).unwrap();
    assert!(
        linalg::dist(&g, &r.argmin) <= diag(&cell),
        "{g:?} vs {:?}",
        r.argmin
    );
    assert!(r.value <= gv + 1e-12);
}

#[test]
fn value_is_recomputed_at_argmin() {
    let c = random_cloud(6, 3, 5);
    for j in 1..=3 {
        let r = vj_median(&c, j, &opts()).unwrap();
        let v = vj_objective(&r.argmin, &c, j).unwrap();
        assert!((r.value - v).abs() <= 1e-12 * v.abs());
    }
}

#[test]
fn oja_triangle_is_flat() {
    let c = cloud(&[&[0.0, 0.0], &[4.0, 0.0], &[1.0, 3.0]]);
    let r = vd_median(&c, &opts()).unwrap();
    assert!((r.value - 12.0).abs() < 1e-9, "{}", r.value);
    assert!(r.non_unique);
}

#[test]
fn oja_matches_grid_oracle() {
    let c = random_cloud(4, 2, 3);
    let r = vd_median(&c, &opts()).unwrap();
    let eval = Evaluator::new(&c, Objective::Vj { j: 2 }, &opts()).unwrap();
    let (g, gv, cell) = refined_grid_oracle(&eval, &GridBox::around(&c, 0.0), 21, 1e-3).unwrap();
    assert!(r.value <= gv + 1e-12, "{} > {}", r.value, gv);
    if !r.non_unique {
        assert!(linalg::dist(&g, &r.argmin) <= diag(&cell));
    }
}

#[test]
fn oja_degenerate_cloud() {
    let c = cloud(&[&[0.0, 0.0], &[1.0, 1.0], &[2.0, 2.0]]);
    assert!(matches!(
        vd_median(&c, &opts()),
        Err(Error::DegenerateCloud {
            affine_dim: 1,
            required: 2
        })
    ));
}

#[test]
fn oja_affine_equivariance() {
    let c = random_cloud(7, 2, 21);
    let a = [[1.3, 0.4], [-0.7, 0.9]];
    let b = [2.0, -1.0];
    let map = |p: &[f64]| -> Vec<f64> {
        (0..2)
            .map(|r| a[r][0] * p[0] + a[r][1] * p[1] + b[r])
            .collect()
    };
    let r0 = vd_median(&c, &opts()).unwrap();
    let r1 = vd_median(&c.map(|p| map(p)).unwrap(), &opts()).unwrap();
    assert!(!r0.non_unique);
    let expect = map(&r0.argmin);
    assert!(
        linalg::dist(&expect, &r1.argmin) < 1e-7,
        "{expect:?} vs {:?}",
        r1.argmin
    );
    let det = (a[0][0] * a[1][1] - a[0][1] * a[1][0]).abs();
    assert!((r1.value - det * r0.value).abs() < 1e-9 * r1.value);
}

#[test]
fn dispatch_contract() {
    let c = random_cloud(6, 3, 9);
    assert_eq!(
        vj_median(&c, 1, &opts()).unwrap(),
        v1_median(&c, &opts()).unwrap()
    );
    assert_eq!(
        vj_median(&c, 3, &opts()).unwrap(),
        vd_median(&c, &opts()).unwrap()
    );
}

#[test]
fn intermediate_j_matches_grid_oracle() {
    let c = random_cloud(6, 3, 13);
    let r = vj_median(&c, 2, &opts()).unwrap();
    let eval = Evaluator::new(&c, Objective::Vj { j: 2 }, &opts()).unwrap();
    let (g, gv, cell) = refined_grid_oracle(&eval, &GridBox::around(&c, 0.0), 11, 1e-3).unwrap();
    assert!(r.value <= gv + 1e-9, "{} > {}", r.value, gv);
    assert!(
        linalg::dist(&g, &r.argmin) <= diag(&cell),
        "{g:?} vs {:?}",
        r.argmin
    );
}

#[test]
fn intermediate_j_degenerate() {
    let c = cloud(&[&[0.0, 0.0, 0.0], &[1.0, 2.0, 0.0], &[2.0, 4.0, 0.0]]);
    assert!(matches!(
        vj_median(&c, 2, &opts()),
        Err(Error::DegenerateCloud { .. })
    ));
}

#[test]
fn wills_single_point() {
    let c = cloud(&[&[1.5, -2.0]]);
    let r = wills_median(&c, &opts()).unwrap();
    assert_eq!(r.argmin, vec![1.5, -2.0]);
    assert_eq!(r.value, 1.0);
}

#[test]
fn wills_square_center() {
    let c = cloud(&[&[0.0, 0.0], &[2.0, 0.0], &[0.0, 2.0], &[2.0, 2.0]]);
    let r = wills_median(&c, &opts()).unwrap();
    assert!(
        linalg::dist(&r.argmin, &[1.0, 1.0]) < 1e-6,
        "{:?}",
        r.argmin
    );
}

#[test]
fn wills_matches_grid_oracle() {
    let c = random_cloud(5, 2, 17);
    let r = wills_median(&c, &opts()).unwrap();
    let eval = Evaluator::new(&c, Objective::Wills, &opts()).unwrap();
    let (g, gv, cell) = refined_grid_oracle(&eval, &GridBox::around(&c, 0.0), 21, 1e-3).unwrap();
    assert!(r.value <= gv + 1e-9);
    assert!(linalg::dist(&g, &r.argmin) <= diag(&cell));
}

#[test]
fn polar_symmetric_cloud() {
    let c = cloud(&[
        &[3.0, 1.0],
        &[-1.0, 1.0],
        &[1.0, 2.5],
        &[1.0, -0.5],
        &[2.0, 2.0],
        &[0.0, 0.0],
        &[1.0, 1.0],
    ]);
    let r = polar_median(&c, &opts()).unwrap();
    assert!(
        linalg::dist(&r.argmin, &[1.0, 1.0]) < 1e-6,
        "{:?}",
        r.argmin
    );
}

#[test]
fn polar_matches_grid_oracle_and_translates() {
    let c = random_cloud(5, 2, 19);
    let r = polar_median(&c, &opts()).unwrap();
    let eval = Evaluator::new(&c, Objective::Polar, &opts()).unwrap();
    let (g, gv, cell) = refined_grid_oracle(&eval, &GridBox::around(&c, 0.0), 21, 1e-3).unwrap();
    assert!(r.value >= gv - 1e-9 * gv);
    assert!(linalg::dist(&g, &r.argmin) <= diag(&cell));

    let t = [5.0, -3.0];
    let shifted = c.map(|p| vec![p[0] + t[0], p[1] + t[1]]).unwrap();
    let s = polar_median(&shifted, &opts()).unwrap();
    let expect = [r.argmin[0] + t[0], r.argmin[1] + t[1]];
    assert!(linalg::dist(&expect, &s.argmin) < 1e-6);
}

#[test]
fn polar_degenerate() {
    let c = cloud(&[&[0.0, 0.0], &[1.0, 0.0], &[3.0, 0.0]]);
    assert!(matches!(
        polar_median(&c, &opts()),
        Err(Error::DegenerateCloud { .. })
    ));
}

#[test]
fn grid_refinement_never_worse() {
    let c = random_cloud(5, 2, 23);
    let eval = Evaluator::new(&c, Objective::Vj { j: 1 }, &opts()).unwrap();
    let bx = GridBox::around(&c, 0.1);
    let (_, coarse) = grid_oracle(&eval, &bx, 11).unwrap();
    let (_, fine) = grid_oracle(&eval, &bx, 21).unwrap();
    assert!(fine <= coarse);
}

#[test]
fn grid_constant_region() {
    let c = cloud(&[&[0.0, 0.0], &[4.0, 0.0], &[1.0, 3.0]]);
    let eval = Evaluator::new(&c, Objective::Vj { j: 2 }, &opts()).unwrap();
    let (g, v) = grid_oracle(&eval, &GridBox::around(&c, 0.0), 41).unwrap();
    assert!((v - 12.0).abs() < 1e-9);
    assert!((eval.value(&g) - 12.0).abs() < 1e-9);
}

#[test]
fn trace_emitted_on_request() {
    let c = random_cloud(5, 2, 29);
    let o = SolverOptions {
        emit_trace: true,
        ..opts()
    };
    let r = v1_median(&c, &o).unwrap();
    let t = r.trace.unwrap();
    assert!(!t.is_empty());
    for w in t.windows(2) {
        assert!(w[1].value <= w[0].value * (1.0 + 1e-12));
    }
    assert!(v1_median(&c, &opts()).unwrap().trace.is_none());
}

#[test]
fn rotation_equivariance_v1() {
    let c = random_cloud(6, 2, 31);
    let (s, co) = (0.6f64.sin(), 0.6f64.cos());
    let rot = |p: &[f64]| vec![co * p[0] - s * p[1], s * p[0] + co * p[1]];
    let r0 = v1_median(&c, &opts()).unwrap();
    let r1 = v1_median(&c.map(|p| rot(p)).unwrap(), &opts()).unwrap();
    assert!(linalg::dist(&rot(&r0.argmin), &r1.argmin) < 1e-7);
}
