use super::*;
use crate::gauss::{symmetrize_gaussian, GaussianState};
use rand::Rng;
use rand_distr::StandardNormal;

fn gaussian_sample(n: usize, sd: &[f64], seed: u64) -> EmpiricalSample {
    let mut r = crate::rng::seeded(seed);
    PointCloud::new(
        (0..n)
            .map(|_| {
                sd.iter()
                    .map(|s| s * r.sample::<f64, _>(StandardNormal))
                    .collect()
            })
            .collect(),
    )
    .unwrap()
}

fn diagonal() -> Direction {
    Direction::new(vec![1.0, 1.0]).unwrap()
}

#[test]
fn one_dimensional_subtracts_global_mean() {
    let s = PointCloud::new(vec![vec![1.0], vec![2.0], vec![6.0]]).unwrap();
    let out = symmetrize_sample(
        &s,
        &Direction::axis(1, 0).unwrap(),
        &RegressorConfig::default(),
    )
    .unwrap();
    assert_eq!(out.to_vecs(), vec![vec![-2.0], vec![-1.0], vec![3.0]]);
    assert_eq!(out.centroid(), vec![0.0]);
}

#[test]
fn flat_projection_falls_back_to_global_mean() {
    let s = PointCloud::new(vec![vec![1.0, 0.0], vec![1.0, 3.0], vec![1.0, 6.0]]).unwrap();
    let out = symmetrize_sample(
        &s,
        &Direction::axis(2, 1).unwrap(),
        &RegressorConfig::Knn { k: Some(1) },
    )
    .unwrap();
    assert_eq!(
        out.to_vecs(),
        vec![vec![1.0, -3.0], vec![1.0, 0.0], vec![1.0, 3.0]]
    );
}

#[test]
fn k_too_large() {
    let s = gaussian_sample(10, &[1.0, 1.0], 1);
    assert!(matches!(
        symmetrize_sample(&s, &diagonal(), &RegressorConfig::Knn { k: Some(11) }),
        Err(Error::KTooLarge { k: 11, n: 10 })
    ));
}

#[test]
fn default_k_is_ceil_sqrt() {
    assert_eq!(default_k(100_000), 317);
    assert_eq!(default_k(100), 10);
    assert_eq!(default_k(1), 1);
}

#[test]
fn gaussian_cross_validation() {
    let n = 100_000;
    let s = gaussian_sample(n, &[1.0, 2.0], 3);
    let out = symmetrize_sample(&s, &diagonal(), &RegressorConfig::ExactLinear).unwrap();
    let state = GaussianState::centered(DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 4.0])))
        .unwrap();
    let exact = symmetrize_gaussian(&state, &diagonal()).unwrap();
    let diff = sample_covariance(&out) - exact.covariance();
    let gap = diff.symmetric_eigenvalues().amax();
    assert!(gap < 5.0 / (n as f64).sqrt() * 4.0, "{gap}");
}

#[test]
fn projection_coordinates_unchanged() {
    let s = gaussian_sample(2_000, &[1.0, 2.0, 0.5], 4);
    let u = Direction::new(vec![0.3, -1.0, 0.7]).unwrap();
    let out = symmetrize_sample(&s, &u, &RegressorConfig::default()).unwrap();
    for b in u.complement_basis() {
        for (x, y) in s.points().zip(out.points()) {
            assert!((linalg::dot(&b, x) - linalg::dot(&b, y)).abs() < 1e-12);
        }
    }
}

#[test]
fn exact_linear_pythagoras_and_idempotence() {
    let s = gaussian_sample(5_000, &[1.0, 2.0, 3.0], 5)
        .map(|x| vec![x[0] + 1.0, x[1] - 2.0, x[2]])
        .unwrap();
    let u = Direction::new(vec![1.0, 2.0, -1.0]).unwrap();
    let nr = norm_reduction_check(&s, &u, &RegressorConfig::ExactLinear).unwrap();
    assert!(nr.decrease >= 0.0);
    assert!((nr.decrease - nr.fitted_mean_square).abs() < 1e-10 * nr.before);

    let once = symmetrize_sample(&s, &u, &RegressorConfig::ExactLinear).unwrap();
    let twice = symmetrize_sample(&once, &u, &RegressorConfig::ExactLinear).unwrap();
    for (a, b) in once.points().zip(twice.points()) {
        assert!(linalg::dist(a, b) < 1e-10);
    }
}

#[test]
fn gaussian_decrease_matches_closed_form() {
    let n = 100_000;
    let s = gaussian_sample(n, &[1.0, 2.0], 6);
    let nr = norm_reduction_check(&s, &diagonal(), &RegressorConfig::ExactLinear).unwrap();
    let state = GaussianState::centered(DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 4.0])))
        .unwrap();
    let exact = crate::gauss::norm_decrease(&state, &diagonal()).unwrap();
    assert!(
        (nr.decrease - exact).abs() < 5.0 / (n as f64).sqrt() * exact,
        "{} vs {exact}",
        nr.decrease
    );
}

#[test]
fn reflection_symmetric_sample_has_small_shifts() {
    let n = 10_000;
    let mut r = crate::rng::seeded(9);
    let mut rows = Vec::with_capacity(n);
    for _ in 0..n / 2 {
        let (t, y): (f64, f64) = (r.random::<f64>() * 2.0 - 1.0, r.random::<f64>());
        rows.push(vec![t, y]);
        rows.push(vec![t, -y]);
    }
    let s = PointCloud::new(rows).unwrap();
    let cfg = RegressorConfig::default();
    let m = conditional_means(&s, &Direction::axis(2, 1).unwrap(), &cfg).unwrap();
    let k = cfg.resolved_k(n).unwrap() as f64;
    let rms = (m.iter().map(|v| v * v).sum::<f64>() / n as f64).sqrt();
    assert!(rms < 10.0 / k.sqrt() + (n as f64).powf(-0.25), "{rms}");
    let nr = norm_reduction_check(&s, &Direction::axis(2, 1).unwrap(), &cfg).unwrap();
    assert!(nr.decrease.abs() < 0.01, "{nr:?}");
}

#[test]
fn knn_three_dimensional_runs_and_reduces_norm() {
    let s = gaussian_sample(3_000, &[1.0, 2.0, 3.0], 10);
    let nr = norm_reduction_check(
        &s,
        &Direction::new(vec![1.0, 1.0, 1.0]).unwrap(),
        &RegressorConfig::default(),
    )
    .unwrap();
    assert!(nr.decrease > 0.0);
    assert!(
        (nr.decrease - nr.fitted_mean_square).abs() < 0.2 * nr.fitted_mean_square,
        "{nr:?}"
    );
}
