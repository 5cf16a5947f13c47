use rand::Rng;
use rand_distr::StandardNormal;
use zonomed::empirical::{conjecture_explorer, DirectionPolicy};
use zonomed::gauss::sphere_iterate;
use zonomed::rng::seeded;
use zonomed::{
    ConvexPolygon2D, GaussianState, MedianProblem, MedianResult, Objective, PointCloud,
    RegressorConfig, SolverOptions, SphereOptions, Zonotope,
};

#[test]
fn explorer_spherizes_an_anisotropic_gaussian() {
    let mut r = seeded(3);
    let pts = (0..20_000)
        .map(|_| {
            let a: f64 = r.sample(StandardNormal);
            let b: f64 = r.sample(StandardNormal);
            vec![a, 2.0 * b + 0.5 * a]
        })
        .collect();
    let sample = PointCloud::new(pts).unwrap();
    let reports = conjecture_explorer(
        &sample,
        200,
        DirectionPolicy::MaxAnisotropy,
        &RegressorConfig::ExactLinear,
        1,
    )
    .unwrap();
    assert_eq!(reports.len(), 201);
    assert!(reports[0].anisotropy > 3.0);
    assert!(reports.last().unwrap().anisotropy < 1.1);
}

#[test]
fn median_result_round_trips_through_json() {
    let cloud = PointCloud::new(vec![
        vec![0.0, 0.0],
        vec![2.0, 0.0],
        vec![0.5, 1.5],
        vec![1.0, 0.4],
    ])
    .unwrap();
    let opts = SolverOptions {
        emit_trace: true,
        ..SolverOptions::default()
    };
    for objective in [
        Objective::Vj { j: 1 },
        Objective::Vj { j: 2 },
        Objective::Wills,
    ] {
        let res = MedianProblem::new(cloud.clone(), objective, opts.clone())
            .unwrap()
            .solve()
            .unwrap();
        let text = serde_json::to_string(&res).unwrap();
        let back: MedianResult = serde_json::from_str(&text).unwrap();
        assert_eq!(back, res);
    }
}

#[test]
fn gaussian_state_json_validates() {
    let ok: GaussianState =
        serde_json::from_str(r#"{"mean":[0,1],"covariance":[[2,0.5],[0.5,1]]}"#).unwrap();
    let out = sphere_iterate(&ok, &SphereOptions::default()).unwrap();
    assert!(out.converged);
    assert!(out.state.mean().norm() < 1e-12);
    assert!(serde_json::from_str::<GaussianState>(r#"{"mean":[0],"covariance":[[-1]]}"#).is_err());
    assert!(
        serde_json::from_str::<GaussianState>(r#"{"mean":[0,0],"covariance":[[1,0]]}"#).is_err()
    );
}

#[test]
fn planar_zonotope_polygon_matches_volumes() {
    let z = Zonotope::new(2, vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]]).unwrap();
    let p: ConvexPolygon2D = z.to_polygon().unwrap();
    assert!((p.area() - 3.0).abs() < 1e-12);
    assert!((p.perimeter() - 2.0 * z.intrinsic_volume(1)).abs() < 1e-12);
    let text = serde_json::to_string(&p).unwrap();
    assert_eq!(serde_json::from_str::<ConvexPolygon2D>(&text).unwrap(), p);
}
