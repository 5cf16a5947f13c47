use std::process::ExitCode;

use serde::Serialize;
use zonomed::empirical::{
    self, conjecture_explorer, norm_reduction_check, symmetrize_sample, theorem1_check,
    DirectionPolicy,
};
use zonomed::gauss::{self, GaussianState, SphereOptions, SphereRule};
use zonomed::median::{MedianProblem, MedianResult, Objective, SolverOptions};
use zonomed::{ConvexPolygon2D, Direction, McEstimate, PointCloud, RegressorConfig, Zonotope};

use crate::io::{parse_vector, points_to_csv, read_json, read_points_csv, write_output};
use crate::{
    ExploreArgs, Failure, GaussArgs, IntrinsicArgs, MedianArgs, MethodArg, ObjectiveArg, PolicyArg,
    RegressorArgs, RuleArg, SymmetrizeArgs, Theorem1Args,
};

const NOT_CONVERGED: u8 = 3;

/// Resolved command line, embedded in every JSON output.
#[derive(Serialize)]
struct RunConfig<'a, T: Serialize> {
    command: &'a str,
    version: &'a str,
    #[serde(flatten)]
    args: &'a T,
}

fn config<'a, T: Serialize>(command: &'a str, args: &'a T) -> RunConfig<'a, T> {
    RunConfig {
        command,
        version: env!("CARGO_PKG_VERSION"),
        args,
    }
}

fn to_json_line(v: &impl Serialize) -> Vec<u8> {
    let mut s = serde_json::to_vec(v).expect("serializable output");
    s.push(b'\n');
    s
}

fn direction(s: &str) -> Result<Direction, Failure> {
    let v = parse_vector(s).map_err(|e| Failure::input(format!("--u: {e}")))?;
    Ok(Direction::new(v)?)
}

fn regressor(a: &RegressorArgs) -> Result<RegressorConfig, Failure> {
    match a.method {
        MethodArg::Knn => Ok(RegressorConfig::Knn { k: a.k }),
        MethodArg::ExactLinear if a.k.is_some() => {
            Err(Failure::input("--k only applies to --method knn"))
        }
        MethodArg::ExactLinear => Ok(RegressorConfig::ExactLinear),
    }
}

#[derive(Serialize)]
struct MedianOutput<'a> {
    config: RunConfig<'a, MedianArgs>,
    #[serde(flatten)]
    result: &'a MedianResult,
}

pub fn median(a: &MedianArgs) -> Result<ExitCode, Failure> {
    let cloud = PointCloud::new(read_points_csv(&a.input)?)?;
    let objective = match (a.objective, a.j) {
        (ObjectiveArg::Vj, Some(j)) => Objective::Vj { j },
        (ObjectiveArg::Vj, None) => return Err(Failure::input("--objective vj requires --j")),
        (_, Some(_)) => return Err(Failure::input("--j only applies to --objective vj")),
        (ObjectiveArg::Wills, None) => Objective::Wills,
        (ObjectiveArg::Polar, None) => Objective::Polar,
    };
    let options = SolverOptions {
        tolerance: a.tolerance,
        max_iter: a.max_iter,
        multistarts: a.multistarts,
        seed: a.seed,
        emit_trace: a.trace,
        sphere_samples: a.sphere_samples,
    };
    let result = MedianProblem::new(cloud, objective, options)?.solve()?;
    let out = MedianOutput {
        config: config("median", a),
        result: &result,
    };
    write_output(&a.output, &to_json_line(&out))?;
    Ok(if result.converged {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(NOT_CONVERGED)
    })
}

#[derive(Serialize)]
struct McEntry {
    j: usize,
    #[serde(flatten)]
    estimate: McEstimate,
    exact: f64,
    z_score: f64,
}

#[derive(Serialize)]
struct IntrinsicOutput<'a> {
    config: RunConfig<'a, IntrinsicArgs>,
    dim: usize,
    generators: usize,
    intrinsic_volumes: Vec<f64>,
    wills: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    mc: Option<Vec<McEntry>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    wills_mc: Option<McEntry>,
}

pub fn intrinsic(a: &IntrinsicArgs) -> Result<ExitCode, Failure> {
    let gens = read_points_csv(&a.input)?;
    let z = Zonotope::new(gens[0].len(), gens)?;
    let volumes = z.intrinsic_volumes();
    let seed = a.seed.unwrap_or_default();
    let mc = match a.mc {
        Some(samples) => Some(
            (1..=z.dim())
                .map(|j| {
                    let est = z.mc_intrinsic_volume(j, samples, seed)?;
                    Ok(McEntry {
                        j,
                        z_score: est.z_score(volumes[j]),
                        estimate: est,
                        exact: volumes[j],
                    })
                })
                .collect::<Result<Vec<_>, Failure>>()?,
        ),
        None => None,
    };
    let wills = z.wills_functional();
    let wills_mc = match a.wills_mc {
        Some(samples) => {
            let est = z.wills_mc_check(samples, seed)?;
            Some(McEntry {
                j: z.dim(),
                z_score: est.z_score(wills),
                estimate: est,
                exact: wills,
            })
        }
        None => None,
    };
    let out = IntrinsicOutput {
        config: config("intrinsic", a),
        dim: z.dim(),
        generators: z.num_generators(),
        intrinsic_volumes: volumes,
        wills,
        mc,
        wills_mc,
    };
    write_output(&a.output, &to_json_line(&out))?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct Spectrum {
    eigenvalues: Vec<f64>,
    det: f64,
    trace: f64,
    mean_square_norm: f64,
}

impl Spectrum {
    fn of(s: &GaussianState) -> Self {
        Self {
            eigenvalues: s.eigenvalues(),
            det: s.determinant(),
            trace: s.covariance().trace(),
            mean_square_norm: s.mean_square_norm(),
        }
    }
}

#[derive(Serialize)]
struct GaussStepOutput<'a> {
    config: RunConfig<'a, GaussArgs>,
    direction: Vec<f64>,
    regression_c: f64,
    regression_coefficient: Vec<f64>,
    norm_decrease: f64,
    before: Spectrum,
    after: Spectrum,
    state: GaussianState,
}

#[derive(Serialize)]
struct GaussSphereOutput<'a> {
    config: RunConfig<'a, GaussArgs>,
    converged: bool,
    steps: usize,
    before: Spectrum,
    after: Spectrum,
    state: &'a GaussianState,
    trace: &'a gauss::SymmetrizationTrace,
}

pub fn gauss(a: &GaussArgs) -> Result<ExitCode, Failure> {
    let state: GaussianState = read_json(&a.input)?;
    if let Some(u) = &a.u {
        let u = direction(u)?;
        let next = gauss::symmetrize_gaussian(&state, &u)?;
        let (c, w) = gauss::regression_coefficient(state.covariance(), &u)?;
        let out = GaussStepOutput {
            config: config("gauss", a),
            direction: u.as_slice().to_vec(),
            regression_c: c,
            regression_coefficient: w.iter().copied().collect(),
            norm_decrease: gauss::norm_decrease(&state, &u)?,
            before: Spectrum::of(&state),
            after: Spectrum::of(&next),
            state: next,
        };
        write_output(&a.output, &to_json_line(&out))?;
        return Ok(ExitCode::SUCCESS);
    }
    let opts = SphereOptions {
        tol: a.tol,
        max_iter: a.max_iter,
        rule: match a.rule {
            RuleArg::GeometricSplit => SphereRule::GeometricSplit,
            RuleArg::DoubleMean => SphereRule::DoubleMean,
        },
    };
    let res = gauss::sphere_iterate(&state, &opts)?;
    let out = GaussSphereOutput {
        config: config("gauss", a),
        converged: res.converged,
        steps: res.steps,
        before: Spectrum::of(&state),
        after: Spectrum::of(&res.state),
        state: &res.state,
        trace: &res.trace,
    };
    write_output(&a.output, &to_json_line(&out))?;
    Ok(if res.converged {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(NOT_CONVERGED)
    })
}

#[derive(Serialize)]
struct SymmetrizeReport<'a> {
    config: RunConfig<'a, SymmetrizeArgs>,
    n: usize,
    k: Option<usize>,
    norm_reduction: empirical::NormReduction,
}

pub fn symmetrize(a: &SymmetrizeArgs) -> Result<ExitCode, Failure> {
    let sample = PointCloud::new(read_points_csv(&a.input)?)?;
    let u = direction(&a.u)?;
    let cfg = regressor(&a.regressor)?;
    let out = symmetrize_sample(&sample, &u, &cfg)?;
    write_output(&a.output, &points_to_csv(out.points()))?;
    if let Some(path) = &a.report {
        let rep = SymmetrizeReport {
            config: config("empirical symmetrize", a),
            n: sample.len(),
            k: cfg.resolved_k(sample.len()),
            norm_reduction: norm_reduction_check(&sample, &u, &cfg)?,
        };
        write_output(path, &to_json_line(&rep))?;
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct Theorem1Output<'a> {
    config: RunConfig<'a, Theorem1Args>,
    direction: Vec<f64>,
    #[serde(flatten)]
    report: empirical::Theorem1Report,
}

pub fn theorem1(a: &Theorem1Args) -> Result<ExitCode, Failure> {
    let polygon = match &a.polygon {
        Some(p) => read_json::<ConvexPolygon2D>(p)?,
        None => ConvexPolygon2D::unit_square(),
    };
    let u = direction(&a.u)?;
    let cfg = regressor(&a.regressor)?;
    let report = theorem1_check(&polygon, &u, a.n, &cfg, a.seed)?;
    let out = Theorem1Output {
        config: config("empirical theorem1", a),
        direction: u.as_slice().to_vec(),
        report,
    };
    write_output(&a.output, &to_json_line(&out))?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct ExploreHeader<'a> {
    config: RunConfig<'a, ExploreArgs>,
    n: usize,
    k: Option<usize>,
}

pub fn explore(a: &ExploreArgs) -> Result<ExitCode, Failure> {
    let sample = PointCloud::new(read_points_csv(&a.input)?)?;
    let cfg = regressor(&a.regressor)?;
    let policy = match a.policy {
        PolicyArg::RandomSeeded => DirectionPolicy::RandomSeeded,
        PolicyArg::CyclicAxes => DirectionPolicy::CyclicAxes,
        PolicyArg::MaxAnisotropy => DirectionPolicy::MaxAnisotropy,
    };
    let reports = conjecture_explorer(&sample, a.steps, policy, &cfg, a.seed)?;
    let mut buf = to_json_line(&ExploreHeader {
        config: config("empirical explore", a),
        n: sample.len(),
        k: cfg.resolved_k(sample.len()),
    });
    for r in &reports {
        buf.extend(to_json_line(r));
    }
    write_output(&a.output, &buf)?;
    Ok(ExitCode::SUCCESS)
}
