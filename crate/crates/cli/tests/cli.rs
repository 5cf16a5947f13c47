use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_zonomed"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn zonomed")
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "exit {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("json output")
}

fn floats(v: &Value) -> Vec<f64> {
    v.as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect()
}

#[test]
fn median_of_equilateral_triangle_is_centroid() {
    let dir = TempDir::new().unwrap();
    let h = 3f64.sqrt() / 2.0;
    let f = write(dir.path(), "tri.csv", &format!("x,y\n0,0\n1,0\n0.5,{h}\n"));
    for objective in ["vj", "wills"] {
        let mut args = vec![
            "median",
            "--input",
            f.to_str().unwrap(),
            "--seed",
            "7",
            "--objective",
            objective,
        ];
        if objective == "vj" {
            args.extend(["--j", "1"]);
        }
        let v = json(&run(&args));
        let m = floats(&v["argmin"]);
        assert!(
            (m[0] - 0.5).abs() < 1e-6 && (m[1] - h / 3.0).abs() < 1e-6,
            "{m:?}"
        );
        assert_eq!(v["converged"], true);
        assert_eq!(v["config"]["seed"], 7);
    }
}

#[test]
fn oja_median_of_triangle_is_flagged_non_unique() {
    let dir = TempDir::new().unwrap();
    let f = write(dir.path(), "tri.csv", "0,0\n1,0\n0,1\n");
    let v = json(&run(&[
        "median",
        "--objective",
        "vj",
        "--j",
        "2",
        "--input",
        f.to_str().unwrap(),
        "--seed",
        "1",
    ]));
    assert_eq!(v["non_unique"], true);
    assert!(
        (v["value"].as_f64().unwrap() - 1.0).abs() < 1e-9,
        "sum of |det| over pairs"
    );
}

#[test]
fn malformed_csv_is_an_input_error() {
    let dir = TempDir::new().unwrap();
    let f = write(dir.path(), "bad.csv", "1,2\n3,oops\n");
    let out = run(&[
        "median",
        "--objective",
        "wills",
        "--input",
        f.to_str().unwrap(),
        "--seed",
        "0",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let ragged = write(dir.path(), "ragged.csv", "1,2\n3\n");
    let out = run(&[
        "median",
        "--objective",
        "wills",
        "--input",
        ragged.to_str().unwrap(),
        "--seed",
        "0",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&[
        "median",
        "--objective",
        "wills",
        "--input",
        "/nonexistent.csv",
        "--seed",
        "0",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn vj_without_j_is_rejected() {
    let dir = TempDir::new().unwrap();
    let f = write(dir.path(), "p.csv", "0,0\n1,0\n0,1\n");
    let out = run(&[
        "median",
        "--objective",
        "vj",
        "--input",
        f.to_str().unwrap(),
        "--seed",
        "0",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn intrinsic_volumes_of_a_box() {
    let dir = TempDir::new().unwrap();
    let f = write(dir.path(), "g.csv", "2,0\n0,3\n");
    let v = json(&run(&["intrinsic", "--input", f.to_str().unwrap()]));
    assert_eq!(floats(&v["intrinsic_volumes"]), vec![1.0, 5.0, 6.0]);
    assert_eq!(v["wills"].as_f64().unwrap(), 12.0);
    assert!(v.get("mc").is_none());
}

#[test]
fn intrinsic_mc_requires_seed() {
    let dir = TempDir::new().unwrap();
    let f = write(dir.path(), "g.csv", "2,0\n0,3\n");
    let out = run(&["intrinsic", "--input", f.to_str().unwrap(), "--mc", "1000"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn gauss_spherize_diagonal() {
    let dir = TempDir::new().unwrap();
    let f = write(
        dir.path(),
        "g.json",
        r#"{"mean":[0,0],"covariance":[[1,0],[0,4]]}"#,
    );
    let v = json(&run(&[
        "gauss",
        "--input",
        f.to_str().unwrap(),
        "--spherize",
    ]));
    assert_eq!(v["converged"], true);
    let cov = &v["state"]["covariance"];
    for i in 0..2 {
        for j in 0..2 {
            let want = if i == j { 2.0 } else { 0.0 };
            assert!((cov[i][j].as_f64().unwrap() - want).abs() < 1e-9);
        }
    }
}

#[test]
fn gauss_identity_takes_no_steps() {
    let dir = TempDir::new().unwrap();
    let f = write(
        dir.path(),
        "g.json",
        r#"{"mean":[0,0,0],"covariance":[[1,0,0],[0,1,0],[0,0,1]]}"#,
    );
    let v = json(&run(&[
        "gauss",
        "--input",
        f.to_str().unwrap(),
        "--spherize",
    ]));
    assert_eq!(v["steps"], 0);
    assert_eq!(v["trace"]["steps"].as_array().unwrap().len(), 0);
}

#[test]
fn gauss_single_step_reports_decrease() {
    let dir = TempDir::new().unwrap();
    let f = write(
        dir.path(),
        "g.json",
        r#"{"mean":[1,2],"covariance":[[1,0],[0,4]]}"#,
    );
    let v = json(&run(&[
        "gauss",
        "--input",
        f.to_str().unwrap(),
        "--u",
        "1,1",
    ]));
    let before = v["before"]["mean_square_norm"].as_f64().unwrap();
    let after = v["after"]["mean_square_norm"].as_f64().unwrap();
    assert!((before - after - v["norm_decrease"].as_f64().unwrap()).abs() < 1e-10);
}

#[test]
fn gauss_rejects_bad_covariances() {
    let dir = TempDir::new().unwrap();
    let asym = write(
        dir.path(),
        "a.json",
        r#"{"mean":[0,0],"covariance":[[1,0.5],[0,1]]}"#,
    );
    let sing = write(
        dir.path(),
        "s.json",
        r#"{"mean":[0,0],"covariance":[[1,1],[1,1]]}"#,
    );
    for f in [asym, sing] {
        let out = run(&["gauss", "--input", f.to_str().unwrap(), "--spherize"]);
        assert_eq!(out.status.code(), Some(2));
    }
    let out = run(&["gauss", "--input", "x.json"]);
    assert_eq!(out.status.code(), Some(2), "missing mode");
}

#[test]
fn theorem1_on_unit_square() {
    let v = json(&run(&[
        "empirical",
        "theorem1",
        "--u",
        "1,1",
        "--n",
        "20000",
        "--seed",
        "5",
    ]));
    assert!(v["inside_fraction"].as_f64().unwrap() >= 0.99);
    assert!(v["area_relative_error"].as_f64().unwrap() < 1e-12);
}

#[test]
fn symmetrize_writes_csv_and_report() {
    let dir = TempDir::new().unwrap();
    let f = write(dir.path(), "s.csv", "0,0\n1,0\n0,1\n1,1\n0.5,0.2\n");
    let out = dir.path().join("out.csv");
    let rep = dir.path().join("rep.json");
    let o = run(&[
        "empirical",
        "symmetrize",
        "--input",
        f.to_str().unwrap(),
        "--u",
        "0,1",
        "--method",
        "exact-linear",
        "--output",
        out.to_str().unwrap(),
        "--report",
        rep.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let rows = std::fs::read_to_string(&out).unwrap();
    assert_eq!(rows.lines().count(), 5);
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&rep).unwrap()).unwrap();
    let nr = &r["norm_reduction"];
    let d = nr["decrease"].as_f64().unwrap();
    assert!((d - nr["fitted_mean_square"].as_f64().unwrap()).abs() < 1e-12);
}

#[test]
fn k_larger_than_sample_is_rejected() {
    let dir = TempDir::new().unwrap();
    let f = write(dir.path(), "s.csv", "0,0\n1,0\n0,1\n");
    let out = run(&[
        "empirical",
        "symmetrize",
        "--input",
        f.to_str().unwrap(),
        "--u",
        "0,1",
        "--k",
        "4",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn explore_emits_config_then_reports() {
    let dir = TempDir::new().unwrap();
    let body: String = (0..200)
        .map(|i| {
            let t = i as f64 * 0.37;
            format!(
                "{},{}\n",
                t.cos() * (1.0 + (i % 7) as f64 * 0.1),
                2.0 * t.sin()
            )
        })
        .collect();
    let f = write(dir.path(), "s.csv", &body);
    let out = run(&[
        "empirical",
        "explore",
        "--input",
        f.to_str().unwrap(),
        "--steps",
        "4",
        "--seed",
        "1",
    ]);
    assert!(out.status.success());
    let lines: Vec<Value> = out
        .stdout
        .split(|&b| b == b'\n')
        .filter(|l| !l.is_empty())
        .map(|l| serde_json::from_slice(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 6, "config line, initial report, one per step");
    assert_eq!(lines[0]["config"]["command"], "empirical explore");
    assert_eq!(lines[1]["step"], 0);
    assert_eq!(lines[5]["step"], 4);
}

#[test]
fn outputs_are_deterministic_across_thread_counts() {
    let dir = TempDir::new().unwrap();
    let f = write(
        dir.path(),
        "p.csv",
        "0,0\n2,0.1\n0.3,1.7\n1.1,1.2\n-0.4,0.6\n",
    );
    let args = [
        "median",
        "--objective",
        "wills",
        "--input",
        f.to_str().unwrap(),
        "--seed",
        "11",
    ];
    let a = bin()
        .args(args)
        .env("ZONOMED_THREADS", "1")
        .output()
        .unwrap();
    let b = bin()
        .args(args)
        .env("ZONOMED_THREADS", "4")
        .output()
        .unwrap();
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn output_file_is_written() {
    let dir = TempDir::new().unwrap();
    let f = write(dir.path(), "g.csv", "1,0\n0,1\n1,1\n");
    let out = dir.path().join("o.json");
    let o = run(&[
        "intrinsic",
        "--input",
        f.to_str().unwrap(),
        "--output",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success() && o.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(v["generators"], 3);
}
