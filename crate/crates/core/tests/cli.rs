use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_dicke-ppt"));
    c.env_remove("DICKE_PPT_OUT_DIR");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn classify_exit_codes() {
    let sep = run(&["classify", "--n", "4", "--p", "1,1,1,1,1"]);
    assert_eq!(sep.status.code(), Some(0), "{}", stderr(&sep));
    let v = json(&sep);
    assert_eq!(v["verdict"], "Separable");
    assert_eq!(v["tri_rank"], serde_json::json!([5, 8, 9]));

    let ent = run(&["classify", "--dicke", "4,2"]);
    assert_eq!(ent.status.code(), Some(1));
    assert_eq!(json(&ent)["verdict"], "Entangled");

    let bad = run(&["classify", "--n", "4", "--p", "0.2,-0.1,0.3,0.3,0.3"]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(stderr(&bad).starts_with("error:"));

    let both = run(&["classify", "--dicke", "4,2", "--jc", "2,1"]);
    assert_eq!(both.status.code(), Some(2));

    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn jc_state_reports_unnormalized_determinants() {
    let out = run(&["classify", "--jc", "2,1"]);
    let v = json(&out);
    let e = v["E_unnormalized"].as_array().unwrap();
    let want = [0.0, 0.0, 0.1875, -3.375];
    for (x, w) in e.iter().zip(want) {
        assert!((x.as_f64().unwrap() - w).abs() < 1e-9, "{e:?}");
    }
    assert_eq!(v["oracle_ppt"]["1"], true);
    assert_eq!(v["oracle_ppt"]["2"], true);
}

#[test]
fn state_file_parse_errors_name_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.json");
    std::fs::write(&good, r#"{"n": 4, "p": [0.1, 0.2, 0.3, 0.2, 0.2]}"#).unwrap();
    let out = run(&["classify", "--state", good.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));

    let csv = dir.path().join("state.csv");
    std::fs::write(&csv, "# n,p0..p4\n4,0.1,0.2,0.3,0.2,0.2\n").unwrap();
    let from_csv = run(&["classify", "--state", csv.to_str().unwrap()]);
    assert_eq!(json(&from_csv)["verdict"], json(&out)["verdict"]);

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"n\": 4, \"p\": [0.1, oops]}").unwrap();
    let out = run(&["classify", "--state", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("bad.json"), "{}", stderr(&out));
}

#[test]
fn config_file_and_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"resolution": 8, "format": "json"}"#).unwrap();
    let out = run(&[
        "--config",
        cfg.to_str().unwrap(),
        "scan",
        "simplex",
        "--p0",
        "0.1",
        "--p4",
        "0.1",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = json(&out);
    assert_eq!(v.as_array().unwrap().len(), 45);

    std::fs::write(&cfg, r#"{"resolution": 8, "colour": "blue"}"#).unwrap();
    let out = run(&["--config", cfg.to_str().unwrap(), "selftest", "--quick"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("cfg.json"));

    let out = run(&["--psd-tol", "-1", "classify", "--dicke", "4,2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn relative_outputs_follow_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .env("DICKE_PPT_OUT_DIR", dir.path())
        .args([
            "scan",
            "simplex",
            "--p0",
            "0.1",
            "--p4",
            "0.1",
            "--res",
            "8",
            "--out",
            "sub/grid.csv",
        ])
        .args(["--plot", "sub/grid.gp"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let csv = std::fs::read_to_string(dir.path().join("sub/grid.csv")).unwrap();
    assert!(csv.starts_with(
        "p0,p1,p2,p3,p4,verdict,ppt1,ppt2,E1,E2,E3,F2,q_min,nonlocal,peres,r0,r1,r2\n"
    ));
    assert_eq!(csv.lines().count(), 46);
    let gp = std::fs::read_to_string(dir.path().join("sub/grid.gp")).unwrap();
    assert!(gp.contains("grid.csv"));
}

#[test]
fn dump_pt_writes_the_dense_transpose() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pt.csv");
    let out = run(&[
        "classify",
        "--dicke",
        "4,2",
        "--dump-pt",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 16);
    assert!(text.lines().all(|l| l.split(',').count() == 16));
}

#[test]
fn bell_subcommand() {
    let v = json(&run(&[
        "bell", "--dicke", "4,2", "--k-ref", "2", "--theta", "0", "--phi", "0",
    ]));
    assert!(v["q"].as_f64().unwrap().abs() < 1e-9);
    assert_eq!(v["violated"], false);

    let v = json(&run(&["bell", "--dicke", "4,2", "--optimize"]));
    assert!((v["q"].as_f64().unwrap() + 3.5274).abs() < 1e-3);
    assert_eq!(v["violated"], true);

    let out = run(&["bell", "--common", "--n", "4"]);
    let v = json(&out);
    let (t, p) = (v["theta"].as_f64().unwrap(), v["phi"].as_f64().unwrap());
    assert!((t - 3.916).abs() < 0.02 && (p - 3.002).abs() < 0.02, "{v}");
}

fn scan_bytes(dir: &Path, name: &str, workers: &str) -> Vec<u8> {
    let path = dir.join(name);
    let out = run(&[
        "scan",
        "simplex",
        "--p0",
        "0.1",
        "--p4",
        "0.1",
        "--res",
        "16",
        "--workers",
        workers,
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    std::fs::read(path).unwrap()
}

#[test]
fn repeated_scans_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = scan_bytes(dir.path(), "a.csv", "1");
    let b = scan_bytes(dir.path(), "b.csv", "3");
    assert_eq!(a, b);
}

#[test]
fn witness_exit_codes() {
    let out = run(&["witness", "--target", "separable", "--res", "48"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(json(&out)["verdict"], "Separable");
    let out = run(&["witness", "--target", "nonlocal", "--res", "8"]);
    assert_eq!(out.status.code(), Some(1));
    let out = run(&["witness", "--p0", "0.7", "--p4", "0.7"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn selftest_quick_passes() {
    let out = run(&["selftest", "--quick"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    let out = run(&["--force-p-convention", "selftest", "--quick"]);
    assert_eq!(out.status.code(), Some(1));
}
