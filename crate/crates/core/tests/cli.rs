use std::process::{Command, Output};

use serde_json::Value;

fn cliffkern(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cliffkern"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = cliffkern(args);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{args:?}: {e}"))
}

const EVERY_SUBCOMMAND: &[&[&str]] = &[
    &["quadratic", "eval", "--matrix", "1,0;0,-1", "--x", "1,2"],
    &["quadratic", "polarize", "--diag", "1,-1", "--x", "1,2", "--y", "3,4"],
    &["quadratic", "signature", "--matrix", "2,1;1,2"],
    &["quadratic", "diagonalize", "--matrix", "2,1;1,2"],
    &["clifford", "mul", "--n", "2", "--a", "e1", "--b", "e1"],
    &["clifford", "wedge", "--n", "3", "--a", "e1+e2", "--b", "e3"],
    &["clifford", "add", "--n", "2", "--a", "e1", "--b", "2*e1e2"],
    &["clifford", "sub", "--n", "2", "--a", "e1", "--b", "e2"],
    &["clifford", "reverse", "--n", "3", "--a", "e1e2e3"],
    &["clifford", "grade", "--n", "3", "--a", "1+e1+e1e2", "--k", "1"],
    &["clifford", "norm", "--n", "3", "--a", "e1e2+e3"],
    &["clifford", "basis", "--n", "2", "--diag", "1,-1"],
    &["clifford", "check", "--n", "3", "--trials", "20"],
    &["legendre", "point", "--f", "power", "--p", "3", "--y", "2"],
    &["legendre", "grid", "--f", "power", "--p", "2", "--m", "3"],
    &["legendre", "invert", "--f", "power", "--p", "3", "--x-star", "4"],
    &[
        "legendre",
        "hessian",
        "--f",
        "minkowski",
        "--p",
        "1",
        "--n",
        "2",
        "--y",
        "0.3,0.4",
    ],
    &["legendre", "tangent", "--f", "double_well", "--y", "2"],
    &[
        "legendre",
        "clifford",
        "--f",
        "minkowski",
        "--p",
        "1",
        "--n",
        "2",
        "--y",
        "1,1",
    ],
    &["tensor", "norms", "--rows", "2", "--cols", "2", "--entries", "1,0,0,2"],
    &["tensor", "bounds", "--dims", "2,2,2", "--entries", "1,0,0,0,0,0,0,1"],
    &["tensor", "shells", "--lmax", "3"],
    &["tensor", "truncation", "--ratio", "0.5", "--len", "10", "--nmax", "3"],
    &["tensor", "check", "--count", "20"],
    &["kernel", "eval", "--name", "poly", "--s", "0.1", "--t", "0.2"],
    &["kernel", "eval", "--name", "fourier", "--grid", "3"],
    &["kernel", "eval", "--name", "green1d", "--s", "0.3", "--t", "0.6"],
    &["kernel", "eval", "--name", "bergman", "--s", "0.1+0.2i", "--t", "0.3"],
    &["kernel", "eval", "--name", "log", "--s", "0.1", "--t", "0.2i"],
    &[
        "kernel", "verify", "--name", "sobolev", "--test", "sin:1,0", "--t", "0.5",
    ],
    &["kernel", "gram", "--name", "sobolev", "--points", "0.2,0.5,0.9"],
    &[
        "fock",
        "--pairing",
        "sobolev",
        "--points",
        "0.2,0.5,0.8",
        "--symmetry",
        "wedge",
    ],
    &[
        "fock",
        "gamma",
        "--pairing",
        "sobolev",
        "--mmax",
        "2",
        "--points",
        "0.2,0.5",
    ],
    &["ledger"],
];

#[test]
fn clifford_mul_example() {
    let v = json(&["clifford", "mul", "--n", "2", "--diag", "1,1", "--a", "e1", "--b", "e1"]);
    assert_eq!(v["terms"], serde_json::json!([{"blades": [], "c": 1.0}]));
}

#[test]
fn legendre_point_example() {
    let v = json(&["legendre", "point", "--f", "power", "--p", "3", "--y", "2"]);
    assert_eq!(v["x_star"], serde_json::json!([4.0]));
    assert!((v["z_star"].as_f64().unwrap() + 16.0 / 3.0).abs() < 1e-10);
}

#[test]
fn sobolev_eval_example() {
    let v = json(&[
        "kernel", "eval", "--name", "sobolev", "--a", "0", "--b", "1", "--s", "0.3", "--t", "0.7",
    ]);
    assert_eq!(v["value"].as_f64(), Some(0.3));
}

#[test]
fn every_subcommand_is_versioned_and_round_trips() {
    for args in EVERY_SUBCOMMAND {
        let out = cliffkern(args);
        assert_eq!(out.status.code(), Some(0), "{args:?}");
        let text = String::from_utf8(out.stdout).unwrap();
        let v: Value = serde_json::from_str(&text).unwrap();
        let schema = v["schema"].as_str().unwrap_or_else(|| panic!("{args:?} has no schema"));
        assert!(schema.starts_with("cliffkern.") && schema.ends_with("/1"), "{schema}");
        assert_eq!(serde_json::to_string(&v).unwrap() + "\n", text, "{args:?}");
    }
}

#[test]
fn every_subcommand_renders_csv() {
    for args in EVERY_SUBCOMMAND {
        let mut with_csv = vec!["--output", "csv"];
        with_csv.extend_from_slice(args);
        let out = cliffkern(&with_csv);
        assert_eq!(out.status.code(), Some(0), "{args:?}");
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .from_reader(out.stdout.as_slice());
        assert!(reader.records().count() > 0, "{args:?}");
    }
}

#[test]
fn identical_flags_give_identical_bytes() {
    for args in [
        &["ledger", "--seed", "7"][..],
        &["clifford", "check", "--n", "4", "--trials", "50", "--seed", "3"],
        &["tensor", "check", "--count", "50", "--seed", "11"],
    ] {
        let a = cliffkern(args);
        let b = cliffkern(args);
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["bogus"][..],
        &["clifford", "mul", "--n", "2", "--a", "e1", "--b", "e1", "--unknown"],
        &["clifford", "mul", "--n", "2", "--a", "e3", "--b", "e1"],
        &["quadratic", "eval", "--diag", "1,2", "--x", "1,2,3"],
        &[
            "kernel", "eval", "--name", "green1d", "--s", "0.1", "--t", "0.2", "--bc", "robin",
        ],
    ] {
        let out = cliffkern(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn numerical_failure_exits_1_with_error_object() {
    let y = (1.0f64 / 3.0).sqrt().to_string();
    let out = cliffkern(&["legendre", "hessian", "--f", "double_well", "--y", &y]);
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["schema"], "cliffkern.error/1");
    assert_eq!(v["error"]["kind"], "singular");
}

#[test]
fn help_exits_0() {
    let out = cliffkern(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("ledger"));
}
