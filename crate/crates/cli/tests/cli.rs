use std::io::Write;
use std::process::{Command, Output};

fn atsp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_atsp")).args(args).output().unwrap()
}

fn json(args: &[&str]) -> serde_json::Value {
    let out = atsp(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn gen_is_deterministic() {
    let args = ["gen", "--kind", "uniform-square", "--n", "20", "--seed", "9", "--out", "csv"];
    let (a, b) = (atsp(&args), atsp(&args));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(String::from_utf8(a.stdout).unwrap().lines().count(), 20);
    let other = atsp(&["gen", "--kind", "uniform-square", "--n", "20", "--seed", "10", "--out", "csv"]);
    assert_ne!(other.stdout, b.stdout);
}

#[test]
fn compare_reports_ratios() {
    let v = json(&["compare", "--kind", "collinear", "--n", "30"]);
    assert_eq!(v["jones_sum_k"], 0.0);
    assert!((v["r1"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!(v.get("timing").is_none());
    let again = json(&["compare", "--kind", "collinear", "--n", "30"]);
    assert_eq!(v, again);
}

#[test]
fn square_mst_from_a_file() {
    let mut f = tempfile();
    writeln!(f.1, "x,y\n0,0\n1,0\n1,1\n0,1").unwrap();
    let v = json(&["mst", "--input", f.0.to_str().unwrap(), "--tour"]);
    assert_eq!(v["sequence"].as_array().unwrap().len(), 7);
    assert_eq!(v["length"], 6.0);
    std::fs::remove_file(&f.0).unwrap();
}

#[test]
fn bad_input_exits_with_two() {
    assert_eq!(atsp(&["beta-sum", "--kind", "nope"]).status.code(), Some(2));
    assert_eq!(atsp(&["beta-sum", "--kind", "collinear", "--n", "1"]).status.code(), Some(2));
    assert_eq!(atsp(&["gen", "--input", "/nonexistent/points.csv"]).status.code(), Some(2));
    assert_eq!(atsp(&["nets", "--kind", "koch", "--k", "2", "--A", "0.5"]).status.code(), Some(2));
}

#[test]
fn curve_commands_need_a_curve() {
    let out = atsp(&["filtration", "--kind", "cantor4", "--k", "2"]);
    assert_eq!(out.status.code(), Some(2));
    let v = json(&["filtration", "--kind", "koch", "--k", "2", "--depth", "4"]);
    assert!(v.is_object());
}

fn tempfile() -> (std::path::PathBuf, std::fs::File) {
    let path = std::env::temp_dir().join(format!("atsp-cli-{}.csv", std::process::id()));
    let f = std::fs::File::create(&path).unwrap();
    (path, f)
}
