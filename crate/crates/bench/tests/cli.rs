use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bench(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_cotype-bench"));
    cmd.args(args);
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("cotype-bench-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON report on stdout")
}

fn untimed(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("timing_ms");
    if let Some(children) = v.get_mut("suites").and_then(Value::as_array_mut) {
        for c in children {
            c.as_object_mut().unwrap().remove("timing_ms");
        }
    }
    v
}

#[test]
fn bernoulli_csv_matches_golden() {
    let csv = scratch("b12.csv");
    let out = bench(&["bernoulli", "--size", "12", "--csv", csv.to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(0));
    let golden = include_str!("../../core/golden/bernoulli_n12.csv");
    assert_eq!(std::fs::read_to_string(&csv).unwrap(), golden);
    let r = report(&out);
    assert_eq!(r["quantities"]["B_1_1"], "1/3");
    assert_eq!(r["suite"], "bernoulli");
}

#[test]
fn identities_pass_exhaustively() {
    let out = bench(&["identities", "--n", "2", "--m", "8", "--k", "3"], &[]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["quantities"]["b_closed_form.mode"], "exhaustive");
}

#[test]
fn odd_modulus_is_a_config_error() {
    let out = bench(&["cotype", "--m", "7"], &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("m even"));
}

#[test]
fn random_family_needs_seed() {
    assert_eq!(bench(&["scheme", "--function", "random"], &[]).status.code(), Some(2));
    assert_eq!(bench(&["bogus"], &[]).status.code(), Some(2));
    assert_eq!(bench(&["bernoulli", "--mode", "float"], &[]).status.code(), Some(2));
}

#[test]
fn flags_override_config_file() {
    let cfg = scratch("run.cfg");
    std::fs::write(&cfg, "suite = cotype\nn = 1\nm = 6 # overridden\nq = 2\n").unwrap();
    let out = bench(&["--config", cfg.to_str().unwrap(), "--m", "4"], &[]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["params"]["m"], 4);
    assert_eq!(r["quantities"]["ratio"], "3/16");
}

#[test]
fn report_is_independent_of_thread_count() {
    let args = ["scheme", "--n", "2", "--m", "8", "--function", "random", "--seed", "3", "--count", "3"];
    let one = bench(&args, &[("COTYPE_BENCH_THREADS", "1")]);
    let three = bench(&args, &[("COTYPE_BENCH_THREADS", "3")]);
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(untimed(report(&one)), untimed(report(&three)));
    assert_eq!(bench(&args, &[("COTYPE_BENCH_THREADS", "zero")]).status.code(), Some(2));
}

#[test]
fn float_reports_carry_tolerance() {
    let out = bench(&["cotype", "--n", "2", "--m", "8", "--mode", "float"], &[]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["tolerance"], 1e-9);
    assert!(r["quantities"]["ratio"].is_f64());
}

#[test]
fn stated_fourth_moment_fails_beyond_one_coordinate() {
    assert_eq!(bench(&["lower-bounds", "--n", "1", "--m", "8", "--k", "3"], &[]).status.code(), Some(0));
    let out = bench(&["lower-bounds", "--n", "2", "--m", "8", "--k", "3"], &[]);
    assert_eq!(out.status.code(), Some(1));
    let r = report(&out);
    let failing: Vec<&str> = r["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["status"] == "fail")
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert_eq!(failing, ["fourth_moment_stated"]);
}

#[test]
fn report_written_to_file() {
    let path = scratch("sym.json");
    let out = bench(&["symmetrize", "--n", "2", "--m", "4", "--seed", "1", "--count", "2", "--out", path.to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(r["quantities"]["all_families_pass"], true);
    assert!(r["timing_ms"].is_u64());
}

#[test]
fn all_runs_every_suite() {
    let out = bench(&["all", "--n", "1", "--m", "8", "--k", "3", "--seed", "0"], &[]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&out);
    let names: Vec<&str> = r["suites"].as_array().unwrap().iter().map(|s| s["suite"].as_str().unwrap()).collect();
    assert_eq!(names, ["bernoulli", "identities", "cotype", "scheme", "lower-bounds", "symmetrize"]);
}
