use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn metroq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_metroq"))
        .args(args)
        .env_remove("METROQ_SEED")
        .output()
        .expect("binary runs")
}

fn json_report(args: &[&str]) -> (i32, Value) {
    let mut full = args.to_vec();
    full.extend(["--format", "json"]);
    let out = metroq(&full);
    let v = serde_json::from_slice(&out.stdout).expect("stdout is JSON");
    (out.status.code().unwrap(), v)
}

fn schema() -> jsonschema::Validator {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../schema/report.json");
    let raw: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    jsonschema::validator_for(&raw).expect("schema compiles")
}

fn assert_valid(report: &Value) {
    let v = schema();
    let errors: Vec<String> = v.iter_errors(report).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{errors:?}");
}

fn temp_path(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("metroq-{}-{name}", std::process::id()))
}

#[test]
fn verify_passes_and_validates() {
    let (code, report) = json_report(&["verify", "--n-max", "8", "--seed", "7"]);
    assert_eq!(code, 0);
    assert_eq!(report["pass"], Value::Bool(true));
    assert_valid(&report);
    for r in report["results"].as_array().unwrap() {
        if let Some(f) = r.get("min_fidelity") {
            assert!(f.as_f64().unwrap() > 1.0 - 1e-12, "{r}");
        }
    }
}

#[test]
fn verify_rejects_large_n() {
    assert_eq!(metroq(&["verify", "--n-max", "20"]).status.code(), Some(2));
}

#[test]
fn unreachable_tolerance_fails_with_residuals() {
    let (code, report) = json_report(&["verify", "--n-max", "3", "--tolerance", "1e-30"]);
    assert_eq!(code, 1);
    assert_eq!(report["pass"], Value::Bool(false));
    let vec_row = &report["results"][0];
    assert_eq!(vec_row["name"], "vec_identity");
    assert!(vec_row["value"].as_f64().unwrap() > 0.0);
    assert_valid(&report);
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["noise", "--channel", "dephasing", "--p", "1.5"][..],
        &["noise", "--channel", "depolarizing", "--p", "0.1"],
        &["scaling", "--n-values", "1,2"],
        &["scaling", "--nu", "200000"],
        &["scaling", "--rounds", "5000"],
        &["frequency", "--gamma", "-1"],
        &["noon", "--n", "13"],
        &["fisher", "--n-values", "0,1,2"],
        &["bogus"],
    ] {
        assert_eq!(metroq(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn scaling_csv_is_reproducible() {
    let (a, b) = (temp_path("a.csv"), temp_path("b.csv"));
    for p in [&a, &b] {
        let out = metroq(&[
            "scaling",
            "--strategies",
            "entangled,classical",
            "--nu",
            "1000",
            "--rounds",
            "40",
            "--seed",
            "11",
            "--out",
            p.to_str().unwrap(),
        ]);
        assert!(out.status.code() == Some(0) || out.status.code() == Some(1));
    }
    let (ca, cb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(ca, cb);
    let text = String::from_utf8(ca).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("strategy,N,nu,rounds,empirical_rmse,crb,seed"));
    assert_eq!(lines.count(), 8);
    for p in [a, b] {
        let _ = std::fs::remove_file(p);
    }
}

#[test]
fn scaling_report_has_slopes() {
    let (code, report) = json_report(&["scaling", "--seed", "5"]);
    assert_eq!(code, 0);
    assert_valid(&report);
    let slope = |tag: &str| {
        report["results"]
            .as_array()
            .unwrap()
            .iter()
            .find(|r| r["name"] == format!("slope/{tag}"))
            .map(|r| (r["fitted_slope"].as_f64().unwrap(), r["slope_stderr"].as_f64().unwrap()))
            .unwrap()
    };
    let (ent, ent_se) = slope("entangled");
    let (cla, _) = slope("classical");
    assert!((ent + 1.0).abs() <= 0.15 && ent_se > 0.0);
    assert!((cla + 0.5).abs() <= 0.15);
}

#[test]
fn unwritable_output_exits_3() {
    let out = metroq(&["scaling", "--nu", "100", "--rounds", "2", "--out", "/nonexistent-dir/x.csv"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn seed_comes_from_env_unless_flag_given() {
    let run = |env: Option<&str>, flag: Option<&str>| -> Value {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_metroq"));
        cmd.args(["verify", "--n-max", "2", "--format", "json"]).env_remove("METROQ_SEED");
        if let Some(e) = env {
            cmd.env("METROQ_SEED", e);
        }
        if let Some(f) = flag {
            cmd.args(["--seed", f]);
        }
        let v: Value = serde_json::from_slice(&cmd.output().unwrap().stdout).unwrap();
        v["config"]["seed"].clone()
    };
    assert_eq!(run(None, None), 0);
    assert_eq!(run(Some("42"), None), 42);
    assert_eq!(run(Some("42"), Some("9")), 9);
}

#[test]
fn noise_reports_channel_structure() {
    let (code, report) = json_report(&["noise", "--channel", "dephasing", "--p", "0.25"]);
    assert_eq!(code, 0);
    assert_valid(&report);
    let r = &report["results"];
    assert_eq!(r[0]["unital"], true);
    assert_eq!(r[0]["diag_or_antidiag"], true);
    assert!(r[1]["value"].as_f64().unwrap() < 1e-12);
    assert_eq!(r[2]["trace_preserving"], true);

    let (code, report) = json_report(&["noise", "--channel", "amplitudedamping", "--p", "0.3"]);
    assert_eq!(code, 0);
    assert_eq!(report["results"][2]["trace_preserving"], false);
}

#[test]
fn frequency_bound_is_n_independent() {
    let (code, report) = json_report(&["frequency", "--gamma", "1.0", "--n-values", "1,2,4,8", "--nu", "100"]);
    assert_eq!(code, 0);
    assert_valid(&report);
    let rows = report["results"].as_array().unwrap();
    for r in &rows[..4] {
        let b = r["bound_star"].as_f64().unwrap();
        assert!((b - std::f64::consts::E / 10.0).abs() < 1e-6, "{b}");
    }
}

#[test]
fn noon_and_fisher_pass() {
    let (code, report) = json_report(&["noon", "--n", "4"]);
    assert_eq!(code, 0);
    assert_valid(&report);
    assert!(report["results"][0]["value"].as_f64().unwrap() < 1e-12);

    let (code, report) = json_report(&["fisher", "--n-values", "1,2,4,8,12"]);
    assert_eq!(code, 0);
    assert_valid(&report);
    assert_eq!(report["results"][4]["qfi_entangled"].as_f64().unwrap().round(), 144.0);
}

#[test]
fn reports_are_deterministic_apart_from_timing() {
    let strip = |mut v: Value| {
        v.as_object_mut().unwrap().remove("wall_time_ms");
        v
    };
    let args = ["verify", "--n-max", "5", "--seed", "3"];
    assert_eq!(strip(json_report(&args).1), strip(json_report(&args).1));
}

#[test]
fn schema_rejects_malformed_reports() {
    let v = schema();
    let bad = serde_json::json!({
        "command": "verify",
        "config": { "seed": 1 },
        "results": [{ "name": "x" }],
        "pass": true,
        "wall_time_ms": 3
    });
    assert!(!v.is_valid(&bad));
}
