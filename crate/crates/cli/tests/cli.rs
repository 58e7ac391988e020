use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
}

fn intercomp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_intercomp"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_file(cmd: &str, file: &str, extra: &[&str]) -> Output {
    let path = data(file);
    let mut args = vec![cmd, "--input", path.to_str().unwrap()];
    args.extend_from_slice(extra);
    intercomp(&args)
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn h2(p: f64) -> f64 {
    -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
}

fn num(v: &Value) -> f64 {
    v.as_f64().unwrap_or_else(|| panic!("not a number: {v}"))
}

#[test]
fn sumrate_two_messages_and() {
    let out = run_file("sumrate", "dsbs_and.json", &[]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));
    let v = json_of(&out);
    assert_eq!(v["version"], "1");
    assert_eq!(v["kind"], "sumrate");
    assert!((num(&v["results"]["achieved"]) - 1.5 * h2(0.3)).abs() < 1e-8);
    assert_eq!(v["results"]["method"], "brute_force");
    assert_eq!(v["results"]["ladder"].as_array().unwrap().len(), 2);
    assert!(stderr_of(&out).contains("wall time"));
}

#[test]
fn penalty_run_is_byte_identical() {
    let a = run_file("sumrate", "dsbs_and_penalty.json", &[]);
    let b = run_file("sumrate", "dsbs_and_penalty.json", &[]);
    assert_eq!(a.status.code(), Some(0), "{}", stderr_of(&a));
    assert_eq!(a.stdout, b.stdout);
    let v = json_of(&a);
    assert_eq!(v["provenance"]["seed"], 7);
    let ladder = v["results"]["ladder"].as_array().unwrap();
    let values: Vec<f64> = ladder
        .iter()
        .filter(|r| r["status"] == "feasible")
        .map(|r| num(&r["achieved"]))
        .collect();
    assert!(values.windows(2).all(|w| w[1] <= w[0] + 1e-9), "{values:?}");
}

#[test]
fn seed_flag_overrides_file() {
    let out = run_file("sumrate", "dsbs_and_penalty.json", &["--seed", "11"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_of(&out)["provenance"]["seed"], 11);
}

#[test]
fn info_values() {
    let out = run_file("info", "info_dsbs.json", &[]);
    assert_eq!(out.status.code(), Some(0));
    let r = &json_of(&out)["results"];
    assert!((num(&r["joint_entropy"]) - (1.0 + h2(0.3))).abs() < 1e-8);
    assert!((num(&r["queries"][1]["value"]) - h2(0.3)).abs() < 1e-8);
    assert!((num(&r["queries"][2]["value"]) - (1.0 - h2(0.3))).abs() < 1e-8);
}

#[test]
fn analyze_and() {
    let out = run_file("analyze", "analyze_and.json", &[]);
    assert_eq!(out.status.code(), Some(0));
    let r = &json_of(&out)["results"];
    assert_eq!(r["support"]["full"], true);
    assert_eq!(r["theorem3_i"], true);
    assert_eq!(r["rectangles"]["f_B"].as_array().unwrap().len(), 3);
    assert_eq!(num(&r["han_kobayashi"]["one_message_bound_start_A"]), 1.0);
}

#[test]
fn allocate_four_message_staircase() {
    let out = run_file("allocate", "allocate_fair.json", &[]);
    assert_eq!(out.status.code(), Some(0));
    let r = &json_of(&out)["results"];
    assert_eq!(r["t"], 4);
    let rates: Vec<f64> = r["rates"].as_array().unwrap().iter().map(num).collect();
    assert!((rates.iter().sum::<f64>() - num(&r["sum"])).abs() < 1e-8);
    assert!((num(&r["sum"]) - 1.405639).abs() < 1e-6);
    assert!(num(&r["theorem4_bound"]) <= num(&r["integral"]));
    assert!((num(&r["regions"]["area_x"]) + num(&r["regions"]["area_y"]) - 0.75).abs() < 1e-9);
}

#[test]
fn network_xor_lp() {
    let out = run_file("network", "network_xor.json", &[]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));
    let r = &json_of(&out)["results"];
    assert_eq!(r["lp"]["status"], "optimal");
    assert!((num(&r["lp"]["optimum"]) - 1.622557).abs() < 1e-6);
    assert!(num(&r["comparisons"][0]["gap"]).abs() < 1e-7);
    assert!(r["schemes"]["star[2]"]["below_ceiling"].as_bool().unwrap());
}

#[test]
fn text_format_and_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("report.txt");
    let out = run_file(
        "allocate",
        "allocate_fair.json",
        &["--format", "text", "--output", target.to_str().unwrap()],
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&target).unwrap();
    assert!(text.contains("results.sum = 1.405639062"), "{text}");
    assert!(text.contains("kind = \"allocate\""));
}

#[test]
fn paper_examples_pass() {
    let out = intercomp(&["paper-examples"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));
    let r = &json_of(&out)["results"];
    assert_eq!(r["failed"], 0);
    assert!(r["rows"]
        .as_array()
        .unwrap()
        .iter()
        .all(|row| row["pass"] == true));
}

#[test]
fn tight_tolerance_fails_rows_with_exit_1() {
    let out = intercomp(&["paper-examples", "--tolerance", "1e-15", "--format", "text"]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("FAIL"));
    assert!(stderr_of(&out).contains("checks failed"));
}

#[test]
fn malformed_pmf_names_the_field() {
    let out = run_file("info", "bad_pmf.json", &[]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr_of(&out);
    assert!(err.contains("`pmf`") && err.contains("sum"), "{err}");
    assert!(out.stdout.is_empty());
}

#[test]
fn unknown_field_is_rejected() {
    let out = run_file("sumrate", "unknown_field.json", &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("`rounds`"));
}

#[test]
fn kind_mismatch_is_rejected() {
    let out = run_file("sumrate", "info_dsbs.json", &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("`kind`"));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(intercomp(&["bogus"]).status.code(), Some(2));
    assert_eq!(intercomp(&["info"]).status.code(), Some(2));
    assert_eq!(
        intercomp(&["info", "--input", "/nonexistent/problem.json"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        intercomp(&["paper-examples", "--tolerance", "-1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        intercomp(&["info", "--format", "yaml"]).status.code(),
        Some(2)
    );
}

#[test]
fn help_exits_0() {
    let out = intercomp(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("paper-examples"));
}

#[test]
fn in_process_run_matches_binary() {
    let path = data("allocate_fair.json");
    let mut stdout = Vec::new();
    let mut stderr = Vec::new();
    let code = intercomp_cli::run(
        &["intercomp", "allocate", "--input", path.to_str().unwrap()],
        &mut stdout,
        &mut stderr,
    );
    assert_eq!(code, 0);
    assert_eq!(
        stdout,
        run_file("allocate", "allocate_fair.json", &[]).stdout
    );
}
