use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn corpus(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(name).display().to_string()
}

fn polyflow(args: &[&str], envs: &[(&str, &str)]) -> (Option<i32>, Value, String) {
    let out: Output = Command::new(env!("CARGO_BIN_EXE_polyflow"))
        .args(args)
        .env_remove("POLYFLOW_FUEL_DEFAULT")
        .envs(envs.iter().copied())
        .output()
        .expect("the binary runs");
    let json = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (out.status.code(), json, String::from_utf8_lossy(&out.stderr).into_owned())
}

#[test]
fn check_reports_shapes() {
    let (code, v, _) = polyflow(&["check", &corpus("wd_full.json")], &[]);
    assert_eq!(code, Some(0));
    assert_eq!(v["boxes"][0]["minus"], "y^2");
    assert_eq!(v["boxes"][0]["plus"], "y + y^3");
    assert_eq!(v["outer"]["plus"], "1 + y^3");
    assert_eq!(v["undefined"], 1);
}

#[test]
fn dangling_reference_exits_two_with_its_path() {
    let (code, v, stderr) = polyflow(&["check", &corpus("invalid/dangling_summand.json")], &[]);
    assert_eq!(code, Some(2));
    assert_eq!(v["error"]["kind"], "validation");
    assert_eq!(v["error"]["path"], "wiring[0].to.summand");
    assert!(stderr.contains("wiring[0].to.summand"));
}

#[test]
fn syntax_error_exits_two_with_a_line() {
    let (code, v, _) = polyflow(&["check", &corpus("invalid/syntax.json")], &[]);
    assert_eq!(code, Some(2));
    assert_eq!(v["error"]["kind"], "parse");
}

#[test]
fn fuel_default_comes_from_the_environment() {
    let (code, v, _) = polyflow(&["run", "--builtin", "factorial", "--input", r#"{"N":5}"#], &[("POLYFLOW_FUEL_DEFAULT", "3")]);
    assert_eq!((code, v["outcome"].as_str()), (Some(1), Some("FuelExhausted")));
    let (code, v, _) = polyflow(&["run", "--builtin", "factorial", "--input", r#"{"N":5}"#], &[]);
    assert_eq!((code, v["value"].as_i64()), (Some(0), Some(120)));
}

#[test]
fn run_reads_diagram_and_filler_files() {
    let (code, v, _) = polyflow(
        &["run", &corpus("factorial.json"), "--fillers", &corpus("fillers/factorial.json"), "--input", r#"{"N":4}"#],
        &[],
    );
    assert_eq!(code, Some(0));
    assert_eq!(v["value"], 24);
    assert_eq!(v["output"]["res"], 24);
}

#[test]
fn looping_trajectory_exits_one() {
    let start = r#"{"summand": 1, "values": {}}"#;
    let (code, v, _) = polyflow(&["traj", &corpus("traj_figure.json"), "--fillers", &corpus("fillers/traj_loop.json"), "--start", start], &[]);
    assert_eq!((code, v["outcome"].as_str()), (Some(1), Some("Diverged")));
    let (code, v, _) = polyflow(&["traj", &corpus("traj_figure.json"), "--fillers", &corpus("fillers/traj_figure.json"), "--start", start, "--max", "2"], &[]);
    assert_eq!((code, v["outcome"].as_str()), (Some(1), Some("MaxSteps")));
}

#[test]
fn composite_is_written_and_checks() {
    let out: PathBuf = std::env::temp_dir().join(format!("polyflow-compose-{}.json", std::process::id()));
    let target = out.display().to_string();
    let (code, v, _) = polyflow(&["compose", &corpus("wd_full.json"), "P1", &corpus("p1_impl.json"), "-o", &target], &[]);
    assert_eq!(code, Some(0));
    assert_eq!(v["boxes"], serde_json::json!(["P1.G", "P2"]));
    let (code, v, _) = polyflow(&["check", &target], &[]);
    assert_eq!(code, Some(0));
    assert_eq!(v["boxes"][0]["name"], "P1.G");
    std::fs::remove_file(out).ok();
}

#[test]
fn composing_into_a_mismatched_slot_exits_two() {
    let (code, v, _) = polyflow(&["compose", &corpus("wd_full.json"), "P2", &corpus("p1_impl.json")], &[]);
    assert_eq!(code, Some(2));
    assert!(v["error"]["message"].as_str().unwrap().contains("box"));
    let (code, _, _) = polyflow(&["compose", &corpus("wd_full.json"), "Nope", &corpus("p1_impl.json")], &[]);
    assert_eq!(code, Some(2));
}

#[test]
fn laws_report_is_seeded() {
    let (code, v, _) = polyflow(&["laws", "--seed", "3", "--cases", "20"], &[]);
    assert_eq!(code, Some(0));
    assert_eq!(v["seed"], 3);
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["failed"] == 0));
}
