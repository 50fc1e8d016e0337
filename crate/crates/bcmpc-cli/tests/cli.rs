//! End-to-end tests of the compiled `bcmpc` binary.

use std::path::Path;
use std::process::{Command, Output};

use bcmpc::Params;

fn bcmpc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bcmpc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn data(name: &str) -> String {
    format!("{}/tests/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn run_writes_csv_metrics_and_plot() {
    let out = tempfile::tempdir().unwrap();
    let dir = out.path().to_str().unwrap();
    let result = bcmpc(&["run", "--scenario", "scenario-1", "--out", dir, "--plot"]);
    assert!(result.status.success(), "{result:?}");

    let csv = std::fs::read_to_string(out.path().join("run.csv")).unwrap();
    assert!(csv.starts_with(
        "time_s,north_m,east_m,sog_mps,course_rad,desired_sog_mps,desired_course_rad\n"
    ));
    let svg = std::fs::read_to_string(out.path().join("scenario.svg")).unwrap();
    assert!(svg.starts_with("<svg "));
    assert!(out.path().join("metrics.json").exists());
}

#[test]
fn scenario_one_metrics_list_no_moving_obstacles() {
    let out = tempfile::tempdir().unwrap();
    let dir = out.path().to_str().unwrap();
    let result = bcmpc(&["run", "--scenario", "scenario-1", "--out", dir]);
    assert!(result.status.success(), "{result:?}");

    let metrics: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.path().join("metrics.json")).unwrap())
            .unwrap();
    assert_eq!(
        metrics["min_moving_distances_m"].as_array().unwrap().len(),
        0
    );
    assert_eq!(metrics["collision_region_entries"], 0);
}

#[test]
fn golden_seeded_run_reproduces_the_committed_csv() {
    let out = tempfile::tempdir().unwrap();
    let dir = out.path().to_str().unwrap();
    let result = bcmpc(&[
        "run",
        "--scenario",
        &data("golden-scenario.json"),
        "--out",
        dir,
    ]);
    assert!(result.status.success(), "{result:?}");

    let produced = std::fs::read(out.path().join("run.csv")).unwrap();
    let golden = std::fs::read(data("golden-run.csv")).unwrap();
    assert_eq!(produced, golden, "CSV log drifted from the golden file");
}

#[test]
fn params_file_changes_the_replanning_cadence() {
    let out = tempfile::tempdir().unwrap();
    let slow = Params {
        planner_period_s: 20.0,
        ..Params::default()
    };
    let params_path = out.path().join("slow.json");
    std::fs::write(&params_path, slow.to_json_pretty()).unwrap();

    let scenario = data("golden-scenario.json");
    let iterations = |args: &[&str]| -> u64 {
        let dir = tempfile::tempdir().unwrap();
        let mut full = vec![
            "run",
            "--scenario",
            scenario.as_str(),
            "--out",
            dir.path().to_str().unwrap(),
        ];
        full.extend_from_slice(args);
        let result = bcmpc(&full);
        assert!(result.status.success(), "{result:?}");
        let metrics: serde_json::Value = serde_json::from_str(
            &std::fs::read_to_string(dir.path().join("metrics.json")).unwrap(),
        )
        .unwrap();
        metrics["planner_iterations"].as_u64().unwrap()
    };

    let default_count = iterations(&[]);
    let slow_count = iterations(&["--params", params_path.to_str().unwrap()]);
    assert!(
        slow_count < default_count,
        "{slow_count} vs {default_count}"
    );
}

#[test]
fn missing_scenario_exits_two_and_names_the_source() {
    let result = bcmpc(&[
        "run",
        "--scenario",
        "no-such-scenario.json",
        "--out",
        "/tmp",
    ]);
    assert_eq!(result.status.code(), Some(2));
    let stderr = String::from_utf8(result.stderr).unwrap();
    let error: serde_json::Value = serde_json::from_str(stderr.trim()).unwrap();
    assert_eq!(error["error"], "config");
    assert!(error["message"]
        .as_str()
        .unwrap()
        .contains("no-such-scenario.json"));
}

#[test]
fn unreadable_params_exit_two() {
    let out = tempfile::tempdir().unwrap();
    let dir = out.path().to_str().unwrap();
    let result = bcmpc(&[
        "run",
        "--scenario",
        "scenario-1",
        "--out",
        dir,
        "--params",
        "missing-params.json",
    ]);
    assert_eq!(result.status.code(), Some(2));
}

#[test]
fn validate_accepts_the_shipped_default_parameters() {
    let path = format!("{}/../../params/default.json", env!("CARGO_MANIFEST_DIR"));
    let result = bcmpc(&["validate", "--params", &path]);
    assert!(result.status.success(), "{result:?}");
    let report: serde_json::Value =
        serde_json::from_str(std::str::from_utf8(&result.stdout).unwrap().trim()).unwrap();
    assert_eq!(report["violations"].as_array().unwrap().len(), 0);

    let shipped = std::fs::read_to_string(&path).unwrap();
    assert_eq!(shipped.trim_end(), Params::default().to_json_pretty());
}

#[test]
fn validate_reports_a_ramp_time_violation_without_failing() {
    let out = tempfile::tempdir().unwrap();
    let mut params = Params::default();
    params.tree.ramp_time_s = 2.0;
    let path = out.path().join("bad.json");
    std::fs::write(&path, params.to_json_pretty()).unwrap();

    let result = bcmpc(&["validate", "--params", path.to_str().unwrap()]);
    assert!(result.status.success(), "{result:?}");
    let report: serde_json::Value =
        serde_json::from_str(std::str::from_utf8(&result.stdout).unwrap().trim()).unwrap();
    let violations = report["violations"].as_array().unwrap();
    assert!(!violations.is_empty());
    assert!(violations
        .iter()
        .any(|v| v.as_str().unwrap().contains("ramp_time_s")));
}

#[test]
fn validate_leaves_the_parameter_file_untouched() {
    let out = tempfile::tempdir().unwrap();
    let path = out.path().join("params.json");
    let contents = Params::default().to_json_pretty();
    std::fs::write(&path, &contents).unwrap();

    let result = bcmpc(&["validate", "--params", path.to_str().unwrap()]);
    assert!(result.status.success());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), contents);
}

#[test]
fn seed_flag_overrides_the_scenario_seed() {
    let csv_for = |seed: &str| -> Vec<u8> {
        let dir = tempfile::tempdir().unwrap();
        let result = bcmpc(&[
            "run",
            "--scenario",
            "scenario-2",
            "--out",
            dir.path().to_str().unwrap(),
            "--seed",
            seed,
        ]);
        assert!(result.status.success(), "{result:?}");
        std::fs::read(dir.path().join("run.csv")).unwrap()
    };

    assert_eq!(csv_for("1"), csv_for("1"));
    assert_ne!(csv_for("1"), csv_for("3"));
}

#[test]
fn scenario_file_roundtrips_through_the_cli() {
    let out = tempfile::tempdir().unwrap();
    let scenario = bcmpc::builtin_scenario("scenario-1").unwrap();
    let path = out.path().join("custom.json");
    std::fs::write(&path, scenario.to_json_pretty()).unwrap();

    let dir = tempfile::tempdir().unwrap();
    let result = bcmpc(&[
        "run",
        "--scenario",
        path.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(result.status.success(), "{result:?}");
    assert!(Path::new(&dir.path().join("run.csv")).exists());
}
