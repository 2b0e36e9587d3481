//! End-to-end tests of the `vvckit` binary: exit-code protocol, report
//! formats, environment handling, and YUV ingestion.

use std::process::{Command, Output};

fn vvckit(args: &[&str]) -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_vvckit"));
    cmd.args(args)
        .env_remove("VVCKIT_TIER")
        .env_remove("VVCKIT_INJECT_FAULT");
    cmd
}

fn small_bench(extra: &[&str]) -> Vec<String> {
    [
        "bench",
        "--width",
        "192",
        "--height",
        "128",
        "--frames",
        "1",
        "--ctu-size",
        "64",
    ]
    .iter()
    .map(|s| s.to_string())
    .chain(extra.iter().map(|s| s.to_string()))
    .collect()
}

fn run(args: &[String], envs: &[(&str, &str)]) -> Output {
    let strs: Vec<&str> = args.iter().map(|s| s.as_str()).collect();
    let mut cmd = vvckit(&strs);
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("binary must launch")
}

#[test]
fn bench_json_is_schema_valid() {
    let out = run(&small_bench(&["--format", "json"]), &[]);
    assert_eq!(out.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json["meta"]["workload"]["width"], 192);
    assert_eq!(json["frame_hash"].as_str().unwrap().len(), 16);
    assert!(json.get("sweep").is_none(), "bench reports carry no sweep");
}

#[test]
fn bench_text_and_csv_and_file_output() {
    let out = run(&small_bench(&["--format", "text"]), &[]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("frame_hash") && text.contains("alf"));

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.csv");
    let out = run(
        &small_bench(&["--format", "csv", "--out", path.to_str().unwrap()]),
        &[],
    );
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(&path).unwrap();
    assert!(csv.starts_with("stage,total_ns,calls,percent"));
    assert_eq!(csv.lines().count(), 4);
}

#[test]
fn stage_subset_runs_only_that_stage() {
    let out = run(&small_bench(&["--stages", "alf", "--format", "json"]), &[]);
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let stages = json["stages"].as_array().unwrap();
    assert_eq!(stages.len(), 1);
    assert_eq!(stages[0]["name"], "alf");
    assert!((stages[0]["percent"].as_f64().unwrap() - 100.0).abs() < 1e-9);
}

#[test]
fn invalid_arguments_exit_2() {
    // Unknown flag (clap) and domain violations (validation) both exit 2.
    assert_eq!(
        vvckit(&["bench", "--bogus"])
            .output()
            .unwrap()
            .status
            .code(),
        Some(2)
    );
    let out = run(&small_bench(&["--depth", "12"]), &[]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&small_bench(&["--stages", "cabac"]), &[]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&small_bench(&["--qp", "99"]), &[]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&small_bench(&["--tier", "avx512"]), &[]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn io_failures_exit_2() {
    let out = run(&small_bench(&["--input", "/nonexistent/path.yuv"]), &[]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("vvckit:"));

    // A truncated YUV file is a format error, also exit 2.
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("short.yuv");
    std::fs::write(&path, [0u8; 100]).unwrap();
    let out = run(&small_bench(&["--input", path.to_str().unwrap()]), &[]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn yuv_input_drives_the_workload() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("in.yuv");
    let frames: Vec<vvckit::Frame> = (0..2)
        .map(|i| vvckit::Frame::random(192, 128, vvckit::BitDepth::Eight, i).unwrap())
        .collect();
    vvckit::frame::write_yuv420(&path, &frames).unwrap();
    let out = run(
        &small_bench(&["--input", path.to_str().unwrap(), "--format", "json"]),
        &[],
    );
    assert_eq!(out.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(
        json["meta"]["workload"]["source"].as_str().unwrap(),
        path.to_str().unwrap()
    );
}

#[test]
fn tier_env_var_is_honored_and_validated() {
    let out = run(
        &small_bench(&["--format", "json"]),
        &[("VVCKIT_TIER", "scalar")],
    );
    assert_eq!(out.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json["meta"]["tier"], "scalar");

    let out = run(&small_bench(&[]), &[("VVCKIT_TIER", "warp512")]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_exit_codes() {
    let out = vvckit(&["verify", "--trials", "60"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("verify: PASS"));
    // One listing line per kernel id.
    assert_eq!(text.lines().filter(|l| l.contains(" vs [")).count(), 14);

    let out = vvckit(&["verify", "--trials", "0"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn fault_injection_fails_verification_when_vector_tiers_exist() {
    if !vvckit::dispatch::detect_capabilities().contains(vvckit::dispatch::VariantTier::Vector128) {
        return;
    }
    let mut cmd = vvckit(&["verify", "--trials", "60"]);
    cmd.env("VVCKIT_INJECT_FAULT", "alf-luma");
    let out = cmd.output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("alf-luma") && text.contains("first failure"));
}

#[test]
fn sweep_reports_baseline_and_rows() {
    let out = run(
        &[
            "sweep",
            "--width",
            "192",
            "--height",
            "128",
            "--frames",
            "1",
            "--ctu-size",
            "64",
            "--tier",
            "scalar",
            "--workers",
            "1,2",
            "--format",
            "json",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect::<Vec<_>>(),
        &[],
    );
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let rows = json["sweep"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0]["speedup"].as_f64().unwrap(), 1.0);
    assert_eq!(rows[0]["tier"], "scalar");

    // CSV sweep: header plus one line per cell.
    let out = run(
        &[
            "sweep",
            "--width",
            "192",
            "--height",
            "128",
            "--frames",
            "1",
            "--ctu-size",
            "64",
            "--tier",
            "scalar",
            "--workers",
            "1,2,4",
            "--format",
            "csv",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect::<Vec<_>>(),
        &[],
    );
    let csv = String::from_utf8(out.stdout).unwrap();
    assert_eq!(csv.lines().count(), 4);
    assert!(csv.starts_with("tier,workers,makespan_ns,speedup"));
}
