//! End-to-end tests of the scenario runner binary: exit codes, file
//! contract, and cross-scenario comparison.

use std::path::Path;
use std::process::Command;

fn gmech() -> Command {
    Command::new(env!("CARGO_BIN_EXE_gmech"))
}

fn write(path: &Path, contents: &str) {
    std::fs::write(path, contents).unwrap();
}

const HEAVY_TOP: &str = r#"{
  "model": "heavy_top",
  "steps": 0,
  "stepper": "closed_form",
  "params": {
    "inertia_diag": [2.0, 3.0, 4.0],
    "mass": 1.0,
    "gravity": 9.8,
    "length": 0.25,
    "step_h": 0.05
  },
  "initial": {
    "gamma": [0.15, -0.1, 0.98],
    "angular_velocity": [0.4, 0.7, 1.5]
  },
  "diagnostics": { "noether": true }
}"#;

#[test]
fn zero_step_run_emits_single_row() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("top.json");
    write(&cfg, HEAVY_TOP);
    let out = dir.path().join("out");
    let status = gmech()
        .args([
            "run",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let traj = std::fs::read_to_string(out.join("trajectory.csv")).unwrap();
    let lines: Vec<_> = traj.lines().collect();
    assert_eq!(lines.len(), 2, "header plus the initial row:\n{traj}");
    assert!(lines[0].starts_with("step,c0"));
    assert!(lines[1].starts_with("0,"));
}

#[test]
fn malformed_config_exits_2_without_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    write(&cfg, "{ \"model\": \"heavy_top\", \"unknown_field\": 1 }");
    let out = dir.path().join("out");
    let status = gmech()
        .args([
            "run",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
    assert!(!out.exists(), "no partial outputs on config failure");
}

#[test]
fn unknown_model_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    write(
        &cfg,
        r#"{"model":"moebius","steps":1,"params":{},"initial":{}}"#,
    );
    let status = gmech().args(["run", cfg.to_str().unwrap()]).status().unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn solver_failure_exits_3_and_reports_step() {
    // finite-difference residuals cannot reach 1e-14 for this Lagrangian
    // scale, so Newton stalls immediately
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("stall.json");
    write(
        &cfg,
        r#"{
  "model": "heavy_top",
  "steps": 5,
  "solver": { "residual_tol": 1e-14 },
  "params": {
    "inertia_diag": [2.0, 3.0, 4.0],
    "mass": 1.0, "gravity": 9.8, "length": 0.25, "step_h": 0.05
  },
  "initial": { "gamma": [0.15, -0.1, 0.98], "angular_velocity": [0.4, 0.7, 1.5] }
}"#,
    );
    let out = dir.path().join("out");
    let result = gmech()
        .args([
            "run",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(result.status.code(), Some(3));
    let stderr = String::from_utf8_lossy(&result.stderr);
    assert!(
        stderr.contains("step 0"),
        "stderr should name the failing step: {stderr}"
    );
    assert!(!out.exists());
}

#[test]
fn free_rigid_body_momentum_norm_is_conserved() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("body.json");
    write(
        &cfg,
        r#"{
  "model": "lie_group_so3",
  "steps": 1000,
  "stepper": "closed_form",
  "params": { "inertia_diag": [2.0, 3.0, 4.0], "step_h": 0.05 },
  "initial": { "angular_velocity": [0.9, -0.3, 1.4] },
  "diagnostics": { "casimir": true }
}"#,
    );
    let out = dir.path().join("out");
    let status = gmech()
        .args([
            "run",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    let q = &summary["quantities"][0];
    assert_eq!(q["name"], "pi_norm");
    let rel = q["max_rel_drift"].as_f64().unwrap();
    assert!(rel <= 1e-11, "relative momentum drift {rel:e}");
}

#[test]
fn identical_configs_compare_to_zero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("top.json");
    write(&cfg, &HEAVY_TOP.replace("\"steps\": 0", "\"steps\": 50"));
    let out = dir.path().join("cmp");
    let status = gmech()
        .args([
            "compare",
            cfg.to_str().unwrap(),
            cfg.to_str().unwrap(),
            "--projection",
            "identity",
            "--out",
            out.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let summary: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(out.join("compare_summary.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(summary["max_discrepancy"].as_f64().unwrap(), 0.0);
}

#[test]
fn mismatched_step_counts_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    write(&a, &HEAVY_TOP.replace("\"steps\": 0", "\"steps\": 10"));
    write(&b, &HEAVY_TOP.replace("\"steps\": 0", "\"steps\": 20"));
    let status = gmech()
        .args([
            "compare",
            a.to_str().unwrap(),
            b.to_str().unwrap(),
            "--projection",
            "identity",
        ])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn unreduced_rigid_body_projects_onto_lie_poisson() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("pair.json");
    let b = dir.path().join("group.json");
    write(
        &a,
        r#"{
  "model": "rigid_body_pair",
  "steps": 200,
  "solver": { "residual_tol": 1e-12, "jacobian_mode": "model_analytic" },
  "params": { "inertia_diag": [2.0, 3.0, 4.0], "step_h": 0.05 },
  "initial": { "angular_velocity": [0.9, -0.3, 1.4] }
}"#,
    );
    write(
        &b,
        r#"{
  "model": "lie_group_so3",
  "steps": 200,
  "stepper": "closed_form",
  "params": { "inertia_diag": [2.0, 3.0, 4.0], "step_h": 0.05 },
  "initial": { "angular_velocity": [0.9, -0.3, 1.4] }
}"#,
    );
    let out = dir.path().join("cmp");
    let status = gmech()
        .args([
            "compare",
            a.to_str().unwrap(),
            b.to_str().unwrap(),
            "--projection",
            "pair_so3_to_so3",
            "--out",
            out.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let summary: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(out.join("compare_summary.json")).unwrap(),
    )
    .unwrap();
    let d = summary["max_discrepancy"].as_f64().unwrap();
    assert!(d <= 1e-8, "projection discrepancy {d:e}");
}

#[test]
fn beanie_run_keeps_omega3_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("beanie.json");
    write(
        &cfg,
        r#"{
  "model": "beanie",
  "steps": 500,
  "stepper": "closed_form",
  "params": {
    "mass": 1.5, "inertia1": 1.0, "inertia2": 2.0, "step_h": 0.05,
    "potential": "cosine", "amplitude": 1.2
  },
  "initial": { "psi0": 0.0, "psi1": 0.03, "omega": [0.5, 0.1, 0.2] },
  "diagnostics": { "casimir": true }
}"#,
    );
    let out = dir.path().join("out");
    let status = gmech()
        .args([
            "run",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    let om3 = &summary["quantities"][0];
    assert_eq!(om3["name"], "omega3");
    assert_eq!(om3["max_abs_drift"].as_f64().unwrap(), 0.0);
}

#[test]
fn diagnostics_toggle_mismatch_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("top.json");
    write(
        &cfg,
        &HEAVY_TOP.replace(
            "\"diagnostics\": { \"noether\": true }",
            "\"diagnostics\": { \"casimir\": true }",
        ),
    );
    let status = gmech().args(["run", cfg.to_str().unwrap()]).status().unwrap();
    assert_eq!(status.code(), Some(2));
}
