//! End-to-end tests of the `tbar` binary: exit codes, output formats, and
//! determinism across runs.

use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> String {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name);
    p.to_str().unwrap().to_string()
}

fn tbar(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tbar"))
        .args(args)
        .env_remove("TBAR_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn dist_root_to_itself_is_zero() {
    let out = tbar(&[
        "dist",
        "--spec",
        &data("binary.json"),
        r#"{"root":true}"#,
        r#"{"root":true}"#,
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).starts_with("0/2^0"));
}

#[test]
fn dist_ray_to_root_is_one() {
    let out = tbar(&[
        "dist",
        "--spec",
        &data("binary.json"),
        r#"{"prefix":[0,1],"cycle":[0]}"#,
        r#"{"root":true}"#,
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).starts_with("1/2^0"));
}

#[test]
fn dist_of_branching_vertex_pair_prints_exact_and_decimal() {
    // two truncated rays through a depth-2 branch vertex: 13/32
    let out = tbar(&[
        "dist",
        "--spec",
        &data("binary.json"),
        r#"{"vertex":[0,0,0,0],"t":"1/2^0"}"#,
        r#"{"vertex":[0,0,1,0,0],"t":"1/2^0"}"#,
    ]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "13/2^5 = 0.40625\n");
}

#[test]
fn gromov_of_root_split_rays_is_zero() {
    let out = tbar(&[
        "gromov",
        "--spec",
        &data("binary.json"),
        r#"{"prefix":[0],"cycle":[0]}"#,
        r#"{"prefix":[1],"cycle":[1]}"#,
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).starts_with("0/2^0"));
}

#[test]
fn project_returns_point_json() {
    let out = tbar(&[
        "project",
        "--spec",
        &data("binary.json"),
        r#"{"prefix":[],"cycle":[0]}"#,
        "--sigma",
        "3/2^2",
    ]);
    assert!(out.status.success());
    let p: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(p["vertex"], serde_json::json!([0, 0]));
    assert_eq!(p["t"], "1/2^0");
}

#[test]
fn validate_reports_violations_and_exits_one() {
    let out = tbar(&["validate", "--spec", &data("invalid_orphan.json")]);
    assert_eq!(out.status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["valid"], false);
    assert!(report["violations"][0]
        .as_str()
        .unwrap()
        .contains("prefix-closed"));
}

#[test]
fn validate_reports_stats_for_explicit_trees() {
    let out = tbar(&["validate", "--spec", &data("explicit_small.json")]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["valid"], true);
    assert_eq!(report["vertex_count"], 6);
    assert_eq!(report["max_depth"], 2);
    assert_eq!(report["infinite"], false);
}

#[test]
fn certify_passes_and_writes_certificate() {
    let dir = std::env::temp_dir().join("tbar-cli-test-cert");
    std::fs::create_dir_all(&dir).unwrap();
    let cert_path = dir.join("cert.json");
    let out = tbar(&[
        "certify",
        "--spec",
        &data("binary.json"),
        "--delta",
        "1/2^1",
        "--count",
        "50",
        "--seed",
        "9",
        "--out",
        cert_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{out:?}");
    let cert: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&cert_path).unwrap()).unwrap();
    assert_eq!(cert["N"], 1);
    assert_eq!(cert["sigma"], "3/2^2");
    assert_eq!(cert["verdict"], "pass");
    assert_eq!(cert["max_track"], "1/2^2");
}

#[test]
fn certify_rejects_zero_delta_as_usage_error() {
    let out = tbar(&[
        "certify",
        "--spec",
        &data("binary.json"),
        "--delta",
        "0",
        "--count",
        "5",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn certify_rejects_invalid_spec_as_usage_error() {
    let out = tbar(&[
        "certify",
        "--spec",
        &data("invalid_orphan.json"),
        "--delta",
        "1/2^1",
        "--count",
        "5",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_suites_pass_on_binary_tree() {
    for suite in ["metric", "hyperbolicity", "boundary", "contraction"] {
        let out = tbar(&[
            "verify",
            suite,
            "--spec",
            &data("binary.json"),
            "--count",
            "200",
            "--seed",
            "5",
        ]);
        assert!(out.status.success(), "suite {suite}: {out:?}");
        let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
        assert_eq!(report["verdict"], "pass", "suite {suite}");
    }
}

#[test]
fn verify_net_requires_eps() {
    let out = tbar(&["verify", "net", "--spec", &data("binary.json")]);
    assert_eq!(out.status.code(), Some(2));
    let out = tbar(&[
        "verify",
        "net",
        "--spec",
        &data("binary.json"),
        "--eps",
        "1/2^4",
        "--count",
        "100",
    ]);
    assert!(out.status.success(), "{out:?}");
}

#[test]
fn verify_boundary_on_finite_tree_is_a_usage_error() {
    let out = tbar(&[
        "verify",
        "boundary",
        "--spec",
        &data("explicit_small.json"),
        "--count",
        "10",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_flags_exit_two() {
    let out = tbar(&["dist", "--nonsense"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn malformed_point_json_exits_two() {
    let out = tbar(&[
        "dist",
        "--spec",
        &data("binary.json"),
        r#"{"vertex":[0],"t":"5/2^1"}"#,
        r#"{"root":true}"#,
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn inline_spec_json_is_accepted() {
    let out = tbar(&[
        "dist",
        "--spec",
        r#"{"kind":"programmatic","states":["q"],"initial":"q","counts":{"q":2},"delta":{"q":["q","q"]}}"#,
        r#"{"root":true}"#,
        r#"{"vertex":[0],"t":"1/2^0"}"#,
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).starts_with("1/2^1"));
}

#[test]
fn render_binary_depth_six_plots_127_vertices() {
    let out = tbar(&[
        "render",
        "--spec",
        &data("binary.json"),
        "--max-depth",
        "6",
        "--size",
        "800",
    ]);
    assert!(out.status.success());
    let svg = stdout(&out);
    assert_eq!(svg.matches(r#"class="vertex""#).count(), 127);
    assert!(svg.contains(r#"class="boundary""#));
}

#[test]
fn render_highlight_marks_branch_point() {
    let out = tbar(&[
        "render",
        "--spec",
        &data("binary.json"),
        "--max-depth",
        "6",
        "--highlight-a",
        r#"{"prefix":[0,1],"cycle":[0]}"#,
        "--highlight-b",
        r#"{"prefix":[0,1,0],"cycle":[1]}"#,
    ]);
    assert!(out.status.success());
    let svg = stdout(&out);
    assert!(svg.contains(r#"class="geodesic-a""#));
    assert!(svg.contains(r#"class="branch""#));
    // half highlight is a usage error
    let out = tbar(&[
        "render",
        "--spec",
        &data("binary.json"),
        "--highlight-a",
        r#"{"root":true}"#,
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn commands_are_deterministic_given_identical_flags() {
    let args = [
        "verify",
        "metric",
        "--spec",
        &data("alternating.json"),
        "--count",
        "150",
        "--seed",
        "42",
    ];
    assert_eq!(stdout(&tbar(&args)), stdout(&tbar(&args)));
    let render_args = ["render", "--spec", &data("ternary.json"), "--max-depth", "4"];
    assert_eq!(stdout(&tbar(&render_args)), stdout(&tbar(&render_args)));
}

#[test]
fn seed_env_var_sets_default_and_flag_overrides_it() {
    let run = |seed_env: Option<&str>, seed_flag: Option<&str>| -> String {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_tbar"));
        cmd.args([
            "certify",
            "--spec",
            &data("binary.json"),
            "--delta",
            "1/2^2",
            "--count",
            "20",
        ]);
        cmd.env_remove("TBAR_SEED");
        if let Some(s) = seed_env {
            cmd.env("TBAR_SEED", s);
        }
        if let Some(s) = seed_flag {
            cmd.args(["--seed", s]);
        }
        let out = cmd.output().unwrap();
        assert!(out.status.success());
        String::from_utf8(out.stdout).unwrap()
    };
    let via_env = run(Some("77"), None);
    let via_flag = run(None, Some("77"));
    assert_eq!(via_env, via_flag);
    let overridden = run(Some("77"), Some("78"));
    assert_ne!(via_env, overridden);
}
