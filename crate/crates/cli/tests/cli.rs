use std::process::{Command, Output};

fn treelike(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_treelike"))
        .args(args)
        .output()
        .expect("binary runs")
}

#[test]
fn k_without_l_is_a_usage_error() {
    let out = treelike(&["dt-graphs", "--k", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("Usage"), "{err}");
}

#[test]
fn unknown_command_is_a_usage_error() {
    let out = treelike(&["verify-everything"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn degenerate_clique_parameters_are_rejected() {
    let out = treelike(&["dt-graphs", "--k", "1", "--l", "3"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_config_key_is_rejected() {
    let dir = std::env::temp_dir().join(format!("treelike-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bad.toml");
    std::fs::write(&path, "colour = 3\n").unwrap();
    let out = treelike(&["verify-orbits", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_file_is_applied_and_flags_override_it() {
    let dir = std::env::temp_dir().join(format!("treelike-cli-cfg-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("run.toml");
    std::fs::write(&path, "seed = 9\nsamples = 150\ninstances = 20\n").unwrap();
    let out = treelike(&[
        "verify-orbits",
        "--config",
        path.to_str().unwrap(),
        "--samples",
        "120",
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["config"]["seed"], 9);
    assert_eq!(v["config"]["samples"], 120);
    assert_eq!(v["config"]["instances"], 20);
}

#[test]
fn json_output_is_deterministic() {
    let args = [
        "verify-isomorphism",
        "--samples",
        "200",
        "--instances",
        "20",
        "--format",
        "json",
    ];
    let a = treelike(&args);
    let b = treelike(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["command"], "verify-isomorphism");
    assert_eq!(v["passed"], true);
}

#[test]
fn dt_graphs_text_report_lists_counts() {
    let out = treelike(&["dt-graphs", "--k", "2", "--l", "3", "--radius", "3", "--distance-set", "1;2"]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(out.status.code() == Some(0) || out.status.code() == Some(1), "{text}");
    assert!(text.contains("dt-graphs"), "{text}");
}
