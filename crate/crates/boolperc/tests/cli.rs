//! The `boolperc` binary: commands, exit codes and artifacts.

use std::path::Path;
use std::process::{Command, Output};

fn boolperc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_boolperc"))
        .args(args)
        .output()
        .unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

const VOLUME: &str = r#"
kind = "volume-fraction"
dimension = 2
master_seed = 3
measure = [{ kind = "atom", r = 1.0, w = 1.0 }]

[params]
t = 1.0
reps = 100000
"#;

const DERIVATIVE: &str = r#"
kind = "derivative"
dimension = 2
master_seed = 4
measure = [{ kind = "atom", r = 1.0, w = 1.0 }]

[target]
kind = "ball"
radius = 0.5

[params]
t = 0.8
n = 6.0
reps = 400
"#;

#[test]
fn schema_prints_json() {
    let out = boolperc(&["schema"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["properties"]["params"]["properties"]["reps"].is_object());
}

#[test]
fn validate_echoes_resolved_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "d.toml", DERIVATIVE);
    let out = boolperc(&["validate", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("dt = 0.04"), "{text}");
    assert!(text.contains("mc_points = 16"), "{text}");
    assert!(text.contains("k_sigma = 3.0"), "{text}");
}

#[test]
fn config_errors_exit_1_and_name_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let bad_kind = write(
        dir.path(),
        "k.toml",
        &VOLUME.replace("volume-fraction", "bogus"),
    );
    for cmd in ["validate", "run"] {
        let out = boolperc(&[cmd, "--config", &bad_kind]);
        assert_eq!(out.status.code(), Some(1));
        let err = String::from_utf8(out.stderr).unwrap();
        assert!(err.contains("`kind`"), "{err}");
    }
    let missing = write(dir.path(), "m.toml", &VOLUME.replace("reps = 100000\n", ""));
    let out = boolperc(&[
        "run",
        "--config",
        &missing,
        "--out",
        dir.path().join("o").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr)
        .unwrap()
        .contains("params.reps"));
    // rejected before anything is written
    assert!(!dir.path().join("o").exists());
    let out = boolperc(&[
        "run",
        "--config",
        dir.path().join("absent.toml").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn not_a_measure_is_reported_with_values() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "n.toml", &VOLUME.replace("w = 1.0", "w = -0.5"));
    let out = boolperc(&["validate", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr).unwrap().contains("measure"));
}

#[test]
fn runtime_failures_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "v.toml",
        &VOLUME.replace("reps = 100000", "reps = 10"),
    );
    let blocker = write(dir.path(), "file", "");
    let out = boolperc(&["run", "--config", &cfg, "--out", &format!("{blocker}/sub")]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn volume_fraction_run_passes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "v.toml", VOLUME);
    let out_dir = dir.path().join("out");
    let out = boolperc(&[
        "run",
        "--config",
        &cfg,
        "--out",
        out_dir.to_str().unwrap(),
        "--workers",
        "2",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("summary.json")).unwrap())
            .unwrap();
    assert_eq!(summary["all_pass"], true);
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["config"]["params"]["t_grid"][0], 1.0);
    assert_eq!(manifest["config"]["workers"], 2);
    assert!(manifest["wall_time_seconds"].is_number());
    let csv = std::fs::read_to_string(out_dir.join("volume_fraction.csv")).unwrap();
    assert!(csv.starts_with("# boolperc "));
    assert!(csv.contains("master_seed=3"));
    assert!(out_dir.join("volume_fraction.svg").exists());
}

#[test]
fn derivative_run_writes_three_estimators_and_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "d.toml", DERIVATIVE);
    let out_dir = dir.path().join("out");
    let out = boolperc(&["run", "--config", &cfg, "--out", out_dir.to_str().unwrap()]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    for name in ["finite_difference", "russo", "added_grain"] {
        let csv = std::fs::read_to_string(out_dir.join(format!("derivative_{name}.csv"))).unwrap();
        assert_eq!(csv.lines().count(), 3);
        assert!(csv.lines().nth(2).unwrap().starts_with(name));
    }
    let report: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(out_dir.join("derivative_report.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(report["pairwise"].as_array().unwrap().len(), 3);
    assert!(report["all_agree"].is_boolean());
}

#[test]
fn seed_flag_and_reruns_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "d.toml", DERIVATIVE);
    let run = |name: &str, seed: &str| {
        let out_dir = dir.path().join(name);
        let out = boolperc(&[
            "run",
            "--config",
            &cfg,
            "--out",
            out_dir.to_str().unwrap(),
            "--seed",
            seed,
        ]);
        assert_eq!(out.status.code(), Some(0));
        std::fs::read_to_string(out_dir.join("derivative_russo.csv")).unwrap()
    };
    let a = run("a", "77");
    let b = run("b", "77");
    let c = run("c", "78");
    assert_eq!(a, b);
    assert_ne!(a, c);
    assert!(a.contains("master_seed=77"));
    assert!(a.contains(",77/"));
}

#[test]
fn json_config_is_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let toml_cfg = boolperc::ExperimentConfig::from_toml_str(DERIVATIVE).unwrap();
    let cfg = write(
        dir.path(),
        "d.json",
        &serde_json::to_string(&toml_cfg).unwrap(),
    );
    let out = boolperc(&["validate", "--config", &cfg]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn shipped_configs_validate() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let out = boolperc(&["validate", "--config", path.to_str().unwrap()]);
        assert_eq!(
            out.status.code(),
            Some(0),
            "{}: {}",
            path.display(),
            String::from_utf8_lossy(&out.stderr)
        );
        seen += 1;
    }
    assert!(seen >= 8);
}
