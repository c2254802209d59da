use std::path::Path;
use std::process::Command;

fn coopctl() -> Command {
    Command::new(env!("CARGO_BIN_EXE_coopctl"))
}

fn read_dir_sorted(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().into_string().unwrap(), std::fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

#[test]
fn lists_presets() {
    let out = coopctl().arg("--list-presets").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("online-vs-offline"));
    assert!(text.contains("alpha-sweep"));
}

#[test]
fn preset_run_is_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let status = coopctl()
            .args(["--preset", "linear-deadbeat", "--seed", "11", "--quiet", "--out"])
            .arg(dir.path())
            .status()
            .unwrap();
        assert!(status.success());
    }
    let fa = read_dir_sorted(a.path());
    assert_eq!(fa.len(), 4, "three CSVs and a report");
    assert_eq!(fa, read_dir_sorted(b.path()));
}

#[test]
fn strategy_override_limits_runs() {
    let dir = tempfile::tempdir().unwrap();
    let status = coopctl()
        .args(["--preset", "linear-deadbeat", "--strategy", "online", "--quiet", "--out"])
        .arg(dir.path())
        .status()
        .unwrap();
    assert!(status.success());
    let names: Vec<String> = read_dir_sorted(dir.path()).into_iter().map(|(n, _)| n).collect();
    assert_eq!(names, vec!["random_online.csv", "report.toml"]);
}

#[test]
fn config_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let config = coopctl::experiment::preset("linear-deadbeat").unwrap();
    let path = dir.path().join("scenario.toml");
    std::fs::write(&path, config.to_toml_string().unwrap()).unwrap();
    let out_dir = dir.path().join("out");
    let out = coopctl().arg("--config").arg(&path).arg("--out").arg(&out_dir).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out_dir.join("random_offline.csv").exists());
    assert!(String::from_utf8(out.stdout).unwrap().contains("report:"));
}

#[test]
fn invalid_config_exits_with_config_code() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    let mut config = coopctl::experiment::preset("linear-deadbeat").unwrap();
    config.control.period = -1.0;
    config.simulation.dt = 0.0;
    std::fs::write(&path, config.to_toml_string().unwrap()).unwrap();
    let out = coopctl().arg("--config").arg(&path).arg("--out").arg(dir.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.starts_with("error[config]"));
    assert!(err.contains("period") && err.contains("dt"), "itemized: {err}");
}

#[test]
fn missing_config_file_is_io_error() {
    let out = coopctl().args(["--config", "/nonexistent/scenario.toml"]).output().unwrap();
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn alpha_without_dynamics_is_rejected() {
    let out = coopctl().args(["--preset", "linear-deadbeat", "--alpha", "3"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_preset_is_config_error() {
    let out = coopctl().args(["--preset", "nope"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}
