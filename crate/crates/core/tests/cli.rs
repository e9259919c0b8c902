use serde_json::Value;
use std::ffi::OsString;
use std::path::Path;
use tfe_core::cli::{run_command, EXIT_NUMERICAL, EXIT_OK, EXIT_VALIDATION};

fn run(out: &Path, args: &[&str]) -> i32 {
    let mut argv: Vec<OsString> = vec!["tfe-lab".into()];
    argv.extend(args.iter().map(OsString::from));
    argv.push("--out".into());
    argv.push(out.into());
    run_command(argv)
}

fn manifest(dir: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

fn num(v: &Value) -> f64 {
    v.as_f64().unwrap_or_else(|| v.to_string().parse().unwrap())
}

#[test]
fn explicit_profile_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(run(tmp.path(), &["profile-explicit"]), EXIT_OK);
    let dir = tmp.path().join("profile-explicit");
    let m = manifest(&dir);
    assert_eq!(m["status"], "ok");
    assert!((num(&m["results"]["c0"]) - 1.0 / 120.0).abs() < 1e-15);
    assert_eq!(m["config"]["m"], 2);
    let arts = m["artifacts"].as_array().unwrap();
    assert!(arts.len() >= 3);
    for a in arts {
        let path = dir.join(a["path"].as_str().unwrap());
        assert!(path.exists(), "{path:?}");
        assert_eq!(a["sha256"].as_str().unwrap().len(), 64);
    }
}

#[test]
fn artifacts_are_deterministic() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for t in [&a, &b] {
        assert_eq!(run(t.path(), &["orbit-exact"]), EXIT_OK);
    }
    let (ma, mb) = (manifest(&a.path().join("orbit-exact")), manifest(&b.path().join("orbit-exact")));
    assert_eq!(ma["artifacts"], mb["artifacts"]);
    assert_eq!(ma["results"], mb["results"]);
}

#[test]
fn invalid_input_exits_with_validation_code() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(run(tmp.path(), &["profile-explicit", "--n", "2"]), EXIT_VALIDATION);
    assert_eq!(manifest(&tmp.path().join("profile-explicit"))["status"], "validation-error");
    assert_eq!(run(tmp.path(), &["symmetry-check", "--n", "abc"]), EXIT_VALIDATION);
    assert_eq!(run(tmp.path(), &["orbit", "--n", "2.5"]), EXIT_VALIDATION);
    assert_eq!(run(tmp.path(), &["no-such-command"]), EXIT_VALIDATION);
    assert_eq!(run(tmp.path(), &["preset", "no-such-preset"]), EXIT_VALIDATION);

    let cfg = tmp.path().join("bad.json");
    std::fs::write(&cfg, r#"{"n": 1, "bogus": 3}"#).unwrap();
    assert_eq!(run(tmp.path(), &["profile-fbp", "--config", cfg.to_str().unwrap()]), EXIT_VALIDATION);
}

#[test]
fn numerical_failure_is_reported() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(run(tmp.path(), &["profile-cp", "--n", "1.8"]), EXIT_NUMERICAL);
    let m = manifest(&tmp.path().join("profile-cp"));
    assert_eq!(m["status"], "numerical-error");
    assert!(m["diagnostic"].as_str().is_some_and(|d| !d.is_empty()));
}

#[test]
fn flags_override_config_and_manifest_replays() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"command": "symmetry-check", "n": "4/5"}"#).unwrap();
    let c = cfg.to_str().unwrap();
    assert_eq!(run(tmp.path(), &["symmetry-check", "--config", c]), EXIT_OK);
    let dir = tmp.path().join("symmetry-check");
    assert_eq!(manifest(&dir)["config"]["n"], "4/5");
    assert_eq!(run(tmp.path(), &["symmetry-check", "--config", c, "--n", "1"]), EXIT_OK);
    let first = manifest(&dir);
    assert_eq!(first["config"]["n"], "1");

    let replay = tmp.path().join("replay.json");
    std::fs::copy(dir.join("manifest.json"), &replay).unwrap();
    assert_eq!(run(tmp.path(), &["symmetry-check", "--config", replay.to_str().unwrap()]), EXIT_OK);
    assert_eq!(manifest(&dir)["results"], first["results"]);

    // a config for another command is rejected
    assert_eq!(run(tmp.path(), &["orbit", "--config", c]), EXIT_VALIDATION);
}

#[test]
fn format_filter_limits_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(run(tmp.path(), &["profile-explicit", "--format", "csv"]), EXIT_OK);
    let m = manifest(&tmp.path().join("profile-explicit"));
    let paths: Vec<&str> = m["artifacts"].as_array().unwrap().iter().map(|a| a["path"].as_str().unwrap()).collect();
    assert_eq!(paths, vec!["profile.csv"]);
}
