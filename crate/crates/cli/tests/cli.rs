use serde_json::Value;
use std::path::Path;
use std::process::{Command, Output};

fn panomix(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_panomix")).args(args).output().unwrap()
}

fn stderr_json(out: &Output) -> Value {
    let text = String::from_utf8_lossy(&out.stderr);
    let line = text.lines().last().unwrap_or_default();
    serde_json::from_str(line).unwrap_or_else(|e| panic!("stderr is not JSON ({e}): {text}"))
}

fn synth(dir: &Path, count: &str) -> String {
    let out = panomix(&["synth", "--count", count, "--seed", "1", "--height", "32", "--width", "64", "--out", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    dir.join("manifest.json").to_string_lossy().into_owned()
}

#[test]
fn synth_then_validate_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = synth(dir.path(), "3");
    assert!(dir.path().join("layouts/scene_000002.txt").exists());
    let out = panomix(&["validate", "--manifest", &manifest]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn seed_is_required_for_stochastic_commands() {
    let out = panomix(&["synth", "--count", "1", "--height", "32", "--width", "64", "--out", "x"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stderr_json(&out)["error"], "usage");
}

#[test]
fn missing_manifest_is_an_io_error() {
    let out = panomix(&["validate", "--manifest", "/nonexistent/manifest.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_json(&out)["error"], "io");
}

#[test]
fn bad_config_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = synth(&dir.path().join("data"), "3");
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"seeed": 3}"#).unwrap();
    let out = panomix(&[
        "augment", "--manifest", &manifest, "--structure", "scene_000000", "--style", "scene_000001", "--furniture",
        "scene_000002", "--config", cfg.to_str().unwrap(), "--seed", "1", "--out", dir.path().join("o").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr_json(&out);
    assert_eq!(err["error"], "config");
    assert!(err["message"].as_str().unwrap().contains("seeed"));
}

#[test]
fn augment_and_stretch_write_valid_manifests() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = synth(&dir.path().join("data"), "3");
    let aug = dir.path().join("aug");
    let out = panomix(&[
        "augment", "--manifest", &manifest, "--structure", "scene_000000", "--style", "scene_000001", "--furniture",
        "scene_000002", "--seed", "4", "--out", aug.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let m: Value = serde_json::from_str(&std::fs::read_to_string(aug.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(m["samples"][0]["sources"]["style"], "scene_000001");
    assert_eq!(m["provenance"]["seed"], 4);
    assert_eq!(panomix(&["validate", "--manifest", aug.join("manifest.json").to_str().unwrap()]).status.code(), Some(0));

    let st = dir.path().join("st");
    let out = panomix(&["stretch", "--manifest", &manifest, "--id", "scene_000001", "--kx", "1.5", "--kz", "0.8", "--out", st.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(panomix(&["validate", "--manifest", st.join("manifest.json").to_str().unwrap()]).status.code(), Some(0));

    let out = panomix(&["stretch", "--manifest", &manifest, "--id", "scene_000001", "--kx", "0", "--kz", "1", "--out", st.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stderr_json(&out)["error"], "invalid-factor");
}

#[test]
fn unreadable_sources_give_partial_failure() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data");
    let manifest = synth(&data, "3");
    std::fs::remove_file(data.join("images/scene_000001.png")).unwrap();
    let out = panomix(&["batch", "--manifest", &manifest, "--count", "6", "--seed", "2", "--out", dir.path().join("b").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    let err = stderr_json(&out);
    assert_eq!(err["error"], "partial-failure");
    assert!(!err["failures"].as_array().unwrap().is_empty());
    let m: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("b/manifest.json")).unwrap()).unwrap();
    assert_eq!(
        m["samples"].as_array().unwrap().len() + m["provenance"]["failures"].as_array().unwrap().len(),
        6
    );
}

#[test]
fn invalid_samples_fail_validation() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = synth(dir.path(), "2");
    let text = std::fs::read_to_string(&manifest).unwrap();
    let mut m: Value = serde_json::from_str(&text).unwrap();
    m["samples"][0]["layout"][0][1] = Value::from(0.5);
    std::fs::write(&manifest, serde_json::to_string(&m).unwrap()).unwrap();
    let out = panomix(&["validate", "--manifest", &manifest]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stderr_json(&out)["error"], "invalid-samples");
}
