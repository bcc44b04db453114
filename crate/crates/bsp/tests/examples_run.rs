//! Every bundled example is a self-checking walkthrough; run each one and
//! require a clean exit. Example binaries are built alongside the test
//! profile, two directories up from the test executable.

use std::path::PathBuf;
use std::process::Command;

fn example(name: &str) -> PathBuf {
    let mut dir = std::env::current_exe().expect("test executable path");
    dir.pop(); // <target>/debug/deps
    dir.pop(); // <target>/debug
    let path = dir.join("examples").join(name);
    assert!(path.exists(), "example binary missing: {}", path.display());
    path
}

fn run(name: &str) {
    let out = Command::new(example(name)).output().expect("spawn example");
    assert!(
        out.status.success(),
        "example {name} failed\n--- stdout ---\n{}\n--- stderr ---\n{}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn regress_trace() {
    run("regress_trace");
}

#[test]
fn progress_conditional() {
    run("progress_conditional");
}

#[test]
fn heuristic_snapshot() {
    run("heuristic_snapshot");
}

#[test]
fn lug_labels() {
    run("lug_labels");
}

#[test]
fn mutex_levels() {
    run("mutex_levels");
}

#[test]
fn benchmark() {
    run("benchmark");
}

#[test]
fn custom_domain() {
    run("custom_domain");
}

#[test]
fn sampling() {
    run("sampling");
}
