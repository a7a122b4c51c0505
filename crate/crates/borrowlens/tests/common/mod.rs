#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::Command;

pub fn fixtures_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").canonicalize().unwrap()
}

pub fn fixture(name: &str) -> PathBuf {
    fixtures_dir().join(name)
}

/// Shared target directory for fixture builds, kept out of the fixtures.
pub fn target_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("fixture-builds")
}

pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn command(target: &Path) -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_borrowlens"));
    cmd.env("CARGO_TARGET_DIR", target).env_remove("BORROWLENS_LEDGER").env_remove("RUST_LOG");
    cmd
}

pub fn run_in(target: &Path, args: &[&str]) -> Output {
    let out = command(target).args(args).output().expect("run borrowlens");
    Output {
        code: out.status.code().expect("exit code"),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

pub fn run(args: &[&str]) -> Output {
    run_in(&target_dir(), args)
}

pub fn plan_json(name: &str) -> serde_json::Value {
    let ws = fixture(name);
    let out = run(&["plan", "--workspace", ws.to_str().unwrap(), "--file", "src/main.rs"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    serde_json::from_str(&out.stdout).expect("plan output is JSON")
}

/// One ledger line in the on-disk format.
pub fn ledger_line(workspace: &str, seq: u64, timestamp: f64, errors: &[(&str, &str)]) -> String {
    let errors: Vec<serde_json::Value> = errors
        .iter()
        .map(|(code, key)| serde_json::json!({"code": code, "file": "src/lib.rs", "key": key}))
        .collect();
    serde_json::json!({
        "format_version": 1,
        "workspace": workspace,
        "seq": seq,
        "timestamp": timestamp,
        "success": errors.is_empty(),
        "errors": errors,
    })
    .to_string()
}
