#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

pub struct Case {
    pub name: String,
    pub status: i32,
    pub args: Vec<String>,
}

pub fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

pub fn cases() -> Vec<Case> {
    let text = fs::read_to_string(golden_dir().join("cases.txt")).expect("cases.txt");
    text.lines()
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| {
            let mut parts = l.split_whitespace();
            let name = parts.next().expect("name").to_string();
            let status = parts.next().expect("status").parse().expect("numeric status");
            Case {
                name,
                status,
                args: parts.map(str::to_string).collect(),
            }
        })
        .collect()
}

/// Runs the binary from the golden directory. Returns the exit status and
/// stdout, followed by stderr when there is any.
pub fn run(case: &Case) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_limcov"))
        .current_dir(golden_dir())
        .args(&case.args)
        .output()
        .expect("spawn limcov");
    let mut text = String::from_utf8(out.stdout).expect("utf-8 stdout");
    if !out.stderr.is_empty() {
        text.push_str("--- stderr\n");
        text.push_str(&String::from_utf8(out.stderr).expect("utf-8 stderr"));
    }
    (out.status.code().unwrap_or(-1), text)
}

pub fn expected_path(case: &Case) -> PathBuf {
    golden_dir().join("expected").join(format!("{}.out", case.name))
}
