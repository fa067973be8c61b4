mod common;

use std::fs;
use std::process::Command;

fn limcov(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_limcov"))
        .current_dir(common::golden_dir())
        .args(args)
        .output()
        .expect("spawn limcov")
}

#[test]
fn out_flag_writes_the_report_instead_of_stdout() {
    let path = std::env::temp_dir().join(format!("limcov-out-{}.txt", std::process::id()));
    let out = limcov(&["--out", path.to_str().unwrap(), "setcover", "--trace", "inputs/two_members.trace"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let written = fs::read_to_string(&path).unwrap();
    fs::remove_file(&path).unwrap();
    let direct = limcov(&["setcover", "--trace", "inputs/two_members.trace"]);
    assert_eq!(written.as_bytes(), direct.stdout.as_slice());
    assert!(written.ends_with("RESULT PASS\n"));
}

#[test]
fn help_exits_zero_and_usage_errors_exit_two() {
    assert_eq!(limcov(&["--help"]).status.code(), Some(0));
    assert_eq!(limcov(&["setcover"]).status.code(), Some(2));
    assert_eq!(limcov(&["nosuch"]).status.code(), Some(2));
    assert_eq!(limcov(&["setcover", "--trace", "inputs/two_members.trace", "--k", "x"]).status.code(), Some(2));
}

#[test]
fn input_errors_name_the_file() {
    let out = limcov(&["setcover", "--trace", "inputs/bad_index.trace"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.starts_with("limcov: inputs/bad_index.trace:"), "{err}");
}

#[test]
fn generator_output_round_trips_through_the_cover_commands() {
    let gen = limcov(&["gen", "--kind", "open", "--nmax", "5", "--depth", "4", "--seed", "9"]);
    assert_eq!(gen.status.code(), Some(0));
    let path = std::env::temp_dir().join(format!("limcov-gen-{}.trace", std::process::id()));
    fs::write(&path, &gen.stdout).unwrap();
    let p = path.to_str().unwrap();
    for mode in ["trim", "naive", "blocks"] {
        let run = limcov(&["opencover", "--trace", p, "--eps", "1/4", "--eps-prime", "3/8", "--mode", mode]);
        assert_eq!(run.status.code(), Some(0), "{}", String::from_utf8_lossy(&run.stdout));
    }
    fs::remove_file(&path).unwrap();
}
