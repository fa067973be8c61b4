use std::fmt::Write;

use limcov::verify::Verification;
use sha2::{Digest, Sha256};

/// Line-oriented run report. Rendering depends only on what was pushed, so
/// identical inputs and flags give identical bytes.
#[derive(Debug, Clone, Default)]
pub struct RunReport {
    subcommand: String,
    digests: Vec<(String, String)>,
    params: Vec<(String, String)>,
    lines: Vec<(String, String)>,
    verification: Verification,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl RunReport {
    pub fn new(subcommand: impl Into<String>) -> RunReport {
        RunReport {
            subcommand: subcommand.into(),
            ..RunReport::default()
        }
    }

    pub fn digest(&mut self, label: &str, bytes: &[u8]) {
        self.digests.push((label.to_string(), sha256_hex(bytes)));
    }

    pub fn param(&mut self, name: &str, value: impl ToString) {
        self.params.push((name.to_string(), value.to_string()));
    }

    pub fn line(&mut self, key: &str, value: impl ToString) {
        self.lines.push((key.to_string(), value.to_string()));
    }

    pub fn verify(&mut self, v: Verification) {
        self.verification.extend(v);
    }

    pub fn passed(&self) -> bool {
        self.verification.passed()
    }

    pub fn verification(&self) -> &Verification {
        &self.verification
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "SUBCOMMAND {}", self.subcommand);
        for (label, hex) in &self.digests {
            let _ = writeln!(out, "DIGEST {label} sha256:{hex}");
        }
        for (name, value) in &self.params {
            let _ = writeln!(out, "PARAM {name} {value}");
        }
        for (key, value) in &self.lines {
            if value.is_empty() {
                let _ = writeln!(out, "{key}");
            } else {
                let _ = writeln!(out, "{key} {value}");
            }
        }
        for c in &self.verification.checks {
            let _ = writeln!(out, "VERDICT {} {}", c.name, if c.passed { "PASS" } else { "FAIL" });
            if !c.witness.is_empty() {
                let _ = writeln!(out, "WITNESS {} {}", c.name, c.witness);
            }
        }
        let _ = writeln!(out, "RESULT {}", if self.passed() { "PASS" } else { "FAIL" });
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn render_layout() {
        let mut r = RunReport::new("setcover");
        r.digest("trace", b"abc");
        r.param("k", 1);
        r.line("COVER", "b c");
        let mut v = Verification::new();
        v.check("cover-size", true, "2 <= 2");
        v.check("empty", true, "");
        r.verify(v);
        assert_eq!(
            r.render(),
            "SUBCOMMAND setcover\n\
             DIGEST trace sha256:ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad\n\
             PARAM k 1\n\
             COVER b c\n\
             VERDICT cover-size PASS\n\
             WITNESS cover-size 2 <= 2\n\
             VERDICT empty PASS\n\
             RESULT PASS\n"
        );
    }

    #[test]
    fn failing_check_fails_the_run() {
        let mut r = RunReport::new("x");
        let mut v = Verification::new();
        v.check("a", false, "w");
        r.verify(v);
        assert!(!r.passed());
        assert!(r.render().ends_with("RESULT FAIL\n"));
    }
}
