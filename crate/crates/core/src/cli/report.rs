use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::linalg::C64;
use crate::states::ProductState;
use crate::verify::Certificate;

pub const EXIT_CODE_SEMANTICS: &str = "0 = all PROVEN or FEASIBLE as expected; 2 = NUMERICAL_EVIDENCE only; \
3 = UNDETERMINED; 4 = check failure; 1 = usage/IO error";

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub command: String,
    pub inputs: Vec<String>,
    pub parameters: BTreeMap<String, String>,
    pub certificates: Vec<Certificate>,
    pub details: serde_json::Value,
    pub exit_code: i32,
    pub exit_code_semantics: &'static str,
    #[serde(skip)]
    pub summary: Vec<String>,
}

impl RunReport {
    pub fn new(command: impl Into<String>) -> Self {
        Self {
            command: command.into(),
            inputs: Vec::new(),
            parameters: BTreeMap::new(),
            certificates: Vec::new(),
            details: serde_json::Value::Null,
            exit_code: 0,
            exit_code_semantics: EXIT_CODE_SEMANTICS,
            summary: Vec::new(),
        }
    }

    pub fn input(&mut self, name: &str, bytes: &[u8]) {
        self.inputs.push(format!("{name} sha256:{}", sha256_hex(bytes)));
    }

    pub fn param(&mut self, key: &str, value: impl ToString) {
        self.parameters.insert(key.into(), value.to_string());
    }

    pub fn line(&mut self, s: impl Into<String>) {
        self.summary.push(s.into());
    }

    pub fn push(&mut self, cert: Certificate) {
        self.certificates.push(cert);
    }

    /// Fixes the exit code to the worst certificate.
    pub fn finish(mut self) -> Self {
        self.exit_code = worst_exit_code(&self.certificates);
        self
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports always serialize");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "upblab {}", self.command);
        for i in &self.inputs {
            let _ = writeln!(out, "  input {i}");
        }
        for (k, v) in &self.parameters {
            let _ = writeln!(out, "  {k} = {v}");
        }
        for s in &self.summary {
            let _ = writeln!(out, "{s}");
        }
        for (n, c) in self.certificates.iter().enumerate() {
            let _ = writeln!(out, "certificate {} {}: {}", n + 1, wire_name(&c.kind), wire_name(&c.status));
            for ch in &c.checks {
                let mark = match (ch.pass, ch.heuristic) {
                    (true, _) => "ok  ",
                    (false, true) => "warn",
                    (false, false) => "FAIL",
                };
                let _ = writeln!(
                    out,
                    "  {mark} {} = {:.6e} (tolerance {}){}",
                    ch.name,
                    ch.value,
                    ch.tolerance,
                    if ch.heuristic { " [heuristic]" } else { "" }
                );
            }
            for note in &c.notes {
                let _ = writeln!(out, "  note: {note}");
            }
        }
        let _ = writeln!(out, "exit code {}", self.exit_code);
        out
    }
}

/// Serialized name of a unit enum variant.
pub fn wire_name<T: Serialize>(t: &T) -> String {
    match serde_json::to_value(t) {
        Ok(serde_json::Value::String(s)) => s,
        _ => String::new(),
    }
}

/// Worst exit code in the order 0 < 2 < 3 < 4.
pub fn worst_exit_code(certs: &[Certificate]) -> i32 {
    certs.iter().map(Certificate::exit_code).max().unwrap_or(0)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

fn coefficient(z: C64) -> String {
    if z.im.abs() < 1e-12 {
        format!("{:.4}", z.re)
    } else {
        format!("({:.4}{:+.4}i)", z.re, z.im)
    }
}

/// Local vector as a ket sum, labels from 1 with the internal index in
/// brackets: `0.7071|1>[0] + 0.7071|2>[1]`.
pub fn render_factor(v: &[C64]) -> String {
    let terms: Vec<String> = v
        .iter()
        .enumerate()
        .filter(|(_, z)| z.norm() > 1e-12)
        .map(|(i, &z)| format!("{}|{}>[{i}]", coefficient(z), i + 1))
        .collect();
    let mut out = String::new();
    for t in terms {
        match (out.is_empty(), t.strip_prefix('-')) {
            (true, _) => out = t,
            (false, Some(rest)) => out += &format!(" - {rest}"),
            (false, None) => out += &format!(" + {t}"),
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

pub fn render_product(s: &ProductState) -> String {
    s.factors()
        .iter()
        .map(|f| format!("({})", render_factor(f)))
        .collect::<Vec<_>>()
        .join(" x ")
}
