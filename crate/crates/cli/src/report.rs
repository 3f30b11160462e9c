//! Report documents, rendered as text or JSON.

use std::fmt::Write;

use jetcalc::kawahara::{Check, FluxDiff};
use jetcalc::symmetry::ScanStep;
use serde::Serialize;
use sha2::{Digest, Sha256};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct InputDigest {
    pub name: String,
    pub value: String,
    pub sha256: String,
}

impl InputDigest {
    pub fn new(name: &str, value: &str) -> Self {
        Self::with_bytes(name, value, value.as_bytes())
    }

    /// Digest over `bytes`, e.g. a file's contents, shown as `value`.
    pub fn with_bytes(name: &str, value: &str, bytes: &[u8]) -> Self {
        InputDigest { name: name.to_string(), value: value.to_string(), sha256: hex::encode(Sha256::digest(bytes)) }
    }
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct StepDoc {
    pub index: i64,
    pub unknown: String,
    pub equation: String,
    pub constraints: Vec<String>,
    pub conditions: Vec<String>,
    pub solved: Option<String>,
}

impl From<&ScanStep> for StepDoc {
    fn from(s: &ScanStep) -> Self {
        StepDoc {
            index: s.index,
            unknown: s.unknown.clone(),
            equation: s.equation(),
            constraints: s.constraints.iter().map(|c| format!("{c} = 0")).collect(),
            conditions: s.conditions.iter().map(|c| c.to_string()).collect(),
            solved: s.solved.as_ref().map(|e| e.to_string()),
        }
    }
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct CheckDoc {
    pub label: String,
    pub detail: String,
    pub passed: bool,
}

impl From<&Check> for CheckDoc {
    fn from(c: &Check) -> Self {
        CheckDoc { label: c.label.clone(), detail: c.detail.clone(), passed: c.passed }
    }
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct FluxDiffDoc {
    pub label: String,
    pub printed: String,
    pub reconstructed: Option<String>,
    pub difference: Option<String>,
    pub printed_residual: String,
    pub printed_residual_alpha_u: String,
    pub density_scale: Option<String>,
}

impl From<&FluxDiff> for FluxDiffDoc {
    fn from(d: &FluxDiff) -> Self {
        let s = |e: &jetcalc::JetExpr| e.to_string();
        FluxDiffDoc {
            label: d.label.to_string(),
            printed: s(&d.printed),
            reconstructed: d.reconstructed.as_ref().map(s),
            difference: d.difference.as_ref().map(s),
            printed_residual: s(&d.printed_residual),
            printed_residual_alpha_u: s(&d.printed_residual_alpha_u),
            density_scale: d.density_scale.as_ref().map(s),
        }
    }
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq, Default)]
pub struct Report {
    pub command: String,
    pub inputs: Vec<InputDigest>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub equation: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub flux: Option<String>,
    pub verdict: Option<bool>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<CheckDoc>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub steps: Vec<StepDoc>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub diff_vs_printed: Vec<FluxDiffDoc>,
    pub exit_code: i32,
    pub version: String,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report { command: command.to_string(), version: VERSION.to_string(), ..Default::default() }
    }

    pub fn input(mut self, name: &str, value: &str) -> Self {
        self.inputs.push(InputDigest::new(name, value));
        self
    }

    /// Sets the verdict and the matching exit code.
    pub fn verdict(mut self, ok: bool) -> Self {
        self.verdict = Some(ok);
        self.exit_code = if ok { 0 } else { 1 };
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize") + "\n"
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let w = &mut out;
        writeln!(w, "command: {}", self.command).unwrap();
        for i in &self.inputs {
            writeln!(w, "input {}: {} [sha256:{}]", i.name, i.value, &i.sha256[..16]).unwrap();
        }
        let field = |w: &mut String, k: &str, v: &Option<String>| {
            if let Some(v) = v {
                writeln!(w, "{k}: {v}").unwrap();
            }
        };
        field(w, "equation", &self.equation);
        field(w, "result", &self.result);
        field(w, "residual", &self.residual);
        field(w, "flux", &self.flux);
        for n in &self.notes {
            writeln!(w, "note: {n}").unwrap();
        }
        for s in &self.steps {
            writeln!(w, "step xi^{}: {}", s.index, s.equation).unwrap();
            for c in &s.constraints {
                writeln!(w, "  constraint: {c}").unwrap();
            }
            for c in &s.conditions {
                writeln!(w, "  condition: {c}").unwrap();
            }
            match &s.solved {
                Some(e) => writeln!(w, "  {} = {e}", s.unknown).unwrap(),
                None => writeln!(w, "  {} unresolved", s.unknown).unwrap(),
            }
        }
        for c in &self.checks {
            let mark = if c.passed { "ok" } else { "FAILED" };
            writeln!(w, "check [{mark}] {}", c.label).unwrap();
            writeln!(w, "  {}", c.detail).unwrap();
        }
        for d in &self.diff_vs_printed {
            writeln!(w, "printed flux for {}: {}", d.label, d.printed).unwrap();
            let opt = |o: &Option<String>| o.clone().unwrap_or_else(|| "n/a".to_string());
            writeln!(w, "  reconstructed: {}", opt(&d.reconstructed)).unwrap();
            writeln!(w, "  printed - reconstructed: {}", opt(&d.difference)).unwrap();
            writeln!(w, "  printed residual: {}", d.printed_residual).unwrap();
            writeln!(w, "  printed residual with f = alpha*u: {}", d.printed_residual_alpha_u).unwrap();
            if let Some(k) = &d.density_scale {
                writeln!(w, "  printed flux belongs to ({k})*density").unwrap();
            }
        }
        let verdict = match self.verdict {
            Some(true) => "true",
            Some(false) => "false",
            None => "n/a",
        };
        writeln!(w, "verdict: {verdict}").unwrap();
        writeln!(w, "exit: {}", self.exit_code).unwrap();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digests_are_stable() {
        let d = InputDigest::new("expr", "u");
        assert_eq!(d.sha256, "0bfe935e70c321c7ca3afc75ce0d0ca2f98b5422e008bb31c00c6d7f1f1c0ad6");
    }

    #[test]
    fn text_and_json_agree_on_verdict() {
        let r = Report::new("euler").input("expr", "u_x^2/2").verdict(false);
        assert!(r.to_text().ends_with("verdict: false\nexit: 1\n"));
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["verdict"], false);
        assert_eq!(v["exit_code"], 1);
        assert_eq!(v["inputs"][0]["name"], "expr");
    }
}
