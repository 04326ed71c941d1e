use serde::{Deserialize, Serialize};
use serde_json::Value;

/// One named check with its outcome and supporting evidence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    pub pass: bool,
    pub witness: Value,
}

/// Structured outcome of a checker: a list of verdicts, passing iff all of
/// the gating verdicts pass. Informational verdicts are carried along but do
/// not affect `pass`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub report: String,
    pub pass: bool,
    pub verdicts: Vec<Verdict>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub informational: Vec<Verdict>,
}

impl Report {
    pub fn new(kind: impl Into<String>) -> Self {
        Report { report: kind.into(), pass: true, verdicts: Vec::new(), informational: Vec::new() }
    }

    pub fn push(&mut self, name: impl Into<String>, pass: bool, witness: Value) {
        self.pass &= pass;
        self.verdicts.push(Verdict { name: name.into(), pass, witness });
    }

    pub fn note(&mut self, name: impl Into<String>, pass: bool, witness: Value) {
        self.informational.push(Verdict { name: name.into(), pass, witness });
    }

    pub fn verdict(&self, name: &str) -> Option<&Verdict> {
        self.verdicts.iter().chain(&self.informational).find(|v| v.name == name)
    }

    pub fn failed(&self) -> impl Iterator<Item = &Verdict> {
        self.verdicts.iter().filter(|v| !v.pass)
    }
}
