use serde_json::{json, Map, Value};

use sofic::Report;

use crate::commands::CliError;

/// The document printed for every run.
pub struct CliReport {
    pub report: &'static str,
    pub pass: bool,
    pub verdicts: Vec<Value>,
    pub informational: Vec<Value>,
    pub result: Map<String, Value>,
    pub error: Option<CliError>,
}

impl CliReport {
    pub fn new(report: &'static str) -> Self {
        CliReport { report, pass: true, verdicts: Vec::new(), informational: Vec::new(), result: Map::new(), error: None }
    }

    /// Takes over the verdicts of a library report.
    pub fn absorb(&mut self, r: &Report) {
        self.pass &= r.pass;
        self.verdicts.extend(r.verdicts.iter().map(|v| serde_json::to_value(v).expect("verdict serializes")));
        self.informational.extend(r.informational.iter().map(|v| serde_json::to_value(v).expect("verdict serializes")));
    }

    pub fn set(&mut self, key: &str, value: Value) {
        self.result.insert(key.to_string(), value);
    }

    pub fn failure(report: &'static str, error: CliError) -> Self {
        let mut r = CliReport::new(report);
        r.fail(error);
        r
    }

    pub fn fail(&mut self, error: CliError) {
        self.pass = false;
        self.error = Some(error);
    }

    pub fn exit_code(&self) -> u8 {
        match &self.error {
            Some(e) if e.usage => 2,
            _ if self.pass => 0,
            _ => 1,
        }
    }

    pub fn to_value(&self) -> Value {
        let mut v = json!({
            "report": self.report,
            "pass": self.pass,
            "verdicts": self.verdicts,
        });
        if !self.informational.is_empty() {
            v["informational"] = json!(self.informational);
        }
        if !self.result.is_empty() {
            v["result"] = Value::Object(self.result.clone());
        }
        if let Some(e) = &self.error {
            v["error"] = e.to_value();
        }
        v
    }
}
