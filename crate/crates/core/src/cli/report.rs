use std::collections::BTreeMap;
use std::time::Instant;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::Error;

pub const SCHEMA: &str = "ainf-report/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Pass,
    Fail,
    Indeterminate,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub check: String,
    pub outcome: Outcome,
    pub reason: String,
}

/// Everything a run prints. `hash` covers every field except `timings_ms`
/// and itself.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub command: String,
    pub parameters: BTreeMap<String, Value>,
    pub certificates: BTreeMap<String, Value>,
    pub verdicts: Vec<Verdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub timings_ms: BTreeMap<String, f64>,
    pub hash: String,
}

#[derive(Serialize)]
struct Hashed<'a> {
    schema: &'a str,
    command: &'a str,
    parameters: &'a BTreeMap<String, Value>,
    certificates: &'a BTreeMap<String, Value>,
    verdicts: &'a [Verdict],
    error: &'a Option<String>,
}

impl Report {
    pub fn new(command: impl Into<String>) -> Self {
        Report {
            schema: SCHEMA,
            command: command.into(),
            parameters: BTreeMap::new(),
            certificates: BTreeMap::new(),
            verdicts: Vec::new(),
            error: None,
            timings_ms: BTreeMap::new(),
            hash: String::new(),
        }
    }

    pub fn param(&mut self, name: &str, v: impl Serialize) {
        self.parameters.insert(name.into(), to_value(v));
    }

    pub fn cert(&mut self, name: &str, v: impl Serialize) {
        self.certificates.insert(name.into(), to_value(v));
    }

    pub fn verdict(&mut self, check: &str, outcome: Outcome, reason: impl Into<String>) {
        self.verdicts.push(Verdict { check: check.into(), outcome, reason: reason.into() });
    }

    pub fn check(&mut self, check: &str, ok: bool, reason: impl Into<String>) {
        let outcome = if ok { Outcome::Pass } else { Outcome::Fail };
        self.verdict(check, outcome, reason);
    }

    /// Record an error from a check: precision problems are indeterminate,
    /// anything else fails the check.
    pub fn check_error(&mut self, check: &str, e: &Error) {
        let outcome = match e {
            Error::Indeterminate(_) | Error::PrecisionExhausted(_) => Outcome::Indeterminate,
            _ => Outcome::Fail,
        };
        self.verdict(check, outcome, e.to_string());
    }

    pub fn timed<T>(&mut self, name: &str, f: impl FnOnce(&mut Self) -> T) -> T {
        let start = Instant::now();
        let out = f(self);
        self.timings_ms.insert(name.into(), start.elapsed().as_secs_f64() * 1e3);
        out
    }

    /// `0` all pass, `1` any fail, `2` any indeterminate (and no fail).
    pub fn exit_code(&self) -> i32 {
        if self.error.is_some() {
            3
        } else if self.verdicts.iter().any(|v| v.outcome == Outcome::Fail) {
            1
        } else if self.verdicts.iter().any(|v| v.outcome == Outcome::Indeterminate) {
            2
        } else {
            0
        }
    }

    pub fn content_hash(&self) -> String {
        let h = Hashed {
            schema: self.schema,
            command: &self.command,
            parameters: &self.parameters,
            certificates: &self.certificates,
            verdicts: &self.verdicts,
            error: &self.error,
        };
        let bytes = serde_json::to_vec(&h).expect("reports serialize");
        hex::encode(Sha256::digest(bytes))
    }

    pub fn seal(mut self) -> Self {
        self.hash = self.content_hash();
        self
    }
}

pub fn to_value(v: impl Serialize) -> Value {
    serde_json::to_value(v).unwrap_or_else(|e| Value::String(format!("unserializable: {e}")))
}
