//! Run reports: what ran, on which input, with which parameters, what came
//! out and whether it re-verified.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::graph::IntersectionGraph;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    Fail,
    /// Not run, e.g. an exponential re-check under `--verify off`.
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub status: CheckStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    pub fn from_result(name: &str, r: std::result::Result<(), String>) -> Check {
        match r {
            Ok(()) => Check { name: name.into(), status: CheckStatus::Pass, detail: None },
            Err(e) => Check { name: name.into(), status: CheckStatus::Fail, detail: Some(e) },
        }
    }

    pub fn skipped(name: &str, why: &str) -> Check {
        Check { name: name.into(), status: CheckStatus::Skipped, detail: Some(why.into()) }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verification {
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl Verification {
    pub fn new(checks: Vec<Check>) -> Self {
        Verification { passed: checks.iter().all(|c| c.status != CheckStatus::Fail), checks }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputInfo {
    pub path: String,
    pub sha256: String,
    pub bytes: usize,
}

impl InputInfo {
    pub fn new(path: &str, data: &[u8]) -> Self {
        InputInfo { path: path.into(), sha256: hex::encode(Sha256::digest(data)), bytes: data.len() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorInfo {
    pub kind: String,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub tool: String,
    pub operation: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<InputInfo>,
    pub params: Value,
    pub witness: Value,
    pub verification: Verification,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorInfo>,
    /// Wall-clock milliseconds per phase; only present when requested, so
    /// that reports are otherwise reproducible byte for byte.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timings_ms: Option<BTreeMap<String, f64>>,
}

impl RunReport {
    pub fn new(operation: &str) -> Self {
        RunReport {
            tool: concat!("stringgraph ", env!("CARGO_PKG_VERSION")).into(),
            operation: operation.into(),
            input: None,
            params: Value::Null,
            witness: Value::Null,
            verification: Verification::default(),
            error: None,
            timings_ms: None,
        }
    }
}

pub fn emit_report(report: &RunReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("reports serialize");
    s.push('\n');
    s
}

pub fn parse_report(text: &str) -> crate::Result<RunReport> {
    serde_json::from_str(text).map_err(|e| crate::Error::parse(e.line(), e.column(), e.to_string()))
}

/// Vertex indices together with their labels.
pub fn labelled(g: &IntersectionGraph, verts: &[usize]) -> Value {
    serde_json::json!({
        "vertices": verts,
        "labels": verts.iter().map(|&v| g.label(v)).collect::<Vec<_>>(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_round_trip() {
        let mut r = RunReport::new("separator");
        r.input = Some(InputInfo::new("g.txt", b"1 0\n"));
        r.params = serde_json::json!({"strategy": "auto"});
        r.witness = serde_json::json!({"separator": [0]});
        r.verification = Verification::new(vec![
            Check::from_result("balanced", Ok(())),
            Check::skipped("exact", "off"),
        ]);
        assert!(r.verification.passed);
        let text = emit_report(&r);
        assert_eq!(parse_report(&text).unwrap(), r);
        assert!(!text.contains("timings_ms"));
        assert_eq!(r.input.unwrap().sha256.len(), 64);
    }

    #[test]
    fn failing_check_fails_verification() {
        let v = Verification::new(vec![Check::from_result("x", Err("bad".into()))]);
        assert!(!v.passed);
    }
}
