//! Certificates and reports shared by every pipeline and the CLI.

use std::fmt::{self, Write as _};

use serde::Serialize;
use serde_json::Value;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

impl Status {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Inconclusive => "INCONCLUSIVE",
        })
    }
}

/// One checked statement: what was claimed, whether it held, and the numbers behind it.
#[derive(Clone, Debug, Serialize)]
pub struct Certificate {
    pub name: String,
    pub status: Status,
    pub claim: String,
    pub payload: Value,
}

impl Certificate {
    pub fn new(name: impl Into<String>, status: Status, claim: impl Into<String>, payload: Value) -> Self {
        Certificate { name: name.into(), status, claim: claim.into(), payload }
    }

    pub fn check(name: impl Into<String>, ok: bool, claim: impl Into<String>, payload: Value) -> Self {
        Self::new(name, Status::from_bool(ok), claim, payload)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub schema: u32,
    pub config: Value,
    pub certificates: Vec<Certificate>,
}

impl Report {
    pub fn new(config: Value) -> Self {
        Report {
            tool: "twpatch".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            schema: SCHEMA_VERSION,
            config,
            certificates: Vec::new(),
        }
    }

    pub fn push(&mut self, c: Certificate) {
        self.certificates.push(c);
    }

    pub fn extend(&mut self, cs: impl IntoIterator<Item = Certificate>) {
        self.certificates.extend(cs);
    }

    pub fn failed(&self) -> bool {
        self.certificates.iter().any(|c| c.status == Status::Fail)
    }

    pub fn exit_code(&self) -> i32 {
        if self.failed() {
            1
        } else {
            0
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{} {} (schema {})\nconfig: {}\n", self.tool, self.version, self.schema, self.config);
        for c in &self.certificates {
            let _ = writeln!(s, "[{}] {} — {}", c.status, c.name, c.claim);
            if !c.payload.is_null() {
                let _ = writeln!(s, "    {}", c.payload);
            }
        }
        let _ = writeln!(s, "result: {}", if self.failed() { "FAIL" } else { "PASS" });
        s
    }
}
