//! Text and JSON rendering shared by the subcommands.
//!
//! Every number in a JSON document is a string holding an exact integer or
//! reduced fraction; field elements use the `a+b*sqrt(d)` grammar.

use std::fmt::Display;

use fermat_cubic::correspondence::FermatSolution;
use fermat_cubic::root_number::RootNumberReport;
use fermat_cubic::CurvePoint;
use serde_json::{json, Map, Value};

pub const SCHEMA_VERSION: &str = "1";

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 1;
pub const EXIT_PRECONDITION: u8 = 2;
pub const EXIT_VERIFICATION: u8 = 3;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self { code: EXIT_USAGE, message: message.into() }
    }

    pub fn precondition(message: impl Into<String>) -> Self {
        Self { code: EXIT_PRECONDITION, message: message.into() }
    }

    pub fn verification(message: impl Into<String>) -> Self {
        Self { code: EXIT_VERIFICATION, message: message.into() }
    }

    /// `command` is `None` when the arguments did not name a subcommand.
    pub fn to_json(&self, command: Option<&str>) -> Value {
        json!({
            "schema_version": SCHEMA_VERSION,
            "command": command,
            "status": "error",
            "error": { "kind": kind(self.code), "message": self.message },
        })
    }
}

fn kind(code: u8) -> &'static str {
    match code {
        EXIT_USAGE => "usage",
        EXIT_PRECONDITION => "precondition",
        EXIT_VERIFICATION => "verification",
        _ => "internal",
    }
}

/// Result of a command that ran to completion. A `code` of 3 means the
/// command ran but the object it checked is invalid.
#[derive(Debug, Clone)]
pub struct Report {
    pub code: u8,
    pub text: String,
    pub body: Map<String, Value>,
}

impl Report {
    pub fn ok(text: String, body: Value) -> Self {
        Self::with_code(EXIT_OK, text, body)
    }

    pub fn with_code(code: u8, text: String, body: Value) -> Self {
        let Value::Object(body) = body else {
            panic!("report body must be a JSON object");
        };
        Self { code, text, body }
    }

    pub fn to_json(&self, command: &str) -> Value {
        let mut doc = Map::new();
        doc.insert("schema_version".into(), SCHEMA_VERSION.into());
        doc.insert("command".into(), command.into());
        let status = if self.code == EXIT_OK { "ok" } else { "invalid" };
        doc.insert("status".into(), status.into());
        doc.extend(self.body.clone());
        Value::Object(doc)
    }
}

pub fn pretty(value: &Value) -> String {
    serde_json::to_string_pretty(value).expect("JSON values always serialize")
}

pub fn string(v: impl Display) -> Value {
    Value::String(v.to_string())
}

pub fn point<F: Display>(p: &CurvePoint<F>) -> Value {
    match p.coords() {
        None => Value::String("infinity".into()),
        Some((x, y)) => json!({ "x": x.to_string(), "y": y.to_string() }),
    }
}

pub fn triple(s: &FermatSolution) -> Value {
    Value::Array(s.coordinates().iter().map(string).collect())
}

pub fn root_number(r: &RootNumberReport) -> Value {
    json!({
        "reduced_coefficient": string(&r.d),
        "a": string(r.a),
        "d2": string(&r.d2),
        "b": string(r.b),
        "d3": string(&r.d3),
        "w2": string(r.w2),
        "w3": string(r.w3),
        "local_signs": r.odd_local_signs.iter()
            .map(|(p, w)| json!({ "p": string(p), "w": string(w) }))
            .collect::<Vec<_>>(),
        "w": string(r.w),
    })
}

pub fn root_number_text(r: &RootNumberReport) -> String {
    let mut text = format!(
        "D' = {} = 2^{} * ({}) = 3^{} * ({}); w_2 = {}, w_3 = {}",
        r.d, r.a, r.d2, r.b, r.d3, r.w2, r.w3
    );
    for (p, w) in &r.odd_local_signs {
        text.push_str(&format!(", w_{p} = {w}"));
    }
    text
}
