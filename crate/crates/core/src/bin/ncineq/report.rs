use std::fmt::Write as _;
use std::io::{self, Write};
use std::path::Path;

use num_rational::BigRational;
use serde_json::{json, Map, Value};

use ncineq::linalg::{fmt_rational, to_f64};

/// Human-readable text followed by a JSON block.
pub struct Report {
    text: String,
    json: Map<String, Value>,
}

pub const JSON_BEGIN: &str = "-----BEGIN REPORT JSON-----";
pub const JSON_END: &str = "-----END REPORT JSON-----";

impl Report {
    pub fn new(command: &str) -> Self {
        let mut json = Map::new();
        json.insert("command".into(), json!(command));
        Self {
            text: String::new(),
            json,
        }
    }

    pub fn line(&mut self, s: impl AsRef<str>) {
        self.text.push_str(s.as_ref());
        self.text.push('\n');
    }

    pub fn field(&mut self, name: &str, value: impl AsRef<str>) {
        let _ = writeln!(self.text, "{name:<11}{}", value.as_ref());
    }

    pub fn set(&mut self, key: &str, value: Value) {
        self.json.insert(key.into(), value);
    }

    pub fn render(&self) -> String {
        let body = serde_json::to_string_pretty(&Value::Object(self.json.clone())).expect("report serializes");
        format!("{}\n{JSON_BEGIN}\n{body}\n{JSON_END}\n", self.text)
    }

    pub fn emit(&self, out: Option<&Path>) -> io::Result<()> {
        match out {
            Some(path) => std::fs::write(path, self.render()),
            None => io::stdout().lock().write_all(self.render().as_bytes()),
        }
    }
}

/// `p/q ≈ decimal`; the decimal is for display only.
pub fn show(q: &BigRational) -> String {
    format!("{} ≈ {:.6}", fmt_rational(q), to_f64(q))
}

pub fn exact(q: &BigRational) -> Value {
    json!({ "exact": fmt_rational(q), "decimal": to_f64(q) })
}

pub fn opt_exact(q: Option<&BigRational>) -> Value {
    q.map_or(Value::Null, exact)
}
