//! Text tables and JSON reports.

use std::fmt::Write as _;

use nahm_core::frame_algebra::Mat3;
use serde_json::{json, Map, Value};

pub const SCHEMA: &str = "1";

pub struct Report {
    pub table: String,
    pub json: Map<String, Value>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        let mut json = Map::new();
        json.insert("schema".into(), json!(SCHEMA));
        json.insert("command".into(), json!(command));
        Self {
            table: String::new(),
            json,
        }
    }

    pub fn set(&mut self, key: &str, value: Value) {
        self.json.insert(key.into(), value);
    }

    pub fn line(&mut self, text: impl AsRef<str>) {
        self.table.push_str(text.as_ref());
        self.table.push('\n');
    }

    pub fn matrix(&mut self, label: &str, m: &Mat3) {
        self.line(label);
        for i in 0..3 {
            let mut row = String::from("   ");
            for j in 0..3 {
                let _ = write!(row, " {:>15.8e}", m[(i, j)] + 0.0);
            }
            self.line(row);
        }
    }

    /// Canonical serialization: sorted keys, shortest round-trip floats,
    /// trailing newline.
    pub fn to_json_string(&self) -> String {
        canonical(&Value::Object(self.json.clone()))
    }
}

pub fn canonical(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

/// Row-major 9-element array.
pub fn mat_json(m: &Mat3) -> Value {
    let mut v = Vec::with_capacity(9);
    for i in 0..3 {
        for j in 0..3 {
            v.push(json!(m[(i, j)]));
        }
    }
    Value::Array(v)
}

pub fn alpha_key(k: i64, l: u32) -> String {
    format!("alpha[{k}][{l}]")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_byte_identical() {
        let mut r = Report::new("test");
        r.set("b", json!(0.1 + 0.2));
        r.set("a", mat_json(&Mat3::new(1.0 / 3.0, -2.5e-300, 7.0, 1e300, 0.0, -0.0, 2.0_f64.sqrt(), 1e-17, 123456789.0)));
        let s = r.to_json_string();
        let back: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(canonical(&back), s);
        assert!(s.find("\"a\"").unwrap() < s.find("\"b\"").unwrap());
    }
}
