//! Report rendering: canonical JSON, fixed-header CSV, flat text.

use clap::ValueEnum;
use serde::Serialize;
use serde_json::{Map, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

pub struct Csv {
    pub header: String,
    pub rows: Vec<String>,
}

pub struct Report {
    pub json: Value,
    pub csv: Option<Csv>,
}

impl Report {
    pub fn new<T: Serialize>(x: &T) -> Report {
        Report { json: canonical(serde_json::to_value(x).expect("reports serialize")), csv: None }
    }

    pub fn with_csv(mut self, header: &str, rows: Vec<String>) -> Report {
        self.csv = Some(Csv { header: header.into(), rows });
        self
    }
}

/// Sort object keys recursively, whatever map the JSON backend uses.
pub fn canonical(v: Value) -> Value {
    match v {
        Value::Object(m) => {
            let mut entries: Vec<(String, Value)> = m.into_iter().map(|(k, v)| (k, canonical(v))).collect();
            entries.sort_by(|a, b| a.0.cmp(&b.0));
            let mut out = Map::new();
            for (k, v) in entries {
                out.insert(k, v);
            }
            Value::Object(out)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(canonical).collect()),
        other => other,
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<String>) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                let p = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&p, x, out);
            }
        }
        Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), x, out);
            }
        }
        Value::String(s) => out.push(format!("{prefix} = {s}")),
        other => out.push(format!("{prefix} = {other}")),
    }
}

pub fn emit_report(r: &Report, format: Format) -> Result<Vec<u8>, String> {
    let mut s = match format {
        Format::Json => serde_json::to_string_pretty(&r.json).expect("json"),
        Format::Csv => {
            let c = r.csv.as_ref().ok_or("csv output is not available for this report")?;
            let mut lines = vec![c.header.clone()];
            lines.extend(c.rows.iter().cloned());
            lines.join("\n")
        }
        Format::Text => {
            let mut lines = Vec::new();
            flatten("", &r.json, &mut lines);
            lines.join("\n")
        }
    };
    s.push('\n');
    Ok(s.into_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn keys_are_sorted() {
        let r = Report::new(&json!({"b": 1, "a": {"d": 2, "c": 3}}));
        let s = String::from_utf8(emit_report(&r, Format::Json).unwrap()).unwrap();
        assert!(s.find("\"a\"").unwrap() < s.find("\"b\"").unwrap());
        assert!(s.find("\"c\"").unwrap() < s.find("\"d\"").unwrap());
    }

    #[test]
    fn empty_reports() {
        let r = Report::new(&json!({})).with_csv("degree,split,inert,ramified", vec![]);
        assert_eq!(emit_report(&r, Format::Json).unwrap(), b"{}\n");
        assert_eq!(emit_report(&r, Format::Csv).unwrap(), b"degree,split,inert,ramified\n");
        assert!(emit_report(&Report::new(&json!({})), Format::Csv).is_err());
    }

    #[test]
    fn text_is_flat() {
        let r = Report::new(&json!({"a": [1, {"b": "x"}]}));
        assert_eq!(emit_report(&r, Format::Text).unwrap(), b"a[0] = 1\na[1].b = x\n");
    }
}
