use std::fmt::Write as _;

use serde::Serialize;
use serde_json::Value;

#[derive(Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub command: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input_sha256: Option<String>,
    pub results: Value,
    pub checks: Vec<Check>,
    pub pass: bool,
}

impl Report {
    pub fn new(command: Vec<String>) -> Self {
        Self {
            command,
            input_sha256: None,
            results: Value::Object(Default::default()),
            checks: Vec::new(),
            pass: true,
        }
    }

    pub fn set<T: Serialize>(&mut self, key: &str, value: T) {
        let v = serde_json::to_value(value).expect("report values serialize");
        self.results
            .as_object_mut()
            .expect("results is an object")
            .insert(key.to_string(), v);
    }

    pub fn check(&mut self, name: &str, pass: bool, detail: impl Into<Option<String>>) {
        self.pass &= pass;
        self.checks.push(Check {
            name: name.to_string(),
            pass,
            detail: detail.into(),
        });
    }

    pub fn render(&self, json: bool) -> String {
        if json {
            let mut s = serde_json::to_string_pretty(self).expect("report serializes");
            s.push('\n');
            return s;
        }
        let mut out = String::new();
        let _ = writeln!(out, "command: {}", self.command.join(" "));
        if let Some(h) = &self.input_sha256 {
            let _ = writeln!(out, "input sha256: {h}");
        }
        if let Value::Object(map) = &self.results {
            for (k, v) in map {
                render_value(&mut out, k, v, 0);
            }
        }
        for c in &self.checks {
            let status = if c.pass { "PASS" } else { "FAIL" };
            match &c.detail {
                Some(d) => {
                    let _ = writeln!(out, "{status} {}: {d}", c.name);
                }
                None => {
                    let _ = writeln!(out, "{status} {}", c.name);
                }
            }
        }
        let _ = writeln!(out, "result: {}", if self.pass { "pass" } else { "fail" });
        out
    }
}

const MAX_HUMAN_ITEMS: usize = 16;

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("-".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        _ => None,
    }
}

fn flat_object(v: &Value) -> Option<String> {
    let map = v.as_object()?;
    let parts = map
        .iter()
        .map(|(k, x)| scalar(x).map(|s| format!("{k}={s}")))
        .collect::<Option<Vec<_>>>()?;
    Some(parts.join(" "))
}

fn render_value(out: &mut String, key: &str, v: &Value, indent: usize) {
    let pad = "  ".repeat(indent);
    if let Some(s) = scalar(v) {
        let _ = writeln!(out, "{pad}{key}: {s}");
        return;
    }
    match v {
        Value::Array(items) => {
            if items.iter().all(|x| scalar(x).is_some()) {
                let shown: Vec<String> = items
                    .iter()
                    .take(MAX_HUMAN_ITEMS)
                    .filter_map(scalar)
                    .collect();
                let more = if items.len() > MAX_HUMAN_ITEMS {
                    format!(" … ({} entries)", items.len())
                } else {
                    String::new()
                };
                let _ = writeln!(out, "{pad}{key}: [{}]{more}", shown.join(", "));
            } else {
                let _ = writeln!(out, "{pad}{key}: ({} entries)", items.len());
                for (i, item) in items.iter().take(MAX_HUMAN_ITEMS).enumerate() {
                    match flat_object(item) {
                        Some(line) => {
                            let _ = writeln!(out, "{pad}  - {line}");
                        }
                        None => render_value(out, &i.to_string(), item, indent + 1),
                    }
                }
                if items.len() > MAX_HUMAN_ITEMS {
                    let _ = writeln!(out, "{pad}  …");
                }
            }
        }
        Value::Object(map) => {
            let _ = writeln!(out, "{pad}{key}:");
            for (k, x) in map {
                render_value(out, k, x, indent + 1);
            }
        }
        _ => unreachable!(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn human_rendering_truncates_long_arrays() {
        let mut r = Report::new(vec!["x".into()]);
        r.set("values", (0..40).collect::<Vec<_>>());
        r.check("ok", true, None);
        let text = r.render(false);
        assert!(text.contains("(40 entries)"));
        assert!(text.contains("PASS ok"));
        assert!(text.ends_with("result: pass\n"));
    }

    #[test]
    fn failed_check_fails_report() {
        let mut r = Report::new(vec![]);
        r.check("a", true, None);
        r.check("b", false, Some("too small".into()));
        assert!(!r.pass);
        let v: Value = serde_json::from_str(&r.render(true)).unwrap();
        assert_eq!(v["pass"], Value::Bool(false));
        assert_eq!(v["checks"][1]["detail"], "too small");
    }
}
