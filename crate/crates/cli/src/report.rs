//! Reports: ordered `key: value` fields rendered as text or JSON with the
//! same field names. A list field becomes one text line per item.

use serde_json::{Map, Value};

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Report {
    fields: Vec<(String, Value)>,
}

impl Report {
    pub fn new(command: &str, status: &str) -> Self {
        let mut r = Report::default();
        r.set("command", command);
        r.set("status", status);
        r
    }

    pub fn set(&mut self, key: &str, value: impl Into<Value>) {
        let value = value.into();
        match self.fields.iter_mut().find(|(k, _)| k == key) {
            Some(slot) => slot.1 = value,
            None => self.fields.push((key.to_string(), value)),
        }
    }

    pub fn push(&mut self, key: &str, item: impl Into<Value>) {
        let item = item.into();
        match self.fields.iter_mut().find(|(k, _)| k == key) {
            Some((_, Value::Array(items))) => items.push(item),
            Some(slot) => slot.1 = Value::Array(vec![slot.1.take(), item]),
            None => self.fields.push((key.to_string(), Value::Array(vec![item]))),
        }
    }

    pub fn lines(&mut self, key: &str, items: impl IntoIterator<Item = String>) {
        for item in items {
            self.push(key, item);
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.fields {
            match v {
                Value::Array(items) => {
                    for item in items {
                        s.push_str(&format!("{k}: {}\n", scalar(item)));
                    }
                }
                other => s.push_str(&format!("{k}: {}\n", scalar(other))),
            }
        }
        s
    }

    pub fn to_json(&self) -> String {
        let map: Map<String, Value> = self.fields.iter().cloned().collect();
        let mut s = serde_json::to_string_pretty(&Value::Object(map)).expect("plain values serialize");
        s.push('\n');
        s
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_and_json_share_names() {
        let mut r = Report::new("verify", "valid");
        r.set("level", 2);
        r.push("diff", "a");
        r.push("diff", "b");
        assert_eq!(r.to_text(), "command: verify\nstatus: valid\nlevel: 2\ndiff: a\ndiff: b\n");
        let v: Value = serde_json::from_str(&r.to_json()).unwrap();
        let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
        assert_eq!(keys, ["command", "status", "level", "diff"]);
        assert_eq!(v["diff"], serde_json::json!(["a", "b"]));
    }
}
