use serde_json::{json, Map, Value};

/// One verdict in a report. Extra fields are carried verbatim.
#[derive(Debug, Clone)]
pub struct Record {
    name: String,
    pass: bool,
    fields: Map<String, Value>,
}

impl Record {
    pub fn new(name: impl Into<String>, pass: bool) -> Self {
        Self {
            name: name.into(),
            pass,
            fields: Map::new(),
        }
    }

    /// Passes when `value <= threshold`.
    pub fn bounded(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self::new(name, value <= threshold)
            .with("value", value)
            .with("threshold", threshold)
    }

    /// Informational row; always passes.
    pub fn info(name: impl Into<String>) -> Self {
        Self::new(name, true)
    }

    pub fn with(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.fields.insert(key.to_string(), value.into());
        self
    }

    pub fn pass(&self) -> bool {
        self.pass
    }

    fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("name".into(), json!(self.name));
        m.insert("pass".into(), json!(self.pass));
        m.extend(self.fields.clone());
        Value::Object(m)
    }
}

#[derive(Debug, Clone)]
pub struct Report {
    pub command: &'static str,
    pub config: Value,
    pub results: Vec<Record>,
    pub wall_time_ms: u64,
}

impl Report {
    pub fn pass(&self) -> bool {
        self.results.iter().all(Record::pass)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "command": self.command,
            "config": self.config,
            "results": self.results.iter().map(Record::to_json).collect::<Vec<_>>(),
            "pass": self.pass(),
            "wall_time_ms": self.wall_time_ms,
        })
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for r in &self.results {
            let verdict = if r.pass { "PASS" } else { "FAIL" };
            let fields: Vec<String> = r
                .fields
                .iter()
                .map(|(k, v)| format!("{k}={}", plain(v)))
                .collect();
            out.push_str(&format!("{verdict} {} {}\n", r.name, fields.join(" ")));
        }
        out.push_str(&format!(
            "{}: {} ({} ms)\n",
            self.command,
            if self.pass() { "pass" } else { "fail" },
            self.wall_time_ms
        ));
        out
    }
}

fn plain(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}
