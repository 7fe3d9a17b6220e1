//! Report envelope and the json / csv / pretty renderers.

use clap::ValueEnum;
use serde_json::{json, Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Pretty,
}

impl Format {
    pub fn as_str(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Pretty => "pretty",
        }
    }
}

/// Tabular view of a result, used by the csv and pretty renderers.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }
}

/// What a command hands back: the payload, an optional table and whether
/// the verdict it reports is a pass.
pub struct Outcome {
    pub result: Value,
    pub table: Option<Table>,
    pub ok: bool,
}

impl Outcome {
    pub fn new(result: Value, ok: bool) -> Self {
        Outcome { result, table: None, ok }
    }

    pub fn with_table(mut self, table: Table) -> Self {
        self.table = Some(table);
        self
    }
}

pub fn render(format: Format, command: &str, config: &Value, outcome: &Outcome) -> String {
    match format {
        Format::Json => {
            let doc = json!({ "command": command, "config": config, "result": outcome.result, "ok": outcome.ok });
            let mut s = serde_json::to_string_pretty(&doc).expect("report serialises");
            s.push('\n');
            s
        }
        Format::Csv => {
            let table = outcome.table.clone().unwrap_or_else(|| flat_table(&outcome.result));
            csv(&table)
        }
        Format::Pretty => {
            let mut s = format!("{command} ({})\n", if outcome.ok { "pass" } else { "fail" });
            for (k, v) in flatten(config, "config") {
                s.push_str(&format!("  {k} = {v}\n"));
            }
            let tabled = outcome.table.is_some();
            for (k, v) in flatten(&outcome.result, "") {
                // Array elements already appear in the table.
                if tabled && k.split('.').any(|seg| seg.parse::<usize>().is_ok()) {
                    continue;
                }
                s.push_str(&format!("{k} = {v}\n"));
            }
            if let Some(t) = &outcome.table {
                s.push_str(&aligned(t));
            }
            s
        }
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn csv(t: &Table) -> String {
    let mut out = String::new();
    for row in std::iter::once(&t.header).chain(&t.rows) {
        let line: Vec<String> = row.iter().map(|f| csv_field(f)).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

fn aligned(t: &Table) -> String {
    let cols = t.header.len();
    let mut widths = vec![0; cols];
    for row in std::iter::once(&t.header).chain(&t.rows) {
        for (w, f) in widths.iter_mut().zip(row) {
            *w = (*w).max(f.len());
        }
    }
    let mut out = String::new();
    for row in std::iter::once(&t.header).chain(&t.rows) {
        let cells: Vec<String> = row.iter().zip(&widths).map(|(f, w)| format!("{f:<w$}")).collect();
        out.push_str(cells.join("  ").trim_end());
        out.push('\n');
    }
    out
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

/// `(dotted.path, value)` pairs for every leaf of `v`.
fn flatten(v: &Value, prefix: &str) -> Vec<(String, String)> {
    let join = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(map) => flatten_map(map, &join),
        Value::Array(items) => items.iter().enumerate().flat_map(|(i, x)| flatten(x, &join(&i.to_string()))).collect(),
        leaf => vec![(prefix.to_string(), scalar(leaf))],
    }
}

fn flatten_map(map: &Map<String, Value>, join: &dyn Fn(&str) -> String) -> Vec<(String, String)> {
    map.iter().flat_map(|(k, x)| flatten(x, &join(k))).collect()
}

fn flat_table(v: &Value) -> Table {
    let mut t = Table::new(&["key", "value"]);
    for (k, x) in flatten(v, "") {
        t.push(vec![k, x]);
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flatten_paths() {
        let v = json!({"a": {"b": [1, "x"]}, "c": null});
        assert_eq!(
            flatten(&v, ""),
            vec![("a.b.0".into(), "1".into()), ("a.b.1".into(), "x".into()), ("c".into(), String::new())]
        );
    }

    #[test]
    fn csv_quotes_fields() {
        let mut t = Table::new(&["k", "v"]);
        t.push(vec!["a,b".into(), "say \"hi\"".into()]);
        assert_eq!(csv(&t), "k,v\n\"a,b\",\"say \"\"hi\"\"\"\n");
    }
}
