//! Run reports and their canonical serialization.
//!
//! Canonical JSON has sorted object keys and renders every float rounded to
//! 12 significant digits, so equal runs give byte-identical files.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Number, Value};

use crate::CliError;

/// File in the working directory collecting every run.
pub const RUN_STORE: &str = "lipext-runs.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowKind {
    /// `computed <= claimed + tol`.
    Upper,
    /// `|computed - claimed| <= tol`.
    Equality,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub name: String,
    pub kind: RowKind,
    pub claimed: f64,
    pub computed: f64,
    /// `claimed - computed`.
    pub margin: f64,
    pub pass: bool,
}

impl Row {
    pub fn upper(name: impl Into<String>, claimed: f64, computed: f64, tol: f64) -> Self {
        let pass = computed <= claimed + tol;
        Row { name: name.into(), kind: RowKind::Upper, claimed, computed, margin: claimed - computed, pass }
    }

    pub fn equality(name: impl Into<String>, claimed: f64, computed: f64, tol: f64) -> Self {
        let pass = (computed - claimed).abs() <= tol;
        Row { name: name.into(), kind: RowKind::Equality, claimed, computed, margin: claimed - computed, pass }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    pub inputs: Value,
    pub results: Vec<Row>,
    pub pass: bool,
    /// Construction output and intermediate values.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub details: Option<Value>,
}

impl RunReport {
    pub fn new(command: impl Into<String>, inputs: Value, results: Vec<Row>) -> Self {
        let pass = results.iter().all(|r| r.pass);
        RunReport { command: command.into(), inputs, results, pass, details: None }
    }

    pub fn failed_rows(&self) -> impl Iterator<Item = &Row> {
        self.results.iter().filter(|r| !r.pass)
    }

    pub fn to_canonical_json(&self) -> String {
        canonical_json(&serde_json::to_value(self).expect("report serializes"))
    }
}

/// Rounds to 12 significant digits.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return if x == 0.0 { 0.0 } else { x };
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

fn write_float(out: &mut String, x: f64) {
    if x.is_nan() {
        out.push_str("\"nan\"");
    } else if x.is_infinite() {
        out.push_str(if x > 0.0 { "\"inf\"" } else { "\"-inf\"" });
    } else {
        let r = round12(x);
        if r.fract() == 0.0 && r.abs() < 1e15 {
            write!(out, "{}", r as i64).unwrap();
        } else {
            write!(out, "{r}").unwrap();
        }
    }
}

fn write_number(out: &mut String, n: &Number) {
    if let Some(i) = n.as_i64() {
        write!(out, "{i}").unwrap();
    } else if let Some(u) = n.as_u64() {
        write!(out, "{u}").unwrap();
    } else {
        write_float(out, n.as_f64().unwrap_or(f64::NAN));
    }
}

fn write_value(out: &mut String, v: &Value) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => write_number(out, n),
        Value::String(s) => out.push_str(&serde_json::to_string(s).unwrap()),
        Value::Array(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_value(out, item);
            }
            out.push(']');
        }
        Value::Object(map) => {
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push('{');
            for (i, k) in keys.into_iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&serde_json::to_string(k).unwrap());
                out.push(':');
                write_value(out, &map[k]);
            }
            out.push('}');
        }
    }
}

/// Compact JSON with sorted keys and 12-significant-digit floats.
pub fn canonical_json(v: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, v);
    out
}

/// Canonical JSON of a list of reports.
pub fn reports_json(reports: &[RunReport]) -> String {
    let v = Value::Array(reports.iter().map(|r| serde_json::to_value(r).unwrap()).collect());
    canonical_json(&v)
}

fn csv_float(x: f64) -> String {
    let mut s = String::new();
    write_float(&mut s, x);
    s.trim_matches('"').to_string()
}

/// One line per row, under the header `command,row,claimed,computed,margin,pass`.
pub fn reports_csv(reports: &[RunReport]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["command", "row", "claimed", "computed", "margin", "pass"])
        .map_err(|e| CliError::Io(e.to_string()))?;
    for r in reports {
        for row in &r.results {
            w.write_record([
                r.command.clone(),
                row.name.clone(),
                csv_float(row.claimed),
                csv_float(row.computed),
                csv_float(row.margin),
                row.pass.to_string(),
            ])
            .map_err(|e| CliError::Io(e.to_string()))?;
        }
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv is utf-8"))
}

/// Reads the run store in `dir`.
pub fn load_runs(dir: &Path) -> Result<Vec<RunReport>, CliError> {
    let path = dir.join(RUN_STORE);
    let text = match fs::read_to_string(&path) {
        Ok(t) => t,
        Err(e) if e.kind() == io::ErrorKind::NotFound => return Err(CliError::NoPriorRun),
        Err(e) => return Err(CliError::Io(format!("{}: {e}", path.display()))),
    };
    serde_json::from_str(&text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Appends `report` to the run store in `dir`.
pub fn append_run(dir: &Path, report: &RunReport) -> Result<(), CliError> {
    let mut runs = match load_runs(dir) {
        Ok(r) => r,
        Err(CliError::NoPriorRun) => Vec::new(),
        Err(e) => return Err(e),
    };
    runs.push(report.clone());
    write_file(&dir.join(RUN_STORE), &reports_json(&runs))
}

pub fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// `inputs` object from key/value pairs.
pub fn inputs(pairs: Vec<(&str, Value)>) -> Value {
    Value::Object(pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect::<Map<_, _>>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn rounding() {
        assert_eq!(round12(1.0 / 3.0), 0.333333333333);
        assert_eq!(round12(2.0), 2.0);
        assert_eq!(round12(0.1 + 0.2), 0.3);
    }

    #[test]
    fn canonical_form() {
        let v = json!({"b": 1.0, "a": [0.1, 2, "x"], "c": {"z": null, "y": 1e-20}});
        assert_eq!(canonical_json(&v), r#"{"a":[0.1,2,"x"],"b":1,"c":{"y":0.00000000000000000001,"z":null}}"#);
        assert_eq!(reports_json(&[]), "[]");
    }

    #[test]
    fn round_trip_is_stable() {
        let r = RunReport::new(
            "verify cone",
            inputs(vec![("seed", json!(7)), ("tol", json!(1e-9))]),
            vec![Row::upper("lip", 2.0, 1.0 / 3.0 + 1.0, 1e-9), Row::equality("norm", 1.0, 1.0 + 1e-13, 1e-9)],
        );
        let text = r.to_canonical_json();
        let back: RunReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_canonical_json(), text);
        assert!(back.pass);
    }

    #[test]
    fn row_rules() {
        assert!(Row::upper("a", 2.0, 2.0 + 1e-10, 1e-9).pass);
        assert!(!Row::upper("a", 2.0, 2.01, 1e-9).pass);
        assert!(!Row::equality("b", 1.0, 0.9, 1e-9).pass);
    }

    #[test]
    fn csv_header() {
        let text = reports_csv(&[]).unwrap();
        assert_eq!(text, "command,row,claimed,computed,margin,pass\n");
    }
}
