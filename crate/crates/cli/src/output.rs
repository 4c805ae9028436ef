//! CSV and JSON rendering of suite reports.

use std::fmt::Write as _;

use gaussbalance::suites::{Check, Severity, SuiteReport, Table, SCHEMA};
use serde_json::Value;

/// A finite float with 17 significant digits, positional when that stays short.
pub fn fmt_f64(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    if x == 0.0 {
        return "0.0".into();
    }
    let sci = format!("{x:.16e}");
    let exp: i32 = sci[sci.find('e').expect("exponent") + 1..]
        .parse()
        .expect("integer exponent");
    if (-5..17).contains(&exp) {
        format!("{x:.*}", (16 - exp) as usize)
    } else {
        sci
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn csv_value(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) if n.is_f64() => fmt_f64(n.as_f64().expect("f64")),
        Value::Number(n) => n.to_string(),
        Value::String(s) => csv_field(s),
        other => csv_field(&other.to_string()),
    }
}

fn severity(s: Severity) -> &'static str {
    match s {
        Severity::Hard => "hard",
        Severity::Soft => "soft",
    }
}

pub fn summary_csv(command: &str, checks: &[Check]) -> String {
    let mut out = format!("#schema={SCHEMA},command={command},table=summary\n");
    out.push_str("id,severity,passed,detail\n");
    for c in checks {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            csv_field(&c.id),
            severity(c.severity),
            c.passed,
            csv_field(&c.detail)
        );
    }
    out
}

pub fn table_csv(command: &str, t: &Table) -> String {
    let mut out = format!("#schema={SCHEMA},command={command},table={}\n", t.name);
    out.push_str(
        &t.columns
            .iter()
            .map(|c| csv_field(c))
            .collect::<Vec<_>>()
            .join(","),
    );
    out.push('\n');
    for row in &t.rows {
        out.push_str(&row.iter().map(csv_value).collect::<Vec<_>>().join(","));
        out.push('\n');
    }
    out
}

/// JSON text with floats written by [`fmt_f64`]; non-finite floats become null.
pub fn to_json(v: &Value, out: &mut String, indent: usize) {
    let pad = |n: usize| "  ".repeat(n);
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("f64");
            out.push_str(&fmt_f64(x));
        }
        Value::Array(items) if items.is_empty() => out.push_str("[]"),
        Value::Array(items) if items.iter().all(|i| !i.is_array() && !i.is_object()) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                to_json(item, out, indent);
            }
            out.push(']');
        }
        Value::Array(items) => {
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                to_json(item, out, indent + 1);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push(']');
        }
        Value::Object(map) if map.is_empty() => out.push_str("{}"),
        Value::Object(map) => {
            out.push_str("{\n");
            for (i, (k, item)) in map.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                out.push_str(&Value::String(k.clone()).to_string());
                out.push_str(": ");
                to_json(item, out, indent + 1);
                out.push_str(if i + 1 < map.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push('}');
        }
        other => out.push_str(&other.to_string()),
    }
}

/// The whole report as one JSON document.
pub fn report_json(command: &str, report: &SuiteReport) -> String {
    let doc = serde_json::json!({
        "schema": SCHEMA,
        "command": command,
        "passed": report.hard_passed(),
        "checks": report.checks,
        "tables": report.tables,
    });
    let mut out = String::new();
    to_json(&doc, &mut out, 0);
    out.push('\n');
    out
}
