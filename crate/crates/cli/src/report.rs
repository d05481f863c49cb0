use serde_json::Value;

use crate::{Format, Report};

/// Renders a report. Both formats end with a newline and are byte-stable:
/// object keys are sorted and no floating-point values ever appear.
pub fn emit_report(report: &Report, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = String::new();
            write_json(&mut s, &report.body, 0);
            s.push('\n');
            s
        }
        Format::Text => render_text(&report.body),
    }
}

/// Pretty JSON with arrays of scalars kept on one line, so matrices print
/// one row per line.
fn write_json(out: &mut String, v: &Value, indent: usize) {
    let pad = " ".repeat(indent + 2);
    match v {
        Value::Array(items) if items.iter().all(|x| !x.is_array() && !x.is_object()) => {
            let parts: Vec<String> = items.iter().map(Value::to_string).collect();
            out.push_str(&format!("[{}]", parts.join(", ")));
        }
        Value::Array(items) => {
            out.push_str("[\n");
            for (i, x) in items.iter().enumerate() {
                out.push_str(&pad);
                write_json(out, x, indent + 2);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            out.push_str(&format!("{}]", " ".repeat(indent)));
        }
        Value::Object(m) if m.is_empty() => out.push_str("{}"),
        Value::Object(m) => {
            out.push_str("{\n");
            for (i, (k, x)) in m.iter().enumerate() {
                out.push_str(&format!("{pad}{}: ", Value::String(k.clone())));
                write_json(out, x, indent + 2);
                out.push_str(if i + 1 < m.len() { ",\n" } else { "\n" });
            }
            out.push_str(&format!("{}}}", " ".repeat(indent)));
        }
        scalar => out.push_str(&scalar.to_string()),
    }
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("none".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        _ => None,
    }
}

fn inline_list(items: &[Value]) -> Option<String> {
    let parts: Option<Vec<String>> = items.iter().map(scalar).collect();
    parts.map(|p| format!("[{}]", p.join(", ")))
}

/// Plain-text rendering: `key: value` lines, nested objects indented by two
/// spaces, matrices one row per line.
pub fn render_text(v: &Value) -> String {
    let mut out = String::new();
    match v {
        Value::Object(_) => write_object(&mut out, v, 0),
        other => {
            write_value(&mut out, other, 0);
        }
    }
    out
}

fn write_object(out: &mut String, v: &Value, indent: usize) {
    let pad = " ".repeat(indent);
    let Value::Object(map) = v else { unreachable!() };
    for (k, val) in map {
        if let Some(s) = scalar(val) {
            out.push_str(&format!("{pad}{k}: {s}\n"));
            continue;
        }
        if let Value::Array(items) = val {
            if let Some(s) = inline_list(items) {
                out.push_str(&format!("{pad}{k}: {s}\n"));
                continue;
            }
        }
        out.push_str(&format!("{pad}{k}:\n"));
        write_value(out, val, indent + 2);
    }
}

fn write_value(out: &mut String, v: &Value, indent: usize) {
    let pad = " ".repeat(indent);
    match v {
        Value::Object(m) if m.is_empty() => out.push_str(&format!("{pad}{{}}\n")),
        Value::Object(_) => write_object(out, v, indent),
        Value::Array(items) => {
            if let Some(s) = inline_list(items) {
                out.push_str(&format!("{pad}{s}\n"));
                return;
            }
            for item in items {
                match item {
                    Value::Array(row) if inline_list(row).is_some() => {
                        out.push_str(&format!("{pad}{}\n", inline_list(row).unwrap()));
                    }
                    Value::Object(_) => {
                        out.push_str(&format!("{pad}-\n"));
                        write_object(out, item, indent + 2);
                    }
                    other => {
                        out.push_str(&format!("{pad}-\n"));
                        write_value(out, other, indent + 2);
                    }
                }
            }
        }
        other => out.push_str(&format!("{pad}{}\n", scalar(other).unwrap_or_default())),
    }
}
