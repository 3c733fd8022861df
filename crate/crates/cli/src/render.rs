//! Plain-text rendering of JSON reports: scalar fields as `key: value`
//! lines, arrays of objects and maps of numbers as aligned tables.

use std::fmt::Write;

use serde_json::{Map, Value};

fn cell(v: &Value) -> String {
    match v {
        Value::Null => "-".into(),
        Value::String(s) => s.clone(),
        Value::Number(n) => match n.as_f64() {
            Some(f) if n.is_f64() && f != 0.0 && f.abs() < 1e-4 => format!("{f:.3e}"),
            Some(f) if n.is_f64() => format!("{f:.6}"),
            _ => n.to_string(),
        },
        Value::Bool(b) => if *b { "yes" } else { "no" }.into(),
        Value::Array(a) => a.iter().map(cell).collect::<Vec<_>>().join(", "),
        Value::Object(o) => o
            .iter()
            .map(|(k, v)| format!("{k}={}", cell(v)))
            .collect::<Vec<_>>()
            .join(" "),
    }
}

fn table(out: &mut String, indent: &str, header: &[String], rows: &[Vec<String>]) {
    let mut width: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for r in rows {
        for (w, c) in width.iter_mut().zip(r) {
            *w = (*w).max(c.chars().count());
        }
    }
    let line = |cells: &[String]| {
        let padded: Vec<String> = cells
            .iter()
            .zip(&width)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect();
        format!("{indent}{}", padded.join("  ").trim_end())
    };
    let _ = writeln!(out, "{}", line(header));
    let rule: Vec<String> = width.iter().map(|w| "-".repeat(*w)).collect();
    let _ = writeln!(out, "{}", line(&rule));
    for r in rows {
        let _ = writeln!(out, "{}", line(r));
    }
}

fn is_flat(v: &Value) -> bool {
    !matches!(v, Value::Object(_))
        && !matches!(v, Value::Array(a) if a.iter().any(|x| x.is_object() || x.is_array()))
}

fn object_table(out: &mut String, indent: &str, items: &[Value]) {
    let mut cols: Vec<String> = Vec::new();
    for it in items {
        if let Value::Object(o) = it {
            for k in o.keys() {
                if !cols.contains(k) {
                    cols.push(k.clone());
                }
            }
        }
    }
    let rows: Vec<Vec<String>> = items
        .iter()
        .map(|it| {
            cols.iter()
                .map(|c| it.get(c).map_or("-".into(), cell))
                .collect()
        })
        .collect();
    table(out, indent, &cols, &rows);
}

fn section(out: &mut String, indent: &str, key: &str, v: &Value) {
    match v {
        Value::Array(items) if items.is_empty() => {
            let _ = writeln!(out, "{indent}{key}: none");
        }
        Value::Array(items) if items.iter().all(Value::is_object) => {
            let _ = writeln!(out, "{indent}{key}:");
            if items
                .iter()
                .all(|i| i.as_object().is_some_and(|o| o.values().all(is_flat)))
            {
                object_table(out, &format!("{indent}  "), items);
            } else {
                for (n, it) in items.iter().enumerate() {
                    let _ = writeln!(out, "{indent}  [{}]", n + 1);
                    object(
                        out,
                        &format!("{indent}    "),
                        it.as_object().expect("object"),
                    );
                }
            }
        }
        Value::Object(o) if !o.is_empty() && o.values().all(|x| x.is_number() || x.is_string()) => {
            let _ = writeln!(out, "{indent}{key}:");
            let rows: Vec<Vec<String>> = o.iter().map(|(k, x)| vec![k.clone(), cell(x)]).collect();
            table(
                out,
                &format!("{indent}  "),
                &["name".into(), "value".into()],
                &rows,
            );
        }
        Value::Object(o) => {
            let _ = writeln!(out, "{indent}{key}:");
            object(out, &format!("{indent}  "), o);
        }
        _ => {
            let _ = writeln!(out, "{indent}{key}: {}", cell(v));
        }
    }
}

fn object(out: &mut String, indent: &str, o: &Map<String, Value>) {
    for (k, v) in o {
        if k != "format" {
            section(out, indent, k, v);
        }
    }
}

pub fn render(v: &Value) -> String {
    let mut out = String::new();
    match v {
        Value::Object(o) => object(&mut out, "", o),
        other => section(&mut out, "", "result", other),
    }
    out
}
