//! Report output: one JSON object per line, or aligned text tables carrying
//! the same values.

use dbr_lab_core::scenario::{Format, ScenarioReport};
use serde_json::Value;

pub fn render(reports: &[ScenarioReport], format: Format) -> String {
    match format {
        Format::Json => reports
            .iter()
            .map(|r| serde_json::to_string(r).expect("reports serialize") + "\n")
            .collect(),
        Format::Text => reports.iter().map(text).collect::<Vec<_>>().join("\n"),
    }
}

fn text(r: &ScenarioReport) -> String {
    let mut rows = Vec::new();
    rows.push(("schema".to_string(), r.schema.to_string()));
    rows.push(("version".to_string(), r.version.clone()));
    if let Some(e) = &r.error {
        rows.push(("error".to_string(), e.clone()));
    }
    for (k, v) in &r.tolerances {
        rows.push((format!("tolerance.{k}"), Value::from(*v).to_string()));
    }
    flatten("", &r.metrics, &mut rows);
    if let Some(t) = r.timing_ms {
        rows.push(("timing_ms".to_string(), Value::from(t).to_string()));
    }
    let mut out = format!(
        "[{}] {}{}  {}\n",
        r.index,
        r.kind,
        r.name.as_deref().map(|n| format!(" ({n})")).unwrap_or_default(),
        if r.pass { "PASS" } else { "FAIL" }
    );
    out.push_str(&table(&rows));
    out
}

pub fn table(rows: &[(String, String)]) -> String {
    let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    rows.iter()
        .map(|(k, v)| format!("  {k:<width$}  {v}\n"))
        .collect()
}

fn is_scalar(v: &Value) -> bool {
    !matches!(v, Value::Array(_) | Value::Object(_))
}

/// Objects and arrays of composites are expanded into dotted keys; arrays of
/// scalars stay inline.
fn flatten(prefix: &str, v: &Value, rows: &mut Vec<(String, String)>) {
    let key = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match v {
        Value::Object(map) => {
            for (k, v) in map {
                flatten(&key(k), v, rows);
            }
        }
        Value::Array(items) if !items.iter().all(is_scalar) => {
            for (i, v) in items.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), v, rows);
            }
        }
        Value::Null if prefix.is_empty() => {}
        Value::String(s) => rows.push((prefix.to_string(), s.clone())),
        other => rows.push((prefix.to_string(), other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn flattening_keeps_json_number_text() {
        let mut rows = Vec::new();
        flatten(
            "",
            &json!({"a": 1e-7, "b": {"c": [1.0, 2.5]}, "d": [{"e": true}]}),
            &mut rows,
        );
        let got: Vec<(&str, &str)> = rows.iter().map(|(k, v)| (k.as_str(), v.as_str())).collect();
        assert_eq!(
            got,
            vec![("a", "1e-7"), ("b.c", "[1.0,2.5]"), ("d[0].e", "true")]
        );
    }
}
