use std::io::Write;
use std::path::Path;

use hybrep::document::{parse_document, serialize_document, Violation};
use serde::Serialize;
use serde_json::Value;

use super::FileReport;
use crate::util::{atomic_write, read_bytes, Failure};

/// One field whose value the canonical form changed (rounding, weight
/// compression, or normal renormalization). `before`/`after` are null for a
/// key present on only one side.
#[derive(Serialize)]
struct FieldDiff {
    path: String,
    before: Value,
    after: Value,
}

/// Re-serialize a document canonically. The canonical bytes go to `--output`
/// or standard out; a JSON line per changed field goes to standard error, so
/// an already-canonical document produces an empty diff.
pub fn run(input: &Path, output: Option<&Path>) -> Result<i32, Failure> {
    let text = read_bytes(input)?;
    let doc = match parse_document(&text) {
        Ok(doc) => doc,
        Err(e) => {
            let violations = [Violation::from(e)];
            FileReport::new(input, &violations).print();
            return Ok(1);
        }
    };
    let canonical = serialize_document(&doc);

    let before: Value = serde_json::from_slice(&text)
        .map_err(|e| Failure::Domain(format!("{}: {e}", input.display())))?;
    let after: Value = serde_json::from_slice(&canonical).expect("canonical output is JSON");
    let mut diffs = Vec::new();
    diff_values("", &before, &after, &mut diffs);
    for diff in &diffs {
        eprintln!("{}", serde_json::to_string(diff).expect("diff serializes"));
    }

    match output {
        Some(path) => atomic_write(path, &canonical)?,
        None => std::io::stdout()
            .write_all(&canonical)
            .map_err(|e| Failure::Environment(format!("stdout: {e}")))?,
    }
    Ok(0)
}

/// Structural diff in document order. Numbers compare by value, so a change
/// of spelling alone (`0` versus `0.000000`) is not reported; arrays of
/// different lengths and type changes report the whole node.
fn diff_values(path: &str, before: &Value, after: &Value, out: &mut Vec<FieldDiff>) {
    match (before, after) {
        (Value::Object(a), Value::Object(b)) => {
            for (key, value) in a {
                match b.get(key) {
                    Some(other) => diff_values(&format!("{path}/{key}"), value, other, out),
                    None => out.push(FieldDiff {
                        path: format!("{path}/{key}"),
                        before: value.clone(),
                        after: Value::Null,
                    }),
                }
            }
            for (key, value) in b {
                if !a.contains_key(key) {
                    out.push(FieldDiff {
                        path: format!("{path}/{key}"),
                        before: Value::Null,
                        after: value.clone(),
                    });
                }
            }
        }
        (Value::Array(a), Value::Array(b)) if a.len() == b.len() => {
            for (i, (x, y)) in a.iter().zip(b).enumerate() {
                diff_values(&format!("{path}/{i}"), x, y, out);
            }
        }
        (Value::Number(a), Value::Number(b)) if a.as_f64() == b.as_f64() => {}
        _ => {
            if before != after {
                out.push(FieldDiff {
                    path: if path.is_empty() { "/".into() } else { path.into() },
                    before: before.clone(),
                    after: after.clone(),
                });
            }
        }
    }
}
