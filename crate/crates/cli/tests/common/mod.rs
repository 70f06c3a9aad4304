#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

pub fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_otdcov"))
}

pub fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

pub fn run_with_threads(args: &[&str], threads: usize) -> Output {
    bin()
        .args(args)
        .env("OTDCOV_THREADS", threads.to_string())
        .output()
        .expect("binary runs")
}

pub fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

pub fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

pub fn write_csv(path: &Path, dx: usize, dy: usize, rows: &[(Vec<f64>, Vec<f64>)]) {
    let mut text: Vec<String> = vec![(1..=dx)
        .map(|k| format!("x{k}"))
        .chain((1..=dy).map(|k| format!("y{k}")))
        .collect::<Vec<_>>()
        .join(",")];
    for (x, y) in rows {
        text.push(x.iter().chain(y).map(|v| format!("{v:?}")).collect::<Vec<_>>().join(","));
    }
    std::fs::write(path, text.join("\n") + "\n").unwrap();
}

/// A report's JSON with the timing field removed.
pub fn without_runtime(json: &str) -> Value {
    let mut v: Value = serde_json::from_str(json).unwrap();
    v.as_object_mut().unwrap().remove("runtime_ms");
    v
}

pub fn schema_path() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("schema/report.schema.json")
}

/// Checks `value` against the JSON-schema keywords used by the report
/// schema: type, enum, required, properties, additionalProperties (false),
/// items, min/maxItems, min/maxLength, minimum, maximum, exclusive bounds,
/// local `$ref`s, and the `^[0-9a-f]{N}$` pattern form. Unknown keywords
/// make the check fail so the schema cannot drift past the checker.
pub fn validate(schema_root: &Value, schema: &Value, value: &Value, path: &str) -> Result<(), String> {
    let obj = schema.as_object().ok_or(format!("{path}: schema is not an object"))?;
    if let Some(r) = obj.get("$ref") {
        let name = r
            .as_str()
            .and_then(|s| s.strip_prefix("#/definitions/"))
            .ok_or(format!("{path}: unsupported $ref {r}"))?;
        return validate(schema_root, &schema_root["definitions"][name], value, path);
    }
    for (key, rule) in obj {
        match key.as_str() {
            "$schema" | "$id" | "title" | "definitions" | "description" => {}
            "type" => {
                let types: Vec<&str> = match rule {
                    Value::String(s) => vec![s.as_str()],
                    Value::Array(a) => a.iter().filter_map(Value::as_str).collect(),
                    _ => return Err(format!("{path}: bad type rule")),
                };
                let ok = types.iter().any(|t| match *t {
                    "object" => value.is_object(),
                    "array" => value.is_array(),
                    "string" => value.is_string(),
                    "boolean" => value.is_boolean(),
                    "null" => value.is_null(),
                    "number" => value.is_number(),
                    "integer" => value.is_u64() || value.is_i64(),
                    _ => false,
                });
                if !ok {
                    return Err(format!("{path}: {value} is not of type {types:?}"));
                }
            }
            "enum" => {
                if !rule.as_array().unwrap().contains(value) {
                    return Err(format!("{path}: {value} not in {rule}"));
                }
            }
            "required" => {
                for k in rule.as_array().unwrap() {
                    if value.get(k.as_str().unwrap()).is_none() {
                        return Err(format!("{path}: missing {k}"));
                    }
                }
            }
            "properties" => {
                if let Some(map) = value.as_object() {
                    for (k, sub) in rule.as_object().unwrap() {
                        if let Some(v) = map.get(k) {
                            validate(schema_root, sub, v, &format!("{path}.{k}"))?;
                        }
                    }
                }
            }
            "additionalProperties" => {
                if rule == &Value::Bool(false) {
                    let props = obj["properties"].as_object().unwrap();
                    for k in value.as_object().map(|m| m.keys()).into_iter().flatten() {
                        if !props.contains_key(k) {
                            return Err(format!("{path}: unexpected property {k}"));
                        }
                    }
                }
            }
            "items" => {
                for (i, v) in value.as_array().into_iter().flatten().enumerate() {
                    validate(schema_root, rule, v, &format!("{path}[{i}]"))?;
                }
            }
            "minItems" | "maxItems" => {
                if let Some(a) = value.as_array() {
                    let bound = rule.as_u64().unwrap() as usize;
                    if (key == "minItems" && a.len() < bound) || (key == "maxItems" && a.len() > bound) {
                        return Err(format!("{path}: {key} {bound} violated"));
                    }
                }
            }
            "minLength" | "maxLength" => {
                if let Some(s) = value.as_str() {
                    let bound = rule.as_u64().unwrap() as usize;
                    let len = s.chars().count();
                    if (key == "minLength" && len < bound) || (key == "maxLength" && len > bound) {
                        return Err(format!("{path}: {key} {bound} violated"));
                    }
                }
            }
            "pattern" => {
                let hex_len = rule
                    .as_str()
                    .and_then(|p| p.strip_prefix("^[0-9a-f]{"))
                    .and_then(|p| p.strip_suffix("}$"))
                    .and_then(|p| p.parse::<usize>().ok())
                    .ok_or(format!("{path}: unsupported pattern {rule}"))?;
                if let Some(s) = value.as_str() {
                    if s.len() != hex_len || !s.chars().all(|c| c.is_ascii_digit() || ('a'..='f').contains(&c)) {
                        return Err(format!("{path}: {s} does not match {rule}"));
                    }
                }
            }
            "minimum" | "maximum" | "exclusiveMinimum" | "exclusiveMaximum" => {
                if let Some(x) = value.as_f64() {
                    let b = rule.as_f64().unwrap();
                    let ok = match key.as_str() {
                        "minimum" => x >= b,
                        "maximum" => x <= b,
                        "exclusiveMinimum" => x > b,
                        _ => x < b,
                    };
                    if !ok {
                        return Err(format!("{path}: {x} violates {key} {b}"));
                    }
                }
            }
            other => return Err(format!("{path}: unsupported schema keyword {other}")),
        }
    }
    Ok(())
}

pub fn validate_report(json: &str) -> Result<(), String> {
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(schema_path()).unwrap()).unwrap();
    let value: Value = serde_json::from_str(json).map_err(|e| e.to_string())?;
    validate(&schema, &schema, &value, "$")
}
