use std::path::Path;

use otdcov::testkit::Space;

use crate::CliError;

/// Rows with |norm - 1| above this are rejected on the sphere.
pub const RENORMALIZE_LIMIT: f64 = 1e-3;
/// Rows with |norm - 1| above this are renormalized with a warning.
pub const SILENT_LIMIT: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub x: Vec<Vec<f64>>,
    pub y: Vec<Vec<f64>>,
    pub warnings: Vec<String>,
}

/// Reads a CSV with header x1..x{dx}, y1..y{dy} (any column order).
pub fn read_dataset(path: &Path, dx: usize, dy: usize, space: Space) -> Result<Dataset, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::user(format!("cannot read {}: {e}", path.display())))?;
    parse_dataset(&text, dx, dy, space)
}

pub fn parse_dataset(text: &str, dx: usize, dy: usize, space: Space) -> Result<Dataset, CliError> {
    if dx == 0 || dy == 0 {
        return Err(CliError::user("--dx and --dy must be positive"));
    }
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header = reader
        .headers()
        .map_err(|e| CliError::user(format!("line 1: {e}")))?
        .clone();
    let expected: Vec<String> = (1..=dx)
        .map(|k| format!("x{k}"))
        .chain((1..=dy).map(|k| format!("y{k}")))
        .collect();
    if header.len() != expected.len() {
        return Err(CliError::user(format!(
            "line 1: expected {} columns ({}), found {}",
            expected.len(),
            expected.join(","),
            header.len()
        )));
    }
    let mut positions = Vec::with_capacity(expected.len());
    for name in &expected {
        let pos = header
            .iter()
            .position(|h| h.eq_ignore_ascii_case(name))
            .ok_or_else(|| CliError::user(format!("line 1: missing column '{name}'")))?;
        positions.push(pos);
    }

    let mut x = Vec::new();
    let mut y = Vec::new();
    let mut warnings = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            CliError::user(format!("line {line}: {e}"))
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        if record.len() != expected.len() {
            return Err(CliError::user(format!(
                "line {line}: expected {} fields, found {}",
                expected.len(),
                record.len()
            )));
        }
        let mut values = Vec::with_capacity(expected.len());
        for (name, &pos) in expected.iter().zip(&positions) {
            let field = &record[pos];
            let v: f64 = field.parse().map_err(|_| {
                CliError::user(format!("line {line}: column {name}: '{field}' is not a number"))
            })?;
            if !v.is_finite() {
                return Err(CliError::user(format!("line {line}: column {name} is not finite")));
            }
            values.push(v);
        }
        let mut xr = values[..dx].to_vec();
        let mut yr = values[dx..].to_vec();
        if space == Space::Sphere {
            for (side, row) in [("x", &mut xr), ("y", &mut yr)] {
                if let Some(w) = renormalize(row, side, line)? {
                    warnings.push(w);
                }
            }
        }
        x.push(xr);
        y.push(yr);
    }
    if x.is_empty() {
        return Err(CliError::user("the dataset has no rows"));
    }
    Ok(Dataset { x, y, warnings })
}

fn renormalize(row: &mut [f64], side: &str, line: u64) -> Result<Option<String>, CliError> {
    if row.len() < 2 {
        return Err(CliError::user(format!(
            "line {line}: sphere data needs at least 2 {side} coordinates"
        )));
    }
    let len = row.iter().map(|v| v * v).sum::<f64>().sqrt();
    let dev = (len - 1.0).abs();
    if dev > RENORMALIZE_LIMIT {
        return Err(CliError::user(format!(
            "line {line}: {side} has norm {len}, not a unit vector"
        )));
    }
    row.iter_mut().for_each(|v| *v /= len);
    Ok((dev > SILENT_LIMIT)
        .then(|| format!("line {line}: {side} had norm {len} and was renormalized")))
}
