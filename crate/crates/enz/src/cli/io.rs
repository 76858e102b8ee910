//! Small CSV helpers shared by the commands: locale-independent, `.` decimal
//! separator, shortest round-trip float formatting (Rust's `Display`).

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};
use std::path::Path;

/// Parses a flat list of reals from a CSV/whitespace-separated file.
pub fn read_vector(path: &Path) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path)?;
    parse_vector(&text)
}

pub fn parse_vector(text: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for tok in text.split(|c: char| c == ',' || c.is_whitespace()) {
        let tok = tok.trim();
        if tok.is_empty() {
            continue;
        }
        out.push(
            tok.parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad number '{tok}'")))?,
        );
    }
    if out.is_empty() {
        return Err(Error::EmptyInput("no numbers found".into()));
    }
    Ok(out)
}

/// Parses a dense row-major matrix: one CSV row per line.
pub fn read_matrix(path: &Path) -> Result<DMatrix<f64>> {
    let text = std::fs::read_to_string(path)?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row = parse_vector(line)
            .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))?;
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(Error::Parse(format!(
                    "line {}: expected {} columns, got {}",
                    lineno + 1,
                    first.len(),
                    row.len()
                )));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::EmptyInput("no matrix rows found".into()));
    }
    let (m, n) = (rows.len(), rows[0].len());
    Ok(DMatrix::from_fn(m, n, |i, j| rows[i][j]))
}

pub fn write_vector(path: &Path, v: &DVector<f64>) -> Result<()> {
    let mut text = String::new();
    for x in v.iter() {
        text.push_str(&format!("{x}\n"));
    }
    std::fs::write(path, text)?;
    Ok(())
}

pub fn write_series_csv(path: &Path, header: &str, rows: &[Vec<f64>]) -> Result<()> {
    let mut text = String::from(header);
    text.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
        text.push_str(&cells.join(","));
        text.push('\n');
    }
    std::fs::write(path, text)?;
    Ok(())
}
