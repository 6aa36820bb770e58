//! Plain-text file formats.
//!
//! * Histogram: one decimal real per line, `#` comment lines and blank lines ignored.
//! * Matrix (cost or plan): `n` lines of `n` comma-separated reals.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use ndarray::{Array1, Array2, ArrayView2};

use crate::error::{Error, Result};
use crate::types::{CostMatrix, Histogram, TransportPlan};

/// Shortest round-trip decimal rendering, switching to exponent form for
/// very small or very large magnitudes.
pub fn format_real(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-4..1e15).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn parse_real(token: &str, line: usize) -> Result<f64> {
    token.trim().parse::<f64>().map_err(|e| Error::Parse {
        line,
        message: format!("{e}: {:?}", token.trim()),
    })
}

pub fn parse_weights(text: &str) -> Result<Array1<f64>> {
    let mut values = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        values.push(parse_real(line, idx + 1)?);
    }
    Ok(Array1::from(values))
}

pub fn parse_histogram(text: &str) -> Result<Histogram> {
    Histogram::new(parse_weights(text)?)
}

pub fn parse_matrix(text: &str) -> Result<Array2<f64>> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row = line
            .split(',')
            .map(|t| parse_real(t, idx + 1))
            .collect::<Result<Vec<_>>>()?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(Error::Parse {
                    line: idx + 1,
                    message: format!("expected {} columns, found {}", first.len(), row.len()),
                });
            }
        }
        rows.push(row);
    }
    let n = rows.len();
    let m = rows.first().map_or(0, Vec::len);
    let flat: Vec<f64> = rows.into_iter().flatten().collect();
    Array2::from_shape_vec((n, m), flat).map_err(|e| Error::Parse {
        line: 0,
        message: e.to_string(),
    })
}

pub fn render_weights(values: &[f64]) -> String {
    let mut out = String::with_capacity(values.len() * 12);
    for v in values {
        let _ = writeln!(out, "{}", format_real(*v));
    }
    out
}

pub fn render_matrix(m: ArrayView2<'_, f64>) -> String {
    let mut out = String::with_capacity(m.len() * 12);
    for row in m.rows() {
        let line: Vec<String> = row.iter().map(|v| format_real(*v)).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

pub fn read_histogram(path: impl AsRef<Path>) -> Result<Histogram> {
    parse_histogram(&fs::read_to_string(path)?)
}

pub fn read_cost(path: impl AsRef<Path>) -> Result<CostMatrix> {
    CostMatrix::new(parse_matrix(&fs::read_to_string(path)?)?)
}

pub fn read_plan(path: impl AsRef<Path>) -> Result<TransportPlan> {
    TransportPlan::new(parse_matrix(&fs::read_to_string(path)?)?)
}

pub fn write_histogram(path: impl AsRef<Path>, h: &Histogram) -> Result<()> {
    fs::write(path, render_weights(h.as_slice()))?;
    Ok(())
}

pub fn write_matrix(path: impl AsRef<Path>, m: ArrayView2<'_, f64>) -> Result<()> {
    fs::write(path, render_matrix(m))?;
    Ok(())
}
