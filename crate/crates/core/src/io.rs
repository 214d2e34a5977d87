//! Field CSV files and JSON summaries.

use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::field::{Field, Grid, State};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// `{:.16e}` keeps 17 significant digits, enough to round-trip any `f64`.
fn full(x: f64) -> String {
    format!("{x:.16e}")
}

/// One row per sample with columns `x, re, im`.
pub fn write_field_csv(path: &Path, f: &Field) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["x", "re", "im"])?;
    for (x, z) in f.grid().points().iter().zip(f.values()) {
        w.write_record([full(*x), full(z.re), full(z.im)])?;
    }
    w.flush()?;
    Ok(())
}

/// Read a field CSV; the grid is recovered from the `x` column and must
/// match `grid` when one is given.
pub fn read_field_csv(path: &Path, grid: Option<&Grid>) -> Result<Field> {
    let mut r = csv::Reader::from_path(path)?;
    let headers = r.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != ["x", "re", "im"] {
        return Err(Error::invalid(format!(
            "{}: expected columns x, re, im",
            path.display()
        )));
    }
    let mut xs = Vec::new();
    let mut values = Vec::new();
    for (i, record) in r.records().enumerate() {
        let record = record?;
        let num = |j: usize| -> Result<f64> {
            record
                .get(j)
                .and_then(|s| s.trim().parse::<f64>().ok())
                .ok_or_else(|| Error::invalid(format!("{}: row {} column {j} is not a number", path.display(), i + 1)))
        };
        xs.push(num(0)?);
        values.push(Complex64::new(num(1)?, num(2)?));
    }
    let n = xs.len();
    let half_length = -xs.first().copied().unwrap_or(0.0);
    let g = match grid {
        Some(g) => g.clone(),
        None => Grid::new(half_length, n)?,
    };
    if g.len() != n {
        return Err(Error::invalid(format!(
            "{}: {n} samples, grid has {}",
            path.display(),
            g.len()
        )));
    }
    let tol = 1e-9 * g.half_length();
    if xs.iter().zip(g.points()).any(|(a, b)| (a - b).abs() > tol) {
        return Err(Error::invalid(format!(
            "{}: x column does not match a grid with L = {} and n = {n}",
            path.display(),
            g.half_length()
        )));
    }
    let field = Field::from_values(&g, values);
    if !field.is_finite() {
        return Err(Error::invalid(format!("{}: non-finite samples", path.display())));
    }
    Ok(field)
}

/// Write `<stem>_u.csv` and `<stem>_v.csv` into `dir`.
pub fn write_state_csv(dir: &Path, stem: &str, s: &State) -> Result<(PathBuf, PathBuf)> {
    let u = dir.join(format!("{stem}_u.csv"));
    let v = dir.join(format!("{stem}_v.csv"));
    write_field_csv(&u, &s.u)?;
    write_field_csv(&v, &s.v)?;
    Ok((u, v))
}

pub fn read_state_csv(u: &Path, v: &Path, grid: Option<&Grid>) -> Result<State> {
    let u = read_field_csv(u, grid)?;
    let v = read_field_csv(v, Some(u.grid()))?;
    Ok(State::new(u, v))
}

/// Numeric table with a header row.
pub fn write_table_csv(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(row.into_iter().map(full))?;
    }
    w.flush()?;
    Ok(())
}

/// Every JSON output carries the artifact version and the resolved config.
#[derive(Serialize)]
pub struct Summary<'a, T: Serialize> {
    pub version: &'static str,
    pub config: &'a RunConfig,
    pub result: T,
}

pub fn summary_json<T: Serialize>(config: &RunConfig, result: T) -> Result<String> {
    let s = Summary {
        version: VERSION,
        config,
        result,
    };
    Ok(serde_json::to_string_pretty(&s)?)
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    fs::write(path, text)?;
    Ok(())
}
