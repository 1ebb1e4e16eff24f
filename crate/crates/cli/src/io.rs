//! CSV and JSON files: 17 significant digits, header row, JSON sidecar
//! sharing the basename of each CSV.

use std::fs;
use std::path::{Path, PathBuf};

use optsqueeze_core::estimators::{Frame, ShiftDistribution};
use optsqueeze_core::{Complex64, UniformGrid, WavefunctionGrid};
use serde::Serialize;

use crate::error::CliError;

pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn sidecar_path(out: &Path) -> PathBuf {
    out.with_extension("json")
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.display().to_string(), source }
}

fn input_err(path: &Path, msg: impl Into<String>) -> CliError {
    CliError::Input { path: path.display().to_string(), msg: msg.into() }
}

pub fn write_csv(path: &Path, headers: &[&str], columns: &[&[f64]]) -> Result<(), CliError> {
    let n = columns.first().map_or(0, |c| c.len());
    debug_assert!(columns.iter().all(|c| c.len() == n));
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)
        .map_err(|e| csv_err(path, e))?;
    w.write_record(headers).map_err(|e| csv_err(path, e))?;
    for i in 0..n {
        w.write_record(columns.iter().map(|c| fmt17(c[i])))
            .map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(io_err(path))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| input_err(path, format!("serialization failed: {e}")))?;
    text.push('\n');
    fs::write(path, text).map_err(io_err(path))
}

fn csv_err(path: &Path, e: csv::Error) -> CliError {
    if e.is_io_error() {
        match e.into_kind() {
            csv::ErrorKind::Io(source) => CliError::Io { path: path.display().to_string(), source },
            _ => unreachable!(),
        }
    } else {
        input_err(path, e.to_string())
    }
}

/// Reads numeric columns under the expected header.
fn read_columns(path: &Path, expected: &[&[&str]]) -> Result<(Vec<String>, Vec<Vec<f64>>), CliError> {
    let mut r = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_err(path, e))?;
    let headers: Vec<String> = r
        .headers()
        .map_err(|e| csv_err(path, e))?
        .iter()
        .map(str::to_owned)
        .collect();
    if !expected.iter().any(|h| h.iter().copied().eq(headers.iter().map(String::as_str))) {
        return Err(input_err(path, format!("unexpected columns {headers:?}")));
    }
    let mut cols = vec![Vec::new(); headers.len()];
    for (line, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| csv_err(path, e))?;
        for (c, field) in cols.iter_mut().zip(rec.iter()) {
            let v: f64 = field
                .parse()
                .map_err(|_| input_err(path, format!("row {}: bad number {field:?}", line + 1)))?;
            c.push(v);
        }
    }
    Ok((headers, cols))
}

/// Checks that `xs` is uniformly spaced and returns the grid.
fn uniform_grid(path: &Path, xs: &[f64]) -> Result<UniformGrid, CliError> {
    if xs.len() < 2 {
        return Err(input_err(path, "need at least two rows"));
    }
    let grid = UniformGrid::new(xs[0], xs[xs.len() - 1], xs.len())
        .map_err(|e| input_err(path, e.to_string()))?;
    let tol = 1e-9 * grid.step().max(f64::MIN_POSITIVE) + 1e-12 * grid.max.abs().max(grid.min.abs());
    for (i, &x) in xs.iter().enumerate() {
        if (x - grid.point(i)).abs() > tol {
            return Err(input_err(path, format!("grid is not uniform at row {}", i + 1)));
        }
    }
    Ok(grid)
}

pub fn read_wavefunction(path: &Path) -> Result<WavefunctionGrid, CliError> {
    let (_, cols) = read_columns(path, &[&["x", "re_psi", "im_psi"]])?;
    let grid = uniform_grid(path, &cols[0])?;
    let values = cols[1].iter().zip(&cols[2]).map(|(&re, &im)| Complex64::new(re, im)).collect();
    WavefunctionGrid::new(grid, values).map_err(|e| input_err(path, e.to_string()))
}

/// A distribution CSV and the frame recorded in its sidecar.
pub fn read_distribution(path: &Path) -> Result<ShiftDistribution, CliError> {
    let (_, cols) = read_columns(path, &[&["t", "p"], &["r_hat", "p"]])?;
    let grid = uniform_grid(path, &cols[0])?;
    let side = sidecar_path(path);
    let text = fs::read_to_string(&side).map_err(io_err(&side))?;
    let meta: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| input_err(&side, e.to_string()))?;
    let frame: Frame = serde_json::from_value(meta["frame"].clone())
        .map_err(|e| input_err(&side, format!("frame: {e}")))?;
    ShiftDistribution::new(grid, cols[1].clone(), frame).map_err(|e| input_err(path, e.to_string()))
}
