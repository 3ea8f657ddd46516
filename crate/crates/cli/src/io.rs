//! Text formats: matrix CSV, atom lists, complex-number rendering.
//!
//! Floats go through `Display`, which prints the shortest string that
//! round-trips, so identical inputs produce byte-identical outputs.

use std::fs;
use std::io::Write as _;
use std::path::Path;

use anyhow::{bail, Context, Result};
use gauge_spectral::matrix::Matrix;
use num_complex::Complex;

/// Complex entry in CSV cells: plain real part when the imaginary part
/// is zero, otherwise `re+imi` / `re-imi`.
pub fn fmt_complex(z: Complex<f64>) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else if z.im < 0.0 {
        format!("{}-{}i", z.re, -z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}

pub fn matrix_to_csv(m: &Matrix<Complex<f64>>) -> String {
    let mut out = String::new();
    for i in 0..m.rows() {
        let row: Vec<String> = (0..m.cols()).map(|j| fmt_complex(m[(i, j)])).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Square real matrix from CSV rows. Blank lines and `#` comments are
/// skipped; every remaining row must have the same number of entries.
pub fn parse_matrix_csv(text: &str) -> Result<Matrix<f64>> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row: Vec<f64> = line
            .split(',')
            .map(|cell| {
                cell.trim()
                    .parse::<f64>()
                    .with_context(|| format!("matrix row {}: bad entry {cell:?}", lineno + 1))
            })
            .collect::<Result<_>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        bail!("matrix CSV holds no rows");
    }
    let n = rows[0].len();
    if rows.iter().any(|r| r.len() != n) || rows.len() != n {
        bail!("matrix CSV must be square, got {} rows of width {n}", rows.len());
    }
    Ok(Matrix::from_rows(rows)?)
}

/// `lambda,weight` rows for an atomic spectral model. An optional header
/// line is tolerated, as are blank lines and `#` comments.
pub fn parse_atoms_csv(text: &str) -> Result<Vec<(f64, f64)>> {
    let mut atoms = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if atoms.is_empty() && is_atoms_header(line) {
            continue;
        }
        let mut cells = line.split(',');
        let parse = |cell: Option<&str>| -> Result<f64> {
            let cell = cell.with_context(|| format!("atom row {}: missing field", lineno + 1))?;
            cell.trim()
                .parse::<f64>()
                .with_context(|| format!("atom row {}: bad entry {cell:?}", lineno + 1))
        };
        let lambda = parse(cells.next())?;
        let weight = parse(cells.next())?;
        if cells.next().is_some() {
            bail!("atom row {}: expected exactly lambda,weight", lineno + 1);
        }
        atoms.push((lambda, weight));
    }
    if atoms.is_empty() {
        bail!("atom CSV holds no rows");
    }
    Ok(atoms)
}

fn is_atoms_header(line: &str) -> bool {
    let lower = line.to_ascii_lowercase();
    lower.starts_with("lambda") || lower.starts_with("\"lambda")
}

/// Writes to the file when a path is given, to stdout otherwise.
pub fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text)
            .with_context(|| format!("writing {}", path.display()))?,
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(text.as_bytes())?;
            lock.flush()?;
        }
    }
    Ok(())
}
