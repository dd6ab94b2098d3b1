//! Distribution and marginal CSV files.
//!
//! A distribution file starts with `#` header lines carrying `kind`, `nq`, `np`, `qmin`,
//! `qmax`, `hbar` and `mass`, followed by one `q,p,re,im` row per grid point, q-major
//! with p ascending. Floats are written with 17 significant digits so that reading a
//! file back reproduces every value bit for bit.

use std::fmt::Write as _;

use ndarray::Array2;
use num_complex::Complex64;
use phasespace::{DistributionKind, MarginalVector, PhaseSpaceDistribution, PhysicalConstants, PositionGrid};
use thiserror::Error;

const REQUIRED_KEYS: [&str; 7] = ["kind", "nq", "np", "qmin", "qmax", "hbar", "mass"];
const COLUMNS: &str = "q,p,re,im";

/// Largest `nq · np` accepted by the reader.
pub const MAX_POINTS: usize = 1 << 24;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CsvError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("header: {0}")]
    Header(String),
    #[error("expected {expected} data rows, found {found}")]
    RowCount { expected: usize, found: usize },
    #[error("line {line}: {what} {found} does not match the grid value {expected}")]
    OffGrid {
        line: usize,
        what: &'static str,
        found: f64,
        expected: f64,
    },
}

/// Formats a float with 17 significant digits.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_distribution(dist: &PhaseSpaceDistribution) -> String {
    let g = dist.qgrid();
    let pg = dist.pgrid();
    let c = dist.constants();
    let mut out = String::with_capacity(80 * g.len() * pg.len() + 200);
    let _ = writeln!(out, "# kind={}", dist.kind().as_str());
    let _ = writeln!(out, "# nq={}", g.len());
    let _ = writeln!(out, "# np={}", pg.len());
    let _ = writeln!(out, "# qmin={}", fmt_float(g.q_min()));
    let _ = writeln!(out, "# qmax={}", fmt_float(g.q_max()));
    let _ = writeln!(out, "# hbar={}", fmt_float(c.hbar));
    let _ = writeln!(out, "# mass={}", fmt_float(c.mass));
    let _ = writeln!(out, "# columns={COLUMNS}");
    let values = dist.values();
    for j in 0..g.len() {
        let q = fmt_float(g.point(j));
        for k in 0..pg.len() {
            let z = values[[j, k]];
            let _ = writeln!(
                out,
                "{q},{},{},{}",
                fmt_float(pg.point(k)),
                fmt_float(z.re),
                fmt_float(z.im)
            );
        }
    }
    out
}

pub fn write_marginal(marginal: &MarginalVector) -> String {
    let mut out = String::new();
    let axis = match marginal.axis {
        phasespace::MarginalAxis::Position => "position",
        phasespace::MarginalAxis::Momentum => "momentum",
    };
    let _ = writeln!(out, "# axis={axis}");
    let _ = writeln!(out, "# columns=x,value");
    for (x, v) in marginal.points.iter().zip(&marginal.values) {
        let _ = writeln!(out, "{},{}", fmt_float(*x), fmt_float(*v));
    }
    out
}

fn header_value<'a>(pairs: &'a [(String, String)], key: &str) -> Result<&'a str, CsvError> {
    pairs
        .iter()
        .find(|(k, _)| k == key)
        .map(|(_, v)| v.as_str())
        .ok_or_else(|| CsvError::Header(format!("missing key {key:?}")))
}

fn header_float(pairs: &[(String, String)], key: &str) -> Result<f64, CsvError> {
    let raw = header_value(pairs, key)?;
    let v: f64 = raw
        .parse()
        .map_err(|_| CsvError::Header(format!("{key}: not a number: {raw:?}")))?;
    if !v.is_finite() {
        return Err(CsvError::Header(format!("{key}: not finite")));
    }
    Ok(v)
}

fn header_count(pairs: &[(String, String)], key: &str) -> Result<usize, CsvError> {
    let raw = header_value(pairs, key)?;
    raw.parse()
        .map_err(|_| CsvError::Header(format!("{key}: not a count: {raw:?}")))
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * (1.0 + b.abs())
}

/// Parses a distribution file. Rows must sit on the grid the header describes.
pub fn read_distribution(text: &str) -> Result<PhaseSpaceDistribution, crate::error::CliError> {
    let mut pairs: Vec<(String, String)> = Vec::new();
    let mut rows: Vec<(usize, &str)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if let Some(rest) = line.strip_prefix('#') {
            if !rows.is_empty() {
                return Err(CsvError::Syntax {
                    line: i + 1,
                    message: "header line after data".into(),
                }
                .into());
            }
            let (k, v) = rest.split_once('=').ok_or_else(|| CsvError::Syntax {
                line: i + 1,
                message: "header line without '='".into(),
            })?;
            let key = k.trim().to_string();
            if pairs.iter().any(|(existing, _)| *existing == key) {
                return Err(CsvError::Header(format!("duplicate key {key:?}")).into());
            }
            pairs.push((key, v.trim().to_string()));
        } else if !line.is_empty() {
            rows.push((i + 1, line));
        }
    }
    for (k, _) in &pairs {
        if !REQUIRED_KEYS.contains(&k.as_str()) && k != "columns" {
            return Err(CsvError::Header(format!("unknown key {k:?}")).into());
        }
    }
    if let Ok(cols) = header_value(&pairs, "columns") {
        if cols != COLUMNS {
            return Err(CsvError::Header(format!("columns must be {COLUMNS}")).into());
        }
    }

    let kind_name = header_value(&pairs, "kind")?;
    let kind = DistributionKind::from_name(kind_name)
        .ok_or_else(|| CsvError::Header(format!("unknown kind {kind_name:?}")))?;
    let nq = header_count(&pairs, "nq")?;
    let np = header_count(&pairs, "np")?;
    if nq != np {
        return Err(CsvError::Header(format!("nq = {nq} and np = {np} must agree")).into());
    }
    if nq.checked_mul(np).is_none_or(|t| t > MAX_POINTS) {
        return Err(CsvError::Header(format!("grid of {nq}x{np} points is too large")).into());
    }
    let grid = PositionGrid::new(header_float(&pairs, "qmin")?, header_float(&pairs, "qmax")?, nq)?;
    let constants = PhysicalConstants::new(header_float(&pairs, "hbar")?, header_float(&pairs, "mass")?)?;
    let pgrid = phasespace::MomentumGrid::new(&grid, &constants);

    if rows.len() != nq * np {
        return Err(CsvError::RowCount {
            expected: nq * np,
            found: rows.len(),
        }
        .into());
    }
    let mut values = Array2::<Complex64>::zeros((nq, np));
    for (idx, (line, row)) in rows.iter().enumerate() {
        let (j, k) = (idx / np, idx % np);
        let fields: Vec<&str> = row.split(',').collect();
        if fields.len() != 4 {
            return Err(CsvError::Syntax {
                line: *line,
                message: format!("expected 4 fields, found {}", fields.len()),
            }
            .into());
        }
        let mut nums = [0.0f64; 4];
        for (slot, f) in nums.iter_mut().zip(&fields) {
            *slot = f.trim().parse().map_err(|_| CsvError::Syntax {
                line: *line,
                message: format!("not a number: {:?}", f.trim()),
            })?;
            if !slot.is_finite() {
                return Err(CsvError::Syntax {
                    line: *line,
                    message: "non-finite value".into(),
                }
                .into());
            }
        }
        if !close(nums[0], grid.point(j)) {
            return Err(CsvError::OffGrid {
                line: *line,
                what: "q",
                found: nums[0],
                expected: grid.point(j),
            }
            .into());
        }
        if !close(nums[1], pgrid.point(k)) {
            return Err(CsvError::OffGrid {
                line: *line,
                what: "p",
                found: nums[1],
                expected: pgrid.point(k),
            }
            .into());
        }
        values[[j, k]] = Complex64::new(nums[2], nums[3]);
    }
    Ok(PhaseSpaceDistribution::new(kind, grid, constants, values)?)
}
