//! Comma-separated numeric lists: grid triples and potential coefficients.

use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// `(q_min, q_max, n)` as written on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridTriple {
    pub q_min: f64,
    pub q_max: f64,
    pub n: usize,
}

impl GridTriple {
    pub fn to_grid(self) -> Result<phasespace::PositionGrid, CliError> {
        Ok(phasespace::PositionGrid::new(self.q_min, self.q_max, self.n)?)
    }
}

fn parse_float(item: &str) -> Result<f64, String> {
    let v: f64 = item
        .trim()
        .parse()
        .map_err(|_| format!("not a number: {:?}", item.trim()))?;
    if !v.is_finite() {
        return Err(format!("not finite: {:?}", item.trim()));
    }
    Ok(v)
}

/// Parses `a,b,n`.
pub fn parse_grid(text: &str) -> Result<GridTriple, String> {
    let items: Vec<&str> = text.split(',').collect();
    if items.len() != 3 {
        return Err(format!("expected q_min,q_max,n but got {} fields", items.len()));
    }
    let n = items[2]
        .trim()
        .parse::<usize>()
        .map_err(|_| format!("not a point count: {:?}", items[2].trim()))?;
    Ok(GridTriple {
        q_min: parse_float(items[0])?,
        q_max: parse_float(items[1])?,
        n,
    })
}

/// Potential coefficients in ascending powers of `q`.
#[derive(Debug, Clone, PartialEq)]
pub struct Coefficients(pub Vec<f64>);

/// Parses `c0,c1,...`.
pub fn parse_coefficients(text: &str) -> Result<Coefficients, String> {
    if text.trim().is_empty() {
        return Err("empty coefficient list".into());
    }
    text.split(',')
        .map(parse_float)
        .collect::<Result<_, _>>()
        .map(Coefficients)
}
