//! Run manifests and configuration files.
//!
//! Both use the same keys. Struct fields serialize in declaration order and named maps
//! are `BTreeMap`s, so the JSON text depends only on the values.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{io_error, CliError};
use crate::lists::GridTriple;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Constants {
    pub hbar: f64,
    pub mass: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Evolution {
    pub dt: f64,
    pub steps: usize,
    pub truncation: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputFile {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckRecord {
    pub name: String,
    pub status: CheckStatus,
    /// `None` when the residual was not finite.
    pub residual: Option<f64>,
}

impl From<&phasespace::verify::Check> for CheckRecord {
    fn from(c: &phasespace::verify::Check) -> Self {
        Self {
            name: c.name.clone(),
            status: match c.status() {
                phasespace::verify::Status::Pass => CheckStatus::Pass,
                phasespace::verify::Status::Fail => CheckStatus::Fail,
            },
            residual: c.residual.is_finite().then_some(c.residual),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunManifest {
    pub command: String,
    pub state_spec: Option<String>,
    pub grid: GridTriple,
    pub constants: Constants,
    pub potential: Vec<f64>,
    pub evolution: Option<Evolution>,
    pub tolerances: BTreeMap<String, f64>,
    pub outputs: Vec<OutputFile>,
    pub checks: Vec<CheckRecord>,
}

impl RunManifest {
    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("manifest fields are finite");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }
}

/// Settings read with `--config`. Every key is optional; command-line flags win.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub command: Option<String>,
    pub state_spec: Option<String>,
    pub grid: Option<GridTriple>,
    pub constants: Option<Constants>,
    pub potential: Option<Vec<f64>>,
    pub evolution: Option<Evolution>,
    pub tolerances: Option<BTreeMap<String, f64>>,
    pub outputs: Option<Vec<OutputFile>>,
    pub checks: Option<Vec<CheckRecord>>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(io_error(path))?;
        Self::parse(&text)
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut out = String::with_capacity(64);
    for b in digest {
        out.push_str(&format!("{b:02x}"));
    }
    out
}
