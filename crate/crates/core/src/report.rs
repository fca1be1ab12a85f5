//! Per-algorithm resource rows and their CSV table.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Exact,
    EstimatedLower,
    EstimatedUpper,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::Exact => "exact",
            Provenance::EstimatedLower => "estimated-lower",
            Provenance::EstimatedUpper => "estimated-upper",
        })
    }
}

/// Resource tuple for one algorithm. `n_1q` is absent when only a
/// two-qubit estimate exists (controlled costs fold single-qubit gates into
/// the CNOT count).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResourceReport {
    pub algorithm: String,
    pub n_q: u64,
    pub n_c: u64,
    pub n_1q: Option<u128>,
    pub n_2q: u128,
    pub provenance_n_c: Provenance,
    pub provenance_n_2q: Provenance,
}

impl ResourceReport {
    /// `n_C:<p>;n_2Q:<p>`.
    pub fn provenance_note(&self) -> String {
        format!("n_C:{};n_2Q:{}", self.provenance_n_c, self.provenance_n_2q)
    }
}

/// Hamiltonian metadata shared by every row of a table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemInfo {
    pub system: String,
    pub n: usize,
    pub n_terms: usize,
    pub n_groups: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub system: String,
    pub n: usize,
    #[serde(rename = "N_terms")]
    pub n_terms: usize,
    #[serde(rename = "N_groups")]
    pub n_groups: usize,
    pub algorithm: String,
    #[serde(rename = "n_Q")]
    pub n_q: u64,
    #[serde(rename = "n_C")]
    pub n_c: u64,
    #[serde(rename = "n_2Q")]
    pub n_2q: u128,
    pub provenance: String,
}

impl TableRow {
    pub fn new(system: &SystemInfo, report: &ResourceReport) -> Self {
        TableRow {
            system: system.system.clone(),
            n: system.n,
            n_terms: system.n_terms,
            n_groups: system.n_groups,
            algorithm: report.algorithm.clone(),
            n_q: report.n_q,
            n_c: report.n_c,
            n_2q: report.n_2q,
            provenance: report.provenance_note(),
        }
    }
}

pub const TABLE_COLUMNS: [&str; 9] = [
    "system", "n", "N_terms", "N_groups", "algorithm", "n_Q", "n_C", "n_2Q", "provenance",
];

pub fn table_to_csv(rows: &[TableRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    if rows.is_empty() {
        w.write_record(TABLE_COLUMNS)?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::invalid(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::invalid(e.to_string()))
}

pub fn write_table(rows: &[TableRow], path: impl AsRef<Path>) -> Result<()> {
    io::write_atomic(path, table_to_csv(rows)?.as_bytes())
}
