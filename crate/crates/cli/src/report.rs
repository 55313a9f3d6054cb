//! Report structures and file output.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use qcompat::algebra::ClosureReport;
use qcompat::bound::{BoundReport, FullStateReport, ScanReport, StratumClass};
use qcompat::estimation::{InvertibilityReport, SldCoefficients};
use qcompat::linalg::{HermitianMatrix, RMatrix};
use qcompat::state::StateValidity;
use qcompat::{Convention, Tolerances};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const TOOL: &str = "qcompat";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub input_digest: String,
    pub convention: Convention,
    pub tolerances: Tolerances,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seed: Option<u64>,
    pub algebra: AlgebraSummary,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub points: Option<Vec<PointReport>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub scan: Option<ScanReport>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub bound: Option<BoundSection>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlgebraSummary {
    pub name: Option<String>,
    pub dim_hilbert: usize,
    pub g: usize,
    pub closure: ClosureReport,
    pub max_structure_constant: f64,
}

/// X^β at a point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct XSummary {
    pub rank: usize,
    pub singular_values: Vec<f64>,
    pub odd_rank_corrected: bool,
    pub sharp_l: usize,
    pub stratum: StratumClass,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointReport {
    pub index: usize,
    pub x: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub analysis: Option<PointAnalysis>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointAnalysis {
    /// Internal-convention coefficients.
    pub beta: Vec<f64>,
    pub validity: StateValidity,
    pub x_matrix: XSummary,
    pub slds: Vec<HermitianMatrix>,
    pub sld_residuals: Vec<f64>,
    pub sld_coefficients: Vec<SldCoefficients>,
    pub qfim: Vec<Vec<f64>>,
    pub commutation: Vec<Vec<f64>>,
    pub max_commutation: f64,
    pub compatible: bool,
    pub invertibility: InvertibilityReport,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub cfim: Option<Vec<Vec<f64>>>,
}

/// A declared sample β and the stratum it actually falls in.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleCheck {
    pub stratum: usize,
    pub beta: Vec<f64>,
    pub classified: usize,
    pub rank: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundSection {
    /// Exponents k of the characteristic coefficients J_k that are not
    /// identically zero, in the order defining the strata.
    pub invariant_order: Vec<usize>,
    pub report: BoundReport,
    pub sample_checks: Vec<SampleCheck>,
    pub full_state: FullStateReport,
}

pub fn rows(m: &RMatrix) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

pub fn to_json(report: &Report) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

/// One CSV row per point or sample.
pub struct CsvRow<'a> {
    pub x: &'a [f64],
    pub beta: &'a [f64],
    pub rank: usize,
    pub stratum: usize,
    pub sharp_l: usize,
}

/// `f64` Debug is the shortest string that parses back to the same value,
/// with exponent notation for very large or small magnitudes.
pub fn csv<'a>(params: &[String], g: usize, rows: impl IntoIterator<Item = CsvRow<'a>>) -> String {
    let mut out = String::new();
    let mut header: Vec<String> = params.to_vec();
    header.extend((1..=g).map(|a| format!("beta{a}")));
    header.extend(["rank", "stratum", "sharpL"].map(String::from));
    out.push_str(&header.join(","));
    out.push('\n');
    for r in rows {
        for v in r.x.iter().chain(r.beta) {
            let _ = write!(out, "{v:?},");
        }
        let _ = writeln!(out, "{},{},{}", r.rank, r.stratum, r.sharp_l);
    }
    out
}

/// Writes via a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let fail = |e: std::io::Error| CliError::invalid(format!("{}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(fail)?;
    tmp.write_all(contents.as_bytes()).map_err(fail)?;
    tmp.as_file().sync_all().map_err(fail)?;
    tmp.persist(path).map_err(|e| fail(e.error))?;
    Ok(())
}
