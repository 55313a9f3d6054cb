//! Model files: JSON with a fixed set of top-level keys.

use std::path::Path;
use std::sync::Arc;

use qcompat::algebra::{make_preset, orthonormalize, ClosureReport, GeneratorSet};
use qcompat::bound::StratumSpec;
use qcompat::estimation::Povm;
use qcompat::linalg::{CMatrix, HermitianMatrix};
use qcompat::model::parse_expression;
use qcompat::{Convention, Model, Tolerances};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

/// A complex matrix as rows of `[re, im]` pairs.
pub type ComplexRows = Vec<Vec<[f64; 2]>>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub algebra: AlgebraSpec,
    #[serde(default)]
    pub convention: Convention,
    pub params: Vec<String>,
    pub beta: Vec<String>,
    #[serde(default)]
    pub povm: Option<Vec<ComplexRows>>,
    #[serde(default)]
    pub strata: Option<Vec<StratumDecl>>,
    #[serde(default)]
    pub points: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub region: Option<Vec<[f64; 2]>>,
    #[serde(default)]
    pub tolerances: Option<Tolerances>,
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AlgebraSpec {
    Preset(PresetSpec),
    Explicit(ExplicitSpec),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PresetSpec {
    pub preset: String,
    #[serde(default)]
    pub n: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExplicitSpec {
    pub generators: Vec<ComplexRows>,
    #[serde(default)]
    pub name: Option<String>,
    /// Gram–Schmidt the inputs instead of requiring an orthonormal set.
    #[serde(default)]
    pub orthonormalize: bool,
}

/// User-declared facts about stratum `B_index`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StratumDecl {
    pub index: usize,
    #[serde(default)]
    pub dimension: Option<usize>,
    #[serde(default)]
    pub rank: Option<usize>,
    /// Representative β vectors, in the model's convention.
    #[serde(default)]
    pub samples: Vec<Vec<f64>>,
}

/// A validated model file.
#[derive(Clone, Debug)]
pub struct Loaded {
    pub file: ModelFile,
    pub model: Model,
    pub povm: Option<Povm>,
    pub closure: ClosureReport,
    pub digest: String,
}

pub fn complex_matrix(rows: &ComplexRows, what: &str) -> Result<CMatrix, CliError> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(CliError::invalid(format!("{what}: expected a non-empty square matrix")));
    }
    Ok(CMatrix::from_fn(n, n, |i, j| num_complex::Complex64::new(rows[i][j][0], rows[i][j][1])))
}

fn hermitian(rows: &ComplexRows, what: &str) -> Result<HermitianMatrix, CliError> {
    HermitianMatrix::new(complex_matrix(rows, what)?).map_err(|e| CliError::invalid(format!("{what}: {e}")))
}

pub fn generator_set(spec: &AlgebraSpec, tol: f64) -> Result<GeneratorSet, CliError> {
    match spec {
        AlgebraSpec::Preset(p) => {
            let n = match (p.preset.as_str(), p.n) {
                ("pauli", None) => 2,
                ("xstate2q", None) => 4,
                (_, Some(n)) => n,
                (name, None) => return Err(CliError::invalid(format!("algebra: preset `{name}` needs \"n\""))),
            };
            make_preset(&p.preset, n).map_err(|e| CliError::from(e).context("algebra"))
        }
        AlgebraSpec::Explicit(x) => {
            let gens = x
                .generators
                .iter()
                .enumerate()
                .map(|(k, g)| hermitian(g, &format!("algebra.generators[{k}]")))
                .collect::<Result<Vec<_>, _>>()?;
            let gs = if x.orthonormalize {
                orthonormalize(&gens, tol)
            } else {
                GeneratorSet::new(gens, tol)
            }
            .map_err(|e| CliError::from(e).context("algebra"))?;
            Ok(match &x.name {
                Some(name) => gs.with_name(name.clone()),
                None => gs,
            })
        }
    }
}

fn caret_line(text: &str, offset: usize) -> String {
    let col = text[..offset.min(text.len())].chars().count();
    format!("\n    {text}\n    {}^", " ".repeat(col))
}

impl ModelFile {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::invalid(format!("model schema: {e}")))
    }

    /// Cross-checks every section and builds the library objects.
    pub fn load(self, digest: String) -> Result<Loaded, CliError> {
        let tol = self.tolerances.unwrap_or_default();
        let gs = generator_set(&self.algebra, tol.algebra)?;
        let closure = gs.closure_check(tol.algebra);
        if !closure.closed_lie {
            let v = closure.violations.iter().find(|v| v.kind == qcompat::algebra::ProductKind::Lie).expect("not closed");
            return Err(CliError::invalid(format!(
                "algebra: not closed under the Lie product; -i[S_{}, S_{}] leaves the span (residual {:e})",
                v.a + 1,
                v.b + 1,
                v.residual
            )));
        }
        if self.beta.len() != gs.g() {
            return Err(CliError::invalid(format!("beta: {} expressions for {} generators", self.beta.len(), gs.g())));
        }
        let exprs = self
            .beta
            .iter()
            .enumerate()
            .map(|(k, text)| {
                parse_expression(text, &self.params)
                    .map_err(|e| CliError::invalid(format!("beta[{k}]: {e}{}", caret_line(text, e.offset))))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let mut model = Model::new(Arc::new(gs), self.params.clone(), exprs, self.convention)?;
        model.tolerances = tol;
        let m = model.m();
        for (k, p) in self.points.iter().flatten().enumerate() {
            if p.len() != m {
                return Err(CliError::invalid(format!("points[{k}]: {} coordinates for {m} parameters", p.len())));
            }
        }
        if let Some(region) = &self.region {
            check_region(region, m)?;
        }
        let povm = match &self.povm {
            None => None,
            Some(elements) => {
                let elements = elements
                    .iter()
                    .enumerate()
                    .map(|(k, e)| hermitian(e, &format!("povm[{k}]")))
                    .collect::<Result<Vec<_>, _>>()?;
                let povm = Povm::new(elements, tol.psd).map_err(|e| CliError::invalid(format!("povm: {e}")))?;
                if povm.dim() != model.generator_set().dim_hilbert() {
                    return Err(CliError::invalid("povm: dimension differs from the algebra"));
                }
                Some(povm)
            }
        };
        let g = model.g();
        for (k, s) in self.strata.iter().flatten().enumerate() {
            if let Some(bad) = s.samples.iter().find(|b| b.len() != g) {
                return Err(CliError::invalid(format!("strata[{k}]: sample of length {} for g = {g}", bad.len())));
            }
        }
        Ok(Loaded { file: self, model, povm, closure, digest })
    }

    /// Declared strata as library specs; samples converted to internal β.
    pub fn declared_strata(&self, scale: f64) -> Vec<StratumSpec> {
        self.strata
            .iter()
            .flatten()
            .map(|s| StratumSpec {
                index: s.index,
                expected_rank: s.rank,
                dimension: s.dimension,
                sample_points: s.samples.iter().map(|b| b.iter().map(|v| v * scale).collect()).collect(),
            })
            .collect()
    }
}

pub fn check_region(region: &[[f64; 2]], m: usize) -> Result<(), CliError> {
    if region.len() != m {
        return Err(CliError::invalid(format!("region: {} intervals for {m} parameters", region.len())));
    }
    for (k, [lo, hi]) in region.iter().enumerate() {
        if !lo.is_finite() || !hi.is_finite() || lo > hi {
            return Err(CliError::invalid(format!("region[{k}]: need finite lo <= hi, got [{lo}, {hi}]")));
        }
    }
    Ok(())
}

pub fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn load_path(path: &Path) -> Result<Loaded, CliError> {
    let bytes = std::fs::read(path).map_err(|e| CliError::invalid(format!("{}: {e}", path.display())))?;
    let text = std::str::from_utf8(&bytes).map_err(|e| CliError::invalid(format!("{}: not UTF-8: {e}", path.display())))?;
    ModelFile::from_json(text)?.load(digest(&bytes))
}

pub fn load_str(text: &str) -> Result<Loaded, CliError> {
    ModelFile::from_json(text)?.load(digest(text.as_bytes()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::exit;

    const QUBIT: &str = r#"{"algebra": {"preset": "pauli"}, "params": ["t"], "beta": ["sin(t)", "0", "cos(t)"]}"#;

    #[test]
    fn minimal_model_loads() {
        let l = load_str(QUBIT).unwrap();
        assert_eq!(l.model.m(), 1);
        assert_eq!(l.model.convention(), Convention::Internal);
        assert!(l.closure.closed_lie);
        assert_eq!(l.digest.len(), 64);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = QUBIT.replace("\"params\"", "\"parms\": [], \"params\"");
        let e = load_str(&text).unwrap_err();
        assert_eq!(e.code, exit::INVALID_INPUT);
        assert!(e.message.contains("parms"), "{}", e.message);
        let nested = r#"{"algebra": {"preset": "pauli", "size": 2}, "params": ["t"], "beta": ["t", "0", "0"]}"#;
        assert_eq!(load_str(nested).unwrap_err().code, exit::INVALID_INPUT);
    }

    #[test]
    fn parse_errors_point_at_the_offset() {
        let text = QUBIT.replace("cos(t)", "cos(t +* 2)");
        let e = load_str(&text).unwrap_err();
        assert_eq!(e.code, exit::INVALID_INPUT);
        assert!(e.message.starts_with("beta[2]"), "{}", e.message);
        assert!(e.message.contains("at byte 7"), "{}", e.message);
        assert!(e.message.contains("\n           ^"), "{:?}", e.message);
    }

    #[test]
    fn explicit_generators() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let text = format!(
            r#"{{"algebra": {{"generators": [[[[{s},0],[0,0]],[[0,0],[-{s},0]]]], "name": "z"}},
                "params": ["a"], "beta": ["a"], "strata": [{{"index": 0, "dimension": 1}}]}}"#
        );
        let l = load_str(&text).unwrap();
        assert_eq!(l.model.generator_set().name(), Some("z"));
        let raw = r#"{"algebra": {"generators": [[[[2,0],[0,0]],[[0,0],[0,0]]]], "orthonormalize": true}, "params": ["a"], "beta": ["a"]}"#;
        assert_eq!(load_str(raw).unwrap().model.g(), 1);
        let unnormalized = raw.replace(", \"orthonormalize\": true", "");
        assert_eq!(load_str(&unnormalized).unwrap_err().code, exit::INVALID_INPUT);
    }

    #[test]
    fn open_sets_are_rejected() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let text = format!(
            r#"{{"algebra": {{"generators": [[[[0,0],[{s},0]],[[{s},0],[0,0]]], [[[0,0],[0,-{s}]],[[0,{s}],[0,0]]]]}},
                "params": ["a"], "beta": ["a", "0"]}}"#
        );
        let e = load_str(&text).unwrap_err();
        assert!(e.message.contains("S_1, S_2"), "{}", e.message);
    }

    #[test]
    fn cross_references_are_checked() {
        assert!(load_str(&QUBIT.replace(r#""0", "#, "")).is_err());
        let pts = QUBIT.trim_end_matches('}').to_string() + r#", "points": [[0.1, 0.2]]}"#;
        assert_eq!(load_str(&pts).unwrap_err().code, exit::INVALID_INPUT);
        let region = QUBIT.trim_end_matches('}').to_string() + r#", "region": [[1, 0]]}"#;
        assert_eq!(load_str(&region).unwrap_err().code, exit::INVALID_INPUT);
        let povm = QUBIT.trim_end_matches('}').to_string() + r#", "povm": [[[[1,0],[0,0]],[[0,0],[0,0]]]]}"#;
        assert!(load_str(&povm).unwrap_err().message.starts_with("povm"));
    }
}
