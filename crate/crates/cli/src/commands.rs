//! The analyze, scan, bound and presets commands.

use std::path::{Path, PathBuf};

use qcompat::algebra::{make_preset, GeneratorSet, Preset};
use qcompat::bound::{
    default_strata, full_state_check, preset_dimensions, sharp_x_bound, stratum_scan, InvariantOrder, StratumSpec, XMatrix,
};
use qcompat::estimation::{cfim_from_derivatives, check_invertibility_equivalence, fisher_bundle, state_and_derivatives};
use qcompat::{Error, Tolerances};

use crate::error::{exit, CliError};
use crate::report::{
    csv, rows, to_json, write_atomic, AlgebraSummary, BoundSection, CsvRow, PointAnalysis, PointReport, Report, SampleCheck,
    XSummary, TOOL, VERSION,
};
use crate::schema::{check_region, load_path, Loaded};

pub const SEED_ENV: &str = "QCOMPAT_SEED";

/// Options shared by the model commands.
#[derive(Clone, Debug, Default)]
pub struct Common {
    pub json: Option<PathBuf>,
    pub csv: Option<PathBuf>,
    /// `name=value`, or a bare number applied to every tolerance.
    pub tol: Vec<String>,
}

/// Outcome of a command: the report plus the exit code it implies.
#[derive(Debug)]
pub struct Outcome {
    pub report: Report,
    pub csv: Option<String>,
    pub summary: String,
    pub code: i32,
}

pub fn apply_tol_overrides(base: Tolerances, overrides: &[String]) -> Result<Tolerances, CliError> {
    let mut tol = base;
    for o in overrides {
        let (name, value) = match o.split_once('=') {
            Some((n, v)) => (n.trim(), v.trim()),
            None => ("all", o.trim()),
        };
        let v: f64 = value.parse().map_err(|_| CliError::invalid(format!("--tol {o}: `{value}` is not a number")))?;
        if !(v.is_finite() && v > 0.0) {
            return Err(CliError::invalid(format!("--tol {o}: tolerance must be positive")));
        }
        if !tol.set(name, v) {
            return Err(CliError::invalid(format!(
                "--tol {o}: unknown tolerance `{name}` (algebra, null, rank, compat, psd, invertibility, vanishing, all)"
            )));
        }
    }
    Ok(tol)
}

pub fn parse_list(text: &str, what: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| CliError::invalid(format!("{what}: `{t}` is not a number"))))
        .collect()
}

pub fn parse_region(text: &str) -> Result<Vec<[f64; 2]>, CliError> {
    text.split(',')
        .map(|iv| {
            let (lo, hi) = iv.split_once(':').ok_or_else(|| CliError::invalid(format!("--region: `{iv}` is not lo:hi")))?;
            let p = |t: &str| t.trim().parse::<f64>().map_err(|_| CliError::invalid(format!("--region: `{t}` is not a number")));
            Ok([p(lo)?, p(hi)?])
        })
        .collect()
}

/// `--seed`, then the environment, then the model file, then 0.
pub fn resolve_seed(flag: Option<u64>, env: Option<&str>, file: Option<u64>) -> Result<u64, CliError> {
    if let Some(s) = flag {
        return Ok(s);
    }
    if let Some(text) = env {
        return text.trim().parse().map_err(|_| CliError::invalid(format!("{SEED_ENV}=`{text}` is not an unsigned integer")));
    }
    Ok(file.unwrap_or(0))
}

fn prepare(path: &Path, common: &Common) -> Result<Loaded, CliError> {
    let mut loaded = load_path(path)?;
    loaded.model.tolerances = apply_tol_overrides(loaded.model.tolerances, &common.tol)?;
    Ok(loaded)
}

fn algebra_summary(gs: &GeneratorSet, loaded: &Loaded) -> AlgebraSummary {
    AlgebraSummary {
        name: gs.name().map(String::from),
        dim_hilbert: gs.dim_hilbert(),
        g: gs.g(),
        closure: loaded.closure.clone(),
        max_structure_constant: gs.f().max_abs(),
    }
}

fn base_report(command: &str, loaded: &Loaded) -> Report {
    let gs = loaded.model.generator_set();
    Report {
        tool: TOOL.into(),
        version: VERSION.into(),
        command: command.into(),
        input_digest: loaded.digest.clone(),
        convention: loaded.model.convention(),
        tolerances: loaded.model.tolerances,
        seed: None,
        algebra: algebra_summary(gs, loaded),
        points: None,
        scan: None,
        bound: None,
    }
}

fn x_summary(loaded: &Loaded, order: &InvariantOrder, beta: &[f64]) -> Result<XSummary, Error> {
    let tol = &loaded.model.tolerances;
    let x = XMatrix::new(loaded.model.generator_set().f(), beta, tol.rank)?;
    Ok(XSummary {
        rank: x.rank(),
        singular_values: x.singular_values().to_vec(),
        odd_rank_corrected: x.odd_rank_corrected(),
        sharp_l: x.sharp_l(),
        stratum: order.classify(x.entries(), tol.vanishing),
    })
}

fn analyze_point(loaded: &Loaded, order: &InvariantOrder, x: &[f64]) -> Result<PointAnalysis, Error> {
    let model = &loaded.model;
    let tol = &model.tolerances;
    let bundle = fisher_bundle(model, x, tol)?;
    let (rho, drhos) = state_and_derivatives(model, x)?;
    let invertibility = check_invertibility_equivalence(&rho, &bundle.slds, tol.invertibility)?;
    let cfim = match &loaded.povm {
        Some(p) => Some(rows(&cfim_from_derivatives(&rho, &drhos, p)?)),
        None => None,
    };
    Ok(PointAnalysis {
        x_matrix: x_summary(loaded, order, &bundle.beta)?,
        beta: bundle.beta,
        validity: bundle.validity,
        sld_residuals: bundle.slds.iter().map(|s| s.residual).collect(),
        slds: bundle.slds.into_iter().map(|s| s.l).collect(),
        sld_coefficients: bundle.coefficients,
        qfim: rows(&bundle.qfim),
        commutation: rows(&bundle.commutation),
        max_commutation: bundle.max_commutation,
        compatible: bundle.compatible,
        invertibility,
        cfim,
    })
}

/// Points from `--at`, then `--points`, then the model file.
pub fn resolve_points(loaded: &Loaded, at: Option<&str>, points_file: Option<&Path>) -> Result<Vec<Vec<f64>>, CliError> {
    let points = if let Some(text) = at {
        vec![parse_list(text, "--at")?]
    } else if let Some(p) = points_file {
        let text = std::fs::read_to_string(p).map_err(|e| CliError::invalid(format!("{}: {e}", p.display())))?;
        serde_json::from_str::<Vec<Vec<f64>>>(&text)
            .map_err(|e| CliError::invalid(format!("{}: expected a JSON array of points: {e}", p.display())))?
    } else if let Some(p) = &loaded.file.points {
        p.clone()
    } else {
        return Err(CliError::invalid("no evaluation points: pass --at or --points, or add \"points\" to the model"));
    };
    let m = loaded.model.m();
    if points.is_empty() {
        return Err(CliError::invalid("the point list is empty"));
    }
    for (k, p) in points.iter().enumerate() {
        if p.len() != m || p.iter().any(|v| !v.is_finite()) {
            return Err(CliError::invalid(format!("point {k}: need {m} finite coordinates, got {p:?}")));
        }
    }
    Ok(points)
}

pub fn analyze(loaded: &Loaded, points: &[Vec<f64>]) -> Outcome {
    let order = InvariantOrder::detect(loaded.model.generator_set().f(), loaded.model.tolerances.vanishing);
    let mut code = exit::OK;
    let mut reports = Vec::with_capacity(points.len());
    let mut summary = String::new();
    for (index, x) in points.iter().enumerate() {
        let (error, analysis) = match analyze_point(loaded, &order, x) {
            Ok(a) => {
                summary.push_str(&format!(
                    "point {index} {x:?}: rank {} sharpL {} stratum B{} compatible {} physical {}{}\n",
                    a.x_matrix.rank,
                    a.x_matrix.sharp_l,
                    a.x_matrix.stratum.index,
                    a.compatible,
                    a.validity.physical,
                    if a.validity.physical { String::new() } else { format!(" (min eigenvalue {:e})", a.validity.min_eigenvalue) }
                ));
                (None, Some(a))
            }
            Err(e) => {
                code = code.max(crate::error::code_for(&e));
                summary.push_str(&format!("point {index} {x:?}: error: {e}\n"));
                (Some(e.to_string()), None)
            }
        };
        reports.push(PointReport { index, x: x.clone(), error, analysis });
    }
    let g = loaded.model.g();
    let table = csv(
        loaded.model.params(),
        g,
        reports.iter().filter_map(|r| {
            r.analysis.as_ref().map(|a| CsvRow {
                x: &r.x,
                beta: &a.beta,
                rank: a.x_matrix.rank,
                stratum: a.x_matrix.stratum.index,
                sharp_l: a.x_matrix.sharp_l,
            })
        }),
    );
    let mut report = base_report("analyze", loaded);
    report.points = Some(reports);
    Outcome { report, csv: Some(table), summary, code }
}

pub fn scan(loaded: &Loaded, region: Option<Vec<[f64; 2]>>, n: usize, seed: u64) -> Result<Outcome, CliError> {
    let region = match region.or_else(|| loaded.file.region.clone()) {
        Some(r) => r,
        None => return Err(CliError::invalid("no region: pass --region lo:hi,... or add \"region\" to the model")),
    };
    check_region(&region, loaded.model.m())?;
    if n == 0 {
        return Err(CliError::invalid("--n must be at least 1"));
    }
    let tol = &loaded.model.tolerances;
    let bounds: Vec<(f64, f64)> = region.iter().map(|[lo, hi]| (*lo, *hi)).collect();
    let scan = stratum_scan(&loaded.model, &bounds, n, seed, tol.rank, tol.vanishing).map_err(|e| match e {
        Error::InvalidInput(msg) if msg.starts_with("at x") => CliError::domain(msg),
        e => e.into(),
    })?;
    let table = csv(
        loaded.model.params(),
        loaded.model.g(),
        scan.samples.iter().map(|s| CsvRow { x: &s.x, beta: &s.beta, rank: s.rank, stratum: s.stratum, sharp_l: s.sharp_l }),
    );
    let mut summary = format!("{n} samples, seed {seed}\n");
    for (r, c) in &scan.rank_histogram {
        summary.push_str(&format!("  rank {r}: {c}\n"));
    }
    for (s, c) in &scan.stratum_histogram {
        summary.push_str(&format!("  stratum B{s}: {c}\n"));
    }
    if scan.mixed_ranks {
        summary.push_str("warning: the scanned region meets more than one rank; split it before applying the bound\n");
    }
    let mut report = base_report("scan", loaded);
    report.seed = Some(seed);
    report.scan = Some(scan);
    Ok(Outcome { report, csv: Some(table), summary, code: exit::OK })
}

/// Preset strata overlaid with the model's declarations.
pub fn resolve_strata(loaded: &Loaded, order: &InvariantOrder) -> Result<(Vec<StratumSpec>, Vec<SampleCheck>), CliError> {
    let gs = loaded.model.generator_set();
    let tol = &loaded.model.tolerances;
    let mut strata = default_strata(gs, order);
    let mut checks = Vec::new();
    for decl in loaded.file.declared_strata(loaded.model.convention().scale()) {
        let n = strata.len();
        let slot = strata.get_mut(decl.index).ok_or_else(|| {
            CliError::invalid(format!("strata: index {} out of range; this algebra has {n} strata (B0..B{})", decl.index, n - 1))
        })?;
        if let (Some(declared), Some(computed)) = (decl.expected_rank, slot.expected_rank) {
            if declared != computed {
                return Err(CliError::invalid(format!(
                    "strata: B{} declared with rank {declared}, but the characteristic polynomial gives {computed}",
                    decl.index
                )));
            }
        }
        if decl.dimension.is_some() {
            slot.dimension = decl.dimension;
        }
        for beta in &decl.sample_points {
            let x = XMatrix::new(gs.f(), beta, tol.rank)?;
            let classified = order.classify(x.entries(), tol.vanishing).index;
            if classified != decl.index {
                return Err(CliError::invalid(format!(
                    "strata: sample {beta:?} declared in B{} lies in B{classified}",
                    decl.index
                )));
            }
            checks.push(SampleCheck { stratum: decl.index, beta: beta.clone(), classified, rank: x.rank() });
        }
        slot.sample_points = decl.sample_points;
    }
    Ok((strata, checks))
}

pub fn bound(loaded: &Loaded) -> Result<Outcome, CliError> {
    let gs = loaded.model.generator_set();
    let tol = &loaded.model.tolerances;
    let order = InvariantOrder::detect(gs.f(), tol.vanishing);
    let (strata, sample_checks) = resolve_strata(loaded, &order)?;
    let full_state = full_state_check(gs, tol.algebra);
    let report = sharp_x_bound(gs.g(), &strata, full_state.commutative)?;
    let mut summary = String::from("stratum  rank  sharpL  dim  bound\n");
    for s in &report.strata {
        summary.push_str(&format!("B{:<7} {:>4}  {:>6}  {:>3}  {:>5}\n", s.index, s.rank, s.sharp_l, s.sharp_derivatives, s.bound));
    }
    summary.push_str(&format!("overall bound on compatible independent parameters: {}\n", report.overall));
    summary.push_str(&format!("full-state estimation saturable: {} ({})\n", full_state.saturable_full_state, full_state.explanation));
    let mut out = base_report("bound", loaded);
    out.bound = Some(BoundSection { invariant_order: order.ks, report, sample_checks, full_state });
    Ok(Outcome { report: out, csv: None, summary, code: exit::OK })
}

/// Writes requested files and returns the outcome's exit code.
pub fn emit(outcome: &Outcome, common: &Common) -> Result<i32, CliError> {
    if let Some(p) = &common.json {
        write_atomic(p, &to_json(&outcome.report))?;
    }
    if let Some(p) = &common.csv {
        match &outcome.csv {
            Some(t) => write_atomic(p, t)?,
            None => return Err(CliError::invalid("--csv is not available for this command")),
        }
    }
    Ok(outcome.code)
}

pub fn run_analyze(model: &Path, at: Option<&str>, points: Option<&Path>, common: &Common) -> Result<Outcome, CliError> {
    let loaded = prepare(model, common)?;
    let pts = resolve_points(&loaded, at, points)?;
    Ok(analyze(&loaded, &pts))
}

pub fn run_scan(model: &Path, region: Option<&str>, n: usize, seed: Option<u64>, common: &Common) -> Result<Outcome, CliError> {
    let loaded = prepare(model, common)?;
    let region = region.map(parse_region).transpose()?;
    let env = std::env::var(SEED_ENV).ok();
    let seed = resolve_seed(seed, env.as_deref(), loaded.file.seed)?;
    scan(&loaded, region, n, seed)
}

pub fn run_bound(model: &Path, common: &Common) -> Result<Outcome, CliError> {
    bound(&prepare(model, common)?)
}

/// One line per built-in algebra.
pub fn presets() -> String {
    let mut out = String::new();
    for p in Preset::ALL {
        let n = p.fixed_dim().unwrap_or(3);
        let gs = make_preset(p.name(), n).expect("preset builds");
        let dims = preset_dimensions(p.name(), n).map_or("declare in model".to_string(), |d| format!("{d:?}"));
        let size = match p.fixed_dim() {
            Some(n) => format!("N = {n}"),
            None => "any N >= 2".to_string(),
        };
        out.push_str(&format!(
            "{:<9} {:<11} g = {:<2} (at N = {n})  strata dims: {dims}\n",
            p.name(),
            size,
            gs.g()
        ));
    }
    out
}
