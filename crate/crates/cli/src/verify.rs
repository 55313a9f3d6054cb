//! Built-in acceptance checks with bundled fixtures.

use std::sync::Arc;
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use qcompat::algebra::{make_preset, GeneratorSet, StructureConstants};
use qcompat::bound::{char_poly_coeffs, full_state_check, max_compatible_set, symplectic_basis, XMatrix, RANK_TOL};
use qcompat::estimation::{
    cfim, cfim_from_derivatives, check_invertibility_equivalence, qfim, sld_coefficients, sld_eigen, sld_integral, IntegralMode,
    Povm, SldResult,
};
use qcompat::linalg::{singular_values, symmetric_eigenvalues, CMatrix, HermitianMatrix, RMatrix};
use qcompat::state::{assemble_derivative, assemble_rho, DensityMatrix};
use qcompat::{Convention, Model};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::commands;
use crate::schema::{load_str, Loaded};

pub const QUBIT_MODEL: &str = include_str!("../models/qubit.json");
pub const XSTATE_MODEL: &str = include_str!("../models/xstate.json");

pub const DEFAULT_SEED: u64 = 20_240_611;

pub type SharpL = fn(usize, usize) -> qcompat::Result<usize>;

#[derive(Clone, Copy, Debug)]
pub struct Config {
    pub seed: u64,
    /// The `♯L` formula under test; replaceable for mutation checks.
    pub sharp_l: SharpL,
}

impl Default for Config {
    fn default() -> Self {
        Config { seed: DEFAULT_SEED, sharp_l: qcompat::bound::sharp_l }
    }
}

#[derive(Clone, Debug)]
pub struct CheckResult {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
    pub limit: Option<Duration>,
}

impl CheckResult {
    pub fn line(&self) -> String {
        let limit = self.limit.map_or(String::new(), |l| format!(" / limit {:.0}s", l.as_secs_f64()));
        format!(
            "[{}] {:>2}. {} ({:.3}s{limit}): {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.elapsed.as_secs_f64(),
            self.detail
        )
    }
}

type Outcome = Result<String, String>;

struct Check {
    id: usize,
    name: &'static str,
    limit: Option<u64>,
    run: fn(&Config) -> Outcome,
}

const CHECKS: [Check; 10] = [
    Check { id: 1, name: "single-qubit bound", limit: Some(1), run: qubit_bound },
    Check { id: 2, name: "X-state bound", limit: Some(5), run: xstate_bound },
    Check { id: 3, name: "characteristic polynomial forms", limit: Some(10), run: char_poly_forms },
    Check { id: 4, name: "compatible-set witness", limit: Some(30), run: witness },
    Check { id: 5, name: "SLD solver agreement", limit: Some(30), run: sld_agreement },
    Check { id: 6, name: "SLD membership in closed algebras", limit: None, run: sld_membership },
    Check { id: 7, name: "QFIM invertibility equivalence", limit: None, run: invertibility },
    Check { id: 8, name: "Cramer-Rao chain", limit: None, run: cramer_rao },
    Check { id: 9, name: "full-state corollary", limit: None, run: corollary },
    Check { id: 10, name: "scan determinism", limit: None, run: determinism },
];

pub fn check_ids() -> Vec<usize> {
    CHECKS.iter().map(|c| c.id).collect()
}

pub fn run_check(id: usize, cfg: &Config) -> Option<CheckResult> {
    let check = CHECKS.iter().find(|c| c.id == id)?;
    let start = Instant::now();
    let outcome = (check.run)(cfg);
    let elapsed = start.elapsed();
    let limit = check.limit.map(Duration::from_secs);
    let in_time = limit.is_none_or(|l| elapsed <= l);
    let (passed, mut detail) = match outcome {
        Ok(d) => (in_time, d),
        Err(d) => (false, d),
    };
    if !in_time {
        detail.push_str(" (over time limit)");
    }
    Some(CheckResult { id, name: check.name, passed, detail, elapsed, limit })
}

pub fn run_all(cfg: &Config) -> Vec<CheckResult> {
    CHECKS.iter().filter_map(|c| run_check(c.id, cfg)).collect()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn bundled(text: &str) -> Result<Loaded, String> {
    load_str(text).map_err(|e| e.message)
}

/// Bound table and a generic analysis point against expected integers.
fn bound_fixture(cfg: &Config, text: &str, ranks: &[usize], dims: &[usize], bounds: &[usize], overall: usize, point_rank: usize) -> Outcome {
    let loaded = bundled(text)?;
    let g = loaded.model.g();
    let out = commands::bound(&loaded).map_err(|e| e.message)?;
    let section = out.report.bound.ok_or("no bound section")?;
    let got_ranks: Vec<usize> = section.report.strata.iter().map(|s| s.rank).collect();
    let got_dims: Vec<usize> = section.report.strata.iter().map(|s| s.sharp_derivatives).collect();
    ensure(got_ranks == ranks, || format!("stratum ranks {got_ranks:?}, expected {ranks:?}"))?;
    ensure(got_dims == dims, || format!("stratum dimensions {got_dims:?}, expected {dims:?}"))?;
    let mut recomputed = Vec::new();
    for (s, &dim) in section.report.strata.iter().zip(dims) {
        let sl = (cfg.sharp_l)(g, s.rank).map_err(|e| e.to_string())?;
        ensure(sl == s.sharp_l, || format!("B{}: sharpL {sl} under test vs {} in report", s.index, s.sharp_l))?;
        recomputed.push(sl.min(dim));
    }
    ensure(recomputed == bounds, || format!("per-stratum bounds {recomputed:?}, expected {bounds:?}"))?;
    let reported: Vec<usize> = section.report.strata.iter().map(|s| s.bound).collect();
    ensure(reported == bounds, || format!("reported bounds {reported:?}, expected {bounds:?}"))?;
    ensure(section.report.overall == overall, || format!("overall {}, expected {overall}", section.report.overall))?;
    let pts = loaded.file.points.clone().ok_or("bundled model has no points")?;
    let analysis = commands::analyze(&loaded, &pts[..1]);
    let p = analysis.report.points.ok_or("no points")?.remove(0).analysis.ok_or("analysis failed")?;
    let sl = (cfg.sharp_l)(g, point_rank).map_err(|e| e.to_string())?;
    ensure(p.x_matrix.rank == point_rank && p.x_matrix.sharp_l == sl, || {
        format!("generic point rank {} sharpL {}, expected {point_rank} and {sl}", p.x_matrix.rank, p.x_matrix.sharp_l)
    })?;
    Ok(format!(
        "ranks {got_ranks:?}, dims {got_dims:?}, bounds {recomputed:?}, overall {overall}; generic point rank {point_rank}, sharpL {sl}"
    ))
}

fn qubit_bound(cfg: &Config) -> Outcome {
    let out = bound_fixture(cfg, QUBIT_MODEL, &[0, 2], &[0, 3], &[0, 2], 2, 2)?;
    ensure((cfg.sharp_l)(3, 2).ok() == Some(2), || "sharpL(B1) != 2".into())?;
    Ok(out)
}

fn xstate_bound(cfg: &Config) -> Outcome {
    bound_fixture(cfg, XSTATE_MODEL, &[0, 2, 4], &[1, 4, 7], &[1, 4, 5], 5, 4)
}

fn gaussian_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

/// `|c − want| ≤ tol · max(|want|, ‖X‖^j)` for coefficient j.
fn coeff_close(c: f64, want: f64, scale: f64, j: usize, tol: f64) -> bool {
    (c - want).abs() <= tol * want.abs().max(scale.powi(j as i32)).max(f64::MIN_POSITIVE)
}

/// Coefficients of `λ^{g−2p} Π (λ² + σ_k²)` from the paired singular values.
fn poly_from_singular_values(g: usize, sv: &[f64], rank: usize) -> Vec<f64> {
    let mut poly = vec![1.0];
    for k in (0..rank).step_by(2) {
        let s2 = sv[k] * sv[k];
        let mut next = vec![0.0; poly.len() + 2];
        for (i, &c) in poly.iter().enumerate() {
            next[i] += c;
            next[i + 2] += c * s2;
        }
        poly = next;
    }
    poly.resize(g + 1, 0.0);
    poly
}

fn char_poly_forms(cfg: &Config) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 3);
    let eps = StructureConstants::levi_civita();
    let xs = make_preset("xstate2q", 4).map_err(|e| e.to_string())?;
    let mut worst_newton = 0.0f64;
    for trial in 0..500 {
        let n: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();
        let x = XMatrix::new(&eps, &n, RANK_TOL).map_err(|e| e.to_string())?;
        let cp = char_poly_coeffs(x.entries());
        let n2: f64 = n.iter().map(|v| v * v).sum();
        let scale = x.entries().norm();
        for (j, want) in [1.0, 0.0, n2, 0.0].into_iter().enumerate() {
            ensure(coeff_close(cp.coeffs[j], want, scale, j, 1e-9), || {
                format!("qubit trial {trial}: coefficient {j} = {:e}, expected {want:e}", cp.coeffs[j])
            })?;
        }
        let b: Vec<f64> = (0..7).map(|_| rng.random_range(-1.0..1.0)).collect();
        let x = XMatrix::new(xs.f(), &b, RANK_TOL).map_err(|e| e.to_string())?;
        let cp = char_poly_coeffs(x.entries());
        let norm2: f64 = b.iter().map(|v| v * v).sum();
        let j5 = 2.0 * (norm2 - b[2] * b[2]);
        let sq = |a: f64| a * a;
        let j3 = (sq(b[0] + b[1]) + sq(b[4] + b[5]) + sq(b[3] - b[6])) * (sq(b[0] - b[1]) + sq(b[4] - b[5]) + sq(b[3] + b[6]));
        let scale = x.entries().norm();
        for (j, want) in [1.0, 0.0, j5, 0.0, j3, 0.0, 0.0, 0.0].into_iter().enumerate() {
            ensure(coeff_close(cp.coeffs[j], want, scale, j, 1e-9), || {
                format!("X-state trial {trial}: coefficient {j} = {:e}, expected {want:e}", cp.coeffs[j])
            })?;
        }
        let newton = poly_from_singular_values(7, x.singular_values(), x.rank());
        for (j, (a, b)) in cp.coeffs.iter().zip(&newton).enumerate() {
            let rel = (a - b).abs() / b.abs().max(scale.powi(j as i32));
            worst_newton = worst_newton.max(rel);
        }
    }
    ensure(worst_newton <= 1e-8, || format!("singular-value reconstruction differs by {worst_newton:e}"))?;
    Ok(format!("500 qubit and 500 X-state samples match; singular-value cross-check within {worst_newton:.1e}"))
}

fn random_orthogonal(rng: &mut ChaCha8Rng, n: usize) -> RMatrix {
    let a = RMatrix::from_fn(n, n, |_, _| rng.sample(StandardNormal));
    a.qr().q()
}

/// Antisymmetric g×g with prescribed even rank, or dense Gaussian.
fn random_antisymmetric(rng: &mut ChaCha8Rng, g: usize, rank: Option<usize>) -> RMatrix {
    match rank {
        Some(r) => {
            let mut b = RMatrix::zeros(g, g);
            for k in (0..r).step_by(2) {
                let s = rng.random_range(0.5..2.0);
                b[(k, k + 1)] = s;
                b[(k + 1, k)] = -s;
            }
            let q = random_orthogonal(rng, g);
            let x = &q * b * q.transpose();
            (&x - x.transpose()) * 0.5
        }
        None => {
            let a = RMatrix::from_fn(g, g, |_, _| rng.sample(StandardNormal));
            &a - a.transpose()
        }
    }
}

fn min_normalized_singular_value(vectors: &[DVector<f64>]) -> f64 {
    if vectors.is_empty() {
        return f64::INFINITY;
    }
    let cols: Vec<DVector<f64>> = vectors.iter().map(|v| v / v.norm().max(f64::MIN_POSITIVE)).collect();
    let m = DMatrix::from_columns(&cols);
    let sv = singular_values(&m);
    if m.ncols() > m.nrows() {
        0.0
    } else {
        sv.last().copied().unwrap_or(0.0)
    }
}

fn max_pairwise(x: &RMatrix, set: &[DVector<f64>]) -> f64 {
    let mut worst = 0.0f64;
    for a in set {
        let xa = x.transpose() * a;
        for b in set {
            worst = worst.max(xa.dot(b).abs());
        }
    }
    worst
}

/// Builds an isotropic candidate set greedily: each new vector is projected
/// onto the orthogonal complement of `{X α_k}`.
fn greedy_probe(rng: &mut ChaCha8Rng, x: &RMatrix, size: usize) -> Vec<DVector<f64>> {
    let g = x.nrows();
    let mut set: Vec<DVector<f64>> = Vec::with_capacity(size);
    let mut constraints: Vec<DVector<f64>> = Vec::new();
    for _ in 0..size {
        let mut v = DVector::from_vec(gaussian_vec(rng, g));
        for _ in 0..2 {
            for c in &constraints {
                let overlap = c.dot(&v);
                v -= c * overlap;
            }
        }
        let xv = x * &v;
        let mut w = xv;
        for c in &constraints {
            let overlap = c.dot(&w);
            w -= c * overlap;
        }
        let wn = w.norm();
        if wn > 1e-12 * (x.norm() * v.norm()).max(1e-300) {
            constraints.push(w / wn);
        }
        set.push(v);
    }
    set
}

fn witness(cfg: &Config) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 4);
    let mut probes_passing = 0;
    let mut worst_pair = 0.0f64;
    let mut worst_indep = f64::INFINITY;
    let mut ranks = [0usize; 9];
    for trial in 0..200 {
        let g = rng.random_range(1..=8);
        let designed = if trial % 2 == 0 { Some(2 * rng.random_range(0..=g / 2)) } else { None };
        let x = random_antisymmetric(&mut rng, g, designed);
        let xm = XMatrix::from_entries(x.clone(), RANK_TOL).map_err(|e| e.to_string())?;
        if let Some(r) = designed {
            ensure(xm.rank() == r, || format!("trial {trial}: rank {} for designed rank {r}", xm.rank()))?;
        }
        ranks[xm.rank()] += 1;
        let bound = (cfg.sharp_l)(g, xm.rank()).map_err(|e| e.to_string())?;
        let basis = symplectic_basis(&xm, 1e-9).map_err(|e| format!("trial {trial}: {e}"))?;
        for w in &basis.kernel {
            ensure((&x * w).norm() <= 1e-9, || format!("trial {trial}: kernel residual {:e}", (&x * w).norm()))?;
        }
        for (i, (ui, vi)) in basis.pairs.iter().enumerate() {
            for (j, (uj, vj)) in basis.pairs.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                let uv = ui.dot(&(&x * vj));
                let uu = ui.dot(&(&x * uj));
                let vv = vi.dot(&(&x * vj));
                ensure((uv - want).abs() <= 1e-8 && uu.abs() <= 1e-8 && vv.abs() <= 1e-8, || {
                    format!("trial {trial}: canonical relations off at ({i}, {j}): {uv:e} {uu:e} {vv:e}")
                })?;
            }
        }
        let set = max_compatible_set(&xm, 1e-9).map_err(|e| e.to_string())?;
        ensure(set.len() == bound, || format!("trial {trial}: g {g} rank {} gives {} vectors, expected {bound}", xm.rank(), set.len()))?;
        let pair = max_pairwise(&x, &set);
        let indep = min_normalized_singular_value(&set);
        worst_pair = worst_pair.max(pair);
        worst_indep = worst_indep.min(indep);
        ensure(pair <= 1e-9, || format!("trial {trial}: pairwise product {pair:e}"))?;
        ensure(indep > 1e-8, || format!("trial {trial}: min singular value {indep:e}"))?;
        let images: Vec<DVector<f64>> = basis.pairs.iter().map(|(u, _)| &x * u).collect();
        let img = min_normalized_singular_value(&images);
        ensure(img > 1e-8, || format!("trial {trial}: images of the paired vectors are dependent ({img:e})"))?;
        let probe = greedy_probe(&mut rng, &x, bound + 1);
        let probe_pair = max_pairwise(&x, &probe);
        ensure(probe_pair <= 1e-9, || format!("trial {trial}: greedy probe is not isotropic ({probe_pair:e})"))?;
        if min_normalized_singular_value(&probe) > 1e-8 {
            probes_passing += 1;
        }
    }
    ensure(probes_passing == 0, || format!("{probes_passing} probes of size bound+1 were independent and isotropic"))?;
    Ok(format!(
        "200 matrices (rank counts {:?}); max pairwise {worst_pair:.1e}, min singular value {worst_indep:.2e}; all 200 isotropic probes of size bound+1 dependent",
        ranks.iter().enumerate().filter(|(_, &c)| c > 0).map(|(r, c)| (r, *c)).collect::<Vec<_>>()
    ))
}

fn complex_gaussian(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
    CMatrix::from_fn(n, n, |_, _| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
}

/// `(1 − s) AA†/tr + s I/N`: full rank with min eigenvalue at least s/N.
fn random_full_rank_state(rng: &mut ChaCha8Rng, n: usize, s: f64) -> DensityMatrix {
    let a = complex_gaussian(rng, n);
    let p = &a * a.adjoint();
    let tr = p.trace().re;
    let m = p.map(|z| z * ((1.0 - s) / tr)) + CMatrix::identity(n, n).map(|z| z * (s / n as f64));
    DensityMatrix::from_matrix(HermitianMatrix::symmetrized(m)).expect("unit trace")
}

fn random_traceless(rng: &mut ChaCha8Rng, n: usize) -> HermitianMatrix {
    let a = complex_gaussian(rng, n);
    let h = (&a + a.adjoint()).map(|z| z * 0.5);
    let shift = h.trace() / n as f64;
    let h = h - CMatrix::identity(n, n).map(|z| z * shift);
    let norm = h.norm();
    HermitianMatrix::symmetrized(h.map(|z| z / norm))
}

fn sld_agreement(cfg: &Config) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 5);
    let mut worst_residual = 0.0f64;
    let mut worst_diff = 0.0f64;
    for trial in 0..500 {
        let n = rng.random_range(2..=4);
        let rho = random_full_rank_state(&mut rng, n, 0.2);
        let d = random_traceless(&mut rng, n);
        let e = sld_eigen(&rho, &d, 1e-12, 1e-12).map_err(|e| format!("trial {trial}: {e}"))?;
        let lmin = rho.min_eigenvalue();
        let t_max = (d.matrix().norm() / (lmin * 1e-10)).ln() / (2.0 * lmin);
        let n_steps = 2 * ((t_max / 0.5).ceil() as usize).max(2);
        let q = sld_integral(&rho, &d, IntegralMode::Quadrature { t_max, n_steps }, 1e-12, 1e-7)
            .map_err(|e| format!("trial {trial}: {e}"))?;
        let diff = (e.l.matrix() - q.l.matrix()).norm();
        worst_residual = worst_residual.max(e.residual);
        worst_diff = worst_diff.max(diff);
        ensure(e.residual <= 1e-10, || format!("trial {trial}: eigen residual {:e}", e.residual))?;
        ensure(diff <= 1e-6, || format!("trial {trial}: solvers differ by {diff:e}"))?;
    }
    Ok(format!("500 states with N in 2..=4: eigen residual <= {worst_residual:.1e}, solver difference <= {worst_diff:.1e}"))
}

fn random_beta(rng: &mut ChaCha8Rng, gs: &GeneratorSet, radius: f64) -> Vec<f64> {
    // ‖Σ β S‖_op ≤ ‖β‖ keeps ρ ≥ (1 − radius)/N
    let v = gaussian_vec(rng, gs.g());
    let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
    let r = radius * rng.random::<f64>();
    v.iter().map(|a| a * r / norm).collect()
}

fn closed_presets() -> Vec<GeneratorSet> {
    [("pauli", 2), ("gellmann", 2), ("gellmann", 3), ("gellmann", 4), ("xstate2q", 4)]
        .into_iter()
        .map(|(name, n)| make_preset(name, n).expect("preset"))
        .collect()
}

fn sld_membership(cfg: &Config) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 6);
    let mut worst = 0.0f64;
    let mut worst_trace = 0.0f64;
    let presets = closed_presets();
    for gs in &presets {
        for trial in 0..200 {
            let beta = random_beta(&mut rng, gs, 0.95);
            let rho = assemble_rho(gs, &beta).map_err(|e| e.to_string())?;
            let dbeta = gaussian_vec(&mut rng, gs.g());
            let d = assemble_derivative(gs, &dbeta).map_err(|e| e.to_string())?;
            let s = sld_eigen(&rho, &d, 1e-12, 1e-10).map_err(|e| e.to_string())?;
            let c = sld_coefficients(gs, &rho, &s.l).map_err(|e| e.to_string())?;
            worst = worst.max(c.residual);
            worst_trace = worst_trace.max(c.trace_identity);
            ensure(c.residual <= 1e-8, || {
                format!("{} trial {trial}: SLD leaves I + span(S) by {:e}", gs.name().unwrap_or("?"), c.residual)
            })?;
        }
    }
    Ok(format!("{} closed presets x 200 points: projection residual <= {worst:.1e}, |tr(rho L)| <= {worst_trace:.1e}", presets.len()))
}

fn slds_for(rho: &DensityMatrix, gs: &GeneratorSet, jac: &[Vec<f64>]) -> Result<Vec<SldResult>, String> {
    jac.iter()
        .map(|col| {
            let d = assemble_derivative(gs, col).map_err(|e| e.to_string())?;
            sld_eigen(rho, &d, 1e-12, 1e-10).map_err(|e| e.to_string())
        })
        .collect()
}

fn invertibility(cfg: &Config) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 7);
    let presets = closed_presets();
    let (mut singular, mut regular) = (0, 0);
    for trial in 0..500 {
        let gs = &presets[trial % presets.len()];
        let g = gs.g();
        let m = rng.random_range(1..=g.min(4));
        let beta = random_beta(&mut rng, gs, 0.9);
        let rho = assemble_rho(gs, &beta).map_err(|e| e.to_string())?;
        let mut jac: Vec<Vec<f64>> = (0..m).map(|_| gaussian_vec(&mut rng, g)).collect();
        match trial % 3 {
            // a parameter that does not move the state
            1 => jac[m - 1] = vec![0.0; g],
            // one direction reached by two parameter combinations
            2 if m >= 2 => {
                let (a, b) = (rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
                jac[m - 1] = jac[0].iter().zip(&jac[m - 2]).map(|(x, y)| a * x + b * y).collect();
            }
            _ => {}
        }
        let slds = slds_for(&rho, gs, &jac)?;
        let r = check_invertibility_equivalence(&rho, &slds, 1e-9).map_err(|e| e.to_string())?;
        ensure(r.both_sides_agree, || {
            format!(
                "trial {trial}: QFIM min eigenvalue {:e} vs derivative rank {}/{m}",
                r.qfim_min_eigenvalue, r.derivative_rank
            )
        })?;
        if r.qfim_invertible {
            regular += 1;
        } else {
            singular += 1;
        }
    }
    ensure(singular > 0 && regular > 0, || format!("degenerate coverage missing: {singular} singular, {regular} regular"))?;
    Ok(format!("500 instances ({singular} degenerate, {regular} regular), 0 disagreements"))
}

fn random_unitary(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
    complex_gaussian(rng, n).qr().q()
}

fn cramer_rao(cfg: &Config) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 8);
    let presets = closed_presets();
    let mut worst = f64::INFINITY;
    for trial in 0..200 {
        let gs = &presets[trial % presets.len()];
        let g = gs.g();
        let m = rng.random_range(1..=g.min(3));
        let beta = random_beta(&mut rng, gs, 0.9);
        let rho = assemble_rho(gs, &beta).map_err(|e| e.to_string())?;
        let jac: Vec<Vec<f64>> = (0..m).map(|_| gaussian_vec(&mut rng, g)).collect();
        let slds = slds_for(&rho, gs, &jac)?;
        let fq = qfim(&rho, &slds).map_err(|e| e.to_string())?;
        let drhos = jac.iter().map(|c| assemble_derivative(gs, c)).collect::<qcompat::Result<Vec<_>>>().map_err(|e| e.to_string())?;
        let povm = Povm::projective(&random_unitary(&mut rng, gs.dim_hilbert())).map_err(|e| e.to_string())?;
        let fc = cfim_from_derivatives(&rho, &drhos, &povm).map_err(|e| e.to_string())?;
        let gap = symmetric_eigenvalues(&(fq - fc)).first().copied().unwrap_or(0.0);
        worst = worst.min(gap);
        ensure(gap >= -1e-8, || format!("trial {trial}: F_Q - F_C has eigenvalue {gap:e}"))?;
    }
    let gs = Arc::new(make_preset("pauli", 2).map_err(|e| e.to_string())?);
    let model = Model::parse(gs, vec!["r".into()], &["0", "0", "r"], Convention::PaperPauli).map_err(|e| e.to_string())?;
    let povm = Povm::projective(&CMatrix::identity(2, 2)).map_err(|e| e.to_string())?;
    let fc = cfim(&model, &povm, &[0.5]).map_err(|e| e.to_string())?[(0, 0)];
    let bundle = qcompat::fisher_bundle(&model, &[0.5], &Default::default()).map_err(|e| e.to_string())?;
    let fq = bundle.qfim[(0, 0)];
    let want = 4.0 / 3.0;
    ensure((fc - want).abs() <= 1e-10 && (fq - want).abs() <= 1e-10, || format!("sigma_z fixture: F_C {fc}, F_Q {fq}, expected 4/3"))?;
    Ok(format!("200 random pairs: min eigenvalue of F_Q - F_C {worst:.1e}; sigma_z fixture F_C = F_Q = {fq:.12}"))
}

fn corollary(_: &Config) -> Outcome {
    let pauli = full_state_check(&make_preset("pauli", 2).map_err(|e| e.to_string())?, 1e-10).saturable_full_state;
    let xs = make_preset("xstate2q", 4).map_err(|e| e.to_string())?;
    let xstate = full_state_check(&xs, 1e-10).saturable_full_state;
    let diag = full_state_check(&xs.subset(&[0, 1, 2]).map_err(|e| e.to_string())?, 1e-10).saturable_full_state;
    ensure(!pauli && !xstate && diag, || format!("pauli {pauli}, xstate2q {xstate}, diagonal {diag}"))?;
    Ok("pauli false, xstate2q false, diagonal subalgebra true".into())
}

fn determinism(cfg: &Config) -> Outcome {
    let loaded = bundled(XSTATE_MODEL)?;
    let run = || commands::scan(&loaded, None, 2000, cfg.seed).map_err(|e| e.message);
    let (a, b) = (run()?, run()?);
    let (ca, cb) = (a.csv.unwrap_or_default(), b.csv.unwrap_or_default());
    ensure(ca == cb, || "CSV differs between runs".into())?;
    ensure(crate::report::to_json(&a.report) == crate::report::to_json(&b.report), || "JSON report differs between runs".into())?;
    let scan = a.report.scan.ok_or("no scan section")?;
    let dominant = scan.stratum_histogram.iter().max_by_key(|(_, c)| **c).map(|(s, _)| *s);
    ensure(dominant == Some(2), || format!("X-state box histogram {:?} not dominated by B2", scan.stratum_histogram))?;
    let qubit = bundled(QUBIT_MODEL)?;
    let q = commands::scan(&qubit, None, 1000, cfg.seed).map_err(|e| e.message)?.report.scan.ok_or("no scan")?;
    ensure(q.rank_histogram.keys().eq([2].iter()), || format!("qubit ranks {:?}", q.rank_histogram))?;
    Ok(format!("2000-sample X-state scan byte-identical across runs ({} bytes); qubit scan all rank 2", ca.len()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn broken_sharp_l(g: usize, rank: usize) -> qcompat::Result<usize> {
        Ok(rank + (g - rank))
    }

    #[test]
    fn mutation_is_caught() {
        let cfg = Config { sharp_l: broken_sharp_l, ..Config::default() };
        assert!(!run_check(1, &cfg).unwrap().passed);
        assert!(!run_check(2, &cfg).unwrap().passed);
    }

    #[test]
    fn summaries_repeat() {
        let cfg = Config::default();
        let a = run_check(9, &cfg).unwrap();
        let b = run_check(9, &cfg).unwrap();
        assert_eq!(a.detail, b.detail);
        assert!(a.passed);
        assert!(run_check(11, &cfg).is_none());
    }

    #[test]
    fn newton_polynomial() {
        assert_eq!(poly_from_singular_values(3, &[2.0, 2.0, 0.0], 2), vec![1.0, 0.0, 4.0, 0.0]);
    }
}
