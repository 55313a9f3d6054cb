//! Symmetric logarithmic derivatives, quantum and classical Fisher
//! information matrices, and the commutation condition.

use serde::{Deserialize, Serialize};

use crate::algebra::GeneratorSet;
use crate::error::{Error, Result};
use crate::linalg::{c, realify, symmetric_eigenvalues, trace_product, CMatrix, HermitianMatrix, RMatrix};
use crate::model::Model;
use crate::state::{assemble_derivative, assemble_rho, validate_state, DensityMatrix, StateValidity};
use crate::tolerances::Tolerances;

/// Outcomes with probability at or below this are candidates for dropping.
pub const PROB_FLOOR: f64 = 1e-14;
/// A dropped outcome must also have a derivative at or below this.
pub const PROB_DERIVATIVE_FLOOR: f64 = 1e-12;

/// An SLD `L` with the residual of `(ρL + Lρ)/2 = ∂ρ`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SldResult {
    pub l: HermitianMatrix,
    pub residual: f64,
}

fn check_dims(rho: &DensityMatrix, drho: &HermitianMatrix) -> Result<()> {
    if drho.dim() != rho.dim() {
        return Err(Error::DimensionMismatch { what: "state derivative", expected: rho.dim(), got: drho.dim() });
    }
    Ok(())
}

/// `(ρL + Lρ)/2`.
pub fn symmetrized_product(rho: &DensityMatrix, l: &HermitianMatrix) -> CMatrix {
    let r = rho.matrix().matrix();
    (r * l.matrix() + l.matrix() * r).map(|z| z * 0.5)
}

fn sld_residual(rho: &DensityMatrix, drho: &HermitianMatrix, l: &HermitianMatrix) -> f64 {
    (symmetrized_product(rho, l) - drho.matrix()).norm()
}

/// Solves the SLD equation entrywise in the eigenbasis of ρ:
/// `L_jk = 2 (∂ρ)_jk / (λ_j + λ_k)`.
///
/// Entries with `|λ_j + λ_k| <= null_tol` are set to zero; if `∂ρ` has weight
/// above `tol` there the derivative is not supported by ρ and an error is
/// returned. Unphysical ρ (negative eigenvalues) still gets the formal
/// solution.
pub fn sld_eigen(rho: &DensityMatrix, drho: &HermitianMatrix, null_tol: f64, tol: f64) -> Result<SldResult> {
    check_dims(rho, drho)?;
    let v = rho.eigenvectors();
    let lam = rho.eigenvalues();
    let d = v.adjoint() * drho.matrix() * v;
    let n = rho.dim();
    let mut l = CMatrix::zeros(n, n);
    for j in 0..n {
        for k in 0..n {
            let s = lam[j] + lam[k];
            if s.abs() > null_tol {
                l[(j, k)] = d[(j, k)] * (2.0 / s);
            } else if d[(j, k)].norm() > tol {
                return Err(Error::UnsupportedDerivative { j, k, weight: d[(j, k)].norm() });
            }
        }
    }
    let l = HermitianMatrix::symmetrized(v * l * v.adjoint());
    let residual = sld_residual(rho, drho, &l);
    Ok(SldResult { l, residual })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum IntegralMode {
    /// Per-entry closed form `∫ e^{-(λ_j+λ_k)t} dt = 1/(λ_j+λ_k)`.
    Analytic,
    /// Composite 5-point Gauss–Legendre on `[0, t_max]` with `n_steps` panels.
    Quadrature { t_max: f64, n_steps: usize },
}

/// `L = 2 ∫_0^∞ e^{-ρt} ∂ρ e^{-ρt} dt` for strictly positive ρ.
///
/// In quadrature mode the exponentials come from a Taylor
/// scaling-and-squaring series, not from the eigendecomposition, and the
/// result is checked against a run with half the panels and against the
/// truncated tail.
pub fn sld_integral(rho: &DensityMatrix, drho: &HermitianMatrix, mode: IntegralMode, null_tol: f64, tol: f64) -> Result<SldResult> {
    check_dims(rho, drho)?;
    let lmin = rho.min_eigenvalue();
    if lmin <= null_tol {
        return Err(Error::SingularState(lmin));
    }
    match mode {
        IntegralMode::Analytic => sld_eigen(rho, drho, null_tol, tol),
        IntegralMode::Quadrature { t_max, n_steps } => {
            if t_max.is_nan() || t_max <= 0.0 || n_steps < 2 {
                return Err(Error::InvalidInput("quadrature needs t_max > 0 and n_steps >= 2".into()));
            }
            let fine = gauss_legendre_sld(rho.matrix().matrix(), drho.matrix(), t_max, n_steps);
            let coarse = gauss_legendre_sld(rho.matrix().matrix(), drho.matrix(), t_max, n_steps / 2);
            let change = (&fine - &coarse).iter().fold(0.0f64, |m, z| m.max(z.norm()));
            let tail = drho.matrix().norm() * (-2.0 * lmin * t_max).exp() / lmin;
            if change > tol || tail > tol {
                return Err(Error::QuadratureNotConverged(change.max(tail)));
            }
            let l = HermitianMatrix::symmetrized(fine);
            let residual = sld_residual(rho, drho, &l);
            Ok(SldResult { l, residual })
        }
    }
}

const GL5_NODES: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683_1,
    0.0,
    0.538_469_310_105_683_1,
    0.906_179_845_938_664,
];
const GL5_WEIGHTS: [f64; 5] = [
    0.236_926_885_056_189_08,
    0.478_628_670_499_366_47,
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_47,
    0.236_926_885_056_189_08,
];

fn gauss_legendre_sld(rho: &CMatrix, drho: &CMatrix, t_max: f64, panels: usize) -> CMatrix {
    let n = rho.nrows();
    let h = t_max / panels as f64;
    let step = expm_neg(rho, h);
    let offsets: Vec<CMatrix> = GL5_NODES.iter().map(|x| expm_neg(rho, 0.5 * h * (x + 1.0))).collect();
    let mut start = CMatrix::identity(n, n);
    let mut acc = CMatrix::zeros(n, n);
    for _ in 0..panels {
        for (off, w) in offsets.iter().zip(GL5_WEIGHTS) {
            let e = &start * off;
            acc += (&e * drho * &e).map(|z| z * w);
        }
        start = &start * &step;
    }
    // 2 * (h/2) * Σ w f
    acc.map(|z| z * h)
}

/// `exp(-t A)` by scaling and squaring a truncated Taylor series.
pub fn expm_neg(a: &CMatrix, t: f64) -> CMatrix {
    let n = a.nrows();
    let norm = a.norm() * t.abs();
    let mut squarings = 0u32;
    let mut scale = 1.0;
    while norm * scale > 0.25 {
        scale *= 0.5;
        squarings += 1;
    }
    let x = a.map(|z| z * (-t * scale));
    let mut term = CMatrix::identity(n, n);
    let mut sum = term.clone();
    for k in 1..=16 {
        term = (&term * &x).map(|z| z / k as f64);
        sum += &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// Coefficients of an SLD in the basis `{I_N} ∪ {S_a}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SldCoefficients {
    pub alpha0: f64,
    pub alpha: Vec<f64>,
    /// ‖L − α₀I − Σ α_a S_a‖_F.
    pub residual: f64,
    /// |tr(Lρ)|, which vanishes for every SLD.
    pub trace_identity: f64,
}

pub fn sld_coefficients(gs: &GeneratorSet, rho: &DensityMatrix, l: &HermitianMatrix) -> Result<SldCoefficients> {
    let n = gs.dim_hilbert();
    if l.dim() != n {
        return Err(Error::DimensionMismatch { what: "SLD dimension", expected: n, got: l.dim() });
    }
    let alpha0 = l.trace() / n as f64;
    let alpha = gs.project(l.matrix());
    let recon = gs.combine(&alpha)? + CMatrix::identity(n, n).map(|z| z * alpha0);
    let residual = (l.matrix() - recon).norm();
    let trace_identity = trace_product(l.matrix(), rho.matrix().matrix()).norm();
    Ok(SldCoefficients { alpha0, alpha, residual, trace_identity })
}

fn check_slds(rho: &DensityMatrix, slds: &[SldResult]) -> Result<()> {
    for s in slds {
        if s.l.dim() != rho.dim() {
            return Err(Error::DimensionMismatch { what: "SLD dimension", expected: rho.dim(), got: s.l.dim() });
        }
    }
    Ok(())
}

/// tr(ρ L_i L_j) for all pairs.
fn rho_products(rho: &DensityMatrix, slds: &[SldResult]) -> Vec<Vec<num_complex::Complex64>> {
    let r = rho.matrix().matrix();
    let rl: Vec<CMatrix> = slds.iter().map(|s| r * s.l.matrix()).collect();
    (0..slds.len())
        .map(|i| (0..slds.len()).map(|j| trace_product(&rl[i], slds[j].l.matrix())).collect())
        .collect()
}

/// `F_ij = ½ tr(ρ{L_i, L_j})`.
pub fn qfim(rho: &DensityMatrix, slds: &[SldResult]) -> Result<RMatrix> {
    check_slds(rho, slds)?;
    let t = rho_products(rho, slds);
    let m = slds.len();
    Ok(RMatrix::from_fn(m, m, |i, j| 0.5 * (t[i][j].re + t[j][i].re)))
}

/// `D_ij = (1/i) tr(ρ[L_i, L_j]) = 2 Im tr(ρ L_i L_j)`, antisymmetric by
/// construction.
pub fn commutation_matrix(rho: &DensityMatrix, slds: &[SldResult]) -> Result<RMatrix> {
    check_slds(rho, slds)?;
    let t = rho_products(rho, slds);
    let m = slds.len();
    let mut d = RMatrix::zeros(m, m);
    for i in 0..m {
        for j in (i + 1)..m {
            let v = t[i][j].im - t[j][i].im;
            d[(i, j)] = v;
            d[(j, i)] = -v;
        }
    }
    Ok(d)
}

pub fn is_compatible(commutation: &RMatrix, compat_tol: f64) -> bool {
    commutation.iter().all(|v| v.abs() <= compat_tol)
}

/// A positive operator-valued measure.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Povm {
    elements: Vec<HermitianMatrix>,
}

impl Povm {
    pub fn new(elements: Vec<HermitianMatrix>, tol: f64) -> Result<Self> {
        let n = match elements.first() {
            Some(e) => e.dim(),
            None => return Err(Error::InvalidPovm("no elements".into())),
        };
        let mut sum = CMatrix::zeros(n, n);
        for (k, e) in elements.iter().enumerate() {
            if e.dim() != n {
                return Err(Error::InvalidPovm(format!("element {k} has dimension {}", e.dim())));
            }
            let min = e.eigh().0.last().copied().unwrap_or(0.0);
            if min < -tol {
                return Err(Error::InvalidPovm(format!("element {k} is not positive (min eigenvalue {min:e})")));
            }
            sum += e.matrix();
        }
        let dev = (sum - CMatrix::identity(n, n)).norm();
        if dev > 1e-10 {
            return Err(Error::InvalidPovm(format!("elements sum to identity only within {dev:e}")));
        }
        Ok(Povm { elements })
    }

    /// Rank-one projectors onto the columns of a unitary.
    pub fn projective(unitary: &CMatrix) -> Result<Self> {
        let elements = (0..unitary.ncols())
            .map(|k| {
                let v = unitary.column(k);
                HermitianMatrix::symmetrized(v * v.adjoint())
            })
            .collect();
        Povm::new(elements, 1e-10)
    }

    pub fn elements(&self) -> &[HermitianMatrix] {
        &self.elements
    }

    pub fn dim(&self) -> usize {
        self.elements[0].dim()
    }
}

/// Classical Fisher information of `p_α = tr(Π_α ρ)` given the state
/// derivatives `∂_iρ`.
pub fn cfim_from_derivatives(rho: &DensityMatrix, drhos: &[HermitianMatrix], povm: &Povm) -> Result<RMatrix> {
    if povm.dim() != rho.dim() {
        return Err(Error::DimensionMismatch { what: "POVM dimension", expected: rho.dim(), got: povm.dim() });
    }
    let m = drhos.len();
    let mut f = RMatrix::zeros(m, m);
    for (outcome, e) in povm.elements().iter().enumerate() {
        let p = trace_product(e.matrix(), rho.matrix().matrix()).re;
        let dp: Vec<f64> = drhos.iter().map(|d| trace_product(e.matrix(), d.matrix()).re).collect();
        if p <= PROB_FLOOR {
            let worst = dp.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            if worst <= PROB_DERIVATIVE_FLOOR {
                continue;
            }
            return Err(Error::DivergentFisher { outcome, probability: p, derivative: worst });
        }
        for i in 0..m {
            for j in 0..m {
                f[(i, j)] += dp[i] * dp[j] / p;
            }
        }
    }
    Ok(f)
}

/// Classical Fisher information matrix of a model at `x` for a POVM.
pub fn cfim(model: &Model, povm: &Povm, x: &[f64]) -> Result<RMatrix> {
    let (rho, drhos) = state_and_derivatives(model, x)?;
    cfim_from_derivatives(&rho, &drhos, povm)
}

/// ρ(x) and `∂_iρ(x)` for every parameter.
pub fn state_and_derivatives(model: &Model, x: &[f64]) -> Result<(DensityMatrix, Vec<HermitianMatrix>)> {
    let gs = model.generator_set();
    let beta = model.eval_beta(x)?;
    let jac = model.eval_beta_jacobian(x)?;
    let rho = assemble_rho(gs, &beta)?;
    let drhos = (0..model.m())
        .map(|i| {
            let col: Vec<f64> = jac.column(i).iter().copied().collect();
            assemble_derivative(gs, &col)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((rho, drhos))
}

/// Both sides of "QFIM invertible ⇔ the `(ρL_i + L_iρ)/2` are linearly
/// independent", evaluated with one shared tolerance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvertibilityReport {
    pub qfim_min_eigenvalue: f64,
    /// Min eigenvalue of the Gram matrix `tr(𝓛_i 𝓛_j)`.
    pub derivative_gram_min_eigenvalue: f64,
    /// Number of Gram eigenvalues above the tolerance.
    pub derivative_rank: usize,
    /// Rank of the SLDs themselves; equals `derivative_rank` for full-rank ρ.
    pub sld_rank: usize,
    pub qfim_invertible: bool,
    pub derivatives_independent: bool,
    pub both_sides_agree: bool,
}

fn gram_eigenvalues(mats: &[CMatrix]) -> Vec<f64> {
    let vecs: Vec<_> = mats.iter().map(realify).collect();
    let m = mats.len();
    symmetric_eigenvalues(&RMatrix::from_fn(m, m, |i, j| vecs[i].dot(&vecs[j])))
}

pub fn check_invertibility_equivalence(rho: &DensityMatrix, slds: &[SldResult], tol: f64) -> Result<InvertibilityReport> {
    let f = qfim(rho, slds)?;
    let m = slds.len();
    let qfim_min_eigenvalue = symmetric_eigenvalues(&f).first().copied().unwrap_or(0.0);
    let derivs: Vec<CMatrix> = slds.iter().map(|s| symmetrized_product(rho, &s.l)).collect();
    let gram = gram_eigenvalues(&derivs);
    let derivative_rank = gram.iter().filter(|&&e| e > tol).count();
    let ls: Vec<CMatrix> = slds.iter().map(|s| s.l.matrix().clone()).collect();
    let sld_rank = gram_eigenvalues(&ls).iter().filter(|&&e| e > tol).count();
    let qfim_invertible = qfim_min_eigenvalue > tol;
    let derivatives_independent = derivative_rank == m;
    Ok(InvertibilityReport {
        qfim_min_eigenvalue,
        derivative_gram_min_eigenvalue: gram.first().copied().unwrap_or(0.0),
        derivative_rank,
        sld_rank,
        qfim_invertible,
        derivatives_independent,
        both_sides_agree: qfim_invertible == derivatives_independent,
    })
}

/// Everything computed at a single parameter point.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FisherBundle {
    pub point: Vec<f64>,
    pub beta: Vec<f64>,
    pub validity: StateValidity,
    pub slds: Vec<SldResult>,
    pub coefficients: Vec<SldCoefficients>,
    pub qfim: RMatrix,
    pub commutation: RMatrix,
    pub max_commutation: f64,
    pub compatible: bool,
}

pub fn fisher_bundle(model: &Model, x: &[f64], tol: &Tolerances) -> Result<FisherBundle> {
    let (rho, drhos) = state_and_derivatives(model, x)?;
    let slds = drhos
        .iter()
        .map(|d| sld_eigen(&rho, d, tol.null, tol.algebra))
        .collect::<Result<Vec<_>>>()?;
    let coefficients = slds
        .iter()
        .map(|s| sld_coefficients(model.generator_set(), &rho, &s.l))
        .collect::<Result<Vec<_>>>()?;
    let qfim = qfim(&rho, &slds)?;
    let commutation = commutation_matrix(&rho, &slds)?;
    let max_commutation = commutation.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    Ok(FisherBundle {
        point: x.to_vec(),
        beta: rho.beta().map(<[f64]>::to_vec).unwrap_or_default(),
        validity: validate_state(&rho, tol.psd),
        slds,
        coefficients,
        qfim,
        compatible: max_commutation <= tol.compat,
        commutation,
        max_commutation,
    })
}

/// Convenience: the diagonal state `diag(p)` as a density matrix.
pub fn diagonal_state(p: &[f64]) -> Result<DensityMatrix> {
    let n = p.len();
    let m = CMatrix::from_fn(n, n, |j, k| if j == k { c(p[j], 0.0) } else { c(0.0, 0.0) });
    DensityMatrix::from_matrix(HermitianMatrix::new(m)?)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::algebra::make_preset;
    use crate::linalg::pauli;
    use crate::model::Convention;

    fn half(m: &CMatrix) -> HermitianMatrix {
        HermitianMatrix::new(m.map(|z| z * 0.5)).unwrap()
    }

    fn qubit_state(r: f64) -> DensityMatrix {
        let [_, _, z] = pauli();
        DensityMatrix::from_matrix(half(&(CMatrix::identity(2, 2) + z.map(|v| v * r)))).unwrap()
    }

    #[test]
    fn sld_of_mixed_state() {
        let [_, _, z] = pauli();
        let rho = qubit_state(0.0);
        let s = sld_eigen(&rho, &half(&z), 1e-10, 1e-10).unwrap();
        assert!((s.l.matrix() - &z).norm() < 1e-15);
        assert!(s.residual < 1e-15);
    }

    #[test]
    fn sld_off_diagonal() {
        let [x, _, _] = pauli();
        let rho = qubit_state(0.5);
        let s = sld_eigen(&rho, &half(&x), 1e-10, 1e-10).unwrap();
        assert!((s.l.matrix() - &x).norm() < 1e-14);
    }

    #[test]
    fn pure_state_kernel_block() {
        let [x, _, z] = pauli();
        let rho = qubit_state(1.0);
        // rotating the Bloch vector stays in the support
        let s = sld_eigen(&rho, &half(&x), 1e-10, 1e-10).unwrap();
        assert!(s.residual < 1e-14);
        // shrinking it needs weight on |1><1|, which is outside the support
        let err = sld_eigen(&rho, &half(&z.map(|v| -v)), 1e-10, 1e-10).unwrap_err();
        assert!(matches!(err, Error::UnsupportedDerivative { j: 1, k: 1, .. }));
    }

    #[test]
    fn integral_modes() {
        let [_, _, z] = pauli();
        let rho = qubit_state(0.0);
        let a = sld_integral(&rho, &half(&z), IntegralMode::Analytic, 1e-10, 1e-10).unwrap();
        assert!((a.l.matrix() - &z).norm() < 1e-15);
        let q = sld_integral(&rho, &half(&z), IntegralMode::Quadrature { t_max: 60.0, n_steps: 2000 }, 1e-10, 1e-6).unwrap();
        assert!((q.l.matrix() - &z).norm() < 1e-6);
    }

    #[test]
    fn integral_rejects_singular_state() {
        let [_, _, z] = pauli();
        let err = sld_integral(&qubit_state(1.0), &half(&z), IntegralMode::Analytic, 1e-10, 1e-10).unwrap_err();
        assert!(matches!(err, Error::SingularState(_)));
    }

    #[test]
    fn quadrature_reports_truncation() {
        let [_, _, z] = pauli();
        let err = sld_integral(&qubit_state(0.0), &half(&z), IntegralMode::Quadrature { t_max: 5.0, n_steps: 200 }, 1e-10, 1e-6)
            .unwrap_err();
        assert!(matches!(err, Error::QuadratureNotConverged(_)));
    }

    #[test]
    fn expm_matches_diagonal() {
        let rho = qubit_state(0.5);
        let e = expm_neg(rho.matrix().matrix(), 3.0);
        assert!((e[(0, 0)].re - (-2.25f64).exp()).abs() < 1e-14);
        assert!((e[(1, 1)].re - (-0.75f64).exp()).abs() < 1e-14);
    }

    #[test]
    fn coefficients_of_sigma_z() {
        let gs = make_preset("pauli", 2).unwrap();
        let [_, _, z] = pauli();
        let c = sld_coefficients(&gs, &qubit_state(0.0), &HermitianMatrix::new(z).unwrap()).unwrap();
        assert_eq!(c.alpha0, 0.0);
        assert!(c.alpha[0].abs() < 1e-15 && c.alpha[1].abs() < 1e-15);
        assert!((c.alpha[2] - std::f64::consts::SQRT_2).abs() < 1e-15);
        assert!(c.residual < 1e-15);
    }

    #[test]
    fn coefficients_outside_xstate_span() {
        let gs = make_preset("xstate2q", 4).unwrap();
        let mut m = CMatrix::zeros(4, 4);
        m[(0, 1)] = c(1.0, 0.0);
        m[(1, 0)] = c(1.0, 0.0);
        let rho = DensityMatrix::from_matrix(HermitianMatrix::identity(4).scale(0.25)).unwrap();
        let co = sld_coefficients(&gs, &rho, &HermitianMatrix::new(m).unwrap()).unwrap();
        assert!((co.residual - std::f64::consts::SQRT_2).abs() < 1e-14);
    }

    fn r_model() -> Model {
        let gs = Arc::new(make_preset("pauli", 2).unwrap());
        Model::parse(gs, vec!["r".into()], &["0", "0", "r"], Convention::PaperPauli).unwrap()
    }

    #[test]
    fn qubit_length_qfi() {
        let b = fisher_bundle(&r_model(), &[0.5], &Tolerances::default()).unwrap();
        assert!((b.qfim[(0, 0)] - 4.0 / 3.0).abs() < 1e-12);
        assert_eq!(b.commutation[(0, 0)], 0.0);
        assert!(b.compatible);
    }

    #[test]
    fn pure_state_angle_qfi() {
        let gs = Arc::new(make_preset("pauli", 2).unwrap());
        let m = Model::parse(gs, vec!["t".into()], &["sin(t)", "0", "cos(t)"], Convention::PaperPauli).unwrap();
        let b = fisher_bundle(&m, &[0.3], &Tolerances::default()).unwrap();
        assert!((b.qfim[(0, 0)] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constant_model_has_zero_qfi() {
        let gs = Arc::new(make_preset("pauli", 2).unwrap());
        let m = Model::parse(gs, vec!["t".into()], &["0.1", "0", "0.2"], Convention::Internal).unwrap();
        let b = fisher_bundle(&m, &[0.3], &Tolerances::default()).unwrap();
        assert_eq!(b.qfim[(0, 0)], 0.0);
    }

    #[test]
    fn tilted_bloch_parameters_are_incompatible() {
        let gs = Arc::new(make_preset("pauli", 2).unwrap());
        let m = Model::parse(gs.clone(), vec!["x1".into(), "x2".into()], &["x1", "x2", "0.3"], Convention::Internal).unwrap();
        let b = fisher_bundle(&m, &[0.3, 0.2], &Tolerances::default()).unwrap();
        assert!(b.commutation[(0, 1)].abs() > 1e-3);
        assert_eq!(b.commutation[(0, 1)], -b.commutation[(1, 0)]);
        assert!(!b.compatible);
        // Bloch vector coplanar with both derivatives: D ∝ n·(b1 × b2) = 0
        let flat = Model::parse(gs, vec!["x1".into(), "x2".into()], &["x1", "x2", "0"], Convention::Internal).unwrap();
        let b = fisher_bundle(&flat, &[0.3, 0.2], &Tolerances::default()).unwrap();
        assert!(b.max_commutation < 1e-12);
        assert!(b.compatible);
    }

    #[test]
    fn cfim_sigma_z_and_sigma_x() {
        let z_basis = Povm::projective(&CMatrix::identity(2, 2)).unwrap();
        let f = cfim(&r_model(), &z_basis, &[0.5]).unwrap();
        assert!((f[(0, 0)] - 4.0 / 3.0).abs() < 1e-12);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let x_basis = Povm::projective(&CMatrix::from_row_slice(2, 2, &[c(s, 0.0), c(s, 0.0), c(s, 0.0), c(-s, 0.0)])).unwrap();
        let f = cfim(&r_model(), &x_basis, &[0.5]).unwrap();
        assert!(f[(0, 0)].abs() < 1e-15);
    }

    #[test]
    fn cfim_divergence_is_reported() {
        // at r = 1 the outcome |1> has p = 0 but dp/dr = -1/2
        let z_basis = Povm::projective(&CMatrix::identity(2, 2)).unwrap();
        assert!(matches!(cfim(&r_model(), &z_basis, &[1.0]), Err(Error::DivergentFisher { outcome: 1, .. })));
    }

    #[test]
    fn cfim_drops_null_outcomes() {
        let gs = Arc::new(make_preset("pauli", 2).unwrap());
        let m = Model::parse(gs, vec!["t".into()], &["t", "0", "1"], Convention::PaperPauli).unwrap();
        let z_basis = Povm::projective(&CMatrix::identity(2, 2)).unwrap();
        let f = cfim(&m, &z_basis, &[0.0]).unwrap();
        assert_eq!(f[(0, 0)], 0.0);
    }

    #[test]
    fn povm_validation() {
        let id = HermitianMatrix::identity(2);
        assert!(Povm::new(vec![id.clone()], 1e-10).is_ok());
        assert!(matches!(Povm::new(vec![id.clone(), id.clone()], 1e-10), Err(Error::InvalidPovm(_))));
        let [_, _, z] = pauli();
        let zh = HermitianMatrix::new(z).unwrap();
        assert!(matches!(Povm::new(vec![zh, (&id - &HermitianMatrix::new(pauli()[2].clone()).unwrap())], 1e-10), Err(Error::InvalidPovm(_))));
    }

    #[test]
    fn invertibility_examples() {
        let gs = Arc::new(make_preset("pauli", 2).unwrap());
        let tol = Tolerances::default();
        let generic = Model::parse(gs.clone(), vec!["x1".into(), "x2".into()], &["x1", "x2", "0"], Convention::Internal).unwrap();
        let dup = Model::parse(gs, vec!["x1".into(), "x2".into()], &["x1 + x2", "0.1", "0"], Convention::Internal).unwrap();
        for (m, want) in [(generic, true), (dup, false)] {
            let (rho, drhos) = state_and_derivatives(&m, &[0.3, 0.2]).unwrap();
            let slds: Vec<_> = drhos.iter().map(|d| sld_eigen(&rho, d, 1e-10, 1e-10).unwrap()).collect();
            let r = check_invertibility_equivalence(&rho, &slds, tol.invertibility).unwrap();
            assert_eq!(r.qfim_invertible, want);
            assert_eq!(r.derivatives_independent, want);
            assert!(r.both_sides_agree);
            if !want {
                assert_eq!(r.derivative_rank, 1);
            }
        }
    }
}
