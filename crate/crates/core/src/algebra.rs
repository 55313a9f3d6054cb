//! Jordan-Lie subalgebras `I_N ⊕ g` of Hermitian N×N matrices.
//!
//! A [`GeneratorSet`] holds traceless Hermitian generators `S_a` that are
//! orthonormal under the Hilbert–Schmidt product `tr(S_a S_b) = δ_ab`,
//! together with the structure constants defined by
//! `-i[S_a, S_b] = Σ_c f_abc S_c`. The identity is kept implicit.
//!
//! Presets are always rescaled to Hilbert–Schmidt orthonormality. Ranks of
//! `X^β`, stratum membership and the compatible-parameter bound do not depend
//! on a uniform rescaling of the generators.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{anticommutator, c, commutator, kron, pauli, realify, trace_product, CMatrix, HermitianMatrix, RMatrix, I};

pub const DEFAULT_TOL: f64 = 1e-10;

/// Real 3-index array `f[a][b][c]`, stored flat in row-major order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StructureConstants {
    g: usize,
    data: Vec<f64>,
}

impl StructureConstants {
    pub fn zeros(g: usize) -> Self {
        StructureConstants { g, data: vec![0.0; g * g * g] }
    }

    pub fn from_fn(g: usize, mut f: impl FnMut(usize, usize, usize) -> f64) -> Self {
        let mut out = Self::zeros(g);
        for a in 0..g {
            for b in 0..g {
                for k in 0..g {
                    out.data[(a * g + b) * g + k] = f(a, b, k);
                }
            }
        }
        out
    }

    /// The Levi-Civita symbol `ε_abc` on three indices.
    pub fn levi_civita() -> Self {
        Self::from_fn(3, |a, b, k| {
            if a == b || b == k || a == k {
                0.0
            } else if (a, b, k) == (0, 1, 2) || (a, b, k) == (1, 2, 0) || (a, b, k) == (2, 0, 1) {
                1.0
            } else {
                -1.0
            }
        })
    }

    pub fn g(&self) -> usize {
        self.g
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize, k: usize) -> f64 {
        self.data[(a * self.g + b) * self.g + k]
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn scaled(&self, s: f64) -> Self {
        StructureConstants { g: self.g, data: self.data.iter().map(|v| v * s).collect() }
    }

    /// max |f[a][b][c] + f[b][a][c]|.
    pub fn antisymmetry_deviation(&self) -> f64 {
        let g = self.g;
        let mut dev: f64 = 0.0;
        for a in 0..g {
            for b in 0..g {
                for k in 0..g {
                    dev = dev.max((self.get(a, b, k) + self.get(b, a, k)).abs());
                }
            }
        }
        dev
    }

    /// Largest violation of the Jacobi identity
    /// `Σ_d f_abd f_dce + f_bcd f_dae + f_cad f_dbe = 0`.
    pub fn jacobi_residual(&self) -> f64 {
        let g = self.g;
        let mut worst: f64 = 0.0;
        for a in 0..g {
            for b in 0..g {
                for k in 0..g {
                    for e in 0..g {
                        let mut s = 0.0;
                        for d in 0..g {
                            s += self.get(a, b, d) * self.get(d, k, e)
                                + self.get(b, k, d) * self.get(d, a, e)
                                + self.get(k, a, d) * self.get(d, b, e);
                        }
                        worst = worst.max(s.abs());
                    }
                }
            }
        }
        worst
    }
}

/// Orthonormal traceless Hermitian generators and their structure constants.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GeneratorSet {
    dim_hilbert: usize,
    generators: Vec<HermitianMatrix>,
    f: StructureConstants,
    name: Option<String>,
}

impl GeneratorSet {
    /// Validates tracelessness and orthonormality within `tol` and computes
    /// the structure constants by trace projection. The set need not be
    /// closed; see [`GeneratorSet::closure_check`].
    pub fn new(generators: Vec<HermitianMatrix>, tol: f64) -> Result<Self> {
        let n = match generators.first() {
            Some(s) => s.dim(),
            None => return Err(Error::InvalidInput("generator list is empty".into())),
        };
        for (index, s) in generators.iter().enumerate() {
            if s.dim() != n {
                return Err(Error::DimensionMismatch { what: "generator dimension", expected: n, got: s.dim() });
            }
            let trace = s.trace();
            if trace.abs() > tol {
                return Err(Error::NotTraceless { index, trace });
            }
        }
        let dev = orthonormality_deviation(&generators);
        if dev > tol {
            return Err(Error::NotOrthonormal(dev));
        }
        let f = project_structure_constants(&generators);
        Ok(GeneratorSet { dim_hilbert: n, generators, f, name: None })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn dim_hilbert(&self) -> usize {
        self.dim_hilbert
    }

    pub fn g(&self) -> usize {
        self.generators.len()
    }

    pub fn generators(&self) -> &[HermitianMatrix] {
        &self.generators
    }

    pub fn f(&self) -> &StructureConstants {
        &self.f
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    /// The orthonormal sub-collection at `indices` (in the given order).
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        let gens = indices
            .iter()
            .map(|&k| {
                self.generators.get(k).cloned().ok_or_else(|| Error::InvalidInput(format!("generator index {k} out of range")))
            })
            .collect::<Result<Vec<_>>>()?;
        GeneratorSet::new(gens, DEFAULT_TOL)
    }

    /// `Σ_a coeffs[a] S_a`.
    pub fn combine(&self, coeffs: &[f64]) -> Result<CMatrix> {
        if coeffs.len() != self.g() {
            return Err(Error::DimensionMismatch { what: "coefficient vector", expected: self.g(), got: coeffs.len() });
        }
        let n = self.dim_hilbert;
        let mut m = CMatrix::zeros(n, n);
        for (s, &w) in self.generators.iter().zip(coeffs) {
            if w != 0.0 {
                m += s.matrix().map(|z| z * w);
            }
        }
        Ok(m)
    }

    /// Hilbert–Schmidt projections `tr(M S_a)`.
    pub fn project(&self, m: &CMatrix) -> Vec<f64> {
        self.generators.iter().map(|s| trace_product(m, s.matrix()).re).collect()
    }

    /// Structure constants, failing when some Lie product escapes the span.
    pub fn structure_constants(&self, tol: f64) -> Result<&StructureConstants> {
        for (a, b, residual) in self.lie_residuals() {
            if residual > tol {
                return Err(Error::NotClosed { a, b, residual });
            }
        }
        Ok(&self.f)
    }

    fn lie_residuals(&self) -> Vec<(usize, usize, f64)> {
        let g = self.g();
        let mut out = Vec::with_capacity(g * (g.saturating_sub(1)) / 2);
        for a in 0..g {
            for b in (a + 1)..g {
                let lie = lie_product(self.generators[a].matrix(), self.generators[b].matrix());
                let coeffs: Vec<f64> = (0..g).map(|k| self.f.get(a, b, k)).collect();
                let residual = (lie - self.combine(&coeffs).expect("length g")).norm();
                out.push((a, b, residual));
            }
        }
        out
    }

    /// Checks closure of `I_N ⊕ span(S)` under the Jordan and Lie products.
    pub fn closure_check(&self, tol: f64) -> ClosureReport {
        let mut violations = Vec::new();
        let mut max_lie: f64 = 0.0;
        for (a, b, residual) in self.lie_residuals() {
            max_lie = max_lie.max(residual);
            if residual > tol {
                violations.push(ClosureViolation { kind: ProductKind::Lie, a, b, residual });
            }
        }
        let n = self.dim_hilbert;
        let g = self.g();
        let mut max_jordan: f64 = 0.0;
        for a in 0..g {
            for b in a..g {
                let jordan = anticommutator(self.generators[a].matrix(), self.generators[b].matrix());
                let id_part = jordan.trace().re / n as f64;
                let coeffs = self.project(&jordan);
                let recon = self.combine(&coeffs).expect("length g") + CMatrix::identity(n, n).map(|z| z * id_part);
                let residual = (jordan - recon).norm();
                max_jordan = max_jordan.max(residual);
                if residual > tol {
                    violations.push(ClosureViolation { kind: ProductKind::Jordan, a, b, residual });
                }
            }
        }
        ClosureReport {
            closed_lie: max_lie <= tol,
            closed_jordan: max_jordan <= tol,
            max_lie_residual: max_lie,
            max_jordan_residual: max_jordan,
            violations,
        }
    }

    pub fn is_commutative(&self, tol: f64) -> bool {
        self.f.max_abs() <= tol
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProductKind {
    Lie,
    Jordan,
}

/// A generator pair (0-based) whose product leaves the algebra.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosureViolation {
    pub kind: ProductKind,
    pub a: usize,
    pub b: usize,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosureReport {
    pub closed_lie: bool,
    pub closed_jordan: bool,
    pub max_lie_residual: f64,
    pub max_jordan_residual: f64,
    pub violations: Vec<ClosureViolation>,
}

/// `-i[A, B]`.
pub fn lie_product(a: &CMatrix, b: &CMatrix) -> CMatrix {
    commutator(a, b).map(|z| -I * z)
}

fn orthonormality_deviation(gens: &[HermitianMatrix]) -> f64 {
    let mut dev: f64 = 0.0;
    for (a, sa) in gens.iter().enumerate() {
        for (b, sb) in gens.iter().enumerate().skip(a) {
            let want = if a == b { 1.0 } else { 0.0 };
            dev = dev.max((trace_product(sa.matrix(), sb.matrix()) - c(want, 0.0)).norm());
        }
    }
    dev
}

fn project_structure_constants(gens: &[HermitianMatrix]) -> StructureConstants {
    let g = gens.len();
    let mut f = StructureConstants::zeros(g);
    for a in 0..g {
        for b in (a + 1)..g {
            let lie = lie_product(gens[a].matrix(), gens[b].matrix());
            for k in 0..g {
                let v = trace_product(&lie, gens[k].matrix()).re;
                f.data[(a * g + b) * g + k] = v;
                f.data[(b * g + a) * g + k] = -v;
            }
        }
    }
    f
}

/// Structure constants by solving `Σ_c f_abc vec(S_c) = vec(-i[S_a,S_b])` in
/// the least-squares sense, without using orthonormality.
pub fn structure_constants_by_solve(gens: &[HermitianMatrix]) -> Result<StructureConstants> {
    let g = gens.len();
    let n = gens.first().map(|s| s.dim()).unwrap_or(0);
    let rows = 2 * n * n;
    let basis = RMatrix::from_fn(rows, g, |r, k| realify(gens[k].matrix())[r]);
    let svd = basis.svd(true, true);
    let mut f = StructureConstants::zeros(g);
    for a in 0..g {
        for b in 0..g {
            let rhs: DVector<f64> = realify(&lie_product(gens[a].matrix(), gens[b].matrix()));
            let sol = svd.solve(&rhs, 1e-12).map_err(|e| Error::InvalidInput(e.to_string()))?;
            for k in 0..g {
                f.data[(a * g + b) * g + k] = sol[k];
            }
        }
    }
    Ok(f)
}

/// Gram–Schmidt under `⟨A, B⟩ = tr(AB)` after removing the identity
/// component of each input.
pub fn orthonormalize(raw: &[HermitianMatrix], tol: f64) -> Result<GeneratorSet> {
    let n = match raw.first() {
        Some(s) => s.dim(),
        None => return Err(Error::InvalidInput("generator list is empty".into())),
    };
    let mut basis: Vec<CMatrix> = Vec::with_capacity(raw.len());
    for (index, s) in raw.iter().enumerate() {
        if s.dim() != n {
            return Err(Error::DimensionMismatch { what: "generator dimension", expected: n, got: s.dim() });
        }
        let shift = s.trace() / n as f64;
        let mut v = s.matrix() - CMatrix::identity(n, n).map(|z| z * shift);
        let scale = v.norm().max(1.0);
        // two passes of modified Gram–Schmidt
        for _ in 0..2 {
            for e in &basis {
                let overlap = trace_product(&v, e).re;
                v -= e.map(|z| z * overlap);
            }
        }
        let pivot = trace_product(&v, &v).re.max(0.0).sqrt();
        if pivot <= tol * scale {
            return Err(Error::LinearDependence { index, pivot });
        }
        basis.push(v.map(|z| z / pivot));
    }
    let gens = basis.into_iter().map(HermitianMatrix::symmetrized).collect();
    GeneratorSet::new(gens, tol)
}

/// Generalized Gell-Mann matrices of su(N), normalized to `tr(S_a S_b) = δ_ab`.
///
/// Ordering: symmetric pairs, antisymmetric pairs, then diagonal, each with
/// index pairs in lexicographic order.
pub fn gell_mann(n: usize) -> Vec<HermitianMatrix> {
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::with_capacity(n * n - 1);
    for j in 0..n {
        for k in (j + 1)..n {
            let mut m = CMatrix::zeros(n, n);
            m[(j, k)] = c(inv_sqrt2, 0.0);
            m[(k, j)] = c(inv_sqrt2, 0.0);
            out.push(HermitianMatrix::symmetrized(m));
        }
    }
    for j in 0..n {
        for k in (j + 1)..n {
            let mut m = CMatrix::zeros(n, n);
            m[(j, k)] = c(0.0, -inv_sqrt2);
            m[(k, j)] = c(0.0, inv_sqrt2);
            out.push(HermitianMatrix::symmetrized(m));
        }
    }
    for l in 1..n {
        let norm = ((l * (l + 1)) as f64).sqrt();
        let mut m = CMatrix::zeros(n, n);
        for d in 0..l {
            m[(d, d)] = c(1.0 / norm, 0.0);
        }
        m[(l, l)] = c(-(l as f64) / norm, 0.0);
        out.push(HermitianMatrix::symmetrized(m));
    }
    out
}

/// The seven X-state generators `I⊗σz, σz⊗I, σz⊗σz, σx⊗σx, σx⊗σy, σy⊗σx,
/// σy⊗σy`, each divided by 2.
pub fn xstate_generators() -> Vec<HermitianMatrix> {
    let [x, y, z] = pauli();
    let id = CMatrix::identity(2, 2);
    [
        kron(&id, &z),
        kron(&z, &id),
        kron(&z, &z),
        kron(&x, &x),
        kron(&x, &y),
        kron(&y, &x),
        kron(&y, &y),
    ]
    .into_iter()
    .map(|m| HermitianMatrix::symmetrized(m.map(|v| v * 0.5)))
    .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    Pauli,
    Gellmann,
    Xstate2q,
}

impl Preset {
    pub const ALL: [Preset; 3] = [Preset::Pauli, Preset::Gellmann, Preset::Xstate2q];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Pauli => "pauli",
            Preset::Gellmann => "gellmann",
            Preset::Xstate2q => "xstate2q",
        }
    }

    /// Required Hilbert dimension, if fixed.
    pub fn fixed_dim(self) -> Option<usize> {
        match self {
            Preset::Pauli => Some(2),
            Preset::Gellmann => None,
            Preset::Xstate2q => Some(4),
        }
    }
}

impl std::str::FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pauli" => Ok(Preset::Pauli),
            "gellmann" => Ok(Preset::Gellmann),
            "xstate2q" => Ok(Preset::Xstate2q),
            other => Err(Error::UnknownPreset(other.to_string())),
        }
    }
}

pub fn make_preset(name: &str, n: usize) -> Result<GeneratorSet> {
    let preset: Preset = name.parse()?;
    if let Some(required) = preset.fixed_dim() {
        if n != required {
            return Err(Error::PresetDimension { name: name.to_string(), required, got: n });
        }
    }
    if n < 2 {
        return Err(Error::PresetDimension { name: name.to_string(), required: 2, got: n });
    }
    let gens = match preset {
        Preset::Pauli => pauli()
            .into_iter()
            .map(|m| HermitianMatrix::symmetrized(m.map(|v| v * std::f64::consts::FRAC_1_SQRT_2)))
            .collect(),
        Preset::Gellmann => gell_mann(n),
        Preset::Xstate2q => xstate_generators(),
    };
    Ok(GeneratorSet::new(gens, DEFAULT_TOL)?.with_name(name))
}

#[cfg(test)]
mod tests {
    use super::*;

    const SQRT2: f64 = std::f64::consts::SQRT_2;

    #[test]
    fn preset_sizes() {
        assert_eq!(make_preset("pauli", 2).unwrap().g(), 3);
        assert_eq!(make_preset("gellmann", 3).unwrap().g(), 8);
        assert_eq!(make_preset("gellmann", 5).unwrap().g(), 24);
        assert_eq!(make_preset("xstate2q", 4).unwrap().g(), 7);
    }

    #[test]
    fn preset_errors() {
        assert!(matches!(make_preset("su3", 3), Err(Error::UnknownPreset(_))));
        assert!(matches!(make_preset("pauli", 3), Err(Error::PresetDimension { required: 2, .. })));
        assert!(matches!(make_preset("xstate2q", 2), Err(Error::PresetDimension { required: 4, .. })));
    }

    #[test]
    fn pauli_structure_constants() {
        let gs = make_preset("pauli", 2).unwrap();
        let f = gs.structure_constants(1e-10).unwrap();
        for (a, b, k, sign) in [(0, 1, 2, 1.0), (1, 2, 0, 1.0), (2, 0, 1, 1.0), (1, 0, 2, -1.0)] {
            assert!((f.get(a, b, k) - sign * SQRT2).abs() < 1e-14);
        }
        assert!((f.get(0, 1, 0)).abs() < 1e-15);
    }

    #[test]
    fn commuting_diagonal_pair_has_zero_f() {
        let gs = make_preset("gellmann", 3).unwrap().subset(&[6, 7]).unwrap();
        assert_eq!(gs.f().max_abs(), 0.0);
    }

    #[test]
    fn xstate_reconstruction() {
        let gs = make_preset("xstate2q", 4).unwrap();
        assert!(gs.f().antisymmetry_deviation() == 0.0);
        let report = gs.closure_check(1e-12);
        assert!(report.max_lie_residual < 1e-12);
        assert!(gs.structure_constants(1e-12).is_ok());
    }

    #[test]
    fn orthonormalize_paulis() {
        let raw: Vec<_> = pauli().into_iter().map(|m| HermitianMatrix::new(m).unwrap()).collect();
        let gs = orthonormalize(&raw, 1e-10).unwrap();
        for (s, p) in gs.generators().iter().zip(pauli()) {
            assert!((s.matrix() - p.map(|z| z / SQRT2)).norm() < 1e-14);
        }
    }

    #[test]
    fn orthonormalize_is_idempotent() {
        let gs = make_preset("gellmann", 3).unwrap();
        let again = orthonormalize(gs.generators(), 1e-10).unwrap();
        for (a, b) in gs.generators().iter().zip(again.generators()) {
            assert!((a.matrix() - b.matrix()).norm() < 1e-10);
        }
    }

    #[test]
    fn orthonormalize_detects_dependence() {
        let x = HermitianMatrix::new(pauli()[0].clone()).unwrap();
        let err = orthonormalize(&[x.clone(), x.scale(2.0)], 1e-10).unwrap_err();
        assert!(matches!(err, Error::LinearDependence { index: 1, .. }));
    }

    #[test]
    fn orthonormalize_strips_identity() {
        let [x, _, z] = pauli();
        let shifted = HermitianMatrix::new(z + CMatrix::identity(2, 2)).unwrap();
        let gs = orthonormalize(&[HermitianMatrix::new(x).unwrap(), shifted], 1e-10).unwrap();
        assert!(gs.generators()[1].trace().abs() < 1e-15);
    }

    #[test]
    fn closure_pauli_and_xstate() {
        for (name, n) in [("pauli", 2), ("xstate2q", 4), ("gellmann", 3)] {
            let r = make_preset(name, n).unwrap().closure_check(1e-10);
            assert!(r.closed_lie && r.closed_jordan, "{name}: {r:?}");
            assert!(r.violations.is_empty());
        }
    }

    #[test]
    fn closure_fails_without_sigma_z() {
        let gs = make_preset("pauli", 2).unwrap().subset(&[0, 1]).unwrap();
        let r = gs.closure_check(1e-10);
        assert!(!r.closed_lie);
        assert_eq!(r.violations.iter().filter(|v| v.kind == ProductKind::Lie).count(), 1);
        let v = &r.violations[0];
        assert_eq!((v.a, v.b), (0, 1));
        assert!((v.residual - SQRT2).abs() < 1e-12);
        assert!(matches!(gs.structure_constants(1e-10), Err(Error::NotClosed { a: 0, b: 1, .. })));
    }

    #[test]
    fn commutativity() {
        let xs = make_preset("xstate2q", 4).unwrap();
        assert!(!xs.is_commutative(1e-10));
        assert!(xs.f().get(0, 3, 4).abs() > 0.5);
        assert!(xs.subset(&[0, 1, 2]).unwrap().is_commutative(1e-10));
        assert!(!make_preset("pauli", 2).unwrap().is_commutative(1e-10));
    }

    #[test]
    fn gell_mann_n2_matches_pauli() {
        let a = make_preset("gellmann", 2).unwrap();
        let b = make_preset("pauli", 2).unwrap();
        for (x, y) in a.generators().iter().zip(b.generators()) {
            assert!((x.matrix() - y.matrix()).norm() < 1e-15);
        }
    }

    #[test]
    fn levi_civita_is_antisymmetric() {
        let e = StructureConstants::levi_civita();
        assert_eq!(e.antisymmetry_deviation(), 0.0);
        assert_eq!(e.get(0, 1, 2), 1.0);
        assert_eq!(e.get(0, 2, 1), -1.0);
        assert!(e.jacobi_residual() < 1e-15);
    }
}
