//! Density matrices `ρ = (1/N)(I + Σ_a β_a S_a)` over an orthonormal
//! generator set, with a cached eigendecomposition.

use serde::{Deserialize, Serialize};

use crate::algebra::GeneratorSet;
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, HermitianMatrix};

/// Normalization constant between β and the orthonormal generators in
/// `ρ = (1/N)(I + c_N Σ_a β_a S_a)`. Internally always 1.
pub const C_N: f64 = 1.0;

#[derive(Clone, Debug)]
pub struct DensityMatrix {
    matrix: HermitianMatrix,
    beta: Option<Vec<f64>>,
    eigenvalues: Vec<f64>,
    eigenvectors: CMatrix,
}

impl DensityMatrix {
    /// Wraps an explicit matrix. Trace is checked; positivity is not.
    pub fn from_matrix(matrix: HermitianMatrix) -> Result<Self> {
        let tr = matrix.trace();
        if (tr - 1.0).abs() > 1e-10 {
            return Err(Error::NonUnitTrace(tr));
        }
        let (eigenvalues, eigenvectors) = matrix.eigh();
        Ok(DensityMatrix { matrix, beta: None, eigenvalues, eigenvectors })
    }

    pub fn matrix(&self) -> &HermitianMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// β coefficients, when the state was assembled from them.
    pub fn beta(&self) -> Option<&[f64]> {
        self.beta.as_deref()
    }

    /// Descending.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Unitary; column k belongs to `eigenvalues()[k]`.
    pub fn eigenvectors(&self) -> &CMatrix {
        &self.eigenvectors
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    pub fn validate(&self, tol: f64) -> StateValidity {
        validate_state(self, tol)
    }
}

pub fn assemble_rho(gs: &GeneratorSet, beta: &[f64]) -> Result<DensityMatrix> {
    let n = gs.dim_hilbert();
    let scaled: Vec<f64> = beta.iter().map(|b| b * C_N).collect();
    let m = (CMatrix::identity(n, n) + gs.combine(&scaled)?).map(|z| z / n as f64);
    let matrix = HermitianMatrix::symmetrized(m);
    let (eigenvalues, eigenvectors) = matrix.eigh();
    Ok(DensityMatrix { matrix, beta: Some(beta.to_vec()), eigenvalues, eigenvectors })
}

/// `(1/N) Σ_a dβ_a S_a`, the state change for a coefficient change `dβ`.
pub fn assemble_derivative(gs: &GeneratorSet, dbeta: &[f64]) -> Result<HermitianMatrix> {
    let n = gs.dim_hilbert() as f64;
    let m = gs.combine(dbeta)?.map(|z| z * (C_N / n));
    Ok(HermitianMatrix::symmetrized(m))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateValidity {
    pub physical: bool,
    pub min_eigenvalue: f64,
    pub trace_deviation: f64,
}

pub fn validate_state(rho: &DensityMatrix, tol: f64) -> StateValidity {
    let min_eigenvalue = rho.min_eigenvalue();
    StateValidity {
        physical: min_eigenvalue >= -tol,
        min_eigenvalue,
        trace_deviation: (rho.matrix.trace() - 1.0).abs(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    pub beta: Vec<f64>,
    /// ‖ρ − (1/N)(I + Σ β_a S_a)‖_F; zero iff ρ lies in `I_N ⊕ span(S)`.
    pub residual: f64,
}

pub fn decompose(gs: &GeneratorSet, rho: &HermitianMatrix, tol: f64) -> Result<Decomposition> {
    if rho.dim() != gs.dim_hilbert() {
        return Err(Error::DimensionMismatch { what: "state dimension", expected: gs.dim_hilbert(), got: rho.dim() });
    }
    let tr = rho.trace();
    if (tr - 1.0).abs() > tol {
        return Err(Error::NonUnitTrace(tr));
    }
    let n = gs.dim_hilbert() as f64;
    let beta: Vec<f64> = gs.project(rho.matrix()).into_iter().map(|p| p * n / C_N).collect();
    let recon = assemble_rho(gs, &beta)?;
    let residual = (rho.matrix() - recon.matrix().matrix()).norm();
    Ok(Decomposition { beta, residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::make_preset;
    use crate::linalg::c;

    #[test]
    fn maximally_mixed_qubit() {
        let gs = make_preset("pauli", 2).unwrap();
        let rho = assemble_rho(&gs, &[0.0; 3]).unwrap();
        assert_eq!(rho.eigenvalues(), &[0.5, 0.5]);
        assert!((rho.matrix().matrix() - CMatrix::identity(2, 2).map(|z| z * 0.5)).norm() < 1e-16);
        let v = validate_state(&rho, 1e-10);
        assert!(v.physical);
        assert_eq!(v.min_eigenvalue, 0.5);
    }

    #[test]
    fn pure_up_state() {
        // n = (0, 0, 1) in Bloch convention is β3 = √2 internally
        let gs = make_preset("pauli", 2).unwrap();
        let rho = assemble_rho(&gs, &[0.0, 0.0, std::f64::consts::SQRT_2]).unwrap();
        let mut want = CMatrix::zeros(2, 2);
        want[(0, 0)] = c(1.0, 0.0);
        assert!((rho.matrix().matrix() - want).norm() < 1e-15);
        assert!((rho.eigenvalues()[0] - 1.0).abs() < 1e-15);
        assert!(rho.eigenvalues()[1].abs() < 1e-15);
        let v = validate_state(&rho, 1e-10);
        assert!(v.physical && v.min_eigenvalue.abs() < 1e-15);
    }

    #[test]
    fn overlong_bloch_vector_is_unphysical() {
        let gs = make_preset("pauli", 2).unwrap();
        let rho = assemble_rho(&gs, &[2.0 * std::f64::consts::SQRT_2, 0.0, 0.0]).unwrap();
        let v = validate_state(&rho, 1e-10);
        assert!(!v.physical);
        assert!((v.min_eigenvalue + 0.5).abs() < 1e-14);
    }

    #[test]
    fn xstate_diagonal_pattern() {
        let gs = make_preset("xstate2q", 4).unwrap();
        let rho = assemble_rho(&gs, &[0.0, 0.0, 0.7, 0.0, 0.0, 0.0, 0.0]).unwrap();
        let m = rho.matrix().matrix();
        for j in 0..4 {
            for k in 0..4 {
                if j != k {
                    assert_eq!(m[(j, k)].norm(), 0.0);
                }
            }
        }
    }

    #[test]
    fn decompose_inverts_assembly() {
        let gs = make_preset("xstate2q", 4).unwrap();
        let beta = [0.1, -0.2, 0.3, 0.05, -0.15, 0.2, 0.1];
        let rho = assemble_rho(&gs, &beta).unwrap();
        let d = decompose(&gs, rho.matrix(), 1e-10).unwrap();
        for (a, b) in d.beta.iter().zip(beta) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(d.residual < 1e-12);
        let mixed = decompose(&gs, &HermitianMatrix::identity(4).scale(0.25), 1e-10).unwrap();
        assert!(mixed.beta.iter().all(|b| b.abs() < 1e-15));
    }

    #[test]
    fn non_x_state_has_residual() {
        let gs = make_preset("xstate2q", 4).unwrap();
        let mut m = CMatrix::identity(4, 4).map(|z| z * 0.25);
        m[(0, 1)] = c(0.1, 0.0);
        m[(1, 0)] = c(0.1, 0.0);
        let d = decompose(&gs, &HermitianMatrix::new(m).unwrap(), 1e-10).unwrap();
        assert!((d.residual - 0.1 * std::f64::consts::SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn decompose_rejects_bad_trace() {
        let gs = make_preset("pauli", 2).unwrap();
        assert!(matches!(decompose(&gs, &HermitianMatrix::identity(2), 1e-10), Err(Error::NonUnitTrace(_))));
    }
}
