//! Dense complex/real matrix helpers shared by the algebra, state and
//! estimation modules.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type RMatrix = DMatrix<f64>;

pub const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// A square complex matrix that is Hermitian within a tolerance.
///
/// The stored entries are exactly Hermitian: construction averages the
/// matrix with its adjoint after the tolerance check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<[f64; 2]>>", into = "Vec<Vec<[f64; 2]>>")]
pub struct HermitianMatrix(CMatrix);

impl HermitianMatrix {
    /// Hermiticity is checked against `1e-10 * max(1, ‖m‖_F)`.
    pub fn new(m: CMatrix) -> Result<Self> {
        Self::with_tol(m, 1e-10)
    }

    pub fn with_tol(m: CMatrix, tol: f64) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::NotSquare(m.nrows(), m.ncols()));
        }
        if m.nrows() < 2 {
            return Err(Error::InvalidInput(format!(
                "matrix dimension must be at least 2, got {}",
                m.nrows()
            )));
        }
        let dev = (&m - m.adjoint()).norm();
        let scale = m.norm().max(1.0);
        if !dev.is_finite() || dev > tol * scale {
            return Err(Error::NotHermitian(dev));
        }
        Ok(Self::symmetrized(m))
    }

    /// Averages `m` with its adjoint; no tolerance check.
    pub fn symmetrized(m: CMatrix) -> Self {
        let adj = m.adjoint();
        HermitianMatrix((m + adj).scale(0.5))
    }

    pub fn identity(n: usize) -> Self {
        HermitianMatrix(CMatrix::identity(n, n))
    }

    pub fn zeros(n: usize) -> Self {
        HermitianMatrix(CMatrix::zeros(n, n))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    pub fn scale(&self, s: f64) -> Self {
        HermitianMatrix(self.0.map(|z| z * s))
    }

    /// Eigenvalues sorted descending with the matching unitary eigenvectors
    /// as columns.
    pub fn eigh(&self) -> (Vec<f64>, CMatrix) {
        let eig = SymmetricEigen::new(self.0.clone());
        let n = self.dim();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let mut vectors = CMatrix::zeros(n, n);
        for (dst, &src) in order.iter().enumerate() {
            vectors.set_column(dst, &eig.eigenvectors.column(src));
        }
        (values, vectors)
    }
}

impl std::ops::Add for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn add(self, rhs: Self) -> HermitianMatrix {
        HermitianMatrix(&self.0 + &rhs.0)
    }
}

impl std::ops::Sub for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn sub(self, rhs: Self) -> HermitianMatrix {
        HermitianMatrix(&self.0 - &rhs.0)
    }
}

impl TryFrom<Vec<Vec<[f64; 2]>>> for HermitianMatrix {
    type Error = Error;

    fn try_from(rows: Vec<Vec<[f64; 2]>>) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidInput("matrix rows must all have length N".into()));
        }
        let m = CMatrix::from_fn(n, n, |j, k| c(rows[j][k][0], rows[j][k][1]));
        HermitianMatrix::new(m)
    }
}

impl From<HermitianMatrix> for Vec<Vec<[f64; 2]>> {
    fn from(h: HermitianMatrix) -> Self {
        let m = h.0;
        (0..m.nrows())
            .map(|j| (0..m.ncols()).map(|k| [m[(j, k)].re, m[(j, k)].im]).collect())
            .collect()
    }
}

/// Real part of tr(A B) without forming the product.
pub fn trace_product(a: &CMatrix, b: &CMatrix) -> Complex64 {
    let n = a.nrows();
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..n {
        for k in 0..n {
            acc += a[(j, k)] * b[(k, j)];
        }
    }
    acc
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

pub fn anticommutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b + b * a
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Stacks real and imaginary parts of the column-major entries.
pub fn realify(m: &CMatrix) -> DVector<f64> {
    let n = m.len();
    DVector::from_fn(2 * n, |k, _| {
        if k < n {
            m.as_slice()[k].re
        } else {
            m.as_slice()[k - n].im
        }
    })
}

/// Singular values of a real matrix, sorted descending.
pub fn singular_values(m: &RMatrix) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Eigenvalues of a real symmetric matrix, sorted ascending.
pub fn symmetric_eigenvalues(m: &RMatrix) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    let mut e: Vec<f64> = SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().collect();
    e.sort_by(|a, b| a.total_cmp(b));
    e
}

pub fn pauli() -> [CMatrix; 3] {
    let z = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    [
        CMatrix::from_row_slice(2, 2, &[z, one, one, z]),
        CMatrix::from_row_slice(2, 2, &[z, -I, I, z]),
        CMatrix::from_row_slice(2, 2, &[one, z, z, -one]),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_hermitian() {
        let m = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        assert!(matches!(HermitianMatrix::new(m), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn eigh_sorted_descending() {
        let [_, _, z] = pauli();
        let h = HermitianMatrix::new(z).unwrap();
        let (vals, vecs) = h.eigh();
        assert_eq!(vals, vec![1.0, -1.0]);
        let unit = vecs.adjoint() * &vecs;
        assert!((unit - CMatrix::identity(2, 2)).norm() < 1e-14);
    }

    #[test]
    fn json_pairs_roundtrip() {
        let [x, y, _] = pauli();
        let h = HermitianMatrix::new(x + y).unwrap();
        let s = serde_json::to_string(&h).unwrap();
        assert_eq!(s, "[[[0.0,0.0],[1.0,-1.0]],[[1.0,1.0],[0.0,0.0]]]");
        let back: HermitianMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, h);
    }
}
