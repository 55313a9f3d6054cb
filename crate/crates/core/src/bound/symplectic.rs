//! Canonical pairs for the antisymmetric form `ω(u, v) = uᵀ X v`.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::XMatrix;
use crate::error::{Error, Result};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SymplecticBasis {
    /// `g − rank` vectors spanning ker X (orthonormal).
    pub kernel: Vec<DVector<f64>>,
    /// `rank/2` pairs with `u_i·X·v_j = δ_ij` and `u_i·X·u_j = v_i·X·v_j = 0`.
    pub pairs: Vec<(DVector<f64>, DVector<f64>)>,
}

fn omega(x: &XMatrix, u: &DVector<f64>, v: &DVector<f64>) -> f64 {
    u.dot(&(x.entries() * v))
}

/// Reduces X to canonical form by repeated pair extraction.
///
/// Candidates start as the standard basis vectors with their kernel
/// components removed. Each round takes the candidate pair with the largest
/// `|ω|`, rescales it to `ω(u, v) = 1` and projects every remaining
/// candidate onto the ω-complement of the pair.
pub fn symplectic_basis(x: &XMatrix, tol: f64) -> Result<SymplecticBasis> {
    let g = x.g();
    let rank = x.rank();
    let (range, kernel) = x.range_and_kernel();
    let mut cands: Vec<DVector<f64>> = (0..g)
        .map(|k| {
            let mut e = DVector::zeros(g);
            e[k] = 1.0;
            for w in &kernel {
                let overlap = w[k];
                e -= w * overlap;
            }
            e
        })
        .collect();
    debug_assert_eq!(range.len(), rank);
    let threshold = tol * x.singular_values().first().copied().unwrap_or(0.0).max(1e-300);
    let mut pairs = Vec::with_capacity(rank / 2);
    while pairs.len() < rank / 2 {
        let mut best = (0, 0, 0.0f64);
        for p in 0..cands.len() {
            let xp = x.entries().transpose() * &cands[p];
            for q in (p + 1)..cands.len() {
                // ω(p, q) = c_pᵀ X c_q = (Xᵀ c_p)·c_q
                let a = xp.dot(&cands[q]);
                if a.abs() > best.2.abs() {
                    best = (p, q, a);
                }
            }
        }
        let (p, q, a) = best;
        if a.abs() <= threshold {
            return Err(Error::Symplectic(format!(
                "found {} of {} pairs before the form vanished (max |ω| = {:e})",
                pairs.len(),
                rank / 2,
                a.abs()
            )));
        }
        let s = a.abs().sqrt();
        let u = &cands[p] / s;
        let v = &cands[q] * (a.signum() / s);
        let (hi, lo) = (p.max(q), p.min(q));
        cands.swap_remove(hi);
        cands.swap_remove(lo);
        for w in &mut cands {
            let wu = omega(x, &u, w);
            let wv = omega(x, &v, w);
            *w += &u * wv - &v * wu;
        }
        pairs.push((u, v));
    }
    Ok(SymplecticBasis { kernel, pairs })
}

/// `⌊r/2⌋ + (g − r)` linearly independent vectors with pairwise
/// `α·X·α' = 0`: the kernel plus the first half of each canonical pair.
pub fn max_compatible_set(x: &XMatrix, tol: f64) -> Result<Vec<DVector<f64>>> {
    let basis = symplectic_basis(x, tol)?;
    let mut out = basis.kernel;
    out.extend(basis.pairs.into_iter().map(|(u, _)| u));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use nalgebra::DMatrix;

    use super::*;
    use crate::algebra::StructureConstants;

    #[test]
    fn canonical_block() {
        let x = XMatrix::from_entries(DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]), 1e-9).unwrap();
        let b = symplectic_basis(&x, 1e-9).unwrap();
        assert!(b.kernel.is_empty());
        assert_eq!(b.pairs.len(), 1);
        let (u, v) = &b.pairs[0];
        assert_eq!(u.as_slice(), &[1.0, 0.0]);
        assert_eq!(v.as_slice(), &[0.0, 1.0]);
    }

    #[test]
    fn qubit_north_pole() {
        let x = XMatrix::new(&StructureConstants::levi_civita(), &[0.0, 0.0, 1.0], 1e-9).unwrap();
        let b = symplectic_basis(&x, 1e-9).unwrap();
        assert_eq!(b.kernel.len(), 1);
        assert!((b.kernel[0][2].abs() - 1.0).abs() < 1e-14);
        let (u, v) = &b.pairs[0];
        assert_eq!(u.as_slice(), &[1.0, 0.0, 0.0]);
        assert_eq!(v.as_slice(), &[0.0, 1.0, 0.0]);
        let set = max_compatible_set(&x, 1e-9).unwrap();
        assert_eq!(set.len(), 2);
        for a in &set {
            for b in &set {
                assert!(a.dot(&(x.entries() * b)).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn zero_matrix_gives_full_basis() {
        let x = XMatrix::from_entries(DMatrix::zeros(5, 5), 1e-9).unwrap();
        let set = max_compatible_set(&x, 1e-9).unwrap();
        assert_eq!(set.len(), 5);
        let m = DMatrix::from_columns(&set);
        assert!((m.transpose() * &m - DMatrix::identity(5, 5)).norm() < 1e-12);
    }
}
