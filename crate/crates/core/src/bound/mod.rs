//! The compatible-parameter bound.
//!
//! For structure constants `f` and a coefficient vector β, the commutation
//! condition between SLDs with coefficient vectors `α, α'` reads
//! `α·X^β·α' = 0` with `(X^β)_ab = Σ_c f_abc β_c`. At most
//! `♯L = ⌊r/2⌋ + (g − r)` independent vectors satisfy it pairwise, where
//! `r = rank X^β`. The β-space splits into strata `B_k` on which the rank is
//! constant; combining `♯L` with the stratum dimension gives the bound
//! `♯x ≤ max_k min(♯L(B_k), dim B_k)`.

mod symplectic;

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use symplectic::{max_compatible_set, symplectic_basis, SymplecticBasis};

use crate::algebra::{GeneratorSet, StructureConstants};
use crate::error::{Error, Result};
use crate::linalg::RMatrix;
use crate::model::Model;

/// Default relative singular-value threshold for ranks.
pub const RANK_TOL: f64 = 1e-9;

/// Seed for the random probes that find identically vanishing coefficients.
pub const VANISHING_PROBE_SEED: u64 = 0x5eed_0f1a;
pub const VANISHING_PROBES: usize = 64;

/// Antisymmetric `X^β` with its numerical rank.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct XMatrix {
    entries: RMatrix,
    rank: usize,
    singular_values: Vec<f64>,
    tol_used: f64,
    odd_rank_corrected: bool,
}

impl XMatrix {
    /// `X_ab = Σ_c f_abc β_c`; antisymmetric exactly by construction.
    pub fn new(f: &StructureConstants, beta: &[f64], rel_tol: f64) -> Result<Self> {
        let g = f.g();
        if beta.len() != g {
            return Err(Error::DimensionMismatch { what: "beta", expected: g, got: beta.len() });
        }
        let dev = f.antisymmetry_deviation();
        if dev > 1e-12 * f.max_abs().max(1.0) {
            return Err(Error::NotAntisymmetric(dev));
        }
        let mut x = RMatrix::zeros(g, g);
        for a in 0..g {
            for b in (a + 1)..g {
                let v: f64 = (0..g).map(|k| f.get(a, b, k) * beta[k]).sum();
                x[(a, b)] = v;
                x[(b, a)] = -v;
            }
        }
        Self::from_entries(x, rel_tol)
    }

    /// Wraps an antisymmetric matrix (checked to 1e-12 relative).
    pub fn from_entries(entries: RMatrix, rel_tol: f64) -> Result<Self> {
        let info = rank_antisymmetric(&entries, rel_tol)?;
        let g = entries.nrows();
        // exact antisymmetry from the upper triangle
        let entries = RMatrix::from_fn(g, g, |a, b| match a.cmp(&b) {
            std::cmp::Ordering::Less => entries[(a, b)],
            std::cmp::Ordering::Equal => 0.0,
            std::cmp::Ordering::Greater => -entries[(b, a)],
        });
        Ok(XMatrix {
            entries,
            rank: info.rank,
            singular_values: info.singular_values,
            tol_used: info.threshold,
            odd_rank_corrected: info.odd_corrected,
        })
    }

    pub fn g(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &RMatrix {
        &self.entries
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Descending.
    pub fn singular_values(&self) -> &[f64] {
        &self.singular_values
    }

    pub fn tol_used(&self) -> f64 {
        self.tol_used
    }

    pub fn odd_rank_corrected(&self) -> bool {
        self.odd_rank_corrected
    }

    pub fn sharp_l(&self) -> usize {
        sharp_l(self.g(), self.rank).expect("rank is even and <= g")
    }

    /// Orthonormal bases of the range (`rank` vectors) and kernel
    /// (`g − rank` vectors) from the SVD.
    pub fn range_and_kernel(&self) -> (Vec<DVector<f64>>, Vec<DVector<f64>>) {
        let g = self.g();
        if g == 0 {
            return (Vec::new(), Vec::new());
        }
        let svd = self.entries.clone().svd(false, true);
        let vt = svd.v_t.expect("requested V^T");
        let mut order: Vec<usize> = (0..g).collect();
        order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
        let rows: Vec<DVector<f64>> = order.iter().map(|&k| vt.row(k).transpose()).collect();
        let (range, kernel) = rows.split_at(self.rank);
        (range.to_vec(), kernel.to_vec())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RankInfo {
    pub rank: usize,
    pub singular_values: Vec<f64>,
    pub threshold: f64,
    pub odd_corrected: bool,
}

/// Even numerical rank of an antisymmetric matrix.
///
/// Singular values above `rel_tol · max(σ_max, 1e-300)` are counted; an odd
/// count is decremented with a warning since real antisymmetric matrices
/// have even rank.
pub fn rank_antisymmetric(x: &RMatrix, rel_tol: f64) -> Result<RankInfo> {
    if x.nrows() != x.ncols() {
        return Err(Error::NotSquare(x.nrows(), x.ncols()));
    }
    let dev = (x + x.transpose()).amax();
    if dev > 1e-12 * x.amax().max(1.0) {
        return Err(Error::NotAntisymmetric(dev));
    }
    let singular_values = crate::linalg::singular_values(x);
    let threshold = rel_tol * singular_values.first().copied().unwrap_or(0.0).max(1e-300);
    let count = singular_values.iter().filter(|&&s| s > threshold).count();
    let odd_corrected = count % 2 == 1;
    if odd_corrected {
        log::warn!("odd singular-value count {count} above {threshold:e}; rounding rank down");
    }
    Ok(RankInfo { rank: count - count % 2, singular_values, threshold, odd_corrected })
}

/// `⌊rank/2⌋ + (g − rank)`.
pub fn sharp_l(g: usize, rank: usize) -> Result<usize> {
    if rank > g || rank % 2 == 1 {
        return Err(Error::RankOutOfRange { rank, g });
    }
    Ok(rank / 2 + (g - rank))
}

/// Coefficients of `det(λI − X)`, highest power first.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CharPoly {
    pub coeffs: Vec<f64>,
    /// Largest coefficient that must vanish for an antisymmetric matrix
    /// (those of `λ^{g−j}` with odd `j`).
    pub pattern_residual: f64,
}

impl CharPoly {
    pub fn g(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficient `J_k` of `λ^k`.
    pub fn j(&self, k: usize) -> f64 {
        self.coeffs[self.g() - k]
    }
}

/// Faddeev–LeVerrier: `M_k = X M_{k−1} + c_{g−k+1} I`,
/// `c_{g−k} = −tr(X M_k)/k`.
pub fn char_poly_coeffs(x: &RMatrix) -> CharPoly {
    let g = x.nrows();
    let mut coeffs = vec![0.0; g + 1];
    coeffs[0] = 1.0;
    let mut m = RMatrix::zeros(g, g);
    for k in 1..=g {
        m = x * &m;
        for d in 0..g {
            m[(d, d)] += coeffs[k - 1];
        }
        let xm = x * &m;
        coeffs[k] = -xm.trace() / k as f64;
    }
    let pattern_residual = coeffs.iter().skip(1).step_by(2).fold(0.0f64, |a, v| a.max(v.abs()));
    CharPoly { coeffs, pattern_residual }
}

/// Result of matching a vanishing pattern against the strata.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StratumClass {
    pub index: usize,
    /// `true` where the corresponding `J_k` is nonzero.
    pub pattern: Vec<bool>,
    /// A zero appeared before a nonzero; `index` is then the nearest stratum.
    pub off_pattern: bool,
}

/// Classifies `(k, J_k)` values ordered by decreasing k. Stratum `B_j` has
/// exactly the first `j` values nonzero.
pub fn classify_stratum(j_values: &[(usize, f64)], tol: f64) -> StratumClass {
    let pattern: Vec<bool> = j_values.iter().map(|(_, v)| v.abs() > tol).collect();
    let leading = pattern.iter().take_while(|&&b| b).count();
    let off_pattern = pattern[leading..].iter().any(|&b| b);
    let index = if off_pattern {
        (0..=pattern.len())
            .min_by_key(|&j| pattern.iter().enumerate().filter(|&(i, &b)| b != (i < j)).count())
            .unwrap_or(0)
    } else {
        leading
    };
    StratumClass { index, pattern, off_pattern }
}

/// The characteristic coefficients `J_k` that are not identically zero for
/// an algebra, in decreasing k.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvariantOrder {
    pub g: usize,
    pub ks: Vec<usize>,
}

impl InvariantOrder {
    /// Probes random β; `J_k` is identically zero when
    /// `|J_k| <= tol · ‖X‖_F^{g−k}` at every probe.
    pub fn detect(f: &StructureConstants, tol: f64) -> Self {
        let g = f.g();
        let mut rng = ChaCha8Rng::seed_from_u64(VANISHING_PROBE_SEED);
        let mut alive = vec![false; g + 1];
        for _ in 0..VANISHING_PROBES {
            let beta: Vec<f64> = (0..g).map(|_| rng.sample(StandardNormal)).collect();
            let x = XMatrix::new(f, &beta, RANK_TOL).expect("antisymmetric f").entries;
            let cp = char_poly_coeffs(&x);
            let scale = x.norm();
            for (k, live) in alive.iter_mut().enumerate().take(g) {
                if cp.j(k).abs() > tol * scale.powi((g - k) as i32) {
                    *live = true;
                }
            }
        }
        let ks = (0..g).rev().filter(|&k| alive[k]).collect();
        InvariantOrder { g, ks }
    }

    pub fn n_strata(&self) -> usize {
        self.ks.len() + 1
    }

    /// rank X on `B_j`: the last nonvanishing `J_k` leaves `λ^k` as the
    /// kernel factor.
    pub fn stratum_rank(&self, index: usize) -> usize {
        if index == 0 {
            0
        } else {
            self.g - self.ks[index - 1]
        }
    }

    /// `J_k / ‖X‖_F^{g−k}` for the tracked k.
    pub fn scaled_values(&self, x: &RMatrix) -> Vec<(usize, f64)> {
        let cp = char_poly_coeffs(x);
        let scale = x.norm();
        self.ks
            .iter()
            .map(|&k| {
                let v = if scale == 0.0 { 0.0 } else { cp.j(k) / scale.powi((self.g - k) as i32) };
                (k, v)
            })
            .collect()
    }

    pub fn classify(&self, x: &RMatrix, tol: f64) -> StratumClass {
        classify_stratum(&self.scaled_values(x), tol)
    }
}

/// Declared or preset facts about one stratum.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StratumSpec {
    pub index: usize,
    pub expected_rank: Option<usize>,
    pub dimension: Option<usize>,
    #[serde(default)]
    pub sample_points: Vec<Vec<f64>>,
}

impl StratumSpec {
    /// Nonvanishing pattern over `n` ordered invariants.
    pub fn predicate(&self, n: usize) -> Vec<bool> {
        (0..n).map(|i| i < self.index).collect()
    }
}

/// Stratum dimensions worked out analytically for the built-in algebras.
pub fn preset_dimensions(name: &str, n_hilbert: usize) -> Option<&'static [usize]> {
    match (name, n_hilbert) {
        ("pauli", 2) | ("gellmann", 2) => Some(&[0, 3]),
        ("xstate2q", 4) => Some(&[1, 4, 7]),
        _ => None,
    }
}

/// Strata of an algebra with ranks from the invariant order and dimensions
/// from the preset table when one applies.
pub fn default_strata(gs: &GeneratorSet, order: &InvariantOrder) -> Vec<StratumSpec> {
    let dims = gs
        .name()
        .and_then(|n| preset_dimensions(n, gs.dim_hilbert()))
        .filter(|d| d.len() == order.n_strata());
    (0..order.n_strata())
        .map(|index| StratumSpec {
            index,
            expected_rank: Some(order.stratum_rank(index)),
            dimension: dims.map(|d| d[index]),
            sample_points: Vec::new(),
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StratumBound {
    pub index: usize,
    pub rank: usize,
    pub sharp_l: usize,
    /// Maximal number of independent state derivatives, `dim B_k`.
    pub sharp_derivatives: usize,
    pub bound: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub g: usize,
    pub strata: Vec<StratumBound>,
    pub overall: usize,
    pub commutative: bool,
}

/// `♯x ≤ max_k min(♯L(B_k), dim B_k)`.
pub fn sharp_x_bound(g: usize, strata: &[StratumSpec], commutative: bool) -> Result<BoundReport> {
    let missing: Vec<usize> = strata
        .iter()
        .filter(|s| s.dimension.is_none() || s.expected_rank.is_none())
        .map(|s| s.index)
        .collect();
    if !missing.is_empty() {
        return Err(Error::MissingStrata(missing));
    }
    let mut rows = Vec::with_capacity(strata.len());
    for s in strata {
        let rank = s.expected_rank.expect("checked");
        let dim = s.dimension.expect("checked");
        let sl = sharp_l(g, rank)?;
        rows.push(StratumBound { index: s.index, rank, sharp_l: sl, sharp_derivatives: dim, bound: sl.min(dim) });
    }
    let overall = rows.iter().map(|r| r.bound).max().unwrap_or(0);
    Ok(BoundReport { g, strata: rows, overall, commutative })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FullStateReport {
    pub commutative: bool,
    pub saturable_full_state: bool,
    pub explanation: String,
}

/// Estimating all g coefficients at the quantum limit needs `♯x = g`, which
/// needs `B_0` to be g-dimensional, i.e. a commutative algebra.
pub fn full_state_check(gs: &GeneratorSet, tol: f64) -> FullStateReport {
    let commutative = gs.is_commutative(tol);
    let g = gs.g();
    let explanation = if commutative {
        format!("all structure constants vanish: X^β = 0 everywhere, B_0 is all of R^{g}, so ♯x = {g} is not excluded")
    } else {
        format!(
            "max |f_abc| = {:.3e} > 0: B_0 has dimension < {g} and every other stratum has ♯L < {g}, so ♯x < g",
            gs.f().max_abs()
        )
    };
    FullStateReport { commutative, saturable_full_state: commutative, explanation }
}

/// An axis-aligned box in parameter space.
pub type Region = Vec<(f64, f64)>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanSample {
    pub x: Vec<f64>,
    pub beta: Vec<f64>,
    pub rank: usize,
    pub stratum: usize,
    pub off_pattern: bool,
    pub sharp_l: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub seed: u64,
    pub samples: Vec<ScanSample>,
    pub rank_histogram: BTreeMap<usize, usize>,
    pub stratum_histogram: BTreeMap<usize, usize>,
    /// The scanned encode space meets more than one rank.
    pub mixed_ranks: bool,
}

/// Uniform seeded sampling of `region`; per-sample rank and stratum.
pub fn stratum_scan(model: &Model, region: &[(f64, f64)], n_samples: usize, seed: u64, rank_tol: f64, vanish_tol: f64) -> Result<ScanReport> {
    if n_samples == 0 {
        return Err(Error::InvalidInput("n_samples must be at least 1".into()));
    }
    if region.len() != model.m() {
        return Err(Error::DimensionMismatch { what: "region", expected: model.m(), got: region.len() });
    }
    if region.iter().any(|(lo, hi)| !lo.is_finite() || !hi.is_finite() || lo > hi) {
        return Err(Error::InvalidInput("region bounds must be finite with lo <= hi".into()));
    }
    let f = model.generator_set().f();
    let order = InvariantOrder::detect(f, vanish_tol);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<Vec<f64>> = (0..n_samples)
        .map(|_| region.iter().map(|&(lo, hi)| lo + (hi - lo) * rng.random::<f64>()).collect())
        .collect();
    let samples = points
        .into_par_iter()
        .map(|x| {
            let beta = model.eval_beta(&x).map_err(|e| Error::InvalidInput(format!("at x = {x:?}: {e}")))?;
            let xm = XMatrix::new(f, &beta, rank_tol)?;
            let class = order.classify(xm.entries(), vanish_tol);
            Ok(ScanSample {
                rank: xm.rank(),
                sharp_l: xm.sharp_l(),
                stratum: class.index,
                off_pattern: class.off_pattern,
                x,
                beta,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rank_histogram = BTreeMap::new();
    let mut stratum_histogram = BTreeMap::new();
    for s in &samples {
        *rank_histogram.entry(s.rank).or_insert(0) += 1;
        *stratum_histogram.entry(s.stratum).or_insert(0) += 1;
    }
    Ok(ScanReport { seed, mixed_ranks: rank_histogram.len() > 1, samples, rank_histogram, stratum_histogram })
}

/// Convenience for tests and reports: `DMatrix` from nested rows.
pub fn matrix_from_rows(rows: &[Vec<f64>]) -> RMatrix {
    let n = rows.len();
    let m = rows.first().map_or(0, Vec::len);
    DMatrix::from_fn(n, m, |i, j| rows[i][j])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::make_preset;

    #[test]
    fn qubit_x_matrix_with_levi_civita() {
        let x = XMatrix::new(&StructureConstants::levi_civita(), &[0.0, 0.0, 0.7], RANK_TOL).unwrap();
        let want = matrix_from_rows(&[vec![0.0, 0.7, 0.0], vec![-0.7, 0.0, 0.0], vec![0.0, 0.0, 0.0]]);
        assert_eq!(x.entries(), &want);
        assert_eq!(x.rank(), 2);
        let general = XMatrix::new(&StructureConstants::levi_civita(), &[0.1, 0.2, 0.3], RANK_TOL).unwrap();
        let want = matrix_from_rows(&[vec![0.0, 0.3, -0.2], vec![-0.3, 0.0, 0.1], vec![0.2, -0.1, 0.0]]);
        assert!((general.entries() - want).amax() < 1e-16);
    }

    #[test]
    fn zero_beta() {
        let gs = make_preset("xstate2q", 4).unwrap();
        let x = XMatrix::new(gs.f(), &[0.0; 7], RANK_TOL).unwrap();
        assert_eq!(x.rank(), 0);
        assert_eq!(x.entries().amax(), 0.0);
    }

    #[test]
    fn rank_examples() {
        let x = XMatrix::new(&StructureConstants::levi_civita(), &[0.6, 0.0, 0.8], RANK_TOL).unwrap();
        assert_eq!(x.rank(), 2);
        let gs = make_preset("xstate2q", 4).unwrap();
        let x = XMatrix::new(gs.f(), &[0.3, -0.7, 0.2, 0.5, -0.1, 0.4, 0.6], RANK_TOL).unwrap();
        assert_eq!(x.rank(), 4);
        assert!(matches!(
            rank_antisymmetric(&matrix_from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]), RANK_TOL),
            Err(Error::NotAntisymmetric(_))
        ));
    }

    #[test]
    fn odd_rank_is_rounded_down() {
        // a singular value straddling the threshold cannot occur for an exact
        // antisymmetric matrix; emulate with a threshold between the pair
        let mut x = RMatrix::zeros(4, 4);
        x[(0, 1)] = 1.0;
        x[(1, 0)] = -1.0;
        x[(2, 3)] = 1e-3;
        x[(3, 2)] = -1e-3;
        let info = rank_antisymmetric(&x, 1e-2).unwrap();
        assert_eq!(info.rank, 2);
        assert!(!info.odd_corrected);
    }

    #[test]
    fn sharp_l_values() {
        assert_eq!(sharp_l(3, 2).unwrap(), 2);
        assert_eq!(sharp_l(7, 2).unwrap(), 6);
        assert_eq!(sharp_l(7, 4).unwrap(), 5);
        assert_eq!(sharp_l(5, 0).unwrap(), 5);
        assert!(matches!(sharp_l(3, 4), Err(Error::RankOutOfRange { .. })));
        assert!(matches!(sharp_l(3, 1), Err(Error::RankOutOfRange { .. })));
    }

    #[test]
    fn qubit_char_poly() {
        let n = [0.3, -0.4, 1.2];
        let x = XMatrix::new(&StructureConstants::levi_civita(), &n, RANK_TOL).unwrap();
        let cp = char_poly_coeffs(x.entries());
        let n2: f64 = n.iter().map(|v| v * v).sum();
        assert_eq!(cp.coeffs[0], 1.0);
        assert!(cp.coeffs[1].abs() < 1e-15);
        assert!((cp.coeffs[2] - n2).abs() < 1e-14);
        assert!(cp.coeffs[3].abs() < 1e-15);
        assert!(cp.pattern_residual < 1e-15);
    }

    #[test]
    fn invariant_orders() {
        let q = InvariantOrder::detect(make_preset("pauli", 2).unwrap().f(), 1e-9);
        assert_eq!(q.ks, vec![1]);
        let x = InvariantOrder::detect(make_preset("xstate2q", 4).unwrap().f(), 1e-9);
        assert_eq!(x.ks, vec![5, 3]);
        assert_eq!((x.stratum_rank(0), x.stratum_rank(1), x.stratum_rank(2)), (0, 2, 4));
        let c = InvariantOrder::detect(make_preset("xstate2q", 4).unwrap().subset(&[0, 1, 2]).unwrap().f(), 1e-9);
        assert!(c.ks.is_empty());
    }

    #[test]
    fn xstate_strata() {
        let gs = make_preset("xstate2q", 4).unwrap();
        let order = InvariantOrder::detect(gs.f(), 1e-9);
        let classify = |b: &[f64]| order.classify(XMatrix::new(gs.f(), b, RANK_TOL).unwrap().entries(), 1e-9);
        assert_eq!(classify(&[0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0]).index, 0);
        let b1 = classify(&[1.0, -1.0, 0.0, 1.0, 1.0, -1.0, 1.0]);
        assert_eq!((b1.index, b1.off_pattern), (1, false));
        assert_eq!(classify(&[0.3, -0.7, 0.2, 0.5, -0.1, 0.4, 0.6]).index, 2);
    }

    #[test]
    fn off_pattern_classification() {
        let c = classify_stratum(&[(5, 0.0), (3, 1.0)], 1e-9);
        assert!(c.off_pattern);
        assert_eq!(c.pattern, vec![false, true]);
        let c = classify_stratum(&[(5, 2.0), (3, 0.0)], 1e-9);
        assert_eq!((c.index, c.off_pattern), (1, false));
        assert_eq!(classify_stratum(&[], 1e-9).index, 0);
    }

    #[test]
    fn bound_tables() {
        let spec = |index, rank, dim| StratumSpec { index, expected_rank: Some(rank), dimension: Some(dim), sample_points: vec![] };
        let q = sharp_x_bound(3, &[spec(0, 0, 0), spec(1, 2, 3)], false).unwrap();
        assert_eq!(q.strata.iter().map(|s| s.bound).collect::<Vec<_>>(), vec![0, 2]);
        assert_eq!(q.overall, 2);
        let x = sharp_x_bound(7, &[spec(0, 0, 1), spec(1, 2, 4), spec(2, 4, 7)], false).unwrap();
        assert_eq!(x.strata.iter().map(|s| s.bound).collect::<Vec<_>>(), vec![1, 4, 5]);
        assert_eq!(x.overall, 5);
        assert_eq!(sharp_x_bound(4, &[spec(0, 0, 4)], true).unwrap().overall, 4);
        let missing = StratumSpec { index: 1, expected_rank: Some(2), dimension: None, sample_points: vec![] };
        assert!(matches!(sharp_x_bound(3, &[spec(0, 0, 0), missing], false), Err(Error::MissingStrata(v)) if v == vec![1]));
    }

    #[test]
    fn preset_default_strata() {
        let gs = make_preset("xstate2q", 4).unwrap();
        let order = InvariantOrder::detect(gs.f(), 1e-9);
        let strata = default_strata(&gs, &order);
        let r = sharp_x_bound(gs.g(), &strata, false).unwrap();
        assert_eq!(r.overall, 5);
        let su3 = make_preset("gellmann", 3).unwrap();
        let strata = default_strata(&su3, &InvariantOrder::detect(su3.f(), 1e-9));
        assert!(strata.iter().all(|s| s.dimension.is_none()));
    }

    #[test]
    fn full_state() {
        assert!(!full_state_check(&make_preset("pauli", 2).unwrap(), 1e-10).saturable_full_state);
        assert!(!full_state_check(&make_preset("xstate2q", 4).unwrap(), 1e-10).saturable_full_state);
        let diag = make_preset("xstate2q", 4).unwrap().subset(&[0, 1, 2]).unwrap();
        assert!(full_state_check(&diag, 1e-10).saturable_full_state);
    }
}
