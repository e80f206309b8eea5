//! Validated probability vectors, norms, distances and likelihood-ratio
//! orderings.
//!
//! Every vector entering the library passes through [`ProbVec::validate`]:
//! entries are clamped at zero (within tolerance), the sum is checked against
//! 1 and the vector is renormalized. Downstream code can then rely on
//! non-negativity and unit mass up to a few ulps.

use crate::{math, Error, ExtReal, Result, TOL_NORM};
use alloc::vec::Vec;

/// A finite probability vector: non-negative entries summing to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbVec {
    entries: Vec<f64>,
}

impl ProbVec {
    /// Validate `raw` against tolerance `tol`: entries in `[-tol, 0)` are
    /// clamped to zero, the sum must lie within `tol` of 1, and the result is
    /// renormalized to sum exactly 1.
    pub fn validate(raw: &[f64], tol: f64) -> Result<Self> {
        if raw.is_empty() {
            return Err(Error::Empty);
        }
        let mut entries = Vec::with_capacity(raw.len());
        for (index, &v) in raw.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite { index });
            }
            if v < -tol {
                return Err(Error::NegativeEntry { index, value: v });
            }
            entries.push(if v < 0.0 { 0.0 } else { v });
        }
        let sum: f64 = entries.iter().sum();
        if (sum - 1.0).abs() > tol {
            return Err(Error::NotNormalized { sum });
        }
        // Rescaling a sum that is already 1 up to rounding would only inject
        // noise into otherwise exact entries.
        if (sum - 1.0).abs() > 4e-16 {
            for v in &mut entries {
                *v /= sum;
            }
        }
        Ok(ProbVec { entries })
    }

    /// Validate with the default tolerance [`TOL_NORM`].
    pub fn new(raw: impl Into<Vec<f64>>) -> Result<Self> {
        let raw = raw.into();
        Self::validate(&raw, TOL_NORM)
    }

    /// The uniform distribution on `d` outcomes.
    pub fn uniform(d: usize) -> Self {
        assert!(d >= 1, "dimension must be positive");
        ProbVec {
            entries: alloc::vec![1.0 / d as f64; d],
        }
    }

    /// The point mass on the first outcome of `d`.
    pub fn point_mass(d: usize) -> Self {
        assert!(d >= 1, "dimension must be positive");
        let mut entries = alloc::vec![0.0; d];
        entries[0] = 1.0;
        ProbVec { entries }
    }

    /// Construct from entries known (by the caller's arithmetic) to be a
    /// probability vector. Cheaper than [`validate`](Self::validate) and does
    /// not renormalize; debug builds still check the invariants.
    pub(crate) fn from_raw(entries: Vec<f64>) -> Self {
        debug_assert!(!entries.is_empty());
        debug_assert!(entries.iter().all(|v| *v >= -1e-12));
        debug_assert!((entries.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        ProbVec { entries }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.entries
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.entries
    }

    /// Whether the entries are already in non-increasing order (with slack
    /// for float noise).
    pub fn is_sorted_desc(&self) -> bool {
        self.entries.windows(2).all(|w| w[0] >= w[1] - 1e-12)
    }
}

impl core::ops::Index<usize> for ProbVec {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.entries[i]
    }
}

/// A subnormalized vector: non-negative entries with total mass at most 1.
#[derive(Debug, Clone, PartialEq)]
pub struct SubProbVec {
    entries: Vec<f64>,
}

impl SubProbVec {
    pub fn new(raw: impl Into<Vec<f64>>) -> Result<Self> {
        let entries: Vec<f64> = raw.into();
        if entries.is_empty() {
            return Err(Error::Empty);
        }
        for (index, &v) in entries.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite { index });
            }
            if v < -TOL_NORM {
                return Err(Error::NegativeEntry { index, value: v });
            }
        }
        let sum: f64 = entries.iter().sum();
        if sum > 1.0 + TOL_NORM {
            return Err(Error::NotNormalized { sum });
        }
        let entries = entries.into_iter().map(|v| v.max(0.0)).collect();
        Ok(SubProbVec { entries })
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.entries
    }

    /// Total mass of the vector.
    pub fn mass(&self) -> f64 {
        self.entries.iter().sum()
    }
}

impl From<ProbVec> for SubProbVec {
    fn from(p: ProbVec) -> Self {
        SubProbVec { entries: p.entries }
    }
}

/// Sort the entries of `p` in non-increasing order.
///
/// Returns the sorted vector together with the permutation mapping sorted
/// positions to original indices. Ties keep the original index order.
pub fn sort_desc(p: &ProbVec) -> (ProbVec, Vec<usize>) {
    let mut perm: Vec<usize> = (0..p.dim()).collect();
    perm.sort_by(|&i, &j| p[j].partial_cmp(&p[i]).unwrap().then(i.cmp(&j)));
    let entries = perm.iter().map(|&i| p[i]).collect();
    (ProbVec { entries }, perm)
}

/// Ky-Fan norm `‖p‖_(k)`: the sum of the `k` largest entries.
pub fn ky_fan(p: &ProbVec, k: usize) -> Result<f64> {
    if k < 1 || k > p.dim() {
        return Err(Error::IndexOutOfRange {
            index: k,
            dim: p.dim(),
        });
    }
    let (sorted, _) = sort_desc(p);
    Ok(sorted.as_slice()[..k].iter().sum())
}

/// Total-variation distance `½ Σ |p_x − q_x|`, in `[0, 1]`.
pub fn tv_distance(p: &ProbVec, q: &ProbVec) -> Result<f64> {
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch {
            left: p.dim(),
            right: q.dim(),
        });
    }
    let sum: f64 = p
        .as_slice()
        .iter()
        .zip(q.as_slice())
        .map(|(&a, &b)| math::abs(a - b))
        .sum();
    Ok(0.5 * sum)
}

/// The positive and negative part masses `(‖x‖₊, ‖x‖₋)` of a signed vector.
pub fn plus_minus_mass(x: &[f64]) -> (f64, f64) {
    let mut plus = 0.0;
    let mut minus = 0.0;
    for &v in x {
        if v > 0.0 {
            plus += v;
        } else {
            minus -= v;
        }
    }
    (plus, minus)
}

/// A pair `(p, q)` with indices arranged by non-increasing likelihood ratio
/// `r_x = p_x / q_x`.
///
/// Conventions: indices with `q_x = 0 < p_x` carry ratio `+∞` and come first;
/// indices with `p_x = q_x = 0` carry ratio 0 and are inert. Ties are broken
/// by ascending original index.
#[derive(Debug, Clone)]
pub struct PairOrdering {
    pub p: ProbVec,
    pub q: ProbVec,
    /// `perm[i]` is the original index occupying sorted position `i`.
    pub perm: Vec<usize>,
    /// Ratios read along `perm` (non-increasing).
    pub ratios: Vec<ExtReal>,
}

impl PairOrdering {
    pub fn dim(&self) -> usize {
        self.p.dim()
    }

    /// `p` entry at sorted position `i`.
    pub fn p_at(&self, i: usize) -> f64 {
        self.p[self.perm[i]]
    }

    /// `q` entry at sorted position `i`.
    pub fn q_at(&self, i: usize) -> f64 {
        self.q[self.perm[i]]
    }
}

fn ratio_of(p: f64, q: f64) -> ExtReal {
    if q > 0.0 {
        ExtReal::Finite(p / q)
    } else if p > 0.0 {
        ExtReal::PosInf
    } else {
        ExtReal::Finite(0.0)
    }
}

/// Order the indices of `(p, q)` by non-increasing likelihood ratio.
pub fn ratio_order(p: &ProbVec, q: &ProbVec) -> Result<PairOrdering> {
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch {
            left: p.dim(),
            right: q.dim(),
        });
    }
    let raw: Vec<ExtReal> = (0..p.dim()).map(|x| ratio_of(p[x], q[x])).collect();
    let mut perm: Vec<usize> = (0..p.dim()).collect();
    perm.sort_by(|&i, &j| raw[j].partial_cmp(&raw[i]).unwrap().then(i.cmp(&j)));
    let ratios = perm.iter().map(|&i| raw[i]).collect();
    Ok(PairOrdering {
        p: p.clone(),
        q: q.clone(),
        perm,
        ratios,
    })
}
