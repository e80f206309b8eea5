//! Majorization and relative-majorization order tests.
//!
//! `p ≻ q` is decided by comparing Ky-Fan partial sums. Relative
//! majorization of dichotomies, `(p₁, q₁) ≻ (p₂, q₂)`, is decided by the
//! dichotomy criterion: the hinge curve `t ↦ Σ_x (p_x − t q_x)₊` of the first
//! pair must dominate that of the second at every breakpoint, and the `t → ∞`
//! limits (mass outside the reference support) must compare the same way.
//! A small feasibility LP searching for an explicit column-stochastic witness
//! is kept as an independent oracle.

use crate::prob::sort_desc;
use crate::{math, Error, ProbVec, Result, ORDER_SLACK};
use alloc::vec;
use alloc::vec::Vec;

/// A column-stochastic matrix: every entry in `[0, 1]`, columns sum to 1.
#[derive(Debug, Clone)]
pub struct StochasticMatrix {
    entries: Vec<f64>, // row-major, rows × cols
    rows: usize,
    cols: usize,
}

impl StochasticMatrix {
    pub fn new(entries: Vec<f64>, rows: usize, cols: usize) -> Result<Self> {
        if entries.len() != rows * cols || rows == 0 || cols == 0 {
            return Err(Error::DimensionMismatch {
                left: entries.len(),
                right: rows * cols,
            });
        }
        for (index, &v) in entries.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite { index });
            }
            if !(-1e-9..=1.0 + 1e-9).contains(&v) {
                return Err(Error::NegativeEntry { index, value: v });
            }
        }
        for c in 0..cols {
            let col_sum: f64 = (0..rows).map(|r| entries[r * cols + c]).sum();
            if (col_sum - 1.0).abs() > 1e-9 {
                return Err(Error::NotNormalized { sum: col_sum });
            }
        }
        Ok(StochasticMatrix {
            entries,
            rows,
            cols,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Apply the matrix to a probability vector.
    pub fn apply(&self, p: &ProbVec) -> Result<ProbVec> {
        if p.dim() != self.cols {
            return Err(Error::DimensionMismatch {
                left: self.cols,
                right: p.dim(),
            });
        }
        let mut out = vec![0.0; self.rows];
        for (r, o) in out.iter_mut().enumerate() {
            *o = (0..self.cols)
                .map(|c| self.entries[r * self.cols + c] * p[c])
                .sum();
        }
        ProbVec::validate(&out, 1e-6)
    }
}

/// A reference distribution with rational entries `k_x / k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalRef {
    numerators: Vec<u64>,
    denominator: u64,
}

impl RationalRef {
    pub fn new(numerators: Vec<u64>, denominator: u64) -> Result<Self> {
        if numerators.is_empty() {
            return Err(Error::Empty);
        }
        if numerators.contains(&0) {
            return Err(Error::ConstraintViolated {
                reason: "rational reference needs positive numerators",
            });
        }
        let sum: u64 = numerators.iter().sum();
        if sum != denominator {
            return Err(Error::NotNormalized {
                sum: sum as f64 / denominator as f64,
            });
        }
        Ok(RationalRef {
            numerators,
            denominator,
        })
    }

    pub fn numerators(&self) -> &[u64] {
        &self.numerators
    }

    pub fn denominator(&self) -> u64 {
        self.denominator
    }

    pub fn dim(&self) -> usize {
        self.numerators.len()
    }

    /// The reference as a probability vector.
    pub fn to_prob(&self) -> ProbVec {
        let k = self.denominator as f64;
        ProbVec::from_raw(self.numerators.iter().map(|&n| n as f64 / k).collect())
    }
}

/// Whether `p` majorizes `q`. Vectors of unequal dimension are compared by
/// padding the shorter with zeros.
pub fn majorizes(p: &ProbVec, q: &ProbVec) -> bool {
    let (ps, _) = sort_desc(p);
    let (qs, _) = sort_desc(q);
    let d = ps.dim().max(qs.dim());
    let mut sp = 0.0;
    let mut sq = 0.0;
    for k in 0..d {
        sp += ps.as_slice().get(k).copied().unwrap_or(0.0);
        sq += qs.as_slice().get(k).copied().unwrap_or(0.0);
        if sp < sq - ORDER_SLACK {
            return false;
        }
    }
    true
}

/// Hinge value `Σ_x max{p_x − t q_x, 0}`: piecewise linear, convex and
/// non-increasing in `t`, with `hinge(p, q, 0) = 1`.
pub fn hinge(p: &ProbVec, q: &ProbVec, t: f64) -> Result<f64> {
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch {
            left: p.dim(),
            right: q.dim(),
        });
    }
    Ok(p.as_slice()
        .iter()
        .zip(q.as_slice())
        .map(|(&a, &b)| (a - t * b).max(0.0))
        .sum())
}

fn finite_ratios(p: &ProbVec, q: &ProbVec) -> Vec<f64> {
    p.as_slice()
        .iter()
        .zip(q.as_slice())
        .filter(|(_, &b)| b > 0.0)
        .map(|(&a, &b)| a / b)
        .collect()
}

fn mass_outside_support(p: &ProbVec, q: &ProbVec) -> f64 {
    p.as_slice()
        .iter()
        .zip(q.as_slice())
        .filter(|(_, &b)| b == 0.0)
        .map(|(&a, _)| a)
        .sum()
}

/// Whether `(pair1.0, pair1.1)` relatively majorizes `(pair2.0, pair2.1)`,
/// i.e. a single column-stochastic map sends the first pair to the second.
///
/// Decided by hinge-curve dominance at the union of both pairs' likelihood
/// ratios together with the `t → ∞` tails. Slack `1e-10`.
pub fn relatively_majorizes(
    pair1: (&ProbVec, &ProbVec),
    pair2: (&ProbVec, &ProbVec),
) -> Result<bool> {
    let (p1, q1) = pair1;
    let (p2, q2) = pair2;
    if p1.dim() != q1.dim() {
        return Err(Error::DimensionMismatch {
            left: p1.dim(),
            right: q1.dim(),
        });
    }
    if p2.dim() != q2.dim() {
        return Err(Error::DimensionMismatch {
            left: p2.dim(),
            right: q2.dim(),
        });
    }
    const SLACK: f64 = 1e-10;

    // t → ∞ limits: mass of p outside supp(q).
    if mass_outside_support(p1, q1) < mass_outside_support(p2, q2) - SLACK {
        return Ok(false);
    }

    let mut breakpoints = finite_ratios(p1, q1);
    breakpoints.extend(finite_ratios(p2, q2));
    breakpoints.push(0.0);
    for t in breakpoints {
        if hinge(p1, q1, t)? < hinge(p2, q2, t)? - SLACK {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Maximum dimension accepted by [`relmaj_lp_oracle`].
pub const LP_ORACLE_MAX_DIM: usize = 8;

/// Independent oracle for [`relatively_majorizes`]: decide feasibility of the
/// defining linear system `E p₁ = p₂`, `E q₁ = q₂` with `E` column-stochastic
/// and non-negative, by a phase-1 simplex. Dimensions are capped at
/// [`LP_ORACLE_MAX_DIM`].
pub fn relmaj_lp_oracle(pair1: (&ProbVec, &ProbVec), pair2: (&ProbVec, &ProbVec)) -> Result<bool> {
    let (p1, q1) = pair1;
    let (p2, q2) = pair2;
    if p1.dim() != q1.dim() {
        return Err(Error::DimensionMismatch {
            left: p1.dim(),
            right: q1.dim(),
        });
    }
    if p2.dim() != q2.dim() {
        return Err(Error::DimensionMismatch {
            left: p2.dim(),
            right: q2.dim(),
        });
    }
    let d = p1.dim();
    let dp = p2.dim();
    if d > LP_ORACLE_MAX_DIM {
        return Err(Error::OracleScaleExceeded {
            dim: d,
            max: LP_ORACLE_MAX_DIM,
        });
    }
    if dp > LP_ORACLE_MAX_DIM {
        return Err(Error::OracleScaleExceeded {
            dim: dp,
            max: LP_ORACLE_MAX_DIM,
        });
    }

    // Variables E[i][j] (i < dp rows, j < d cols), flattened as i * d + j.
    // Constraints: column sums (d rows), E p1 = p2 (dp rows), E q1 = q2 (dp rows).
    let n = d * dp;
    let m = d + 2 * dp;
    let mut a = vec![vec![0.0f64; n]; m];
    let mut b = vec![0.0f64; m];
    for j in 0..d {
        for i in 0..dp {
            a[j][i * d + j] = 1.0;
        }
        b[j] = 1.0;
    }
    for i in 0..dp {
        for j in 0..d {
            a[d + i][i * d + j] = p1[j];
            a[d + dp + i][i * d + j] = q1[j];
        }
        b[d + i] = p2[i];
        b[d + dp + i] = q2[i];
    }
    let residual = phase1_simplex(&a, &b);
    Ok(residual <= 1e-8)
}

/// Minimize the total artificial-variable mass of `Ax = b, x ≥ 0` (all
/// `b ≥ 0`). Returns the optimum; 0 means the system is feasible. Bland's
/// rule guarantees termination.
#[allow(clippy::needless_range_loop)] // tableau index arithmetic reads better explicitly
fn phase1_simplex(a: &[Vec<f64>], b: &[f64]) -> f64 {
    let m = a.len();
    let n = a[0].len();
    let total = n + m; // artificials appended after the real variables

    // Tableau rows: m constraint rows + objective row; columns: total + rhs.
    let mut t = vec![vec![0.0f64; total + 1]; m + 1];
    for i in 0..m {
        for j in 0..n {
            t[i][j] = a[i][j];
        }
        t[i][n + i] = 1.0;
        t[i][total] = b[i].max(0.0);
    }
    // Objective: minimize sum of artificials; expressed in terms of the
    // non-basic variables by subtracting each constraint row.
    for j in 0..=total {
        t[m][j] = -(0..m).map(|i| t[i][j]).sum::<f64>();
    }
    for i in 0..m {
        t[m][n + i] = 0.0;
    }
    let mut basis: Vec<usize> = (n..total).collect();

    const EPS: f64 = 1e-11;
    // Bland: entering variable = smallest index with negative reduced cost.
    while let Some(enter) = (0..total).find(|&j| t[m][j] < -EPS) {
        // Leaving row: minimum ratio, ties by smallest basis index (Bland).
        let mut leave: Option<usize> = None;
        let mut best = f64::INFINITY;
        for i in 0..m {
            if t[i][enter] > EPS {
                let ratio = t[i][total] / t[i][enter];
                if ratio < best - EPS
                    || (math::abs(ratio - best) <= EPS
                        && leave.is_some_and(|l| basis[i] < basis[l]))
                {
                    best = ratio;
                    leave = Some(i);
                }
            }
        }
        let Some(leave) = leave else {
            break; // unbounded: cannot happen for phase 1, bail out
        };
        // Pivot.
        let piv = t[leave][enter];
        for j in 0..=total {
            t[leave][j] /= piv;
        }
        for i in 0..=m {
            if i != leave {
                let f = t[i][enter];
                if f != 0.0 {
                    for j in 0..=total {
                        t[i][j] -= f * t[leave][j];
                    }
                }
            }
        }
        basis[leave] = enter;
    }
    // Optimum of the phase-1 objective = current artificial mass.
    (0..m)
        .filter(|&i| basis[i] >= n)
        .map(|i| t[i][total].max(0.0))
        .sum()
}

/// Expand `p` against a rational reference into the equivalent pair with a
/// uniform reference: block `x` holds `k_x` copies of `p_x / k_x`, so that
/// `(p, q)` and `(t, u_k)` carry the same value under every divergence.
pub fn rational_reduce(p: &ProbVec, qref: &RationalRef) -> Result<ProbVec> {
    if p.dim() != qref.dim() {
        return Err(Error::DimensionMismatch {
            left: p.dim(),
            right: qref.dim(),
        });
    }
    let mut out = Vec::with_capacity(qref.denominator() as usize);
    for (x, &kx) in qref.numerators().iter().enumerate() {
        let share = p[x] / kx as f64;
        for _ in 0..kx {
            out.push(share);
        }
    }
    Ok(ProbVec::from_raw(out))
}

/// Run both the hinge criterion and the LP oracle on the same pairs.
pub fn relmaj_agreement(
    pair1: (&ProbVec, &ProbVec),
    pair2: (&ProbVec, &ProbVec),
) -> Result<(bool, bool)> {
    Ok((
        relatively_majorizes(pair1, pair2)?,
        relmaj_lp_oracle(pair1, pair2)?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn pv(v: &[f64]) -> ProbVec {
        ProbVec::new(v.to_vec()).unwrap()
    }

    fn random_prob(rng: &mut ChaCha8Rng, d: usize) -> ProbVec {
        loop {
            let raw: Vec<f64> = (0..d).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
            let s: f64 = raw.iter().sum();
            if s > 0.0 {
                return ProbVec::new(raw.iter().map(|v| v / s).collect::<Vec<_>>()).unwrap();
            }
        }
    }

    fn random_stochastic(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> StochasticMatrix {
        let mut entries = vec![0.0; rows * cols];
        for c in 0..cols {
            let col = random_prob(rng, rows);
            for r in 0..rows {
                entries[r * cols + c] = col[r];
            }
        }
        StochasticMatrix::new(entries, rows, cols).unwrap()
    }

    #[test]
    fn majorizes_examples() {
        assert!(majorizes(&pv(&[1.0, 0.0]), &pv(&[0.5, 0.5])));
        let p = pv(&[0.4, 0.35, 0.25]);
        assert!(majorizes(&p, &p));
        assert!(!majorizes(&pv(&[0.6, 0.4]), &pv(&[0.7, 0.3])));
    }

    #[test]
    fn majorizes_pads_unequal_dimensions() {
        assert!(majorizes(&pv(&[0.5, 0.5]), &pv(&[0.5, 0.25, 0.25])));
        assert!(!majorizes(&pv(&[0.4, 0.3, 0.3]), &pv(&[0.5, 0.5])));
    }

    #[test]
    fn hinge_examples() {
        let p = pv(&[0.7, 0.2, 0.1]);
        let q = pv(&[0.2, 0.3, 0.5]);
        assert!((hinge(&p, &q, 0.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((hinge(&p, &q, 1.0).unwrap() - 0.5).abs() < 1e-15);
        // beyond the largest ratio the hinge vanishes (full support q)
        assert_eq!(hinge(&p, &q, 3.5 + 1e-9).unwrap(), 0.0);
        // hinge at t = 1 is the positive-part mass of p - q
        let diff: Vec<f64> = p
            .as_slice()
            .iter()
            .zip(q.as_slice())
            .map(|(a, b)| a - b)
            .collect();
        let (plus, _) = crate::prob::plus_minus_mass(&diff);
        assert!((hinge(&p, &q, 1.0).unwrap() - plus).abs() < 1e-12);
    }

    #[test]
    fn relative_majorization_is_reflexive() {
        let p = pv(&[0.7, 0.2, 0.1]);
        let q = pv(&[0.2, 0.3, 0.5]);
        assert!(relatively_majorizes((&p, &q), (&p, &q)).unwrap());
    }

    #[test]
    fn dpi_witness_always_dominated() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let d = rng.random_range(2..=5);
            let dp = rng.random_range(2..=5);
            let p = random_prob(&mut rng, d);
            let q = random_prob(&mut rng, d);
            let e = random_stochastic(&mut rng, dp, d);
            let ep = e.apply(&p).unwrap();
            let eq = e.apply(&q).unwrap();
            assert!(relatively_majorizes((&p, &q), (&ep, &eq)).unwrap());
        }
    }

    #[test]
    fn blackwell_example_pairs() {
        let u = pv(&[0.5, 0.5]);
        assert!(relatively_majorizes((&pv(&[1.0, 0.0]), &u), (&pv(&[0.7, 0.3]), &u)).unwrap());
        assert!(relmaj_lp_oracle((&pv(&[1.0, 0.0]), &u), (&pv(&[0.7, 0.3]), &u)).unwrap());

        // swapping the roles of p and q is not majorization-monotone both ways
        let a = (pv(&[0.5, 0.5]), pv(&[1.0, 0.0]));
        let b = (pv(&[1.0, 0.0]), pv(&[0.5, 0.5]));
        let fwd = relatively_majorizes((&a.0, &a.1), (&b.0, &b.1)).unwrap();
        let bwd = relatively_majorizes((&b.0, &b.1), (&a.0, &a.1)).unwrap();
        assert!(!fwd || !bwd);
        assert_eq!(fwd, relmaj_lp_oracle((&a.0, &a.1), (&b.0, &b.1)).unwrap());
        assert_eq!(bwd, relmaj_lp_oracle((&b.0, &b.1), (&a.0, &a.1)).unwrap());
    }

    #[test]
    fn lp_oracle_agrees_with_hinge_criterion() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let mut agree = 0usize;
        for i in 0..1000 {
            let d = rng.random_range(2..=4);
            let dp = rng.random_range(2..=4);
            let p1 = random_prob(&mut rng, d);
            let q1 = random_prob(&mut rng, d);
            // mix related and unrelated second pairs
            let (p2, q2) = if i % 2 == 0 {
                let e = random_stochastic(&mut rng, dp, d);
                (e.apply(&p1).unwrap(), e.apply(&q1).unwrap())
            } else {
                (random_prob(&mut rng, dp), random_prob(&mut rng, dp))
            };
            let (fast, lp) = relmaj_agreement((&p1, &q1), (&p2, &q2)).unwrap();
            assert_eq!(fast, lp, "disagreement on instance {i}");
            agree += 1;
        }
        assert_eq!(agree, 1000);
    }

    #[test]
    fn lp_oracle_rejects_large_dimensions() {
        let p = ProbVec::uniform(9);
        assert!(matches!(
            relmaj_lp_oracle((&p, &p), (&p, &p)),
            Err(Error::OracleScaleExceeded { .. })
        ));
    }

    #[test]
    fn rational_reduce_examples() {
        let p = pv(&[0.7, 0.3]);
        let qref = RationalRef::new(vec![1, 2], 3).unwrap();
        let t = rational_reduce(&p, &qref).unwrap();
        assert_eq!(t.dim(), 3);
        assert!((t[0] - 0.7).abs() < 1e-15);
        assert!((t[1] - 0.15).abs() < 1e-15);
        assert!((t[2] - 0.15).abs() < 1e-15);

        // unit numerators leave the vector unchanged
        let qref = RationalRef::new(vec![1, 1], 2).unwrap();
        let t = rational_reduce(&p, &qref).unwrap();
        assert_eq!(t.as_slice(), p.as_slice());
    }

    #[test]
    fn uniform_reference_relative_majorization_matches_majorization() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10_000 {
            let d = rng.random_range(2..=8);
            let p = random_prob(&mut rng, d);
            let q = random_prob(&mut rng, d);
            let u = ProbVec::uniform(d);
            let rel = relatively_majorizes((&p, &u), (&q, &u)).unwrap();
            assert_eq!(rel, majorizes(&p, &q));
        }
    }
}
