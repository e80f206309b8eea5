//! Extremal elements of total-variation balls.
//!
//! The `ε`-ball around a sorted probability vector has a minimal and a
//! maximal element under majorization: the flattest approximation (obtained
//! by clipping entries to an interval `[b, a]`) and the steepest one
//! (obtained by piling mass onto the largest entry). Relative to an arbitrary
//! reference `q` the same construction clips the likelihood ratios instead,
//! with cutoff levels that are themselves smoothed max-divergence values.
//! Subnormalized smoothing keeps the upper clip and re-solves the lower one
//! for the requested total mass `γ`.

use crate::prob::{plus_minus_mass, ratio_order, tv_distance};
use crate::{math, Error, ExtReal, ProbVec, Result, SubProbVec};
use alloc::vec;
use alloc::vec::Vec;

/// Clip levels and block boundaries of a flattest approximation.
///
/// `k` is the number of top entries clipped down to `a`, `m` the index after
/// which entries are clipped up to `b` (both 1-based counts; `k = m = 0`
/// flags the degenerate uniform case).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClipParams {
    pub a: f64,
    pub b: f64,
    pub k: usize,
    pub m: usize,
}

/// Parameters of an `(ε, γ)`-clip: the upper level is shared with the plain
/// clip, the lower level depends on the target mass `γ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaClipParams {
    pub a: f64,
    pub b_gamma: f64,
    pub k: usize,
    pub m: usize,
    pub gamma: f64,
}

fn ensure_sorted(p: &ProbVec) -> Result<()> {
    if p.is_sorted_desc() {
        Ok(())
    } else {
        Err(Error::NotSorted)
    }
}

fn ensure_eps(eps: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::EpsOutOfRange {
            eps,
            range: "[0, 1]",
        });
    }
    Ok(())
}

/// Upper clip level: the largest maximizer `k` of `(‖p‖_(ℓ) − ε) / ℓ` and the
/// corresponding level `a`. Requires `p` sorted.
fn upper_clip(p: &[f64], eps: f64) -> (f64, usize) {
    let mut best = f64::NEG_INFINITY;
    let mut k = 0;
    let mut prefix = 0.0;
    for (l, &v) in p.iter().enumerate() {
        prefix += v;
        let cand = (prefix - eps) / (l + 1) as f64;
        if cand >= best {
            best = cand;
            k = l + 1;
        }
    }
    (best, k)
}

/// Lower clip level for target mass `gamma`: the smallest minimizer `m` of
/// `(γ − ‖p‖_(ℓ) + ε) / (d − ℓ)` over `ℓ ∈ [d−1]`, and the level itself.
fn lower_clip(p: &[f64], eps: f64, gamma: f64) -> (f64, usize) {
    let d = p.len();
    let mut best = f64::INFINITY;
    let mut m = 0;
    let mut prefix = 0.0;
    for (l, &v) in p.iter().enumerate().take(d - 1) {
        prefix += v;
        let cand = (gamma - prefix + eps) / (d - l - 1) as f64;
        if cand < best {
            best = cand;
            m = l + 1;
        }
    }
    (best, m)
}

/// The flattest `ε`-approximation of a sorted `p`: the majorization-minimal
/// element of the ball, with entries `max{b, min{a, p_x}}`.
///
/// If the uniform distribution is within `ε` of `p` it is returned directly
/// (with degenerate parameters `a = b = 1/d`, `k = m = 0`).
pub fn flattest(p: &ProbVec, eps: f64) -> Result<(ProbVec, ClipParams)> {
    ensure_sorted(p)?;
    ensure_eps(eps)?;
    let d = p.dim();
    let u = ProbVec::uniform(d);
    if eps >= tv_distance(p, &u)? - 1e-15 {
        let level = 1.0 / d as f64;
        return Ok((
            u,
            ClipParams {
                a: level,
                b: level,
                k: 0,
                m: 0,
            },
        ));
    }
    if eps == 0.0 {
        let params = ClipParams {
            a: p[0],
            b: p[d - 1],
            k: 1,
            m: d - 1,
        };
        return Ok((p.clone(), params));
    }
    let entries = p.as_slice();
    let (a, k) = upper_clip(entries, eps);
    let (b, m) = lower_clip(entries, eps, 1.0);
    debug_assert!(k <= m, "upper block must not pass the lower block");
    debug_assert!(b <= a + 1e-12);

    let mut out = Vec::with_capacity(d);
    for (x, &v) in entries.iter().enumerate() {
        out.push(if x < k {
            a
        } else if x < m {
            v
        } else {
            b
        });
    }
    // Cross-check against the implicit characterization of the levels:
    // mass clipped off the top and added at the bottom both equal eps.
    debug_assert!({
        let off: f64 = entries.iter().map(|&v| (v - a).max(0.0)).sum();
        let on: f64 = entries.iter().map(|&v| (b - v).max(0.0)).sum();
        math::abs(off - eps) < 1e-9 && math::abs(on - eps) < 1e-9
    });
    Ok((ProbVec::from_raw(out), ClipParams { a, b, k, m }))
}

/// The steepest `ε`-approximation of a sorted `p`: the majorization-maximal
/// element of the ball. Returns the point mass when it is within reach.
pub fn steepest(p: &ProbVec, eps: f64) -> Result<ProbVec> {
    ensure_sorted(p)?;
    ensure_eps(eps)?;
    if eps == 0.0 {
        return Ok(p.clone());
    }
    let d = p.dim();
    let entries = p.as_slice();
    if eps >= 1.0 - entries[0] - 1e-15 {
        return Ok(ProbVec::point_mass(d));
    }
    // k with ‖p‖_(k) ≤ 1 − ε < ‖p‖_(k+1); the early return above guarantees
    // k ≥ 1, and k is capped at d − 1 (the full prefix sum may fall below
    // the target by rounding alone).
    let target = 1.0 - eps;
    let mut prefix = 0.0;
    let mut k = 0;
    for &v in entries.iter().take(d - 1) {
        if prefix + v > target {
            break;
        }
        prefix += v;
        k += 1;
    }
    debug_assert!(k >= 1);
    let mut out = vec![0.0; d];
    out[0] = entries[0] + eps;
    out[1..k].copy_from_slice(&entries[1..k]);
    out[k] = target - prefix;
    Ok(ProbVec::from_raw(out))
}

/// The two likelihood-ratio cutoffs of the `ε`-ball around `p` relative to
/// `q`:
///
/// - `a`, the least level the ratio can be clipped down to (`+∞` when `p`
///   carries more than `ε` mass outside the support of `q`);
/// - `b`, the greatest level it can be clipped up to.
///
/// `log₂ a` is the smoothed max-divergence of the pair.
pub fn dmax_cutoffs(pair: &crate::PairOrdering, eps: f64) -> Result<(ExtReal, ExtReal)> {
    ensure_eps(eps)?;
    let d = pair.dim();

    let mut a = ExtReal::NegInf;
    let mut psum = 0.0;
    let mut qsum = 0.0;
    for i in 0..d {
        psum += pair.p_at(i);
        qsum += pair.q_at(i);
        if qsum > 0.0 {
            let cand = ExtReal::Finite((psum - eps) / qsum);
            if cand > a {
                a = cand;
            }
        } else if psum - eps > 1e-15 {
            a = ExtReal::PosInf;
            break;
        }
    }

    let mut b = ExtReal::PosInf;
    let mut psuf = 0.0;
    let mut qsuf = 0.0;
    for i in (0..d).rev() {
        psuf += pair.p_at(i);
        qsuf += pair.q_at(i);
        if qsuf > 0.0 {
            let cand = ExtReal::Finite((psuf + eps) / qsuf);
            if cand < b {
                b = cand;
            }
        }
    }
    Ok((a, b))
}

/// Solve `Σ_x (p_x − a q_x)₊ = eps` for the upper level `a` by locating the
/// segment of the piecewise-linear mass curve that spends the budget.
///
/// Coordinates outside the support of `q` contribute their whole mass to the
/// budget. Returns `None` when `q` places no mass anywhere (impossible for a
/// normalized reference).
fn solve_upper_level(pair: &crate::PairOrdering, eps: f64) -> Option<f64> {
    let d = pair.dim();
    // finite-ratio coordinates in non-increasing ratio order
    let mut ratios = Vec::with_capacity(d);
    let mut outside = 0.0;
    for i in 0..d {
        let (px, qx) = (pair.p_at(i), pair.q_at(i));
        if qx > 0.0 {
            ratios.push((px / qx, px, qx));
        } else {
            outside += px;
        }
    }
    if ratios.is_empty() {
        return None;
    }
    // With the top j finite coordinates above the level, the clipped-off mass
    // is outside + P_j − a Q_j; candidate level for each segment.
    let mut psum = 0.0;
    let mut qsum = 0.0;
    let mut fallback = f64::NEG_INFINITY;
    for j in 0..ratios.len() {
        psum += ratios[j].1;
        qsum += ratios[j].2;
        let cand = (outside + psum - eps) / qsum;
        fallback = fallback.max(cand);
        let seg_hi = ratios[j].0;
        let seg_lo = ratios.get(j + 1).map_or(f64::NEG_INFINITY, |r| r.0);
        if cand <= seg_hi + 1e-12 && cand >= seg_lo - 1e-12 {
            return Some(cand);
        }
    }
    Some(fallback)
}

/// Solve `Σ_x (b q_x − p_x)₊ = budget` for the lower level `b`, symmetric to
/// [`solve_upper_level`]. Coordinates with `q_x = 0` never contribute.
fn solve_lower_level(pair: &crate::PairOrdering, budget: f64) -> Option<f64> {
    let d = pair.dim();
    let mut ratios = Vec::with_capacity(d);
    for i in 0..d {
        let (px, qx) = (pair.p_at(i), pair.q_at(i));
        if qx > 0.0 {
            ratios.push((px / qx, px, qx));
        }
    }
    if ratios.is_empty() {
        return None;
    }
    let mut psum = 0.0;
    let mut qsum = 0.0;
    let mut fallback = f64::INFINITY;
    for j in (0..ratios.len()).rev() {
        psum += ratios[j].1;
        qsum += ratios[j].2;
        let cand = (psum + budget) / qsum;
        fallback = fallback.min(cand);
        let seg_lo = ratios[j].0;
        let seg_hi = if j == 0 {
            f64::INFINITY
        } else {
            ratios[j - 1].0
        };
        if cand >= seg_lo - 1e-12 && cand <= seg_hi + 1e-12 {
            return Some(cand);
        }
    }
    Some(fallback)
}

/// The flattest `ε`-approximation of `p` relative to `q`: clip the
/// likelihood ratios to `[b, a]` with the cutoffs of [`dmax_cutoffs`] and
/// rescale by `q`. Every ball member relatively majorizes the result.
///
/// Degenerate cases: when `ε ≥ TV(p, q)` the reference itself is returned
/// (it lies in the ball and is relatively majorized by every pair). Indices
/// outside the support of `q` are clipped to zero; if they carry more than
/// `ε` mass, no minimal element exists and the call fails.
pub fn relative_flattest(p: &ProbVec, q: &ProbVec, eps: f64) -> Result<ProbVec> {
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch {
            left: p.dim(),
            right: q.dim(),
        });
    }
    ensure_eps(eps)?;
    if eps >= tv_distance(p, q)? - 1e-15 {
        return Ok(q.clone());
    }
    let outside: f64 = p
        .as_slice()
        .iter()
        .zip(q.as_slice())
        .filter(|(_, &qx)| qx == 0.0)
        .map(|(&px, _)| px)
        .sum();
    if outside > eps + 1e-12 {
        return Err(Error::InfeasibleClip {
            reason: "more than eps mass outside the reference support",
        });
    }

    let ord = ratio_order(p, q)?;
    let (a_scan, b_scan) = dmax_cutoffs(&ord, eps)?;
    // Scan form vs implicit piecewise-linear solve: two routes to the same
    // levels, asserted against each other.
    let a = solve_upper_level(&ord, eps).ok_or(Error::InfeasibleClip {
        reason: "reference support disjoint from p",
    })?;
    let b = solve_lower_level(&ord, eps).expect("q has positive mass somewhere");
    debug_assert!(
        math::abs(a - a_scan.to_f64()) <= 1e-9 * a.abs().max(1.0),
        "upper level mismatch: {a} vs {a_scan}"
    );
    debug_assert!(
        math::abs(b - b_scan.to_f64()) <= 1e-9 * b.abs().max(1.0),
        "lower level mismatch: {b} vs {b_scan}"
    );

    let (a, b) = if a < b {
        if b - a > 1e-9 {
            return Err(Error::InfeasibleClip {
                reason: "upper level below lower level",
            });
        }
        // feasibility boundary: both equations meet at a common level
        let mid = 0.5 * (a + b);
        (mid, mid)
    } else {
        (a, b)
    };

    let out: Vec<f64> = p
        .as_slice()
        .iter()
        .zip(q.as_slice())
        .map(|(&px, &qx)| {
            if qx > 0.0 {
                qx * (px / qx).clamp(b, a)
            } else {
                0.0
            }
        })
        .collect();
    debug_assert!((out.iter().sum::<f64>() - 1.0).abs() < 1e-10);
    Ok(ProbVec::from_raw(out))
}

/// The smallest total mass `γ_p` at which the scaled uniform vector `γ u`
/// enters the subnormalized `ε`-ball of `p`, i.e. satisfies
/// `‖p − γ u‖₊ ≤ ε`. Computed exactly on the piecewise-linear mass curve.
pub fn gamma_min(p: &ProbVec, eps: f64) -> Result<f64> {
    ensure_eps(eps)?;
    if eps >= 1.0 {
        return Ok(0.0);
    }
    let d = p.dim() as f64;
    let (sorted, _) = crate::prob::sort_desc(p);
    // g(c) = Σ (p_x − c/d)₊ decreases piecewise linearly from 1; with the top
    // j entries active, g(c) = P_j − j c / d, so the candidate level is
    // c = d (P_j − ε) / j, valid exactly when it falls in the j-th segment.
    // That is the same maximization as the upper clip level.
    let (a, _) = upper_clip(sorted.as_slice(), eps);
    let c = d * a;
    Ok(c.clamp(0.0, 1.0).min(1.0))
}

/// The `(ε, γ)`-clipped vector of a sorted `p`: the majorization-minimal
/// element among non-negative vectors of mass `γ` whose positive-part
/// distance to `p` is at most `ε`. Requires `1 − ε ≤ γ ≤ 1`.
pub fn clip_gamma(p: &ProbVec, eps: f64, gamma: f64) -> Result<(SubProbVec, GammaClipParams)> {
    ensure_sorted(p)?;
    ensure_eps(eps)?;
    let lo = 1.0 - eps;
    if !(lo - 1e-12..=1.0 + 1e-12).contains(&gamma) {
        return Err(Error::GammaOutOfRange { gamma, lo, hi: 1.0 });
    }
    let d = p.dim();
    let level = gamma / d as f64;
    let entries = p.as_slice();
    let (a, k) = upper_clip(entries, eps);
    // The flat vector gamma*u is feasible (and then minimal) exactly from
    // mass d*a upward; gamma_min is this level clamped into [0, 1].
    let flat_from = d as f64 * a;
    if gamma >= flat_from - 1e-12 {
        let flat = SubProbVec::new(vec![level; d]).expect("scaled uniform is subnormalized");
        return Ok((
            flat,
            GammaClipParams {
                a: level,
                b_gamma: level,
                k: 0,
                m: 0,
                gamma,
            },
        ));
    }
    let (b, m) = lower_clip(entries, eps, gamma);
    debug_assert!(k <= m && b <= a + 1e-12);
    let mut out = Vec::with_capacity(d);
    for (x, &v) in entries.iter().enumerate() {
        out.push(if x < k {
            a
        } else if x < m {
            v
        } else {
            b
        });
    }
    let mass: f64 = out.iter().sum();
    debug_assert!(math::abs(mass - gamma) < 1e-12 * d as f64);
    let diff: Vec<f64> = entries.iter().zip(&out).map(|(&pv, &ov)| pv - ov).collect();
    debug_assert!(plus_minus_mass(&diff).0 <= eps + 1e-12);
    Ok((
        SubProbVec::new(out)?,
        GammaClipParams {
            a,
            b_gamma: b,
            k,
            m,
            gamma,
        },
    ))
}

/// Subnormalized clipping against a rational reference: reduce `(p, q)` to a
/// uniform-reference pair, clip there, and pull the block values back.
///
/// The reference must be given exactly as rationals; approximating an
/// irrational `q` (continued-fraction convergents, bounded denominator) is
/// the caller's concern and loses the exactness of the reduction.
pub fn clip_gamma_relative(
    p: &ProbVec,
    qref: &crate::majorization::RationalRef,
    eps: f64,
    gamma: f64,
) -> Result<SubProbVec> {
    let t = crate::majorization::rational_reduce(p, qref)?;
    let (sorted, perm) = crate::prob::sort_desc(&t);
    let (clipped, _) = clip_gamma(&sorted, eps, gamma)?;
    // undo the sort, then collapse each block back to one coordinate
    let k = t.dim();
    let mut unsorted = vec![0.0; k];
    for (pos, &orig) in perm.iter().enumerate() {
        unsorted[orig] = clipped.as_slice()[pos];
    }
    let mut out = Vec::with_capacity(p.dim());
    let mut offset = 0usize;
    for &kx in qref.numerators() {
        let kx = kx as usize;
        let block: f64 = unsorted[offset..offset + kx].iter().sum();
        out.push(block);
        offset += kx;
    }
    SubProbVec::new(out)
}
