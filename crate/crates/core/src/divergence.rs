//! Classical divergences and their smoothed variants.
//!
//! The Rényi family is evaluated in base 2 with the continuous extensions at
//! orders 0, 1 and ∞, and the usual support conventions (`+∞` when the
//! first argument escapes the support of the second at orders above 1).
//! The hypothesis-testing divergence is evaluated by its closed form over
//! the likelihood-ratio ordering. Smoothing any divergence over a
//! total-variation ball reduces to one evaluation at the clipped vector.

use crate::prob::{ratio_order, sort_desc};
use crate::smoothing::{clip_gamma, flattest, gamma_min, relative_flattest};
use crate::{math, Error, ExtReal, ProbVec, Result, SubProbVec};

/// Order parameter of a Rényi divergence, with tagged limits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RenyiOrder {
    Zero,
    One,
    Infinity,
    Finite(f64),
}

impl RenyiOrder {
    /// Classify a raw order value. Returns an error for negative or NaN
    /// input.
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha.is_nan() || alpha < 0.0 {
            return Err(Error::UnsupportedOrder { order: alpha });
        }
        Ok(if alpha == 0.0 {
            RenyiOrder::Zero
        } else if alpha == 1.0 {
            RenyiOrder::One
        } else if alpha == f64::INFINITY {
            RenyiOrder::Infinity
        } else {
            RenyiOrder::Finite(alpha)
        })
    }

    pub fn value(self) -> f64 {
        match self {
            RenyiOrder::Zero => 0.0,
            RenyiOrder::One => 1.0,
            RenyiOrder::Infinity => f64::INFINITY,
            RenyiOrder::Finite(a) => a,
        }
    }
}

/// A classical divergence: any evaluator monotone under stochastic maps.
/// The contract is evaluability; data-processing is spot-checked by the
/// verification suites rather than enforced here.
pub trait Divergence {
    fn eval(&self, p: &ProbVec, q: &ProbVec) -> Result<ExtReal>;
}

impl<F> Divergence for F
where
    F: Fn(&ProbVec, &ProbVec) -> Result<ExtReal>,
{
    fn eval(&self, p: &ProbVec, q: &ProbVec) -> Result<ExtReal> {
        self(p, q)
    }
}

/// Rényi divergence of a fixed order, usable wherever a [`Divergence`] is
/// expected.
#[derive(Debug, Clone, Copy)]
pub struct Renyi(pub RenyiOrder);

impl Divergence for Renyi {
    fn eval(&self, p: &ProbVec, q: &ProbVec) -> Result<ExtReal> {
        renyi(p, q, self.0)
    }
}

fn renyi_finite(p: &[f64], q: &[f64], alpha: f64) -> ExtReal {
    if alpha > 1.0 {
        // +inf as soon as p escapes supp(q)
        if p.iter().zip(q).any(|(&a, &b)| a > 0.0 && b == 0.0) {
            return ExtReal::PosInf;
        }
    }
    let mut sum = 0.0;
    for (&a, &b) in p.iter().zip(q) {
        if a > 0.0 && b > 0.0 {
            sum += math::powf(a, alpha) * math::powf(b, 1.0 - alpha);
        }
    }
    if sum <= 0.0 {
        // orthogonal supports at alpha < 1
        return ExtReal::PosInf;
    }
    ExtReal::Finite(math::log2(sum) / (alpha - 1.0))
}

fn kl(p: &[f64], q: &[f64]) -> ExtReal {
    let mut sum = 0.0;
    for (&a, &b) in p.iter().zip(q) {
        if a > 0.0 {
            if b == 0.0 {
                return ExtReal::PosInf;
            }
            sum += a * math::log2(a / b);
        }
    }
    ExtReal::Finite(sum)
}

/// Rényi divergence `D_α(p ‖ q)` in bits.
pub fn renyi(p: &ProbVec, q: &ProbVec, order: RenyiOrder) -> Result<ExtReal> {
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch {
            left: p.dim(),
            right: q.dim(),
        });
    }
    let (ps, qs) = (p.as_slice(), q.as_slice());
    Ok(match order {
        RenyiOrder::Zero => {
            let mass: f64 = ps
                .iter()
                .zip(qs)
                .filter(|(&a, _)| a > 0.0)
                .map(|(_, &b)| b)
                .sum();
            if mass <= 0.0 {
                ExtReal::PosInf
            } else {
                ExtReal::Finite(-math::log2(mass))
            }
        }
        RenyiOrder::One => kl(ps, qs),
        RenyiOrder::Infinity => {
            let mut max = 0.0f64;
            for (&a, &b) in ps.iter().zip(qs) {
                if a > 0.0 {
                    if b == 0.0 {
                        return Ok(ExtReal::PosInf);
                    }
                    max = max.max(a / b);
                }
            }
            ExtReal::Finite(math::log2(max))
        }
        RenyiOrder::Finite(alpha) => renyi_finite(ps, qs, alpha),
    })
}

/// Rényi divergence against the scaled uniform reference, defined for
/// subnormalized first arguments. Order 1 is excluded here.
pub fn renyi_sub_uniform(r: &SubProbVec, order: RenyiOrder) -> Result<ExtReal> {
    let d = r.dim() as f64;
    let v = r.as_slice();
    Ok(match order {
        RenyiOrder::One => return Err(Error::UnsupportedOrder { order: 1.0 }),
        RenyiOrder::Zero => {
            let support = v.iter().filter(|&&x| x > 0.0).count() as f64;
            if support == 0.0 {
                ExtReal::PosInf
            } else {
                ExtReal::Finite(-math::log2(support / d))
            }
        }
        RenyiOrder::Infinity => {
            let max = v.iter().cloned().fold(0.0f64, f64::max);
            if max <= 0.0 {
                ExtReal::NegInf
            } else {
                ExtReal::Finite(math::log2(d * max))
            }
        }
        RenyiOrder::Finite(alpha) => {
            let sum: f64 = v
                .iter()
                .filter(|&&x| x > 0.0)
                .map(|&x| math::powf(x, alpha) * math::powf(1.0 / d, 1.0 - alpha))
                .sum();
            if sum <= 0.0 {
                ExtReal::PosInf
            } else {
                ExtReal::Finite(math::log2(sum) / (alpha - 1.0))
            }
        }
    })
}

/// Rényi entropy `H_α(p) = log₂ d − D_α(p ‖ u)`, in bits.
pub fn renyi_entropy(p: &ProbVec, order: RenyiOrder) -> Result<f64> {
    let u = ProbVec::uniform(p.dim());
    let d = math::log2(p.dim() as f64);
    Ok(d - renyi(p, &u, order)?.to_f64())
}

/// Hypothesis-testing divergence `D_H^ε(p ‖ q)` in closed form: the optimal
/// test keeps the largest likelihood ratios, with a single fractional
/// coordinate at the budget boundary.
pub fn hypothesis_testing(p: &ProbVec, q: &ProbVec, eps: f64) -> Result<ExtReal> {
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch {
            left: p.dim(),
            right: q.dim(),
        });
    }
    if !(0.0..1.0).contains(&eps) {
        return Err(Error::EpsOutOfRange {
            eps,
            range: "[0, 1)",
        });
    }
    let ord = ratio_order(p, q)?;
    let d = ord.dim();
    let target = 1.0 - eps;

    let mut pa = 0.0; // cumulative p mass before the current coordinate
    let mut qb = 0.0; // cumulative q mass before it
    for i in 0..d {
        let (px, qx) = (ord.p_at(i), ord.q_at(i));
        if pa + px >= target {
            // fractional acceptance on this coordinate
            if px <= 0.0 {
                break;
            }
            let value = qb + (qx / px) * (target - pa);
            return Ok(if value <= 0.0 {
                ExtReal::PosInf
            } else {
                ExtReal::Finite(-math::log2(value))
            });
        }
        pa += px;
        qb += qx;
    }
    // Accumulated float error left the target unreachable: saturate at the
    // full test over the support of p.
    let value: f64 = (0..d)
        .filter(|&i| ord.p_at(i) > 0.0)
        .map(|i| ord.q_at(i))
        .sum();
    Ok(if value <= 0.0 {
        ExtReal::PosInf
    } else {
        ExtReal::Finite(-math::log2(value))
    })
}

/// Smooth an arbitrary divergence over the `ε`-ball around `p`: the minimum
/// is attained at the relative flattest approximation, so one evaluation
/// suffices.
pub fn smoothed<D: Divergence>(div: &D, p: &ProbVec, q: &ProbVec, eps: f64) -> Result<ExtReal> {
    let clipped = relative_flattest(p, q, eps)?;
    div.eval(&clipped, q)
}

/// Smoothed Rényi divergence `D_α^ε(p ‖ q)`.
pub fn smoothed_renyi(p: &ProbVec, q: &ProbVec, eps: f64, order: RenyiOrder) -> Result<ExtReal> {
    smoothed(&Renyi(order), p, q, eps)
}

/// Smoothed Rényi divergence against the uniform reference when smoothing
/// ranges over subnormalized vectors (`‖p − r‖₊ ≤ ε`, mass at most 1).
///
/// The mass of the optimizer splits the problem: below `γ_p` the optimum is
/// an `(ε, γ)`-clipped vector, above it a scaled uniform. Orders above 1
/// take the minimum at `γ = 1 − ε`; orders below 1 either hit zero (when the
/// scaled uniform is reachable) or reduce to normalized smoothing. Order 1
/// is not defined for this variant.
pub fn smoothed_renyi_sub(p: &ProbVec, eps: f64, order: RenyiOrder) -> Result<ExtReal> {
    if matches!(order, RenyiOrder::One) {
        return Err(Error::UnsupportedOrder { order: 1.0 });
    }
    if !p.is_sorted_desc() {
        return Err(Error::NotSorted);
    }
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::EpsOutOfRange {
            eps,
            range: "[0, 1]",
        });
    }
    if eps == 0.0 {
        return renyi(p, &ProbVec::uniform(p.dim()), order);
    }
    let gp = gamma_min(p, eps)?;
    let beta = order.value();

    let eval = |gamma: f64| -> Result<ExtReal> {
        let (clip, _) = clip_gamma(p, eps, gamma)?;
        renyi_sub_uniform(&clip, order)
    };

    let fast = if beta > 1.0 {
        eval(1.0 - eps)?
    } else if gp < 1.0 - 1e-12 {
        ExtReal::Finite(0.0)
    } else {
        let (flat, _) = flattest(p, eps)?;
        renyi(&flat, &ProbVec::uniform(p.dim()), order)?
    };

    // Generic route: golden-section over the clip branch plus the infimum
    // of the flat branch (empty when gamma_min = 1), asserted to agree with
    // the closed fast path.
    debug_assert!({
        let golden = golden_min(1.0 - eps, gp, 1e-10, |g| {
            eval(g).map(ExtReal::to_f64).unwrap_or(f64::INFINITY)
        });
        let flat_branch = if gp >= 1.0 - 1e-15 {
            f64::INFINITY
        } else if beta > 1.0 {
            if beta.is_infinite() {
                math::log2(gp)
            } else {
                beta / (beta - 1.0) * math::log2(gp)
            }
        } else {
            0.0
        };
        let generic = golden.min(flat_branch);
        math::abs(generic - fast.to_f64()) <= 1e-8 || (generic.is_infinite() && !fast.is_finite())
    });
    Ok(fast)
}

/// Golden-section minimum of `f` on `[lo, hi]` to tolerance `tol` (assumes a
/// unimodal, here in fact monotone, objective).
fn golden_min(lo: f64, hi: f64, tol: f64, f: impl Fn(f64) -> f64) -> f64 {
    if hi - lo <= tol {
        return f(0.5 * (lo + hi));
    }
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    fc.min(fd).min(f(lo)).min(f(hi))
}

/// Smoothed Rényi entropy helper used by sweeps: `H_β` of the flattest
/// approximation of a sorted `p`.
pub fn smoothed_renyi_entropy(p: &ProbVec, eps: f64, order: RenyiOrder) -> Result<f64> {
    let (sorted, _) = sort_desc(p);
    let (flat, _) = flattest(&sorted, eps)?;
    renyi_entropy(&flat, order)
}

#[allow(unused_imports)]
use alloc::vec;
