//! Optimal universal correction terms.
//!
//! Each function returns the least dimension-independent constant completing
//! an inequality between a smoothed divergence and an unsmoothed one of a
//! different order:
//!
//! - [`mu`]: upper correction for smoothed Rényi against plain Rényi;
//! - [`nu`]: lower correction in the opposite direction;
//! - [`mu_h`] / [`nu_h`]: the analogues for the hypothesis-testing
//!   divergence;
//! - [`mu_sub`]: the upper correction when smoothing ranges over
//!   subnormalized vectors;
//! - [`kappa`]: the largest divergence attainable inside the ball around the
//!   uniform reference, which feeds the lower corrections.
//!
//! Branches returning `+∞` mean no finite dimension-independent constant
//! exists in that parameter regime. All values are bits.

use crate::divergence::RenyiOrder;
use crate::{math, Error, ExtReal, Result};

/// Which case of a correction-term case table produced the value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    AlphaLtBetaLt1,
    BetaGtAlphaGt1,
    AlphaGeBeta,
    EpsLeTheta,
    EpsGtTheta,
    AlphaGt1,
    AlphaLeEps,
    AlphaBetweenEpsAnd1,
    AlphaLt1,
    Otherwise,
}

impl Branch {
    pub fn as_str(self) -> &'static str {
        match self {
            Branch::AlphaLtBetaLt1 => "alpha_lt_beta_lt_1",
            Branch::BetaGtAlphaGt1 => "beta_gt_alpha_gt_1",
            Branch::AlphaGeBeta => "alpha_ge_beta",
            Branch::EpsLeTheta => "eps_le_theta",
            Branch::EpsGtTheta => "eps_gt_theta",
            Branch::AlphaGt1 => "alpha_gt_1",
            Branch::AlphaLeEps => "alpha_le_eps",
            Branch::AlphaBetweenEpsAnd1 => "alpha_between_eps_and_1",
            Branch::AlphaLt1 => "alpha_lt_1",
            Branch::Otherwise => "otherwise",
        }
    }
}

/// A correction-term value with the case that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundValue {
    pub value: ExtReal,
    pub branch: Branch,
}

impl BoundValue {
    fn new(value: ExtReal, branch: Branch) -> Self {
        BoundValue { value, branch }
    }
}

/// A fully specified correction-term query.
#[derive(Debug, Clone, Copy)]
pub struct BoundQuery {
    pub eps: f64,
    pub alpha: RenyiOrder,
    pub beta: Option<RenyiOrder>,
}

impl BoundQuery {
    pub fn new(eps: f64, alpha: RenyiOrder, beta: Option<RenyiOrder>) -> Result<Self> {
        ensure_eps_open(eps)?;
        Ok(BoundQuery { eps, alpha, beta })
    }
}

fn ensure_eps_open(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::EpsOutOfRange {
            eps,
            range: "(0, 1)",
        });
    }
    Ok(())
}

/// The interpolation parameter pairing the two orders: defined for
/// `0 < α < β < 1` and for `β > α > 1` (with `β = ∞` giving `1/α`), always
/// in `(0, 1)`.
pub fn theta(alpha: f64, beta: f64) -> Result<f64> {
    if alpha > 1.0 && beta > alpha {
        Ok(if beta.is_infinite() {
            1.0 / alpha
        } else {
            (beta - alpha) / (alpha * (beta - 1.0))
        })
    } else if alpha > 0.0 && alpha < beta && beta < 1.0 {
        Ok((beta - alpha) / (beta * (1.0 - alpha)))
    } else {
        Err(Error::OutOfRegime {
            reason: "theta needs 0 < alpha < beta < 1 or beta > alpha > 1",
        })
    }
}

/// Binary Shannon entropy `h₂(t)` in bits, with `h₂(0) = h₂(1) = 0`.
pub fn binary_entropy(t: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&t));
    if t <= 0.0 || t >= 1.0 {
        return 0.0;
    }
    -t * math::log2(t) - (1.0 - t) * math::log2(1.0 - t)
}

/// The common finite expression of the upper corrections:
/// `prefactor · (θ log₂(1/ε) − h₂(θ))`.
fn theta_term(prefactor: f64, th: f64, eps: f64) -> f64 {
    prefactor * (th * math::log2(1.0 / eps) - binary_entropy(th))
}

/// Optimal upper correction `μ(ε, α, β)`: the least constant with
/// `D_β^ε ≤ D_α + μ` over all pairs in all dimensions.
pub fn mu(eps: f64, alpha: RenyiOrder, beta: RenyiOrder) -> Result<BoundValue> {
    ensure_eps_open(eps)?;
    let (a, b) = (alpha.value(), beta.value());
    if a >= b {
        return Ok(BoundValue::new(ExtReal::Finite(0.0), Branch::AlphaGeBeta));
    }
    if a > 1.0 {
        // beta > alpha > 1, beta possibly infinite
        let th = theta(a, b)?;
        let tilde = theta_term(a / (a - 1.0), th, eps);
        return Ok(BoundValue::new(
            ExtReal::Finite(tilde.max(0.0)),
            Branch::BetaGtAlphaGt1,
        ));
    }
    if a > 0.0 && b < 1.0 {
        let th = theta(a, b)?;
        let tilde = theta_term(b / (1.0 - b), th, eps);
        return Ok(BoundValue::new(
            ExtReal::Finite(tilde.max(0.0)),
            Branch::AlphaLtBetaLt1,
        ));
    }
    Ok(BoundValue::new(ExtReal::PosInf, Branch::Otherwise))
}

/// Optimal lower correction `ν(ε, α, β)`: the least constant with
/// `D_β^ε ≥ D_α − ν`; finite exactly when `β > 1 > α`.
pub fn nu(eps: f64, alpha: RenyiOrder, beta: RenyiOrder) -> Result<BoundValue> {
    ensure_eps_open(eps)?;
    let (a, b) = (alpha.value(), beta.value());
    if b > 1.0 && a < 1.0 {
        let inv_bm1 = if b.is_infinite() {
            0.0
        } else {
            1.0 / (b - 1.0)
        };
        let v = (inv_bm1 + 1.0 / (1.0 - a)) * math::log2(1.0 / (1.0 - eps));
        return Ok(BoundValue::new(ExtReal::Finite(v), Branch::BetaGtAlphaGt1));
    }
    Ok(BoundValue::new(ExtReal::PosInf, Branch::Otherwise))
}

/// Optimal upper correction for the hypothesis-testing divergence:
/// `D_H^ε ≤ D_α + μ_H` with `μ_H = (α/(α−1)) log₂(1/(1−ε))` for `α > 1`.
pub fn mu_h(eps: f64, alpha: RenyiOrder) -> Result<BoundValue> {
    ensure_eps_open(eps)?;
    let a = alpha.value();
    if a > 1.0 {
        let pre = if a.is_infinite() { 1.0 } else { a / (a - 1.0) };
        let v = pre * math::log2(1.0 / (1.0 - eps));
        return Ok(BoundValue::new(ExtReal::Finite(v), Branch::AlphaGt1));
    }
    Ok(BoundValue::new(ExtReal::PosInf, Branch::Otherwise))
}

/// Optimal lower correction for the hypothesis-testing divergence:
/// `D_H^ε ≥ D_α − ν_H` for `α < 1`. Negative below `α = ε`: there the
/// testing divergence always exceeds the Rényi one by at least the gap.
pub fn nu_h(eps: f64, alpha: RenyiOrder) -> Result<BoundValue> {
    ensure_eps_open(eps)?;
    let a = alpha.value();
    if a <= eps {
        let v = -math::log2(1.0 / (1.0 - eps));
        return Ok(BoundValue::new(ExtReal::Finite(v), Branch::AlphaLeEps));
    }
    if a < 1.0 {
        let v = a / (1.0 - a) * math::log2(a / eps) - math::log2(1.0 / (1.0 - a));
        return Ok(BoundValue::new(
            ExtReal::Finite(v),
            Branch::AlphaBetweenEpsAnd1,
        ));
    }
    Ok(BoundValue::new(ExtReal::PosInf, Branch::Otherwise))
}

/// Optimal upper correction under subnormalized smoothing. Defined only for
/// `β > α > 1` (where discarding mass helps once `ε` passes the threshold
/// `θ`) and for `0 < α < β < 1` (where it coincides with [`mu`]).
pub fn mu_sub(eps: f64, alpha: RenyiOrder, beta: RenyiOrder) -> Result<BoundValue> {
    ensure_eps_open(eps)?;
    let (a, b) = (alpha.value(), beta.value());
    if a > 1.0 && b > a {
        let th = theta(a, b)?;
        if eps <= th {
            let v = theta_term(a / (a - 1.0), th, eps);
            return Ok(BoundValue::new(ExtReal::Finite(v), Branch::EpsLeTheta));
        }
        let pre = if b.is_infinite() { 1.0 } else { b / (b - 1.0) };
        let v = pre * math::log2(1.0 - eps);
        return Ok(BoundValue::new(ExtReal::Finite(v), Branch::EpsGtTheta));
    }
    if a > 0.0 && a < b && b < 1.0 {
        return mu(eps, alpha, beta);
    }
    Err(Error::OutOfRegime {
        reason: "mu_sub needs beta > alpha > 1 or 0 < alpha < beta < 1",
    })
}

/// The supremum of `D_α(p ‖ u)` over the `ε`-ball around the uniform vector,
/// over all dimensions: `(1/(1−α)) log₂(1/(1−ε))` for `α < 1`, infinite
/// otherwise.
pub fn kappa(eps: f64, alpha: RenyiOrder) -> Result<BoundValue> {
    ensure_eps_open(eps)?;
    let a = alpha.value();
    if a < 1.0 {
        let v = math::log2(1.0 / (1.0 - eps)) / (1.0 - a);
        return Ok(BoundValue::new(ExtReal::Finite(v), Branch::AlphaLt1));
    }
    Ok(BoundValue::new(ExtReal::PosInf, Branch::Otherwise))
}

/// The explicit `β = ∞` form of [`mu`]'s positive part, kept as a separate
/// route for identity tests: `(1/(α−1)) log₂(1/ε) − α log₂(α)/(α−1) +
/// log₂(α−1)`.
pub fn mu_dmax_form(eps: f64, alpha: f64) -> Result<f64> {
    ensure_eps_open(eps)?;
    if alpha <= 1.0 || !alpha.is_finite() {
        return Err(Error::OutOfRegime {
            reason: "dmax form needs finite alpha > 1",
        });
    }
    Ok(
        math::log2(1.0 / eps) / (alpha - 1.0) - alpha * math::log2(alpha) / (alpha - 1.0)
            + math::log2(alpha - 1.0),
    )
}

/// The explicit `β = ∞` form of [`mu_sub`].
pub fn mu_sub_dmax_form(eps: f64, alpha: f64) -> Result<f64> {
    ensure_eps_open(eps)?;
    if alpha <= 1.0 || !alpha.is_finite() {
        return Err(Error::OutOfRegime {
            reason: "dmax form needs finite alpha > 1",
        });
    }
    Ok(if eps < 1.0 / alpha {
        mu_dmax_form(eps, alpha)?
    } else {
        math::log2(1.0 - eps)
    })
}

/// The explicit `β = 2` form of [`mu_sub`] for `1 < α ≤ 2`.
pub fn mu_sub_collision_form(eps: f64, alpha: f64) -> Result<f64> {
    ensure_eps_open(eps)?;
    if !(alpha > 1.0 && alpha <= 2.0) {
        return Err(Error::OutOfRegime {
            reason: "collision form needs 1 < alpha <= 2",
        });
    }
    Ok(if eps <= (2.0 - alpha) / alpha {
        (2.0 - alpha) / (alpha - 1.0) * math::log2((2.0 - alpha) / (alpha * eps))
            + 2.0 * math::log2(2.0 * (alpha - 1.0) / alpha)
    } else {
        2.0 * math::log2(1.0 - eps)
    })
}
