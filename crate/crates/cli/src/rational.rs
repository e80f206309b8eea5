//! Rational approximation of a reference vector, for reducing a general
//! reference to a uniform one.
//!
//! The reduction is exact only for exactly rational references; this helper
//! picks continued-fraction convergents per coordinate (denominator capped),
//! takes a common denominator, and renormalizes the numerators to sum to it.
//! The result is the best the reduction can do for an irrational reference —
//! callers should treat downstream values as approximations at the chosen
//! denominator.

use divsmooth_core::majorization::RationalRef;
use divsmooth_core::Error;

/// Denominator of the last continued-fraction convergent of `x` with
/// denominator at most `max_den`: `q_n = a_n q_{n-1} + q_{n-2}` over the
/// fraction digits of `x`.
fn convergent_denominator(x: f64, max_den: u64) -> u64 {
    let (mut q_prev, mut q_cur) = (0u64, 1u64);
    let mut frac = x - x.floor();
    for _ in 0..64 {
        if frac < 1e-12 {
            break;
        }
        let inv = 1.0 / frac;
        let a = inv.floor();
        if !a.is_finite() || a > max_den as f64 {
            break;
        }
        let next = (a as u64).saturating_mul(q_cur).saturating_add(q_prev);
        if next > max_den {
            break;
        }
        q_prev = q_cur;
        q_cur = next;
        frac = inv - a;
    }
    q_cur
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Approximate `q` as `(k_1/k, …, k_d/k)` with `k <= max_denominator`,
/// positive numerators summing to `k`. Requires a fully supported `q`.
pub fn approximate_reference(q: &[f64], max_denominator: u64) -> Result<RationalRef, Error> {
    if q.is_empty() {
        return Err(Error::Empty);
    }
    if q.len() as u64 > max_denominator {
        return Err(Error::Infeasible {
            reason: "denominator cap below the dimension",
        });
    }
    if q.iter().any(|&x| x <= 0.0) {
        return Err(Error::Infeasible {
            reason: "rational reduction needs a fully supported reference",
        });
    }

    // common denominator from the per-coordinate convergents, capped
    let mut k: u64 = 1;
    for &x in q {
        let d = convergent_denominator(x, max_denominator);
        let g = gcd(k, d);
        let lcm = (k / g).saturating_mul(d);
        k = if lcm > max_denominator {
            max_denominator
        } else {
            lcm
        };
        if k == max_denominator {
            break;
        }
    }
    // at least the dimension, so unit numerators can fit
    k = k.max(q.len() as u64);

    // numerators by rounding, then repair the sum on the largest remainders
    let mut nums: Vec<u64> = q
        .iter()
        .map(|&x| ((x * k as f64).round() as u64).max(1))
        .collect();
    let mut total: i64 = nums.iter().map(|&n| n as i64).sum();
    let mut order: Vec<usize> = (0..q.len()).collect();
    order.sort_by(|&i, &j| {
        let ri = q[i] * k as f64 - (q[i] * k as f64).round();
        let rj = q[j] * k as f64 - (q[j] * k as f64).round();
        rj.partial_cmp(&ri).unwrap().then(i.cmp(&j))
    });
    let mut cursor = 0usize;
    while total != k as i64 {
        let i = order[cursor % order.len()];
        cursor += 1;
        if total < k as i64 {
            nums[i] += 1;
            total += 1;
        } else if nums[i] > 1 {
            nums[i] -= 1;
            total -= 1;
        }
    }
    RationalRef::new(nums, k)
}
