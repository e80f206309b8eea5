//! Cross-module invariants: metric/norm properties, order identities, and
//! the information-spectrum identity tying the upper ratio cutoff to the
//! hypothesis-testing divergence.

use divsmooth_core::divergence::{hypothesis_testing, renyi, RenyiOrder};
use divsmooth_core::majorization::{majorizes, rational_reduce, RationalRef};
use divsmooth_core::prob::{ky_fan, plus_minus_mass, ratio_order, sort_desc, tv_distance};
use divsmooth_core::smoothing::{dmax_cutoffs, flattest, relative_flattest, steepest};
use divsmooth_core::{ExtReal, ProbVec};
use proptest::prelude::*;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

fn normalized(raw: Vec<f64>) -> ProbVec {
    let s: f64 = raw.iter().sum();
    ProbVec::new(raw.iter().map(|v| v / s).collect::<Vec<_>>()).unwrap()
}

fn prob_strategy(max_d: usize) -> impl Strategy<Value = ProbVec> {
    prop::collection::vec(1e-4..1.0f64, 2..=max_d).prop_map(normalized)
}

fn pair_strategy(max_d: usize) -> impl Strategy<Value = (ProbVec, ProbVec)> {
    (2..=max_d).prop_flat_map(|d| {
        (
            prop::collection::vec(1e-4..1.0f64, d..=d).prop_map(normalized),
            prop::collection::vec(1e-4..1.0f64, d..=d).prop_map(normalized),
        )
    })
}

proptest! {
    #[test]
    fn ky_fan_monotone_and_total(p in prob_strategy(8)) {
        let d = p.dim();
        let mut prev = 0.0;
        for k in 1..=d {
            let v = ky_fan(&p, k).unwrap();
            prop_assert!(v >= prev - 1e-12);
            prev = v;
        }
        prop_assert!((ky_fan(&p, d).unwrap() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn tv_is_a_metric((p, q) in pair_strategy(8), raw in prop::collection::vec(1e-4..1.0f64, 2..=8)) {
        if raw.len() == p.dim() {
            let r = normalized(raw);
            let pq = tv_distance(&p, &q).unwrap();
            let qp = tv_distance(&q, &p).unwrap();
            prop_assert_eq!(pq, qp);
            let pr = tv_distance(&p, &r).unwrap();
            let rq = tv_distance(&r, &q).unwrap();
            prop_assert!(pq <= pr + rq + 1e-12);
            prop_assert!((0.0..=1.0 + 1e-12).contains(&pq));
        }
    }

    #[test]
    fn signed_difference_masses_agree_with_tv((p, q) in pair_strategy(8)) {
        let diff: Vec<f64> = p.as_slice().iter().zip(q.as_slice()).map(|(a, b)| a - b).collect();
        let (plus, minus) = plus_minus_mass(&diff);
        let tv = tv_distance(&p, &q).unwrap();
        prop_assert!((plus - minus).abs() <= 1e-12);
        prop_assert!((plus - tv).abs() <= 1e-12);
    }

    #[test]
    fn ratios_recover_p((p, q) in pair_strategy(8)) {
        let ord = ratio_order(&p, &q).unwrap();
        for i in 0..ord.dim() {
            let qx = ord.q_at(i);
            if qx > 0.0 {
                prop_assert!((ord.ratios[i].to_f64() * qx - ord.p_at(i)).abs() <= 1e-12);
            }
        }
        // ratios are non-increasing along the ordering
        for w in ord.ratios.windows(2) {
            prop_assert!(w[1] <= w[0] || (w[0].to_f64() - w[1].to_f64()).abs() <= 1e-12);
        }
    }

    #[test]
    fn clip_stays_in_ball_and_below((p, q) in pair_strategy(6), eps in 0.01..0.9f64) {
        let sorted = sort_desc(&p).0;
        let (flat, _) = flattest(&sorted, eps).unwrap();
        prop_assert!(tv_distance(&sorted, &flat).unwrap() <= eps + 1e-12);
        prop_assert!(majorizes(&sorted, &flat));
        let steep = steepest(&sorted, eps).unwrap();
        prop_assert!(tv_distance(&sorted, &steep).unwrap() <= eps + 1e-12);
        prop_assert!(majorizes(&steep, &sorted));

        let rel = relative_flattest(&p, &q, eps).unwrap();
        prop_assert!(tv_distance(&p, &rel).unwrap() <= eps + 1e-12);
        prop_assert!((rel.as_slice().iter().sum::<f64>() - 1.0).abs() <= 1e-10);
    }
}

#[test]
fn rational_reduction_preserves_divergences() {
    let mut rng = ChaCha8Rng::seed_from_u64(71);
    let orders = [0.0, 0.5, 1.0, 2.0, f64::INFINITY];
    for _ in 0..1000 {
        let d = rng.random_range(2..=5);
        let nums: Vec<u64> = (0..d).map(|_| rng.random_range(1..=5)).collect();
        let k: u64 = nums.iter().sum();
        let qref = RationalRef::new(nums, k).unwrap();
        let q = qref.to_prob();
        let raw: Vec<f64> = (0..d).map(|_| 0.05 + rng.random::<f64>()).collect();
        let s: f64 = raw.iter().sum();
        let p = ProbVec::new(raw.iter().map(|v| v / s).collect::<Vec<_>>()).unwrap();

        let t = rational_reduce(&p, &qref).unwrap();
        let u = ProbVec::uniform(k as usize);
        for &a in &orders {
            let lhs = renyi(&p, &q, RenyiOrder::new(a).unwrap()).unwrap().to_f64();
            let rhs = renyi(&t, &u, RenyiOrder::new(a).unwrap()).unwrap().to_f64();
            assert!((lhs - rhs).abs() <= 1e-10, "order {a}: {lhs} vs {rhs}");
        }
        for eps in [0.1, 0.3] {
            let lhs = hypothesis_testing(&p, &q, eps).unwrap().to_f64();
            let rhs = hypothesis_testing(&t, &u, eps).unwrap().to_f64();
            assert!((lhs - rhs).abs() <= 1e-10, "eps {eps}: {lhs} vs {rhs}");
        }
    }
}

/// Smoothing is divergence-independent: the clipped vector minimizes every
/// divergence at once. Total variation against the reference makes that
/// checkable in closed form, since the minimum over the ball is exactly
/// `TV(p, q) − ε` by the triangle inequality.
#[test]
fn smoothed_total_variation_closed_form() {
    use divsmooth_core::divergence::smoothed;
    let tv_div = |a: &ProbVec, b: &ProbVec| -> divsmooth_core::Result<ExtReal> {
        Ok(ExtReal::Finite(tv_distance(a, b)?))
    };
    let mut rng = ChaCha8Rng::seed_from_u64(73);
    for _ in 0..500 {
        let d = rng.random_range(2..=8);
        let raw: Vec<f64> = (0..d).map(|_| 0.01 + rng.random::<f64>()).collect();
        let sum: f64 = raw.iter().sum();
        let p = ProbVec::new(raw.iter().map(|v| v / sum).collect::<Vec<_>>()).unwrap();
        let raw: Vec<f64> = (0..d).map(|_| 0.01 + rng.random::<f64>()).collect();
        let sum: f64 = raw.iter().sum();
        let q = ProbVec::new(raw.iter().map(|v| v / sum).collect::<Vec<_>>()).unwrap();
        let tv = tv_distance(&p, &q).unwrap();
        let eps = 0.95 * rng.random::<f64>() * tv;
        let smoothed_tv = smoothed(&tv_div, &p, &q, eps).unwrap().to_f64();
        assert!(
            (smoothed_tv - (tv - eps)).abs() <= 1e-12,
            "{smoothed_tv} vs {}",
            tv - eps
        );
    }
}

/// The upper cutoff is a supremum of penalized testing divergences:
/// `log₂ a = sup_{δ ∈ (ε, 1]} D_H^{1−δ} + log₂(δ − ε)`, checked on a dense
/// grid augmented with the exact breakpoints (prefix masses of `p`).
#[test]
fn info_spectrum_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(72);
    for _ in 0..200 {
        let d = rng.random_range(2..=8);
        let raw: Vec<f64> = (0..d).map(|_| 0.02 + rng.random::<f64>()).collect();
        let s: f64 = raw.iter().sum();
        let p = ProbVec::new(raw.iter().map(|v| v / s).collect::<Vec<_>>()).unwrap();
        let raw: Vec<f64> = (0..d).map(|_| 0.02 + rng.random::<f64>()).collect();
        let s: f64 = raw.iter().sum();
        let q = ProbVec::new(raw.iter().map(|v| v / s).collect::<Vec<_>>()).unwrap();
        let eps = 0.05 + 0.6 * rng.random::<f64>();

        let ord = ratio_order(&p, &q).unwrap();
        let (a, _) = dmax_cutoffs(&ord, eps).unwrap();
        let lhs = a.to_f64().log2();

        let mut deltas: Vec<f64> = (1..=10_000)
            .map(|i| eps + (1.0 - eps) * i as f64 / 10_000.0)
            .collect();
        let mut acc = 0.0;
        for i in 0..d {
            acc += ord.p_at(i);
            if acc > eps && acc <= 1.0 {
                deltas.push(acc);
            }
        }
        let mut sup = f64::NEG_INFINITY;
        for delta in deltas {
            if delta <= eps || delta > 1.0 {
                continue;
            }
            let dh = hypothesis_testing(&p, &q, 1.0 - delta).unwrap();
            if let ExtReal::Finite(v) = dh {
                sup = sup.max(v + (delta - eps).log2());
            }
        }
        assert!((lhs - sup).abs() <= 1e-4, "{lhs} vs {sup}");
    }
}
