//! Seeded random instances for sweeps and verification runs.
//!
//! Every instance derives its own ChaCha stream from `(seed, index)`, so a
//! sweep is reproducible no matter how work is scheduled across threads.

use divsmooth_core::majorization::StochasticMatrix;
use divsmooth_core::prob::tv_distance;
use divsmooth_core::ProbVec;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};

/// Concentrations cycled through when sampling shapes: peaked, flat and
/// intermediate.
pub const CONCENTRATIONS: [f64; 3] = [0.3, 1.0, 3.0];

/// Independent generator for instance `idx` of a run seeded with `seed`.
pub fn instance_rng(seed: u64, idx: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ idx.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// A symmetric Dirichlet sample of dimension `d`.
pub fn dirichlet(rng: &mut ChaCha8Rng, d: usize, concentration: f64) -> ProbVec {
    let gamma = Gamma::new(concentration, 1.0).expect("valid gamma shape");
    loop {
        let raw: Vec<f64> = (0..d).map(|_| gamma.sample(rng)).collect();
        let sum: f64 = raw.iter().sum();
        if sum > 1e-300 && raw.iter().all(|v| v.is_finite()) {
            return ProbVec::new(raw.iter().map(|v| v / sum).collect::<Vec<_>>())
                .expect("normalized sample");
        }
    }
}

/// A uniform point of the total-variation ball around `p`: mix toward a
/// random simplex point with a radius capped at `eps`.
pub fn ball_member(rng: &mut ChaCha8Rng, p: &ProbVec, eps: f64) -> ProbVec {
    let z = dirichlet(rng, p.dim(), 1.0);
    let dist = tv_distance(p, &z).expect("same dimension");
    if dist < 1e-12 {
        return p.clone();
    }
    let t = rng.random::<f64>() * (eps / dist).min(1.0);
    let mixed: Vec<f64> = p
        .as_slice()
        .iter()
        .zip(z.as_slice())
        .map(|(&a, &b)| a + t * (b - a))
        .collect();
    ProbVec::new(mixed).expect("convex combination stays on the simplex")
}

/// A random column-stochastic matrix with `rows × cols` shape.
pub fn stochastic(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> StochasticMatrix {
    let mut entries = vec![0.0; rows * cols];
    for c in 0..cols {
        let col = dirichlet(rng, rows, 1.0);
        for r in 0..rows {
            entries[r * cols + c] = col[r];
        }
    }
    StochasticMatrix::new(entries, rows, cols).expect("columns normalized")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instances_are_reproducible() {
        let a = dirichlet(&mut instance_rng(7, 3), 5, 0.3);
        let b = dirichlet(&mut instance_rng(7, 3), 5, 0.3);
        assert_eq!(a.as_slice(), b.as_slice());
        let c = dirichlet(&mut instance_rng(7, 4), 5, 0.3);
        assert_ne!(a.as_slice(), c.as_slice());
    }

    #[test]
    fn ball_members_stay_in_ball() {
        let mut rng = instance_rng(11, 0);
        for _ in 0..200 {
            let p = dirichlet(&mut rng, 4, 1.0);
            let eps = rng.random::<f64>();
            let member = ball_member(&mut rng, &p, eps);
            assert!(tv_distance(&p, &member).unwrap() <= eps + 1e-12);
        }
    }
}
