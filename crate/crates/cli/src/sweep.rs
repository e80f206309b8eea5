//! Validity sweeps over random instances plus achievability-gap reporting.
//!
//! Five inequality checks are cycled over seeded instances; each record
//! stores both sides and the margin `lhs − rhs` (a violation would be a
//! positive margin beyond the configured slack). Alongside, the known
//! achievability families are evaluated over the configured dimensions and
//! the three-block search is run for the two Rényi corrections, so the
//! report shows how closely each closed form is attained.

use divsmooth_core::bounds;
use divsmooth_core::divergence::{
    hypothesis_testing, renyi, smoothed_renyi, smoothed_renyi_sub, RenyiOrder,
};
use divsmooth_core::families::{
    mu_h_family, nu_h_family, steepest_uniform_family, three_block_search, SearchTarget,
};
use divsmooth_core::prob::sort_desc;
use divsmooth_core::ProbVec;
use rayon::prelude::*;
use std::time::{Duration, Instant};

use crate::sample;

/// Sweep parameters; the JSON mirror accepts `"inf"` in the order grids.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub seed: u64,
    pub instances: usize,
    pub dims: Vec<usize>,
    pub eps_grid: Vec<f64>,
    pub alpha_grid: Vec<f64>,
    pub beta_grid: Vec<f64>,
    pub oracle_tol: f64,
    pub slack: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            seed: 20260808,
            instances: 10_000,
            dims: vec![2, 3, 4, 5, 6, 7, 8, 100, 10_000, 1_000_000],
            eps_grid: vec![0.05, 0.1, 0.3, 0.6],
            alpha_grid: vec![0.0, 0.25, 0.5, 0.9, 1.3, 2.0, 3.0, f64::INFINITY],
            beta_grid: vec![0.6, 0.9, 1.5, 2.0, 5.0, f64::INFINITY],
            oracle_tol: 1e-4,
            slack: 1e-9,
        }
    }
}

impl SweepConfig {
    /// Parse the JSON mirror, accepting `"inf"` strings inside grids.
    pub fn from_json(text: &str) -> Result<Self, String> {
        let value: serde_json::Value = serde_json::from_str(text).map_err(|e| e.to_string())?;
        let mut cfg = SweepConfig::default();
        let obj = value.as_object().ok_or("config must be a JSON object")?;
        for (key, val) in obj {
            match key.as_str() {
                "seed" => cfg.seed = val.as_u64().ok_or("seed must be an integer")?,
                "instances" => {
                    cfg.instances = val.as_u64().ok_or("instances must be an integer")? as usize
                }
                "dims" => {
                    cfg.dims = val
                        .as_array()
                        .ok_or("dims must be an array")?
                        .iter()
                        .map(|v| {
                            v.as_u64()
                                .map(|u| u as usize)
                                .ok_or("dims entries must be integers")
                        })
                        .collect::<Result<_, _>>()?
                }
                "eps_grid" => cfg.eps_grid = parse_f64_array(val)?,
                "alpha_grid" => cfg.alpha_grid = parse_f64_array(val)?,
                "beta_grid" => cfg.beta_grid = parse_f64_array(val)?,
                "oracle_tol" => {
                    cfg.oracle_tol = val.as_f64().ok_or("oracle_tol must be a number")?
                }
                "slack" => cfg.slack = val.as_f64().ok_or("slack must be a number")?,
                other => return Err(format!("unknown config key: {other}")),
            }
        }
        Ok(cfg)
    }

    fn instance_dims(&self) -> Vec<usize> {
        let dims: Vec<usize> = self
            .dims
            .iter()
            .copied()
            .filter(|&d| (2..=8).contains(&d))
            .collect();
        if dims.is_empty() {
            vec![4]
        } else {
            dims
        }
    }

    fn family_dims(&self) -> Vec<usize> {
        self.dims.iter().copied().filter(|&d| d >= 2).collect()
    }
}

fn parse_f64_array(val: &serde_json::Value) -> Result<Vec<f64>, String> {
    val.as_array()
        .ok_or("grid must be an array")?
        .iter()
        .map(|v| {
            if let Some(x) = v.as_f64() {
                Ok(x)
            } else if let Some(s) = v.as_str() {
                match s {
                    "inf" => Ok(f64::INFINITY),
                    "-inf" => Ok(f64::NEG_INFINITY),
                    _ => s.parse::<f64>().map_err(|e| e.to_string()),
                }
            } else {
                Err("grid entries must be numbers or \"inf\"".into())
            }
        })
        .collect()
}

/// The five validity checks cycled over instances.
pub const CHECKS: [&str; 5] = [
    "renyi_upper",
    "renyi_lower",
    "dh_upper",
    "dh_lower",
    "sub_upper",
];

/// One validity evaluation: the inequality sides and the signed margin.
#[derive(Debug, Clone)]
pub struct SweepRecord {
    pub check: &'static str,
    pub d: usize,
    pub eps: f64,
    pub alpha: f64,
    pub beta: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
}

/// Gap between a closed-form correction and a family/search evaluation.
#[derive(Debug, Clone)]
pub struct AchievabilityGap {
    pub bound: &'static str,
    /// Dimension of the family member; 0 for the dimension-free searches.
    pub d: usize,
    pub gap: f64,
}

#[derive(Debug)]
pub struct SweepReport {
    pub records: Vec<SweepRecord>,
    pub max_violation: f64,
    pub gaps: Vec<AchievabilityGap>,
    pub wall_time: Duration,
}

fn order(v: f64) -> RenyiOrder {
    RenyiOrder::new(v).expect("grid orders are valid")
}

/// Parameter combos from the grids that give each check a finite bound (the
/// finiteness branches depend on the orders only, not on eps).
struct ReGrids {
    renyi_upper: Vec<(f64, f64)>,
    renyi_lower: Vec<(f64, f64)>,
    dh_upper: Vec<f64>,
    dh_lower: Vec<f64>,
    sub_upper: Vec<(f64, f64)>,
}

impl ReGrids {
    fn build(cfg: &SweepConfig) -> Self {
        let mut grids = ReGrids {
            renyi_upper: Vec::new(),
            renyi_lower: Vec::new(),
            dh_upper: Vec::new(),
            dh_lower: Vec::new(),
            sub_upper: Vec::new(),
        };
        for &a in &cfg.alpha_grid {
            if a > 1.0 {
                grids.dh_upper.push(a);
            }
            if a < 1.0 {
                grids.dh_lower.push(a);
            }
            for &b in &cfg.beta_grid {
                if bounds::mu(0.5, order(a), order(b)).is_ok_and(|v| v.value.is_finite()) {
                    grids.renyi_upper.push((a, b));
                }
                if bounds::nu(0.5, order(a), order(b)).is_ok_and(|v| v.value.is_finite()) {
                    grids.renyi_lower.push((a, b));
                }
                if bounds::mu_sub(0.5, order(a), order(b)).is_ok_and(|v| v.value.is_finite()) {
                    grids.sub_upper.push((a, b));
                }
            }
        }
        grids
    }
}

/// Evaluate one instance; `None` only when the grids offer no parameters in
/// the finite regime of the cycled check.
fn run_instance(
    cfg: &SweepConfig,
    grids: &ReGrids,
    idx: usize,
    dims: &[usize],
) -> Option<SweepRecord> {
    let check = CHECKS[idx % CHECKS.len()];
    let d = dims[(idx / CHECKS.len()) % dims.len()];
    let eps = cfg.eps_grid[(idx / (CHECKS.len() * dims.len())) % cfg.eps_grid.len()];
    let pick = |pairs: &[(f64, f64)]| -> Option<(f64, f64)> {
        if pairs.is_empty() {
            None
        } else {
            Some(pairs[(idx / CHECKS.len()) % pairs.len()])
        }
    };
    let pick1 = |vals: &[f64]| -> Option<f64> {
        if vals.is_empty() {
            None
        } else {
            Some(vals[(idx / CHECKS.len()) % vals.len()])
        }
    };
    let conc = sample::CONCENTRATIONS[idx % sample::CONCENTRATIONS.len()];

    let mut rng = sample::instance_rng(cfg.seed, idx as u64);
    let p = sample::dirichlet(&mut rng, d, conc);
    let u = ProbVec::uniform(d);

    let record = |lhs: f64, rhs: f64, alpha: f64, beta: f64| SweepRecord {
        check,
        d,
        eps,
        alpha,
        beta,
        lhs,
        rhs,
        margin: lhs - rhs,
    };

    match check {
        "renyi_upper" => {
            let (alpha, beta) = pick(&grids.renyi_upper)?;
            let bound = bounds::mu(eps, order(alpha), order(beta)).ok()?;
            let lhs = smoothed_renyi(&p, &u, eps, order(beta)).ok()?.to_f64()
                - renyi(&p, &u, order(alpha)).ok()?.to_f64();
            Some(record(lhs, bound.value.to_f64(), alpha, beta))
        }
        "renyi_lower" => {
            let (alpha, beta) = pick(&grids.renyi_lower)?;
            let bound = bounds::nu(eps, order(alpha), order(beta)).ok()?;
            let lhs = renyi(&p, &u, order(alpha)).ok()?.to_f64()
                - smoothed_renyi(&p, &u, eps, order(beta)).ok()?.to_f64();
            Some(record(lhs, bound.value.to_f64(), alpha, beta))
        }
        "dh_upper" => {
            let alpha = pick1(&grids.dh_upper)?;
            let bound = bounds::mu_h(eps, order(alpha)).ok()?;
            let q = sample::dirichlet(&mut rng, d, 1.0);
            let lhs = hypothesis_testing(&p, &q, eps).ok()?.to_f64()
                - renyi(&p, &q, order(alpha)).ok()?.to_f64();
            Some(record(lhs, bound.value.to_f64(), alpha, f64::NAN))
        }
        "dh_lower" => {
            let alpha = pick1(&grids.dh_lower)?;
            let bound = bounds::nu_h(eps, order(alpha)).ok()?;
            let q = sample::dirichlet(&mut rng, d, 1.0);
            let lhs = renyi(&p, &q, order(alpha)).ok()?.to_f64()
                - hypothesis_testing(&p, &q, eps).ok()?.to_f64();
            Some(record(lhs, bound.value.to_f64(), alpha, f64::NAN))
        }
        "sub_upper" => {
            let (alpha, beta) = pick(&grids.sub_upper)?;
            let bound = bounds::mu_sub(eps, order(alpha), order(beta)).ok()?;
            let sorted = sort_desc(&p).0;
            let lhs = smoothed_renyi_sub(&sorted, eps, order(beta)).ok()?.to_f64()
                - renyi(&sorted, &u, order(alpha)).ok()?.to_f64();
            Some(record(lhs, bound.value.to_f64(), alpha, beta))
        }
        _ => unreachable!(),
    }
}

/// Achievability gaps for the closed-form corrections, at the canonical
/// parameter points, over the configured dimensions.
fn achievability_gaps(cfg: &SweepConfig) -> Vec<AchievabilityGap> {
    let mut gaps = Vec::new();
    let dims = cfg.family_dims();

    // hypothesis-testing upper correction at (eps, alpha) = (0.5, 2)
    let target = bounds::mu_h(0.5, order(2.0))
        .expect("finite")
        .value
        .to_f64();
    for &d in &dims {
        let p = mu_h_family(d, 0.5).expect("valid family");
        let u = ProbVec::uniform(d);
        let got = hypothesis_testing(&p, &u, 0.5).expect("finite").to_f64()
            - renyi(&p, &u, order(2.0)).expect("finite").to_f64();
        gaps.push(AchievabilityGap {
            bound: "mu_h",
            d,
            gap: (got - target).abs(),
        });
    }

    // hypothesis-testing lower correction at (eps, alpha) = (0.25, 0.5)
    let target = bounds::nu_h(0.25, order(0.5))
        .expect("finite")
        .value
        .to_f64();
    for &d in &dims {
        if let Ok(p) = nu_h_family(d, 0.25, 0.5) {
            let u = ProbVec::uniform(d);
            let got = renyi(&p, &u, order(0.5)).expect("finite").to_f64()
                - hypothesis_testing(&p, &u, 0.25).expect("finite").to_f64();
            gaps.push(AchievabilityGap {
                bound: "nu_h",
                d,
                gap: (got - target).abs(),
            });
        }
    }

    // ball supremum at (eps, alpha) = (0.5, 0.5)
    let target = bounds::kappa(0.5, order(0.5))
        .expect("finite")
        .value
        .to_f64();
    for &d in &dims {
        let p = steepest_uniform_family(d, 0.5).expect("valid family");
        let u = ProbVec::uniform(d);
        let got = renyi(&p, &u, order(0.5)).expect("finite").to_f64();
        gaps.push(AchievabilityGap {
            bound: "kappa",
            d,
            gap: (got - target).abs(),
        });
    }

    // dimension-free searches for the Rényi corrections
    let target = bounds::mu(0.125, order(2.0), RenyiOrder::Infinity)
        .expect("finite")
        .value
        .to_f64();
    let (got, _) = three_block_search(
        0.125,
        order(2.0),
        RenyiOrder::Infinity,
        SearchTarget::UpperGap,
        50,
    )
    .expect("search runs");
    gaps.push(AchievabilityGap {
        bound: "mu_search",
        d: 0,
        gap: (got - target).abs(),
    });

    let target = bounds::nu(0.5, order(0.5), order(2.0))
        .expect("finite")
        .value
        .to_f64();
    let (got, _) = three_block_search(0.5, order(0.5), order(2.0), SearchTarget::LowerGap, 50)
        .expect("search runs");
    gaps.push(AchievabilityGap {
        bound: "nu_search",
        d: 0,
        gap: (got - target).abs(),
    });

    gaps
}

/// Run the full sweep. Deterministic for a fixed config: instances are
/// evaluated in parallel but reduced in index order.
pub fn sweep_bounds(cfg: &SweepConfig) -> SweepReport {
    let start = Instant::now();
    let dims = cfg.instance_dims();
    let records: Vec<SweepRecord> =
        if cfg.eps_grid.is_empty() || cfg.alpha_grid.is_empty() || cfg.beta_grid.is_empty() {
            Vec::new()
        } else {
            let grids = ReGrids::build(cfg);
            (0..cfg.instances)
                .into_par_iter()
                .map(|idx| run_instance(cfg, &grids, idx, &dims))
                .collect::<Vec<_>>()
                .into_iter()
                .flatten()
                .collect()
        };
    let max_violation = records
        .iter()
        .map(|r| r.margin)
        .fold(f64::NEG_INFINITY, f64::max);
    let gaps = if cfg.instances == 0 {
        Vec::new()
    } else {
        achievability_gaps(cfg)
    };
    SweepReport {
        records,
        max_violation,
        gaps,
        wall_time: start.elapsed(),
    }
}

impl SweepReport {
    /// CSV with one row per record followed by the gap rows. Infinities are
    /// rendered as `INF`/`-INF`; the `beta` field is empty for the checks
    /// that have no second order.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("kind,check,d,eps,alpha,beta,lhs,rhs,margin,bound,gap\n");
        for r in &self.records {
            out.push_str(&format!(
                "record,{},{},{},{},{},{},{},{},,\n",
                r.check,
                r.d,
                crate::doc::fmt_sig(r.eps),
                crate::doc::fmt_csv_num(r.alpha),
                if r.beta.is_nan() {
                    String::new()
                } else {
                    crate::doc::fmt_csv_num(r.beta)
                },
                crate::doc::fmt_csv_num(r.lhs),
                crate::doc::fmt_csv_num(r.rhs),
                crate::doc::fmt_csv_num(r.margin),
            ));
        }
        for g in &self.gaps {
            out.push_str(&format!(
                "gap,,{},,,,,,,{},{}\n",
                g.d,
                g.bound,
                crate::doc::fmt_sig(g.gap)
            ));
        }
        out
    }
}
