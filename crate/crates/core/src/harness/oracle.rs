//! Brute-force validation of the solvers on small random instances. Every check
//! compares a fast path against plain enumeration.

use itertools::Itertools;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channel::GainTensor;
use crate::config::SystemConfig;
use crate::coordinator::{self, PartialAllocation};
use crate::lbap::{self, CostMatrix};
use crate::metrics;
use crate::seed::{derive_seed, rng_from_seed};

use super::baselines::{self, DEFAULT_EXHAUSTIVE_CAP};
use super::experiment::cell_tensor;
use crate::par::Execution;
use crate::topology::Scenario;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleCheck {
    pub name: String,
    pub trials: usize,
    pub failures: usize,
    /// Worst observed value of the check's statistic.
    pub worst: f64,
}

impl OracleCheck {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub seed: u64,
    pub checks: Vec<OracleCheck>,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(OracleCheck::passed)
    }
}

fn brute_bottleneck(c: &CostMatrix) -> f64 {
    let n = c.size();
    (0..n)
        .permutations(n)
        .map(|p| p.iter().enumerate().map(|(col, &row)| c.get(row, col)).fold(f64::NEG_INFINITY, f64::max))
        .fold(f64::INFINITY, f64::min)
}

/// Random tensor with log-uniform gains over six decades, which exercises the
/// shift and slack handling.
pub fn random_tensor(n: usize, k: usize, seed: u64) -> GainTensor {
    let mut rng = rng_from_seed(seed);
    let mut draw = move || 10f64.powf(rng.random_range(-3.0..3.0));
    let mut g = GainTensor::zeros(n, k);
    for a in 0..n {
        for u in 0..k {
            for l in 0..k {
                g.set_tx(a, u, l, draw());
                for m in (0..n).filter(|&m| m != a) {
                    for i in 0..k {
                        g.set_int(a, u, m, i, l, 0.05 * draw());
                    }
                }
            }
        }
    }
    g
}

fn lbap_check(seed: u64, trials: usize) -> OracleCheck {
    let mut failures = 0;
    let mut worst: f64 = 0.0;
    for t in 0..trials {
        let mut rng = rng_from_seed(derive_seed(seed, t as u64));
        let size = rng.random_range(1..=6);
        let data: Vec<f64> = (0..size * size).map(|_| rng.random_range(-10.0..10.0)).collect();
        let c = CostMatrix::new(size, data).expect("finite");
        let got = lbap::solve_lbap(&c).bottleneck;
        let gap = (got - brute_bottleneck(&c)).abs();
        worst = worst.max(gap);
        failures += usize::from(gap > 0.0);
    }
    OracleCheck { name: "lbap_bottleneck_vs_enumeration".into(), trials, failures, worst }
}

fn degraded_check(seed: u64, trials: usize) -> OracleCheck {
    let cfg = SystemConfig { antennas: 1, tx_power_w: 1.0, noise_power_w: 0.1, ..Default::default() };
    let (n, k) = (3, 3);
    let mut failures = 0;
    let mut worst: f64 = 0.0;
    for t in 0..trials {
        let g = random_tensor(n, k, derive_seed(seed, t as u64));
        let fixed: PartialAllocation = vec![Some(vec![0, 1, 2]), Some(vec![2, 0, 1]), None];
        let sol = coordinator::solve_degraded(&g, &fixed, 2, &cfg);
        let best = (0..k)
            .permutations(k)
            .map(|p| {
                let mut a = fixed.clone();
                a[2] = Some(p);
                coordinator::subsystem_min_sinr(&g, &a, cfg.noise_term())
            })
            .fold(f64::NEG_INFINITY, f64::max);
        let rel = (best - sol.achieved) / best;
        worst = worst.max(rel);
        let eps = cfg.bisection_tol;
        failures += usize::from(rel > eps * (1.0 + eps));
    }
    OracleCheck { name: "degraded_vs_enumeration".into(), trials, failures, worst }
}

fn greedy_checks(seed: u64, trials: usize) -> (OracleCheck, OracleCheck) {
    let base = SystemConfig { num_fdcs: 3, users_per_fdc: 3, area_radius_m: 274.0, ..Default::default() };
    let mut failures = 0;
    let mut ratio_sum = 0.0;
    let mut worst: f64 = f64::INFINITY;
    for t in 0..trials {
        let cfg = base.clone().with_tx_power_dbm(30.0);
        let drop_seed = derive_seed(seed, t as u64);
        let scenario = Scenario::generate(&cfg, drop_seed);
        let g = cell_tensor(&cfg, &scenario, derive_seed(drop_seed, 0), Execution::Sequential);
        let greedy = coordinator::solve_greedy(&g, &cfg);
        let exact = baselines::solve_exhaustive(&g, &cfg, DEFAULT_EXHAUSTIVE_CAP).expect("3 FDCs of 3 users fit");
        let rate = |a| metrics::min_rate(&metrics::sinr_table(&g, a, &cfg));
        let (rg, re) = (rate(&greedy.allocation), rate(&exact));
        // The exhaustive result is the optimum; greedy can never beat it.
        failures += usize::from(rg > re * (1.0 + 1e-12));
        let ratio = rg / re;
        ratio_sum += ratio;
        worst = worst.min(ratio);
    }
    let dominance = OracleCheck { name: "exhaustive_dominates_greedy".into(), trials, failures, worst };
    // The mean ratio is the quality statistic; individual drops may be far off.
    let mean = ratio_sum / trials as f64;
    let quality =
        OracleCheck { name: "greedy_mean_ratio_at_least_0.9".into(), trials, failures: usize::from(mean < 0.9), worst: mean };
    (dominance, quality)
}

fn single_fdc_check(seed: u64, trials: usize) -> OracleCheck {
    let mut failures = 0;
    let mut worst: f64 = 0.0;
    for t in 0..trials {
        let g = random_tensor(1, 5, derive_seed(seed, t as u64));
        let got = baselines::own_gain_assignment(&g, 0);
        let value = |p: &[usize]| p.iter().enumerate().map(|(l, &u)| g.tx(0, u, l)).fold(f64::INFINITY, f64::min);
        let best = (0..5).permutations(5).map(|p| value(&p)).fold(f64::NEG_INFINITY, f64::max);
        let gap = best - value(&got);
        worst = worst.max(gap);
        failures += usize::from(gap > 0.0);
    }
    OracleCheck { name: "single_fdc_vs_enumeration".into(), trials, failures, worst }
}

/// Runs every check with `trials` instances each, derived from `seed`.
pub fn run_oracle_suite(seed: u64, trials: usize) -> OracleReport {
    let (dominance, quality) = greedy_checks(derive_seed(seed, 2), trials);
    let checks = vec![
        lbap_check(derive_seed(seed, 0), trials),
        degraded_check(derive_seed(seed, 1), trials),
        dominance,
        quality,
        single_fdc_check(derive_seed(seed, 3), trials),
    ];
    OracleReport { seed, checks }
}
