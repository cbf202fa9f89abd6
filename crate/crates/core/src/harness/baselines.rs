use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::channel::GainTensor;
use crate::config::SystemConfig;
use crate::error::HarnessError;
use crate::lbap::{self, CostMatrix};
use crate::metrics::{self, Allocation};

/// Default ceiling on `(K!)^N` for exhaustive search.
pub const DEFAULT_EXHAUSTIVE_CAP: u64 = 1_000_000;

/// `(K!)^N` as a float, so that huge instances do not overflow.
pub fn exhaustive_size(num_fdcs: usize, users_per_fdc: usize) -> f64 {
    let fact: f64 = (1..=users_per_fdc).map(|x| x as f64).product();
    fact.powi(num_fdcs as i32)
}

/// Allocation maximising the minimum SINR over every combination of per-FDC
/// permutations. The first maximiser in lexicographic order wins.
pub fn solve_exhaustive(g: &GainTensor, cfg: &SystemConfig, cap: u64) -> Result<Allocation, HarnessError> {
    let (n, k) = (g.num_fdcs, g.users_per_fdc);
    let required = exhaustive_size(n, k);
    if required > cap as f64 {
        return Err(HarnessError::CapExceeded { required, cap });
    }
    let noise = cfg.noise_term();
    let perms: Vec<Vec<usize>> = (0..k).permutations(k).collect();
    let mut digits = vec![0usize; n];
    let mut alloc = Allocation { perm: vec![perms[0].clone(); n] };
    let mut best = (metrics::min_sinr(g, &alloc, noise), alloc.clone());

    // Odometer with FDC 0 as the most significant digit.
    loop {
        let mut pos = n;
        loop {
            if pos == 0 {
                return Ok(best.1);
            }
            pos -= 1;
            digits[pos] += 1;
            if digits[pos] < perms.len() {
                alloc.perm[pos].clone_from(&perms[digits[pos]]);
                break;
            }
            digits[pos] = 0;
            alloc.perm[pos].clone_from(&perms[0]);
        }
        let v = metrics::min_sinr(g, &alloc, noise);
        if v > best.0 {
            best = (v, alloc.clone());
        }
    }
}

/// Bottleneck assignment maximising the smallest own-link gain of one FDC.
pub fn own_gain_assignment(g: &GainTensor, fdc: usize) -> Vec<usize> {
    let costs = CostMatrix::from_fn(g.users_per_fdc, |k, l| -g.tx(fdc, k, l)).expect("finite gains");
    lbap::solve_lbap(&costs).perm
}

/// Uncoordinated baseline: each FDC optimises its own transmission gains and
/// ignores cross-FDC interference.
pub fn solve_single_fdc(g: &GainTensor, _cfg: &SystemConfig) -> Allocation {
    Allocation { perm: (0..g.num_fdcs).map(|n| own_gain_assignment(g, n)).collect() }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatePair {
    pub min_rate: f64,
    pub sum_rate: f64,
}

/// Globally orthogonal FRBs: no co-channel interference, but each FDC only gets
/// `1/N` of the band, so every rate is scaled by `1/N`.
pub fn eval_orthogonal(g: &GainTensor, cfg: &SystemConfig) -> RatePair {
    let noise = cfg.noise_term();
    let share = 1.0 / g.num_fdcs as f64;
    let alloc = solve_single_fdc(g, cfg);
    let rates: Vec<f64> = (0..g.num_fdcs)
        .flat_map(|n| {
            let perm = &alloc.perm[n];
            (0..g.num_frbs()).map(move |l| share * (1.0 + g.tx(n, perm[l], l) / noise).log2())
        })
        .collect();
    RatePair { min_rate: rates.iter().copied().fold(f64::INFINITY, f64::min), sum_rate: rates.iter().sum() }
}
