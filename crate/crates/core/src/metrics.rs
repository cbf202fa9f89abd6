//! SINR, rate objectives and per-FDC interference power for a given allocation.

use serde::{Deserialize, Serialize};

use crate::channel::GainTensor;
use crate::config::SystemConfig;
use crate::error::AllocationError;

/// Per-FDC FRB assignment: `perm[n][l]` is the user scheduled on FRB `l` of FDC `n`.
///
/// Every row is a permutation, which is exactly the constraint that each user gets
/// one FRB and each FRB one user inside an FDC.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Allocation {
    pub perm: Vec<Vec<usize>>,
}

impl Allocation {
    pub fn identity(num_fdcs: usize, users_per_fdc: usize) -> Self {
        Self { perm: vec![(0..users_per_fdc).collect(); num_fdcs] }
    }

    pub fn num_fdcs(&self) -> usize {
        self.perm.len()
    }

    /// `z_{k,l}^{(n)}`.
    pub fn indicator(&self, n: usize, k: usize, l: usize) -> bool {
        self.perm[n][l] == k
    }

    /// FRB on which user `k` of FDC `n` is scheduled.
    pub fn frb_of(&self, n: usize, k: usize) -> usize {
        self.perm[n].iter().position(|&u| u == k).expect("valid permutation")
    }

    pub fn validate(&self, num_fdcs: usize, users_per_fdc: usize) -> Result<(), AllocationError> {
        if self.perm.len() != num_fdcs {
            return Err(AllocationError::FdcCount { expected: num_fdcs, got: self.perm.len() });
        }
        for (fdc, row) in self.perm.iter().enumerate() {
            if !is_permutation(row, users_per_fdc) {
                return Err(AllocationError::NotPermutation { fdc, k: users_per_fdc });
            }
        }
        Ok(())
    }
}

pub fn is_permutation(row: &[usize], k: usize) -> bool {
    if row.len() != k {
        return false;
    }
    let mut seen = vec![false; k];
    for &u in row {
        if u >= k || seen[u] {
            return false;
        }
        seen[u] = true;
    }
    true
}

/// Linear SINR of FRB `l` in FDC `n`, with `noise = N_a sigma^2 / P`.
#[inline]
pub fn sinr(g: &GainTensor, alloc: &Allocation, n: usize, l: usize, noise: f64) -> f64 {
    let u = alloc.perm[n][l];
    let interference: f64 = (0..g.num_fdcs).filter(|&m| m != n).map(|m| g.int(n, u, m, alloc.perm[m][l], l)).sum();
    g.tx(n, u, l) / (interference + noise)
}

/// Smallest SINR over all FDCs and FRBs.
pub fn min_sinr(g: &GainTensor, alloc: &Allocation, noise: f64) -> f64 {
    let mut worst = f64::INFINITY;
    for n in 0..g.num_fdcs {
        for l in 0..g.num_frbs() {
            worst = worst.min(sinr(g, alloc, n, l, noise));
        }
    }
    worst
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SinrTable {
    /// `sinr[n][l]`, linear.
    pub sinr: Vec<Vec<f64>>,
    /// `log2(1 + sinr)`, bits/s/Hz.
    pub rate: Vec<Vec<f64>>,
}

impl SinrTable {
    pub fn from_sinr(sinr: Vec<Vec<f64>>) -> Self {
        let rate = sinr.iter().map(|row| row.iter().map(|s| (1.0 + s).log2()).collect()).collect();
        Self { sinr, rate }
    }

    pub fn min_sinr(&self) -> f64 {
        self.sinr.iter().flatten().copied().fold(f64::INFINITY, f64::min)
    }
}

pub fn sinr_table(g: &GainTensor, alloc: &Allocation, cfg: &SystemConfig) -> SinrTable {
    let noise = cfg.noise_term();
    let sinr = (0..g.num_fdcs).map(|n| (0..g.num_frbs()).map(|l| sinr(g, alloc, n, l, noise)).collect()).collect();
    SinrTable::from_sinr(sinr)
}

pub fn min_rate(t: &SinrTable) -> f64 {
    t.rate.iter().flatten().copied().fold(f64::INFINITY, f64::min)
}

pub fn sum_rate(t: &SinrTable) -> f64 {
    t.rate.iter().flatten().sum()
}

/// Total interference power suffered by each FDC, summed over its users and all
/// interfering BSs and averaged over the FRB index.
pub fn fdc_interference_power(g: &GainTensor, cfg: &SystemConfig) -> Vec<f64> {
    let k = g.users_per_fdc;
    let scale = cfg.tx_power_w / cfg.antennas as f64;
    (0..g.num_fdcs)
        .map(|n| {
            let mut total = 0.0;
            for l in 0..k {
                for u in 0..k {
                    for m in (0..g.num_fdcs).filter(|&m| m != n) {
                        for i in 0..k {
                            total += g.int(n, u, m, i, l);
                        }
                    }
                }
            }
            total * scale / k as f64
        })
        .collect()
}
