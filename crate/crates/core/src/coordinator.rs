//! Coordinated FRB allocation.
//!
//! [`solve_degraded`] optimises one FDC's permutation with every other member of
//! the subsystem held fixed: bisection on the common SINR target `t`, where each
//! trial `t` is a linear feasibility problem over permutations that reduces to one
//! bottleneck assignment. [`solve_greedy`] wraps it in the per-FDC sweep that adds
//! FDCs one at a time and then re-optimises them in rounds until the minimum SINR
//! stops improving.

use std::time::Instant;

use itertools::Itertools;
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::channel::GainTensor;
use crate::config::{BracketMode, FdcOrdering, SystemConfig};
use crate::lbap::{self, CostMatrix, FeasibilityCoefficients};
use crate::metrics::{self, Allocation};
use crate::seed;

/// Allocation of a subsystem: `Some(perm)` for FDCs already placed, `None` for
/// FDCs outside the subsystem.
pub type PartialAllocation = Vec<Option<Vec<usize>>>;

/// Below this lower bound the relative stopping rule switches to an absolute one.
pub const TINY_LOWER_BOUND: f64 = 1e-30;

/// Safety cap on bisection steps; never reached for finite positive brackets.
pub const MAX_BISECTION_ITERATIONS: usize = 256;

/// Largest `K` for which the degraded fallback enumerates all permutations.
pub const FALLBACK_ENUMERATION_MAX_K: usize = 6;

fn fixed_members(fixed: &[Option<Vec<usize>>], target: usize) -> Vec<usize> {
    (0..fixed.len()).filter(|&n| n != target && fixed[n].is_some()).collect()
}

/// Linear constraint coefficients of the degraded problem at SINR target `t`.
///
/// Families are the fixed FDCs in ascending index order followed by the target
/// FDC. For a fixed FDC `n` with scheduled user `u = u_l^n`:
/// `a[k][l] = t g_int(n,u ← target,k; l)` and
/// `b[l] = g_tx(n,u; l) - t (Σ_{m fixed, m≠n} g_int(n,u ← m,u_l^m; l) + noise)`.
/// For the target FDC: `a[k][l] = t Σ_{m fixed} g_int(target,k ← m,u_l^m; l) - g_tx(target,k; l)`
/// and `b[l] = -t noise`.
pub fn degraded_coefficients(
    g: &GainTensor,
    fixed: &[Option<Vec<usize>>],
    target: usize,
    t: f64,
    cfg: &SystemConfig,
) -> FeasibilityCoefficients {
    split_coefficients(g, fixed, target, t, t, cfg)
}

/// Degraded constraints with target `t_fixed` on the fixed FDCs' links and
/// `t_target` on the target FDC's links.
pub fn split_coefficients(
    g: &GainTensor,
    fixed: &[Option<Vec<usize>>],
    target: usize,
    t_fixed: f64,
    t_target: f64,
    cfg: &SystemConfig,
) -> FeasibilityCoefficients {
    let k = g.users_per_fdc;
    let noise = cfg.noise_term();
    let members = fixed_members(fixed, target);
    let families = members.len() + 1;
    let mut a = Vec::with_capacity(families * k * k);
    let mut b = Vec::with_capacity(families * k);

    for &n in &members {
        let perm = fixed[n].as_ref().unwrap();
        for cand in 0..k {
            for (l, &u) in perm.iter().enumerate() {
                a.push(t_fixed * g.int(n, u, target, cand, l));
            }
        }
        for (l, &u) in perm.iter().enumerate() {
            let others: f64 = members
                .iter()
                .filter(|&&m| m != n)
                .map(|&m| g.int(n, u, m, fixed[m].as_ref().unwrap()[l], l))
                .sum();
            b.push(g.tx(n, u, l) - t_fixed * (others + noise));
        }
    }
    for cand in 0..k {
        for l in 0..k {
            let incoming: f64 =
                members.iter().map(|&m| g.int(target, cand, m, fixed[m].as_ref().unwrap()[l], l)).sum();
            a.push(t_target * incoming - g.tx(target, cand, l));
        }
    }
    b.extend(std::iter::repeat_n(-t_target * noise, k));

    FeasibilityCoefficients::with_default_shift(k, families, a, b).expect("shapes are consistent by construction")
}

/// [`split_coefficients`] with every constraint rescaled to unit magnitude, which
/// is the form handed to the feasibility check.
fn scaled_coefficients(
    g: &GainTensor,
    fixed: &[Option<Vec<usize>>],
    target: usize,
    t_fixed: f64,
    t_target: f64,
    cfg: &SystemConfig,
) -> FeasibilityCoefficients {
    split_coefficients(g, fixed, target, t_fixed, t_target, cfg).normalized()
}

/// Bracket `[v_min, v_max]` for the optimal SINR target of the degraded problem:
/// worst and best per-user SINR when every other subsystem member interferes with
/// its strongest (resp. weakest) BS, extremised over FDC, user and FRB.
pub fn bisection_bounds(g: &GainTensor, fixed: &[Option<Vec<usize>>], target: usize, cfg: &SystemConfig) -> (f64, f64) {
    let k = g.users_per_fdc;
    let noise = cfg.noise_term();
    let mut members = fixed_members(fixed, target);
    members.push(target);

    let mut v_min = f64::INFINITY;
    let mut v_max = f64::NEG_INFINITY;
    for &n in &members {
        for u in 0..k {
            for l in 0..k {
                let (mut worst, mut best) = (0.0, 0.0);
                for &m in members.iter().filter(|&&m| m != n) {
                    let gains = (0..k).map(|i| g.int(n, u, m, i, l));
                    let (lo, hi) = gains.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
                    worst += hi;
                    best += lo;
                }
                let tx = g.tx(n, u, l);
                v_min = v_min.min(tx / (worst + noise));
                v_max = v_max.max(tx / (best + noise));
            }
        }
    }
    (v_min, v_max)
}

/// Minimum SINR over the FDCs that have an allocation, counting interference only
/// from those FDCs.
pub fn subsystem_min_sinr(g: &GainTensor, alloc: &[Option<Vec<usize>>], noise: f64) -> f64 {
    let mut worst = f64::INFINITY;
    for (n, perm) in alloc.iter().enumerate() {
        let Some(perm) = perm else { continue };
        for (l, &u) in perm.iter().enumerate() {
            let interference: f64 = alloc
                .iter()
                .enumerate()
                .filter(|(m, _)| *m != n)
                .filter_map(|(m, p)| p.as_ref().map(|p| g.int(n, u, m, p[l], l)))
                .sum();
            worst = worst.min(g.tx(n, u, l) / (interference + noise));
        }
    }
    worst
}

fn with_target(fixed: &[Option<Vec<usize>>], target: usize, perm: &[usize]) -> PartialAllocation {
    let mut alloc = fixed.to_vec();
    alloc[target] = Some(perm.to_vec());
    alloc
}

/// Bisection state after termination.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BisectionState {
    pub v_min: f64,
    pub v_max: f64,
    pub lower: f64,
    pub upper: f64,
    /// Last feasible midpoint, if any.
    pub t_m: f64,
    pub iterations: usize,
    pub best_witness: Option<Vec<usize>>,
}

impl BisectionState {
    fn converged(&self, tol: f64) -> bool {
        let gap = (self.upper - self.lower).abs();
        if self.lower < TINY_LOWER_BOUND {
            gap <= TINY_LOWER_BOUND * self.v_max.abs()
        } else {
            gap / self.lower < tol
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegradedSolution {
    /// `perm[l]` = user of the target FDC on FRB `l`.
    pub perm: Vec<usize>,
    /// Minimum subsystem SINR achieved by `perm`.
    pub achieved: f64,
    pub state: BisectionState,
    /// True when no feasible target was found by bisection and the permutation
    /// comes from the fallback path.
    pub fallback: bool,
    /// Feasibility checks spent by the target refinement stage.
    pub refine_iterations: usize,
}

/// Best permutation of the target FDC with all other subsystem members fixed.
pub fn solve_degraded(g: &GainTensor, fixed: &[Option<Vec<usize>>], target: usize, cfg: &SystemConfig) -> DegradedSolution {
    let noise = cfg.noise_term();
    let (v_min, v_max) = bisection_bounds(g, fixed, target, cfg);
    let mut state =
        BisectionState { v_min, v_max, lower: v_min, upper: v_max, t_m: v_min, iterations: 0, best_witness: None };
    if cfg.bracket == BracketMode::Tightened {
        let (lower, upper, witness) = tightened_bracket(g, fixed, target, cfg, v_min, v_max);
        state.lower = lower;
        state.upper = upper;
        state.t_m = lower;
        state.best_witness = Some(witness);
    }

    while !(state.best_witness.is_some() && state.converged(cfg.bisection_tol)) {
        let t_m = 0.5 * (state.upper + state.lower);
        let coeffs = scaled_coefficients(g, fixed, target, t_m, t_m, cfg);
        let verdict = lbap::check_feasibility(&coeffs).expect("default shift is admissible");
        state.iterations += 1;
        if verdict.feasible {
            state.lower = t_m;
            state.t_m = t_m;
            state.best_witness = verdict.witness;
        } else {
            state.upper = t_m;
        }
        if state.converged(cfg.bisection_tol) || state.iterations >= MAX_BISECTION_ITERATIONS {
            break;
        }
    }

    let mut fallback = false;
    let perm = match state.best_witness.clone() {
        Some(p) => p,
        None => {
            let coeffs = scaled_coefficients(g, fixed, target, v_min, v_min, cfg);
            let verdict = lbap::check_feasibility(&coeffs).expect("default shift is admissible");
            match verdict.witness {
                Some(p) => {
                    state.best_witness = Some(p.clone());
                    p
                }
                None => {
                    fallback = true;
                    let k = g.users_per_fdc;
                    if k <= FALLBACK_ENUMERATION_MAX_K {
                        best_permutation_by_enumeration(g, fixed, target, noise)
                    } else {
                        let costs = lbap::build_feasibility_lbap(&coeffs).expect("default shift is admissible");
                        lbap::solve_lbap(&costs).perm
                    }
                }
            }
        }
    };
    let mut refine_iterations = 0;
    let perm = if cfg.refine_target && !fallback && state.best_witness.is_some() {
        let (p, iters) = refine_target_links(g, fixed, target, cfg, state.lower, perm);
        refine_iterations = iters;
        p
    } else {
        perm
    };
    let achieved = subsystem_min_sinr(g, &with_target(fixed, target, &perm), noise);
    DegradedSolution { perm, achieved, state, fallback, refine_iterations }
}

/// Bracket `(lower, upper, witness)` with `witness` achieving `lower`.
///
/// Upper ends: the target's links can do no better than the bottleneck assignment
/// of their exact SINRs under the fixed interferers, and a fixed link can do no
/// better than with its weakest target-FDC interferer. Lower ends: the subsystem
/// value of that bottleneck assignment and of the target's incumbent permutation.
fn tightened_bracket(
    g: &GainTensor,
    fixed: &[Option<Vec<usize>>],
    target: usize,
    cfg: &SystemConfig,
    v_min: f64,
    v_max: f64,
) -> (f64, f64, Vec<usize>) {
    let noise = cfg.noise_term();
    let k = g.users_per_fdc;
    let members = fixed_members(fixed, target);

    let costs = CostMatrix::from_fn(k, |u, l| {
        let interference: f64 = members.iter().map(|&m| g.int(target, u, m, fixed[m].as_ref().unwrap()[l], l)).sum();
        -(g.tx(target, u, l) / (interference + noise))
    })
    .expect("finite gains");
    let own = lbap::solve_lbap(&costs);
    let mut upper = v_max.min(-own.bottleneck);
    for &n in &members {
        let perm = fixed[n].as_ref().unwrap();
        for (l, &u) in perm.iter().enumerate() {
            let others: f64 = members
                .iter()
                .filter(|&&m| m != n)
                .map(|&m| g.int(n, u, m, fixed[m].as_ref().unwrap()[l], l))
                .sum();
            let weakest = (0..k).map(|i| g.int(n, u, target, i, l)).fold(f64::INFINITY, f64::min);
            upper = upper.min(g.tx(n, u, l) / (others + weakest + noise));
        }
    }

    let mut best = (subsystem_min_sinr(g, &with_target(fixed, target, &own.perm), noise), own.perm);
    if let Some(incumbent) = fixed[target].as_ref() {
        let v = subsystem_min_sinr(g, &with_target(fixed, target, incumbent), noise);
        if v > best.0 {
            best = (v, incumbent.clone());
        }
    }
    let lower = best.0.max(v_min);
    (lower, upper.max(lower), best.1)
}

/// Worst SINR of the target FDC's own links under `perm`.
fn target_min_sinr(g: &GainTensor, fixed: &[Option<Vec<usize>>], target: usize, perm: &[usize], noise: f64) -> f64 {
    let members = fixed_members(fixed, target);
    perm.iter()
        .enumerate()
        .map(|(l, &u)| {
            let interference: f64 =
                members.iter().map(|&m| g.int(target, u, m, fixed[m].as_ref().unwrap()[l], l)).sum();
            g.tx(target, u, l) / (interference + noise)
        })
        .fold(f64::INFINITY, f64::min)
}

/// Second bisection on the target FDC's own SINR with the fixed FDCs' links held
/// at `t_fixed`. Every witness keeps the subsystem minimum at or above `t_fixed`.
fn refine_target_links(
    g: &GainTensor,
    fixed: &[Option<Vec<usize>>],
    target: usize,
    cfg: &SystemConfig,
    t_fixed: f64,
    start: Vec<usize>,
) -> (Vec<usize>, usize) {
    let noise = cfg.noise_term();
    let k = g.users_per_fdc;
    let members = fixed_members(fixed, target);
    let mut upper = f64::NEG_INFINITY;
    for u in 0..k {
        for l in 0..k {
            let best: f64 = members
                .iter()
                .map(|&m| (0..k).map(|i| g.int(target, u, m, i, l)).fold(f64::INFINITY, f64::min))
                .sum();
            upper = upper.max(g.tx(target, u, l) / (best + noise));
        }
    }
    let mut lower = target_min_sinr(g, fixed, target, &start, noise);
    let mut perm = start;
    let mut iterations = 0;
    while lower > 0.0 && (upper - lower) / lower >= cfg.bisection_tol && iterations < MAX_BISECTION_ITERATIONS {
        let t_m = 0.5 * (upper + lower);
        let coeffs = scaled_coefficients(g, fixed, target, t_fixed, t_m, cfg);
        let verdict = lbap::check_feasibility(&coeffs).expect("default shift is admissible");
        iterations += 1;
        match verdict.witness {
            Some(w) if verdict.feasible => {
                lower = target_min_sinr(g, fixed, target, &w, noise).max(t_m);
                perm = w;
            }
            _ => upper = t_m,
        }
    }
    (perm, iterations)
}

fn best_permutation_by_enumeration(g: &GainTensor, fixed: &[Option<Vec<usize>>], target: usize, noise: f64) -> Vec<usize> {
    let mut best: Option<(f64, Vec<usize>)> = None;
    for perm in (0..g.users_per_fdc).permutations(g.users_per_fdc) {
        let v = subsystem_min_sinr(g, &with_target(fixed, target, &perm), noise);
        if best.as_ref().is_none_or(|(b, _)| v > *b) {
            best = Some((v, perm));
        }
    }
    best.expect("at least one permutation").1
}

/// FDC indices sorted by interference power, largest first; ties by index.
pub fn order_by_interference(poi: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..poi.len()).collect();
    order.sort_by(|&a, &b| poi[b].total_cmp(&poi[a]).then(a.cmp(&b)));
    order
}

/// Processing sequence of FDCs for the greedy scheme: `order[s]` is the FDC
/// handled at position `s`.
pub fn order_fdcs(g: &GainTensor, cfg: &SystemConfig) -> Vec<usize> {
    match cfg.fdc_ordering {
        FdcOrdering::InterferenceDescending => order_by_interference(&metrics::fdc_interference_power(g, cfg)),
        FdcOrdering::Identity => (0..g.num_fdcs).collect(),
        FdcOrdering::Random { seed } => {
            let mut order: Vec<usize> = (0..g.num_fdcs).collect();
            order.shuffle(&mut seed::rng_from_seed(seed));
            order
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub allocation: Allocation,
    /// `S_0, S_1, ...`: minimum SINR after the initial pass and after each round.
    pub min_sinr_trace: Vec<f64>,
    pub outer_iterations: usize,
    pub fdc_order: Vec<usize>,
    pub converged: bool,
    pub degraded_solves: usize,
    /// Bisection iteration count of every degraded solve, in call order.
    pub bisection_iterations: Vec<usize>,
    pub fallbacks: usize,
    pub wall_time_s: f64,
}

impl SolveReport {
    pub fn min_sinr(&self) -> f64 {
        *self.min_sinr_trace.last().expect("trace holds S_0")
    }
}

/// Greedy coordinated allocation over all FDCs.
pub fn solve_greedy(g: &GainTensor, cfg: &SystemConfig) -> SolveReport {
    let start = Instant::now();
    let (n_fdc, k) = (g.num_fdcs, g.users_per_fdc);
    let noise = cfg.noise_term();
    let order = order_fdcs(g, cfg);
    let mut bisection_iterations = Vec::new();
    let mut fallbacks = 0;
    let mut record = |sol: &DegradedSolution| {
        bisection_iterations.push(sol.state.iterations);
        fallbacks += usize::from(sol.fallback);
    };

    // Initial pass: the first FDC takes the identity, then FDCs join one at a time.
    let mut alloc: PartialAllocation = vec![None; n_fdc];
    alloc[order[0]] = Some((0..k).collect());
    for &target in &order[1..] {
        let sol = solve_degraded(g, &alloc, target, cfg);
        record(&sol);
        alloc[target] = Some(sol.perm);
    }

    let full = |a: &PartialAllocation| Allocation { perm: a.iter().map(|p| p.clone().expect("all placed")).collect() };
    let mut current = metrics::min_sinr(g, &full(&alloc), noise);
    let mut trace = vec![current];
    let mut rounds = 0;
    let mut converged = false;

    while rounds < cfg.max_greedy_rounds {
        rounds += 1;
        for &target in &order {
            let sol = solve_degraded(g, &alloc, target, cfg);
            record(&sol);
            // Keep the incumbent unless the new permutation is at least as good;
            // the bisection witness is only optimal up to its tolerance.
            let candidate = with_target(&alloc, target, &sol.perm);
            let value = metrics::min_sinr(g, &full(&candidate), noise);
            if value >= current {
                alloc = candidate;
                current = value;
            }
        }
        let prev = *trace.last().unwrap();
        trace.push(current);
        let change = (current - prev).abs();
        let done = if prev > 0.0 { change / prev < cfg.greedy_tol } else { change == 0.0 };
        if done {
            converged = true;
            break;
        }
    }

    SolveReport {
        allocation: full(&alloc),
        min_sinr_trace: trace,
        outer_iterations: rounds,
        fdc_order: order,
        converged,
        degraded_solves: bisection_iterations.len(),
        bisection_iterations,
        fallbacks,
        wall_time_s: start.elapsed().as_secs_f64(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(n: usize, k: usize, noise: f64) -> SystemConfig {
        // noise term N_a sigma^2 / P = noise
        SystemConfig { num_fdcs: n, users_per_fdc: k, antennas: 1, tx_power_w: 1.0, noise_power_w: noise, ..Default::default() }
    }

    fn hand_tensor() -> GainTensor {
        GainTensor::from_fn(
            2,
            2,
            |n, k, l| 10.0 + (n + 2 * k + 3 * l) as f64,
            |n, k, _m, i, l| 0.5 * (1 + n + 2 * k + 3 * i + l) as f64,
        )
    }

    #[test]
    fn zero_target_makes_fixed_constraints_vacuous() {
        let g = hand_tensor();
        let c = cfg(2, 2, 0.3);
        let fixed = vec![Some(vec![1, 0]), None];
        let coeffs = degraded_coefficients(&g, &fixed, 1, 0.0, &c);
        assert_eq!(coeffs.families, 2);
        for k in 0..2 {
            for l in 0..2 {
                assert_eq!(coeffs.a(0, k, l), 0.0);
                assert_eq!(coeffs.a(1, k, l), -g.tx(1, k, l));
            }
        }
        assert_eq!(coeffs.b(0, 0), g.tx(0, 1, 0));
        assert_eq!(coeffs.b(0, 1), g.tx(0, 0, 1));
        assert_eq!(coeffs.b(1, 0), 0.0);
    }

    #[test]
    fn coefficients_match_hand_evaluation() {
        let g = hand_tensor();
        let c = cfg(2, 2, 0.3);
        let fixed = vec![Some(vec![1, 0]), None];
        let t = 2.0;
        let coeffs = degraded_coefficients(&g, &fixed, 1, t, &c);
        // fixed FDC 0: FRB0 user1, FRB1 user0
        // a0[k][l] = t * g_int(0, u_l, 1, k, l) = t * 0.5 * (1 + 0 + 2 u_l + 3k + l)
        let expect_a0 = [[2.0 * 0.5 * 3.0, 2.0 * 0.5 * 2.0], [2.0 * 0.5 * 6.0, 2.0 * 0.5 * 5.0]];
        // b0[l] = g_tx(0, u_l, l) - t * noise (no other fixed FDCs)
        let expect_b0 = [12.0 - 0.6, 13.0 - 0.6];
        // a1[k][l] = t * g_int(1, k, 0, u_l, l) - g_tx(1, k, l)
        //   g_int(1,k,0,i,l) = 0.5 (2 + 2k + 3i + l)
        let expect_a1 = [
            [2.0 * 0.5 * 5.0 - 11.0, 2.0 * 0.5 * 3.0 - 14.0],
            [2.0 * 0.5 * 7.0 - 13.0, 2.0 * 0.5 * 5.0 - 16.0],
        ];
        for k in 0..2 {
            for l in 0..2 {
                assert!((coeffs.a(0, k, l) - expect_a0[k][l]).abs() < 1e-12);
                assert!((coeffs.a(1, k, l) - expect_a1[k][l]).abs() < 1e-12);
            }
            assert!((coeffs.b(0, k) - expect_b0[k]).abs() < 1e-12);
            assert!((coeffs.b(1, k) + t * 0.3).abs() < 1e-12);
        }
    }

    #[test]
    fn noiseless_target_family_has_zero_rhs() {
        let g = hand_tensor();
        let mut c = cfg(2, 2, 0.3);
        c.noise_power_w = 0.0;
        let coeffs = degraded_coefficients(&g, &[Some(vec![0, 1]), None], 1, 5.0, &c);
        assert_eq!(coeffs.b(1, 0), 0.0);
        assert_eq!(coeffs.b(1, 1), 0.0);
    }

    #[test]
    fn bounds_without_interference_are_snr_extrema() {
        let c = cfg(1, 3, 2.0);
        let g = GainTensor::from_fn(1, 3, |_, k, l| (1 + 3 * k + l) as f64, |_, _, _, _, _| 0.0);
        let (lo, hi) = bisection_bounds(&g, &[None], 0, &c);
        assert_eq!(lo, 0.5);
        assert_eq!(hi, 4.5);
    }

    #[test]
    fn single_fdc_degraded_is_bottleneck_on_own_gains() {
        let c = cfg(1, 3, 1.0);
        let gains = [[3.0, 9.0, 1.0], [8.0, 2.0, 7.0], [4.0, 6.0, 5.0]];
        let g = GainTensor::from_fn(1, 3, |_, k, l| gains[k][l], |_, _, _, _, _| 0.0);
        let sol = solve_degraded(&g, &[None], 0, &c);
        // brute force: best min over perms
        let best = (0..3)
            .permutations(3)
            .map(|p| p.iter().enumerate().map(|(l, &k)| gains[k][l]).fold(f64::INFINITY, f64::min))
            .fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(best, 5.0);
        assert_eq!(sol.achieved, 5.0);
        assert_eq!(sol.perm, vec![1, 0, 2]);
        assert!(!sol.fallback);
        assert!(sol.state.lower <= sol.achieved);
    }

    #[test]
    fn order_examples() {
        assert_eq!(order_by_interference(&[5.0, 9.0]), vec![1, 0]);
        assert_eq!(order_by_interference(&[1.0, 3.0, 3.0, 0.5]), vec![1, 2, 0, 3]);
        let g = GainTensor::from_fn(1, 2, |_, _, _| 1.0, |_, _, _, _, _| 0.0);
        assert_eq!(order_fdcs(&g, &cfg(1, 2, 1.0)), vec![0]);
    }

    #[test]
    fn alternative_orderings() {
        let g = GainTensor::from_fn(4, 2, |_, _, _| 1.0, |n, _, _, _, _| n as f64);
        let mut c = cfg(4, 2, 1.0);
        assert_eq!(order_fdcs(&g, &c), vec![3, 2, 1, 0]);
        c.fdc_ordering = FdcOrdering::Identity;
        assert_eq!(order_fdcs(&g, &c), vec![0, 1, 2, 3]);
        c.fdc_ordering = FdcOrdering::Random { seed: 3 };
        let mut r = order_fdcs(&g, &c);
        assert_eq!(r, order_fdcs(&g, &c));
        r.sort();
        assert_eq!(r, vec![0, 1, 2, 3]);
    }

    #[test]
    fn greedy_with_one_fdc_is_bottleneck_assignment() {
        let c = cfg(1, 3, 1.0);
        let gains = [[3.0, 9.0, 1.0], [8.0, 2.0, 7.0], [4.0, 6.0, 5.0]];
        let g = GainTensor::from_fn(1, 3, |_, k, l| gains[k][l], |_, _, _, _, _| 0.0);
        let report = solve_greedy(&g, &c);
        assert_eq!(report.allocation.perm, vec![vec![1, 0, 2]]);
        assert_eq!(report.min_sinr(), 5.0);
        assert!(report.converged);
        // S_0 is the identity allocation: min(3, 2, 5) = 2
        assert_eq!(report.min_sinr_trace[0], 2.0);
    }

    #[test]
    fn greedy_avoids_dominant_interferer() {
        // FDC1 user 0 is hammered by FDC0 user 0's BS on every FRB.
        let c = cfg(2, 2, 0.1);
        let g = GainTensor::from_fn(2, 2, |_, _, _| 10.0, |n, k, _, i, _| if n == 1 && k == 0 && i == 0 { 50.0 } else { 0.1 });
        let report = solve_greedy(&g, &c);
        let a = &report.allocation;
        for l in 0..2 {
            assert!(!(a.perm[1][l] == 0 && a.perm[0][l] == 0), "dominant pair co-scheduled: {a:?}");
        }
        assert!(report.min_sinr_trace.windows(2).all(|w| w[1] >= w[0]));
    }
}
