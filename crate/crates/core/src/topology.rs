//! Network geometry: BS/user placement, FDC grouping, and large-scale CSI.
//!
//! Everything here is a pure function of a [`SystemConfig`] and an explicit random
//! stream, so a seed fully determines a drop.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::config::SystemConfig;
use crate::seed::{self, SimRng};

/// Distances below this are clamped before evaluating the path loss.
pub const MIN_DISTANCE_M: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn norm(&self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    fn distance_sq(&self, other: &Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }
}

/// Positions are stored flat, index `n * K + k` for pair `k` of FDC `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Topology {
    pub num_fdcs: usize,
    pub users_per_fdc: usize,
    pub bs_positions: Vec<Point>,
    pub user_positions: Vec<Point>,
    /// FDC membership of each BS, indexed like `bs_positions`.
    pub fdc_of_bs: Vec<usize>,
    /// `pairing[n][k]` is the flat index of the user served by BS `k` of FDC `n`.
    pub pairing: Vec<Vec<usize>>,
}

impl Topology {
    pub fn index(&self, fdc: usize, pair: usize) -> usize {
        fdc * self.users_per_fdc + pair
    }

    pub fn bs(&self, fdc: usize, pair: usize) -> Point {
        self.bs_positions[self.index(fdc, pair)]
    }

    pub fn user(&self, fdc: usize, pair: usize) -> Point {
        self.user_positions[self.pairing[fdc][pair]]
    }

    pub fn num_links(&self) -> usize {
        self.num_fdcs * self.users_per_fdc
    }
}

fn uniform_in_disc(rng: &mut SimRng, center: Point, radius: f64) -> Point {
    let r = radius * rng.random::<f64>().sqrt();
    let theta = 2.0 * PI * rng.random::<f64>();
    Point::new(center.x + r * theta.cos(), center.y + r * theta.sin())
}

/// Capacity-constrained nearest-centroid clustering: `n` groups of exactly `k`
/// points. Groups are returned with members in ascending index order.
fn balanced_clusters(points: &[Point], n: usize, k: usize) -> Vec<Vec<usize>> {
    debug_assert_eq!(points.len(), n * k);

    // Farthest-point seeding, starting from point 0.
    let mut centroids = vec![points[0]];
    let mut chosen = vec![0usize];
    while centroids.len() < n {
        let next = (0..points.len())
            .filter(|i| !chosen.contains(i))
            .map(|i| {
                let d = centroids.iter().map(|c| points[i].distance_sq(c)).fold(f64::INFINITY, f64::min);
                (i, d)
            })
            .fold(None::<(usize, f64)>, |best, cur| match best {
                Some(b) if b.1 >= cur.1 => Some(b),
                _ => Some(cur),
            })
            .map(|(i, _)| i)
            .expect("fewer points than clusters");
        chosen.push(next);
        centroids.push(points[next]);
    }

    let mut assignment = vec![usize::MAX; points.len()];
    for _ in 0..100 {
        let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(points.len() * n);
        for (i, p) in points.iter().enumerate() {
            for (c, centroid) in centroids.iter().enumerate() {
                pairs.push((p.distance_sq(centroid), i, c));
            }
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));

        let mut next = vec![usize::MAX; points.len()];
        let mut load = vec![0usize; n];
        for (_, i, c) in pairs {
            if next[i] == usize::MAX && load[c] < k {
                next[i] = c;
                load[c] += 1;
            }
        }

        let stable = next == assignment;
        assignment = next;
        if stable {
            break;
        }
        for (c, centroid) in centroids.iter_mut().enumerate() {
            let (sx, sy) = points
                .iter()
                .zip(&assignment)
                .filter(|(_, &a)| a == c)
                .fold((0.0, 0.0), |(sx, sy), (p, _)| (sx + p.x, sy + p.y));
            *centroid = Point::new(sx / k as f64, sy / k as f64);
        }
    }

    let mut groups = vec![Vec::with_capacity(k); n];
    for (i, &c) in assignment.iter().enumerate() {
        groups[c].push(i);
    }
    groups
}

/// Drop BSs uniformly on the deployment disc, group them into balanced FDCs, and
/// place each user uniformly within the serving radius of its BS (and inside the
/// deployment disc).
pub fn generate_topology(cfg: &SystemConfig, rng: &mut SimRng) -> Topology {
    let (n, k) = (cfg.num_fdcs, cfg.users_per_fdc);
    let raw: Vec<Point> = (0..n * k).map(|_| uniform_in_disc(rng, Point::default(), cfg.area_radius_m)).collect();
    let groups = balanced_clusters(&raw, n, k);

    let mut bs_positions = Vec::with_capacity(n * k);
    let mut fdc_of_bs = Vec::with_capacity(n * k);
    for (fdc, members) in groups.iter().enumerate() {
        for &i in members {
            bs_positions.push(raw[i]);
            fdc_of_bs.push(fdc);
        }
    }

    let user_positions = bs_positions
        .iter()
        .map(|&bs| {
            for _ in 0..1000 {
                let p = uniform_in_disc(rng, bs, cfg.serving_radius_m);
                if p.norm() <= cfg.area_radius_m {
                    return p;
                }
            }
            bs
        })
        .collect();

    let pairing = (0..n).map(|fdc| (0..k).map(|pair| fdc * k + pair).collect()).collect();

    Topology { num_fdcs: n, users_per_fdc: k, bs_positions, user_positions, fdc_of_bs, pairing }
}

/// Large-scale CSI of one transmitter → receiver link.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkLargeScale {
    /// Distance after the 1 m floor.
    pub distance_m: f64,
    pub los: bool,
    /// Linear power attenuation.
    pub path_loss: f64,
    /// Shadowing draw in dB.
    pub shadowing_db: f64,
    /// Angles of departure in `[0, 2π)`, one per scatterer.
    pub aods: Vec<f64>,
}

impl LinkLargeScale {
    pub fn num_paths(&self) -> usize {
        self.aods.len()
    }

    pub fn path_loss_db(&self) -> f64 {
        10.0 * self.path_loss.log10()
    }
}

/// Linear path loss for the given LOS class, distance and shadowing draw.
pub fn path_loss_linear(cfg: &SystemConfig, los: bool, distance_m: f64, shadowing_db: f64) -> f64 {
    let params = if los { &cfg.pathloss_los } else { &cfg.pathloss_nlos };
    10f64.powf(params.loss_db(distance_m.max(MIN_DISTANCE_M), shadowing_db) / 10.0)
}

/// Large-scale CSI for every ordered (transmitting BS, receiving user) pair.
///
/// Indexing is `rx * NK + tx` with `rx = n * K + k` (user `k` of FDC `n`) and
/// `tx = m * K + i` (BS `i` of FDC `m`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LargeScale {
    pub num_links: usize,
    pub links: Vec<LinkLargeScale>,
}

impl LargeScale {
    pub fn link(&self, rx: usize, tx: usize) -> &LinkLargeScale {
        &self.links[rx * self.num_links + tx]
    }

    pub fn link_mut(&mut self, rx: usize, tx: usize) -> &mut LinkLargeScale {
        &mut self.links[rx * self.num_links + tx]
    }
}

pub fn draw_large_scale(cfg: &SystemConfig, topo: &Topology, rng: &mut SimRng) -> LargeScale {
    let nk = topo.num_links();
    let los_shadow = Normal::new(0.0, cfg.pathloss_los.shadow_std_db).expect("finite std");
    let nlos_shadow = Normal::new(0.0, cfg.pathloss_nlos.shadow_std_db).expect("finite std");
    let mut links = Vec::with_capacity(nk * nk);
    for rx in 0..nk {
        let user = topo.user_positions[topo.pairing[rx / topo.users_per_fdc][rx % topo.users_per_fdc]];
        for tx in 0..nk {
            let d = topo.bs_positions[tx].distance(&user).max(MIN_DISTANCE_M);
            let los = rng.random_bool(cfg.los_model.los_probability(d).clamp(0.0, 1.0));
            let xi = if los { los_shadow.sample(rng) } else { nlos_shadow.sample(rng) };
            let aods = (0..cfg.num_scatterers).map(|_| rng.random_range(0.0..2.0 * PI)).collect();
            links.push(LinkLargeScale {
                distance_m: d,
                los,
                path_loss: path_loss_linear(cfg, los, d, xi),
                shadowing_db: xi,
                aods,
            });
        }
    }
    LargeScale { num_links: nk, links }
}

/// A complete large-scale drop, exportable for inspection and replay.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub config: SystemConfig,
    pub seed: u64,
    pub topology: Topology,
    pub large_scale: LargeScale,
}

impl Scenario {
    /// Topology and large-scale CSI drawn from independent sub-streams of `seed`.
    pub fn generate(cfg: &SystemConfig, seed: u64) -> Self {
        let mut topo_rng = seed::rng_from_seed(seed::derive_seed(seed, seed::stream::TOPOLOGY));
        let topology = generate_topology(cfg, &mut topo_rng);
        let mut ls_rng = seed::rng_from_seed(seed::derive_seed(seed, seed::stream::LARGE_SCALE));
        let large_scale = draw_large_scale(cfg, &topology, &mut ls_rng);
        Self { config: cfg.clone(), seed, topology, large_scale }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::LosModel;
    use crate::seed::rng_from_seed;

    fn cfg(n: usize, k: usize, radius: f64) -> SystemConfig {
        SystemConfig { num_fdcs: n, users_per_fdc: k, area_radius_m: radius, ..Default::default() }
    }

    #[test]
    fn degenerate_radius_collapses_to_origin() {
        let mut c = cfg(1, 1, 0.0);
        c.serving_radius_m = 0.0;
        let topo = generate_topology(&c, &mut rng_from_seed(1));
        assert_eq!(topo.bs_positions, vec![Point::default()]);
        assert_eq!(topo.user_positions, vec![Point::default()]);
        let ls = draw_large_scale(&c, &topo, &mut rng_from_seed(2));
        assert_eq!(ls.link(0, 0).distance_m, 1.0);
    }

    #[test]
    fn same_seed_same_topology() {
        let c = cfg(10, 3, 500.0);
        let a = generate_topology(&c, &mut rng_from_seed(99));
        let b = generate_topology(&c, &mut rng_from_seed(99));
        assert_eq!(a, b);
        let la = draw_large_scale(&c, &a, &mut rng_from_seed(5));
        let lb = draw_large_scale(&c, &b, &mut rng_from_seed(5));
        assert_eq!(la, lb);
    }

    #[test]
    fn counts_and_bounds() {
        let c = cfg(2, 2, 500.0);
        let topo = generate_topology(&c, &mut rng_from_seed(3));
        assert_eq!(topo.bs_positions.len(), 4);
        assert_eq!(topo.user_positions.len(), 4);
        for fdc in 0..2 {
            assert_eq!(topo.fdc_of_bs.iter().filter(|&&f| f == fdc).count(), 2);
        }
        assert!(topo.bs_positions.iter().chain(&topo.user_positions).all(|p| p.norm() <= 500.0 + 1e-9));
    }

    #[test]
    fn partition_is_exhaustive_and_balanced() {
        for seed in 0..20 {
            let c = cfg(7, 4, 300.0);
            let topo = generate_topology(&c, &mut rng_from_seed(seed));
            let mut sizes = [0; 7];
            for &f in &topo.fdc_of_bs {
                sizes[f] += 1;
            }
            assert!(sizes.iter().all(|&s| s == 4));
            for (i, &f) in topo.fdc_of_bs.iter().enumerate() {
                assert_eq!(f, i / 4);
            }
        }
    }

    #[test]
    fn users_stay_near_their_bs() {
        let c = cfg(5, 3, 400.0);
        let topo = generate_topology(&c, &mut rng_from_seed(11));
        for n in 0..5 {
            for k in 0..3 {
                assert!(topo.bs(n, k).distance(&topo.user(n, k)) <= c.serving_radius_m + 1e-9);
            }
        }
    }

    #[test]
    fn los_path_loss_at_100m() {
        let c = SystemConfig::default();
        let eta = path_loss_linear(&c, true, 100.0, 0.0);
        assert!((10.0 * eta.log10() - 101.4).abs() < 1e-9);
        assert!((eta / 10f64.powf(10.14) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn nlos_path_loss_at_1m() {
        let c = SystemConfig::default();
        let eta = path_loss_linear(&c, false, 1.0, 0.0);
        assert!((10.0 * eta.log10() - 72.0).abs() < 1e-9);
        // below the floor clamps to 1 m
        assert_eq!(path_loss_linear(&c, false, 0.0, 0.0), eta);
    }

    #[test]
    fn path_loss_is_monotone_in_distance() {
        let c = SystemConfig::default();
        for los in [true, false] {
            let mut prev = 0.0;
            for d in [1.0, 1.5, 2.0, 10.0, 55.0, 100.0, 999.0] {
                let eta = path_loss_linear(&c, los, d, 0.0);
                assert!(eta > prev);
                prev = eta;
            }
        }
    }

    #[test]
    fn every_link_has_three_aods_in_range() {
        let c = cfg(3, 3, 200.0);
        let s = Scenario::generate(&c, 8);
        assert_eq!(s.large_scale.links.len(), 81);
        for link in &s.large_scale.links {
            assert_eq!(link.num_paths(), 3);
            assert!(link.aods.iter().all(|&a| (0.0..2.0 * PI).contains(&a)));
        }
    }

    #[test]
    fn stored_path_loss_matches_formula() {
        let c = cfg(3, 2, 300.0);
        let s = Scenario::generate(&c, 21);
        for link in &s.large_scale.links {
            let p = if link.los { c.pathloss_los } else { c.pathloss_nlos };
            let db = p.intercept_db + p.exponent * 10.0 * link.distance_m.log10() + link.shadowing_db;
            assert!((link.path_loss_db() - db).abs() < 1e-9);
        }
    }

    #[test]
    fn shadowing_std_matches_configuration() {
        for (model, std) in [(LosModel::AllLos, 5.8), (LosModel::AllNlos, 8.7)] {
            let c = SystemConfig { num_fdcs: 1, users_per_fdc: 1, los_model: model, ..Default::default() };
            let topo = generate_topology(&c, &mut rng_from_seed(0));
            let mut rng = rng_from_seed(1234);
            let draws: Vec<f64> =
                (0..100_000).map(|_| draw_large_scale(&c, &topo, &mut rng).links[0].shadowing_db).collect();
            let mean = draws.iter().sum::<f64>() / draws.len() as f64;
            let var = draws.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (draws.len() - 1) as f64;
            assert!((var.sqrt() / std - 1.0).abs() < 0.02, "std {} vs {}", var.sqrt(), std);
        }
    }

    #[test]
    fn scenario_json_round_trip() {
        let s = Scenario::generate(&cfg(2, 2, 100.0), 4);
        let text = serde_json::to_string(&s).unwrap();
        let back: Scenario = serde_json::from_str(&text).unwrap();
        assert_eq!(s, back);
    }
}
