//! Geometric ULA channel, analog beamforming, and the gain tensor consumed by
//! the solvers.
//!
//! For a link with path loss `η`, AoDs `φ_ι` and fading `α_ι`, antenna `n` sees
//! `h[n] = η^{-1/2} Σ_ι α_ι exp(j n (2π/λ) τ sin φ_ι)`. The serving BS co-phases
//! its array against that response; interferers are characterised only by the
//! expectation of their received power over the unknown victim-link fading.

use std::f64::consts::FRAC_1_SQRT_2;
use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::config::{InterferenceMode, SystemConfig};
use crate::error::{ChannelError, TensorIoError};
use crate::par::{self, Execution};
use crate::seed::{self, SimRng};
use crate::topology::{LargeScale, LinkLargeScale};

/// One draw of `CN(0, 1)`.
pub fn complex_gaussian(rng: &mut SimRng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * FRAC_1_SQRT_2, im * FRAC_1_SQRT_2)
}

/// Per-path Rayleigh coefficients for every link and FRB of one realization.
///
/// Link indexing follows [`LargeScale`]: `rx * NK + tx`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmallScaleRealization {
    pub seed: u64,
    pub num_links: usize,
    pub num_frbs: usize,
    pub num_paths: usize,
    alpha: Vec<Complex64>,
}

impl SmallScaleRealization {
    pub fn draw(cfg: &SystemConfig, large_scale: &LargeScale, seed: u64) -> Self {
        let mut rng = seed::rng_from_seed(seed);
        let num_links = large_scale.num_links;
        let num_frbs = cfg.users_per_fdc;
        let num_paths = large_scale.links.first().map_or(cfg.num_scatterers, |l| l.num_paths());
        let alpha = (0..num_links * num_links * num_frbs * num_paths).map(|_| complex_gaussian(&mut rng)).collect();
        Self { seed, num_links, num_frbs, num_paths, alpha }
    }

    pub fn coefficients(&self, rx: usize, tx: usize, frb: usize) -> &[Complex64] {
        let start = ((rx * self.num_links + tx) * self.num_frbs + frb) * self.num_paths;
        &self.alpha[start..start + self.num_paths]
    }

    pub fn coefficients_mut(&mut self, rx: usize, tx: usize, frb: usize) -> &mut [Complex64] {
        let start = ((rx * self.num_links + tx) * self.num_frbs + frb) * self.num_paths;
        &mut self.alpha[start..start + self.num_paths]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelVector(pub Vec<Complex64>);

/// Analog phase-shifter weights, one unit-modulus entry per antenna.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamformingVector(pub Vec<Complex64>);

impl ChannelVector {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl BeamformingVector {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

fn check_paths(aods: &[f64], alpha: &[Complex64]) -> Result<(), ChannelError> {
    if aods.len() != alpha.len() {
        return Err(ChannelError::PathCountMismatch { aods: aods.len(), coefficients: alpha.len() });
    }
    Ok(())
}

/// Unnormalised array response `c[n] = Σ_ι α_ι exp(j n (2π/λ) τ sin φ_ι)`.
pub fn array_response(aods: &[f64], alpha: &[Complex64], cfg: &SystemConfig) -> Result<Vec<Complex64>, ChannelError> {
    check_paths(aods, alpha)?;
    let steps: Vec<f64> = aods.iter().map(|&phi| cfg.phase_step(phi)).collect();
    Ok((0..cfg.antennas)
        .map(|n| {
            alpha
                .iter()
                .zip(&steps)
                .map(|(a, &s)| a * Complex64::from_polar(1.0, n as f64 * s))
                .sum()
        })
        .collect())
}

pub fn channel_vector(
    link: &LinkLargeScale,
    alpha: &[Complex64],
    cfg: &SystemConfig,
) -> Result<ChannelVector, ChannelError> {
    let scale = link.path_loss.powf(-0.5);
    let c = array_response(&link.aods, alpha, cfg)?;
    Ok(ChannelVector(c.into_iter().map(|x| x * scale).collect()))
}

/// Co-phasing beamformer for the serving link: `w[n] = conj(c[n]) / |c[n]|`.
/// Entries with `c[n] = 0` get phase 1.
pub fn beamforming_vector(
    alpha: &[Complex64],
    aods: &[f64],
    cfg: &SystemConfig,
) -> Result<BeamformingVector, ChannelError> {
    let c = array_response(aods, alpha, cfg)?;
    Ok(BeamformingVector(
        c.into_iter()
            .map(|x| {
                let mag = x.norm();
                if mag > 0.0 {
                    x.conj() / mag
                } else {
                    Complex64::new(1.0, 0.0)
                }
            })
            .collect(),
    ))
}

/// `|h^T w|^2`.
pub fn transmission_gain(h: &ChannelVector, w: &BeamformingVector) -> Result<f64, ChannelError> {
    if h.len() != w.len() {
        return Err(ChannelError::DimensionMismatch { channel: h.len(), beam: w.len() });
    }
    Ok(h.0.iter().zip(&w.0).map(|(a, b)| a * b).sum::<Complex64>().norm_sqr())
}

/// Expected `|h^T w|^2` over the victim link's Rayleigh coefficients, in closed form:
/// `(1/η) Σ_ι |Σ_n w[n] exp(j n (2π/λ) τ sin φ_ι)|^2`.
pub fn interference_gain(beam: &BeamformingVector, victim: &LinkLargeScale, cfg: &SystemConfig) -> f64 {
    let total: f64 = victim
        .aods
        .iter()
        .map(|&phi| {
            let s = cfg.phase_step(phi);
            beam.0
                .iter()
                .enumerate()
                .map(|(n, w)| w * Complex64::from_polar(1.0, n as f64 * s))
                .sum::<Complex64>()
                .norm_sqr()
        })
        .sum();
    total / victim.path_loss
}

/// [`interference_gain`] guarded by the cross-FDC precondition.
pub fn cross_fdc_interference_gain(
    victim_fdc: usize,
    interferer_fdc: usize,
    beam: &BeamformingVector,
    victim: &LinkLargeScale,
    cfg: &SystemConfig,
) -> Result<f64, ChannelError> {
    if victim_fdc == interferer_fdc {
        return Err(ChannelError::SameFdc(victim_fdc));
    }
    Ok(interference_gain(beam, victim, cfg))
}

/// Transmission gains `g_tx[n][k][l]` and statistical interference gains
/// `g_int[(n,k)][(m,i)][l]` (victim user `k` of FDC `n`, interfering BS `i` of FDC `m`).
///
/// Entries with `n == m` are never read and are stored as zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GainTensor {
    pub num_fdcs: usize,
    pub users_per_fdc: usize,
    g_tx: Vec<f64>,
    g_int: Vec<f64>,
}

impl GainTensor {
    pub fn zeros(num_fdcs: usize, users_per_fdc: usize) -> Self {
        let nk = num_fdcs * users_per_fdc;
        Self { num_fdcs, users_per_fdc, g_tx: vec![0.0; nk * users_per_fdc], g_int: vec![0.0; nk * nk * users_per_fdc] }
    }

    /// Builds a tensor from closures `tx(n, k, l)` and `int(n, k, m, i, l)`; the
    /// latter is only called for `n != m`.
    pub fn from_fn(
        num_fdcs: usize,
        users_per_fdc: usize,
        mut tx: impl FnMut(usize, usize, usize) -> f64,
        mut int: impl FnMut(usize, usize, usize, usize, usize) -> f64,
    ) -> Self {
        let mut g = Self::zeros(num_fdcs, users_per_fdc);
        let k = users_per_fdc;
        for n in 0..num_fdcs {
            for u in 0..k {
                for l in 0..k {
                    g.set_tx(n, u, l, tx(n, u, l));
                }
                for m in (0..num_fdcs).filter(|&m| m != n) {
                    for i in 0..k {
                        for l in 0..k {
                            g.set_int(n, u, m, i, l, int(n, u, m, i, l));
                        }
                    }
                }
            }
        }
        g
    }

    pub fn num_frbs(&self) -> usize {
        self.users_per_fdc
    }

    fn tx_index(&self, n: usize, k: usize, l: usize) -> usize {
        (n * self.users_per_fdc + k) * self.users_per_fdc + l
    }

    fn int_index(&self, n: usize, k: usize, m: usize, i: usize, l: usize) -> usize {
        let kk = self.users_per_fdc;
        let nk = self.num_fdcs * kk;
        ((n * kk + k) * nk + (m * kk + i)) * kk + l
    }

    #[inline]
    pub fn tx(&self, n: usize, k: usize, l: usize) -> f64 {
        self.g_tx[self.tx_index(n, k, l)]
    }

    /// Gain from BS `i` of FDC `m` into user `k` of FDC `n` on FRB `l`.
    #[inline]
    pub fn int(&self, n: usize, k: usize, m: usize, i: usize, l: usize) -> f64 {
        debug_assert_ne!(n, m, "no interference inside an FDC");
        self.g_int[self.int_index(n, k, m, i, l)]
    }

    pub fn set_tx(&mut self, n: usize, k: usize, l: usize, v: f64) {
        let idx = self.tx_index(n, k, l);
        self.g_tx[idx] = v;
    }

    pub fn set_int(&mut self, n: usize, k: usize, m: usize, i: usize, l: usize, v: f64) {
        assert_ne!(n, m, "no interference inside an FDC");
        let idx = self.int_index(n, k, m, i, l);
        self.g_int[idx] = v;
    }

    /// Iterator over every stored cross-FDC gain.
    pub fn cross_gains(&self) -> impl Iterator<Item = f64> + '_ {
        let k = self.users_per_fdc;
        let n = self.num_fdcs;
        (0..n).flat_map(move |a| {
            (0..k).flat_map(move |u| {
                (0..n).filter(move |&m| m != a).flat_map(move |m| {
                    (0..k).flat_map(move |i| (0..k).map(move |l| self.int(a, u, m, i, l)))
                })
            })
        })
    }

    /// Multiplies every gain by `s`.
    pub fn scaled(&self, s: f64) -> Self {
        Self {
            num_fdcs: self.num_fdcs,
            users_per_fdc: self.users_per_fdc,
            g_tx: self.g_tx.iter().map(|g| g * s).collect(),
            g_int: self.g_int.iter().map(|g| g * s).collect(),
        }
    }

    const MAGIC: &'static [u8; 4] = b"FRBG";
    const VERSION: u32 = 1;

    /// Dense little-endian blob: magic, version, N, K, then `g_tx` and `g_int` as f64.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(16 + 8 * (self.g_tx.len() + self.g_int.len()));
        out.extend_from_slice(Self::MAGIC);
        out.extend_from_slice(&Self::VERSION.to_le_bytes());
        out.extend_from_slice(&(self.num_fdcs as u32).to_le_bytes());
        out.extend_from_slice(&(self.users_per_fdc as u32).to_le_bytes());
        for v in self.g_tx.iter().chain(&self.g_int) {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, TensorIoError> {
        if bytes.len() < 16 {
            return Err(TensorIoError::Truncated { expected: 16, got: bytes.len() });
        }
        if &bytes[..4] != Self::MAGIC {
            return Err(TensorIoError::BadMagic);
        }
        let word = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().unwrap());
        let version = word(4);
        if version != Self::VERSION {
            return Err(TensorIoError::Version(version));
        }
        let (n, k) = (word(8) as usize, word(12) as usize);
        let mut g = Self::zeros(n, k);
        let expected = 16 + 8 * (g.g_tx.len() + g.g_int.len());
        if bytes.len() != expected {
            return Err(TensorIoError::Truncated { expected, got: bytes.len() });
        }
        let mut values = bytes[16..].chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap()));
        for v in g.g_tx.iter_mut().chain(g.g_int.iter_mut()) {
            *v = values.next().unwrap();
        }
        Ok(g)
    }

    /// Writes JSON when the extension is `.json`, the binary blob otherwise.
    pub fn save(&self, path: &Path) -> Result<(), TensorIoError> {
        let mut f = std::fs::File::create(path)?;
        if path.extension().is_some_and(|e| e == "json") {
            serde_json::to_writer(&mut f, self)?;
        } else {
            f.write_all(&self.to_bytes())?;
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, TensorIoError> {
        let mut bytes = Vec::new();
        std::fs::File::open(path)?.read_to_end(&mut bytes)?;
        if path.extension().is_some_and(|e| e == "json") {
            Ok(serde_json::from_slice(&bytes)?)
        } else {
            Self::from_bytes(&bytes)
        }
    }
}

/// Serving-link beamformers for every BS and FRB, indexed `[tx][l]`.
pub fn serving_beams(
    cfg: &SystemConfig,
    large_scale: &LargeScale,
    small_scale: &SmallScaleRealization,
) -> Result<Vec<Vec<BeamformingVector>>, ChannelError> {
    let nk = large_scale.num_links;
    (0..nk)
        .map(|b| {
            let aods = &large_scale.link(b, b).aods;
            (0..small_scale.num_frbs)
                .map(|l| beamforming_vector(small_scale.coefficients(b, b, l), aods, cfg))
                .collect()
        })
        .collect()
}

/// Closed-form interference gain averaged over `draws` independent realisations of the interferer's
/// serving-link fading (and hence of its beamformer).
fn averaged_interference_gain(
    interferer_link: &LinkLargeScale,
    victim: &LinkLargeScale,
    cfg: &SystemConfig,
    draws: usize,
    seed: u64,
) -> Result<f64, ChannelError> {
    let mut rng = seed::rng_from_seed(seed);
    let mut acc = 0.0;
    for _ in 0..draws {
        let alpha: Vec<Complex64> = (0..interferer_link.num_paths()).map(|_| complex_gaussian(&mut rng)).collect();
        let w = beamforming_vector(&alpha, &interferer_link.aods, cfg)?;
        acc += interference_gain(&w, victim, cfg);
    }
    Ok(acc / draws as f64)
}

/// Transmission gains and interference gains of one receiver.
type GainRow = (Vec<f64>, Vec<f64>);

/// Assembles the full gain tensor for one small-scale realization. Rows (victim
/// users) are independent and are built with `exec`.
pub fn build_gain_tensor(
    cfg: &SystemConfig,
    large_scale: &LargeScale,
    small_scale: &SmallScaleRealization,
    exec: Execution,
) -> Result<GainTensor, ChannelError> {
    let (n_fdc, k) = (cfg.num_fdcs, cfg.users_per_fdc);
    let nk = n_fdc * k;
    let beams = serving_beams(cfg, large_scale, small_scale)?;

    // Row `rx` holds g_tx[rx][..] followed by g_int[rx][..][..].
    let rows: Vec<Result<GainRow, ChannelError>> = par::map_range(nk, exec, |rx| {
        let n = rx / k;
        let serving = large_scale.link(rx, rx);
        let mut tx_row = Vec::with_capacity(k);
        for (l, w) in beams[rx].iter().enumerate() {
            let h = channel_vector(serving, small_scale.coefficients(rx, rx, l), cfg)?;
            tx_row.push(transmission_gain(&h, w)?);
        }
        let mut int_row = vec![0.0; nk * k];
        for tx in (0..nk).filter(|tx| tx / k != n) {
            let victim = large_scale.link(rx, tx);
            for l in 0..k {
                int_row[tx * k + l] = match cfg.interference_mode {
                    InterferenceMode::Instantaneous => interference_gain(&beams[tx][l], victim, cfg),
                    InterferenceMode::Averaged { draws } => {
                        let s = seed::derive_seed(
                            seed::derive_seed(small_scale.seed, seed::stream::INTERFERER_AVERAGE),
                            (tx * k + l) as u64,
                        );
                        averaged_interference_gain(large_scale.link(tx, tx), victim, cfg, draws, s)?
                    }
                };
            }
        }
        Ok((tx_row, int_row))
    });

    let mut g = GainTensor::zeros(n_fdc, k);
    for (rx, row) in rows.into_iter().enumerate() {
        let (tx_row, int_row) = row?;
        g.g_tx[rx * k..(rx + 1) * k].copy_from_slice(&tx_row);
        g.g_int[rx * nk * k..(rx + 1) * nk * k].copy_from_slice(&int_row);
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn cfg(antennas: usize) -> SystemConfig {
        SystemConfig { antennas, ..Default::default() }
    }

    fn link(eta: f64, aods: Vec<f64>) -> LinkLargeScale {
        LinkLargeScale { distance_m: 10.0, los: true, path_loss: eta, shadowing_db: 0.0, aods }
    }

    fn assert_close(a: Complex64, b: Complex64) {
        assert!((a - b).norm() < 1e-12, "{a} != {b}");
    }

    #[test]
    fn single_antenna_single_path() {
        let h = channel_vector(&link(1.0, vec![1.3]), &[c(1.0, 0.0)], &cfg(1)).unwrap();
        assert_eq!(h.0, vec![c(1.0, 0.0)]);
    }

    #[test]
    fn broadside_path_has_flat_response() {
        let h = channel_vector(&link(1.0, vec![0.0]), &[c(1.0, 0.0)], &cfg(8)).unwrap();
        for x in h.0 {
            assert_close(x, c(1.0, 0.0));
        }
    }

    #[test]
    fn two_element_endfire_example() {
        let h = channel_vector(&link(1.0, vec![FRAC_PI_2, FRAC_PI_2]), &[c(1.0, 0.0), c(0.0, 1.0)], &cfg(2)).unwrap();
        assert_close(h.0[0], c(1.0, 1.0));
        assert_close(h.0[1], c(-1.0, -1.0));
    }

    #[test]
    fn mismatched_paths_are_rejected() {
        let err = channel_vector(&link(1.0, vec![0.0, 1.0]), &[c(1.0, 0.0)], &cfg(2)).unwrap_err();
        assert_eq!(err, ChannelError::PathCountMismatch { aods: 2, coefficients: 1 });
        assert!(beamforming_vector(&[c(1.0, 0.0)], &[0.0, 1.0], &cfg(2)).is_err());
    }

    #[test]
    fn single_antenna_beam_is_one() {
        let w = beamforming_vector(&[c(1.0, 0.0)], &[0.7], &cfg(1)).unwrap();
        assert_eq!(w.0, vec![c(1.0, 0.0)]);
    }

    #[test]
    fn coherent_two_path_broadside_gain() {
        let eta = 1e7;
        let alpha = [c(1.0, 0.0), c(1.0, 0.0)];
        let l = link(eta, vec![0.0, 0.0]);
        let w = beamforming_vector(&alpha, &l.aods, &cfg(4)).unwrap();
        for x in &w.0 {
            assert_close(*x, c(1.0, 0.0));
        }
        let h = channel_vector(&l, &alpha, &cfg(4)).unwrap();
        let g = transmission_gain(&h, &w).unwrap();
        assert!((g * eta - 64.0).abs() < 1e-9);
    }

    #[test]
    fn zero_response_entry_gets_unit_phase() {
        // Two opposite coefficients at broadside cancel on every element.
        let w = beamforming_vector(&[c(1.0, 0.0), c(-1.0, 0.0)], &[0.0, 0.0], &cfg(3)).unwrap();
        assert_eq!(w.0, vec![c(1.0, 0.0); 3]);
    }

    #[test]
    fn transmission_gain_edge_cases() {
        let w = BeamformingVector(vec![Complex64::from_polar(1.0, 0.3)]);
        assert_eq!(transmission_gain(&ChannelVector(vec![c(0.0, 0.0)]), &w).unwrap(), 0.0);
        let a = c(0.6, -1.1);
        assert!((transmission_gain(&ChannelVector(vec![a]), &w).unwrap() - a.norm_sqr()).abs() < 1e-15);
        assert!(transmission_gain(&ChannelVector(vec![a, a]), &w).is_err());
    }

    #[test]
    fn interference_gain_closed_forms() {
        let w1 = BeamformingVector(vec![Complex64::from_polar(1.0, 2.0)]);
        let victim = link(50.0, vec![0.1, 1.0, 4.0]);
        assert!((interference_gain(&w1, &victim, &cfg(1)) - 3.0 / 50.0).abs() < 1e-15);

        let ones = BeamformingVector(vec![c(1.0, 0.0); 16]);
        let victim = link(8.0, vec![0.0]);
        assert!((interference_gain(&ones, &victim, &cfg(16)) - 256.0 / 8.0).abs() < 1e-12);
    }

    #[test]
    fn same_fdc_interference_is_a_contract_violation() {
        let w = BeamformingVector(vec![c(1.0, 0.0)]);
        let victim = link(1.0, vec![0.0]);
        assert_eq!(cross_fdc_interference_gain(2, 2, &w, &victim, &cfg(1)), Err(ChannelError::SameFdc(2)));
        assert!(cross_fdc_interference_gain(1, 2, &w, &victim, &cfg(1)).is_ok());
    }

    #[test]
    fn interference_gain_matches_sampled_expectation() {
        let config = cfg(16);
        let mut rng = seed::rng_from_seed(77);
        let serving_alpha: Vec<Complex64> = (0..3).map(|_| complex_gaussian(&mut rng)).collect();
        let w = beamforming_vector(&serving_alpha, &[0.4, 2.0, 5.1], &config).unwrap();
        let victim = link(3.0, vec![1.0, 2.5, 6.0]);
        let closed = interference_gain(&w, &victim, &config);
        let draws = 100_000;
        let mut acc = 0.0;
        for _ in 0..draws {
            let alpha: Vec<Complex64> = (0..3).map(|_| complex_gaussian(&mut rng)).collect();
            let h = channel_vector(&victim, &alpha, &config).unwrap();
            acc += transmission_gain(&h, &w).unwrap();
        }
        let mc = acc / draws as f64;
        assert!((mc / closed - 1.0).abs() < 0.02, "mc {mc} closed {closed}");
    }

    fn small_world(n: usize, k: usize, seed: u64) -> (SystemConfig, crate::topology::Scenario, SmallScaleRealization) {
        let config = SystemConfig { num_fdcs: n, users_per_fdc: k, area_radius_m: 200.0, ..Default::default() };
        let scenario = crate::topology::Scenario::generate(&config, seed);
        let ss = SmallScaleRealization::draw(&config, &scenario.large_scale, seed + 1);
        (config, scenario, ss)
    }

    #[test]
    fn single_fdc_tensor_has_no_cross_gains() {
        let (config, s, ss) = small_world(1, 3, 1);
        let g = build_gain_tensor(&config, &s.large_scale, &ss, Execution::Sequential).unwrap();
        assert_eq!(g.cross_gains().count(), 0);
        for k in 0..3 {
            for l in 0..3 {
                assert!(g.tx(0, k, l) > 0.0);
            }
        }
    }

    #[test]
    fn tensor_entries_equal_scalar_calls() {
        let (config, s, ss) = small_world(3, 2, 5);
        let g = build_gain_tensor(&config, &s.large_scale, &ss, Execution::Parallel).unwrap();
        let k = 2;
        for rx in 0..6 {
            let (n, u) = (rx / k, rx % k);
            for l in 0..k {
                let serving = s.large_scale.link(rx, rx);
                let w = beamforming_vector(ss.coefficients(rx, rx, l), &serving.aods, &config).unwrap();
                let h = channel_vector(serving, ss.coefficients(rx, rx, l), &config).unwrap();
                assert_eq!(g.tx(n, u, l), transmission_gain(&h, &w).unwrap());
                for tx in (0..6).filter(|t| t / k != n) {
                    let (m, i) = (tx / k, tx % k);
                    let wi = beamforming_vector(ss.coefficients(tx, tx, l), &s.large_scale.link(tx, tx).aods, &config)
                        .unwrap();
                    let expect =
                        cross_fdc_interference_gain(n, m, &wi, s.large_scale.link(rx, tx), &config).unwrap();
                    assert_eq!(g.int(n, u, m, i, l), expect);
                }
            }
        }
    }

    #[test]
    fn sequential_and_parallel_builds_agree() {
        let (config, s, ss) = small_world(4, 3, 9);
        let a = build_gain_tensor(&config, &s.large_scale, &ss, Execution::Sequential).unwrap();
        let b = build_gain_tensor(&config, &s.large_scale, &ss, Execution::Parallel).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn huge_cross_path_loss_kills_interference() {
        let (config, mut s, ss) = small_world(2, 2, 3);
        for rx in 0..4 {
            for tx in (0..4).filter(|tx| tx / 2 != rx / 2) {
                s.large_scale.link_mut(rx, tx).path_loss = 1e300;
            }
        }
        let g = build_gain_tensor(&config, &s.large_scale, &ss, Execution::Sequential).unwrap();
        assert!(g.cross_gains().all(|x| x < 1e-290));
    }

    #[test]
    fn averaged_mode_is_deterministic_and_close_to_instantaneous_scale() {
        let (mut config, s, ss) = small_world(2, 2, 12);
        config.interference_mode = InterferenceMode::Averaged { draws: 200 };
        let a = build_gain_tensor(&config, &s.large_scale, &ss, Execution::Parallel).unwrap();
        let b = build_gain_tensor(&config, &s.large_scale, &ss, Execution::Sequential).unwrap();
        assert_eq!(a, b);
        assert!(a.cross_gains().all(|x| x > 0.0 && x.is_finite()));
    }

    #[test]
    fn binary_and_json_round_trip() {
        let (config, s, ss) = small_world(2, 3, 4);
        let g = build_gain_tensor(&config, &s.large_scale, &ss, Execution::Sequential).unwrap();
        assert_eq!(GainTensor::from_bytes(&g.to_bytes()).unwrap(), g);
        let dir = tempfile::tempdir().unwrap();
        for name in ["g.bin", "g.json"] {
            let p = dir.path().join(name);
            g.save(&p).unwrap();
            assert_eq!(GainTensor::load(&p).unwrap(), g);
        }
        let mut bad = g.to_bytes();
        bad[0] = b'X';
        assert!(matches!(GainTensor::from_bytes(&bad), Err(TensorIoError::BadMagic)));
        assert!(matches!(GainTensor::from_bytes(&g.to_bytes()[..40]), Err(TensorIoError::Truncated { .. })));
    }

    #[test]
    fn aods_spanning_full_circle_stay_finite() {
        let w = beamforming_vector(&[c(0.3, 0.2)], &[2.0 * PI - 1e-9], &cfg(16)).unwrap();
        assert!(w.0.iter().all(|x| (x.norm() - 1.0).abs() < 1e-12));
    }
}
