//! Monte Carlo sweep over transmit powers, large-scale drops and small-scale
//! realizations, with every scheme evaluated on the same gain tensor per cell.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::channel::{build_gain_tensor, GainTensor, SmallScaleRealization};
use crate::config::SystemConfig;
use crate::coordinator::solve_greedy;
use crate::error::{ConfigError, HarnessError};
use crate::metrics::{self, Allocation};
use crate::par::{self, Execution};
use crate::seed::derive_seed;
use crate::topology::Scenario;

use super::baselines::{self, DEFAULT_EXHAUSTIVE_CAP};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    Greedy,
    Exhaustive,
    SingleFdc,
    Orthogonal,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [Scheme::Greedy, Scheme::Exhaustive, Scheme::SingleFdc, Scheme::Orthogonal];

    pub fn name(&self) -> &'static str {
        match self {
            Scheme::Greedy => "greedy",
            Scheme::Exhaustive => "exhaustive",
            Scheme::SingleFdc => "single_fdc",
            Scheme::Orthogonal => "orthogonal",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Scheme::ALL
            .into_iter()
            .find(|sch| sch.name() == s)
            .ok_or_else(|| format!("unknown scheme `{s}` (expected one of greedy, exhaustive, single_fdc, orthogonal)"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentSpec {
    pub system: SystemConfig,
    pub power_dbm: Vec<f64>,
    pub drops: usize,
    pub realizations: usize,
    pub schemes: Vec<Scheme>,
    pub exhaustive_cap: u64,
    /// Write measured wall time into the rows. Off by default so that reruns are
    /// byte-identical.
    pub record_timing: bool,
    pub output_path: Option<PathBuf>,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        Self {
            system: SystemConfig::default(),
            power_dbm: vec![0.0, 10.0, 20.0, 30.0],
            drops: 10,
            realizations: 100,
            schemes: vec![Scheme::Greedy, Scheme::SingleFdc, Scheme::Orthogonal],
            exhaustive_cap: DEFAULT_EXHAUSTIVE_CAP,
            record_timing: false,
            output_path: None,
        }
    }
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<(), HarnessError> {
        self.system.validate()?;
        if self.drops == 0 || self.realizations == 0 {
            return Err(HarnessError::InvalidSpec("drops and realizations must be at least 1".into()));
        }
        if self.power_dbm.is_empty() || self.power_dbm.iter().any(|p| !p.is_finite()) {
            return Err(HarnessError::InvalidSpec("power sweep must be a non-empty list of finite dBm values".into()));
        }
        if self.schemes.is_empty() {
            return Err(HarnessError::InvalidSpec("at least one scheme is required".into()));
        }
        Ok(())
    }

    pub fn from_toml_str(s: &str) -> Result<Self, HarnessError> {
        let spec: Self = toml::from_str(s).map_err(ConfigError::from)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Io { context: format!("reading {}", path.display()), source: e })?;
        Self::from_toml_str(&text)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowStatus {
    Ok,
    SkippedCap,
}

/// One scheme evaluated on one (power, drop, realization) cell. Column order in the
/// CSV follows field order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub scheme: Scheme,
    pub power_dbm: f64,
    pub drop: usize,
    pub realization: usize,
    pub min_rate: f64,
    pub sum_rate: f64,
    pub min_sinr: f64,
    pub iterations: usize,
    pub wall_time_s: f64,
    pub status: RowStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub scheme: Scheme,
    pub power_dbm: f64,
    pub cells: usize,
    pub mean_min_rate: f64,
    pub mean_sum_rate: f64,
    pub mean_iterations: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentOutput {
    pub rows: Vec<ResultRow>,
    pub summary: Vec<SummaryRow>,
}

/// Outcome of one scheme on one tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeOutcome {
    pub min_rate: f64,
    pub sum_rate: f64,
    pub min_sinr: f64,
    pub iterations: usize,
    pub allocation: Option<Allocation>,
}

/// Runs one scheme; `Err(CapExceeded)` only for the exhaustive oracle.
pub fn run_scheme(scheme: Scheme, g: &GainTensor, cfg: &SystemConfig, cap: u64) -> Result<SchemeOutcome, HarnessError> {
    let from_alloc = |alloc: Allocation, iterations: usize| {
        let table = metrics::sinr_table(g, &alloc, cfg);
        SchemeOutcome {
            min_rate: metrics::min_rate(&table),
            sum_rate: metrics::sum_rate(&table),
            min_sinr: table.min_sinr(),
            iterations,
            allocation: Some(alloc),
        }
    };
    Ok(match scheme {
        Scheme::Greedy => {
            let report = solve_greedy(g, cfg);
            from_alloc(report.allocation, report.outer_iterations)
        }
        Scheme::Exhaustive => from_alloc(baselines::solve_exhaustive(g, cfg, cap)?, 0),
        Scheme::SingleFdc => from_alloc(baselines::solve_single_fdc(g, cfg), 0),
        Scheme::Orthogonal => {
            let r = baselines::eval_orthogonal(g, cfg);
            // SINR of the orthogonal scheme before bandwidth sharing.
            let min_sinr = 2f64.powf(r.min_rate * g.num_fdcs as f64) - 1.0;
            SchemeOutcome { min_rate: r.min_rate, sum_rate: r.sum_rate, min_sinr, iterations: 0, allocation: None }
        }
    })
}

/// Seeds of one cell: `(drop seed, realization seed)`.
pub fn cell_seeds(root: u64, drop: usize, realization: usize) -> (u64, u64) {
    let drop_seed = derive_seed(root, drop as u64);
    (drop_seed, derive_seed(drop_seed, realization as u64))
}

/// Gain tensor of one (drop, realization) cell, independent of transmit power.
pub fn cell_tensor(cfg: &SystemConfig, scenario: &Scenario, realization_seed: u64, exec: Execution) -> GainTensor {
    let ss = SmallScaleRealization::draw(cfg, &scenario.large_scale, realization_seed);
    build_gain_tensor(cfg, &scenario.large_scale, &ss, exec).expect("generated links have consistent path counts")
}

pub fn run_experiment(spec: &ExperimentSpec, exec: Execution) -> Result<ExperimentOutput, HarnessError> {
    spec.validate()?;
    let base = &spec.system;
    let scenarios: Vec<Scenario> =
        par::map_range(spec.drops, exec, |d| Scenario::generate(base, cell_seeds(base.rng_seed, d, 0).0));

    let cells: Vec<(usize, usize)> =
        (0..spec.drops).flat_map(|d| (0..spec.realizations).map(move |r| (d, r))).collect();
    let per_cell: Vec<Vec<ResultRow>> = par::map_slice(&cells, exec, |&(drop, realization)| {
        let (_, rs) = cell_seeds(base.rng_seed, drop, realization);
        let g = cell_tensor(base, &scenarios[drop], rs, Execution::Sequential);
        let mut rows = Vec::with_capacity(spec.power_dbm.len() * spec.schemes.len());
        for &p in &spec.power_dbm {
            let cfg = base.clone().with_tx_power_dbm(p);
            for &scheme in &spec.schemes {
                let start = Instant::now();
                let outcome = run_scheme(scheme, &g, &cfg, spec.exhaustive_cap);
                let elapsed = if spec.record_timing { start.elapsed().as_secs_f64() } else { 0.0 };
                rows.push(match outcome {
                    Ok(o) => ResultRow {
                        scheme,
                        power_dbm: p,
                        drop,
                        realization,
                        min_rate: o.min_rate,
                        sum_rate: o.sum_rate,
                        min_sinr: o.min_sinr,
                        iterations: o.iterations,
                        wall_time_s: elapsed,
                        status: RowStatus::Ok,
                    },
                    Err(_) => ResultRow {
                        scheme,
                        power_dbm: p,
                        drop,
                        realization,
                        min_rate: f64::NAN,
                        sum_rate: f64::NAN,
                        min_sinr: f64::NAN,
                        iterations: 0,
                        wall_time_s: elapsed,
                        status: RowStatus::SkippedCap,
                    },
                });
            }
        }
        rows
    });

    let mut rows: Vec<ResultRow> = per_cell.into_iter().flatten().collect();
    rows.sort_by(|a, b| {
        a.power_dbm
            .total_cmp(&b.power_dbm)
            .then(a.drop.cmp(&b.drop))
            .then(a.realization.cmp(&b.realization))
            .then(a.scheme.cmp(&b.scheme))
    });
    let summary = summarize(&rows);
    let out = ExperimentOutput { rows, summary };
    if let Some(path) = &spec.output_path {
        write_outputs(&out, path)?;
    }
    Ok(out)
}

/// Means per (scheme, power) over the rows with status `ok`.
pub fn summarize(rows: &[ResultRow]) -> Vec<SummaryRow> {
    let mut groups: BTreeMap<(Scheme, u64), (f64, Vec<&ResultRow>)> = BTreeMap::new();
    for r in rows.iter().filter(|r| r.status == RowStatus::Ok) {
        // Order by the power's bit pattern shifted to sort like the value.
        let key = (r.scheme, ordered_bits(r.power_dbm));
        groups.entry(key).or_insert_with(|| (r.power_dbm, Vec::new())).1.push(r);
    }
    groups
        .into_iter()
        .map(|((scheme, _), (power_dbm, rs))| {
            let n = rs.len() as f64;
            SummaryRow {
                scheme,
                power_dbm,
                cells: rs.len(),
                mean_min_rate: rs.iter().map(|r| r.min_rate).sum::<f64>() / n,
                mean_sum_rate: rs.iter().map(|r| r.sum_rate).sum::<f64>() / n,
                mean_iterations: rs.iter().map(|r| r.iterations as f64).sum::<f64>() / n,
            }
        })
        .collect()
}

fn ordered_bits(x: f64) -> u64 {
    let bits = x.to_bits();
    if bits >> 63 == 1 {
        !bits
    } else {
        bits | (1 << 63)
    }
}

pub fn write_csv<W: Write>(rows: &[ResultRow], writer: W) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(writer);
    for r in rows {
        w.serialize(r).map_err(|e| HarnessError::Csv { context: "writing result row".into(), source: e })?;
    }
    w.flush().map_err(|e| HarnessError::Io { context: "flushing CSV".into(), source: e })?;
    Ok(())
}

/// Path of the JSON summary written next to the CSV at `csv_path`.
pub fn summary_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("summary.json")
}

pub fn write_outputs(out: &ExperimentOutput, csv_path: &Path) -> Result<(), HarnessError> {
    let file = std::fs::File::create(csv_path)
        .map_err(|e| HarnessError::Io { context: format!("creating {}", csv_path.display()), source: e })?;
    write_csv(&out.rows, std::io::BufWriter::new(file))?;
    let spath = summary_path(csv_path);
    let text = serde_json::to_string_pretty(&out.summary)
        .map_err(|e| HarnessError::Json { context: "serializing summary".into(), source: e })?;
    std::fs::write(&spath, text)
        .map_err(|e| HarnessError::Io { context: format!("writing {}", spath.display()), source: e })?;
    Ok(())
}
