use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use frbcoord::channel::GainTensor;
use frbcoord::config::SystemConfig;
use frbcoord::coordinator::solve_greedy;
use frbcoord::harness::experiment::{cell_seeds, cell_tensor, run_scheme, summary_path};
use frbcoord::harness::{run_experiment, run_oracle_suite, ExperimentSpec, RowStatus, Scheme};
use frbcoord::par::Execution;
use frbcoord::topology::Scenario;
use serde_json::json;

#[derive(Parser)]
#[command(name = "frbcoord", version, about = "Coordinated FRB allocation for clustered mmWave small cells")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw one large-scale drop and write topology and CSI as JSON.
    Generate(GenerateArgs),
    /// Solve one instance and print the solver report as JSON.
    Solve(SolveArgs),
    /// Run a Monte Carlo sweep and write CSV rows plus a JSON summary.
    Sweep(SweepArgs),
    /// Check the solvers against brute-force enumeration on small instances.
    Oracle(OracleArgs),
}

#[derive(Args)]
struct SystemArgs {
    /// System configuration (TOML); defaults apply to missing keys.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
}

impl SystemArgs {
    fn load(&self) -> Result<SystemConfig> {
        let mut cfg = match &self.config {
            Some(p) => SystemConfig::load(p).with_context(|| format!("loading config {}", p.display()))?,
            None => SystemConfig::default(),
        };
        if let Some(s) = self.seed {
            cfg.rng_seed = s;
        }
        Ok(cfg)
    }
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    system: SystemArgs,
    /// Destination of the scenario JSON; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the gain tensor of realization 0 (`.json` or binary).
    #[arg(long)]
    tensor: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    system: SystemArgs,
    /// Solve this stored gain tensor instead of drawing one.
    #[arg(long)]
    tensor: Option<PathBuf>,
    #[arg(long, default_value_t = 30.0, allow_negative_numbers = true)]
    power_dbm: f64,
    /// Comma-separated schemes to evaluate next to the greedy report.
    #[arg(long, value_delimiter = ',')]
    scheme: Vec<Scheme>,
    #[arg(long, default_value_t = frbcoord::harness::DEFAULT_EXHAUSTIVE_CAP)]
    cap: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// Experiment specification (TOML) with an optional `[system]` table.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// CSV destination; the summary goes next to it with `.summary.json`.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    scheme: Vec<Scheme>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    power_dbm: Vec<f64>,
    #[arg(long)]
    drops: Option<usize>,
    #[arg(long)]
    realizations: Option<usize>,
    #[arg(long)]
    cap: Option<u64>,
    /// Record wall time per row (makes output non-reproducible).
    #[arg(long)]
    timing: bool,
    /// Run on one thread.
    #[arg(long)]
    sequential: bool,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Instances per check.
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn emit(value: &serde_json::Value, out: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn generate(args: GenerateArgs) -> Result<()> {
    let cfg = args.system.load()?;
    let (drop_seed, realization_seed) = cell_seeds(cfg.rng_seed, 0, 0);
    let scenario = Scenario::generate(&cfg, drop_seed);
    if let Some(p) = &args.tensor {
        cell_tensor(&cfg, &scenario, realization_seed, Execution::default())
            .save(p)
            .with_context(|| format!("writing tensor {}", p.display()))?;
    }
    emit(&serde_json::to_value(&scenario)?, args.out.as_deref())
}

fn solve(args: SolveArgs) -> Result<()> {
    let base = args.system.load()?;
    let g = match &args.tensor {
        Some(p) => GainTensor::load(p).with_context(|| format!("reading tensor {}", p.display()))?,
        None => {
            let (drop_seed, realization_seed) = cell_seeds(base.rng_seed, 0, 0);
            cell_tensor(&base, &Scenario::generate(&base, drop_seed), realization_seed, Execution::default())
        }
    };
    let cfg = SystemConfig { num_fdcs: g.num_fdcs, users_per_fdc: g.users_per_fdc, ..base }.with_tx_power_dbm(args.power_dbm);
    cfg.validate()?;
    let report = solve_greedy(&g, &cfg);
    let mut schemes = serde_json::Map::new();
    for scheme in args.scheme {
        let entry = match run_scheme(scheme, &g, &cfg, args.cap) {
            Ok(o) => json!({
                "min_rate": o.min_rate,
                "sum_rate": o.sum_rate,
                "min_sinr": o.min_sinr,
                "allocation": o.allocation,
            }),
            Err(e) => json!({ "skipped": e.to_string() }),
        };
        schemes.insert(scheme.to_string(), entry);
    }
    emit(&json!({ "power_dbm": args.power_dbm, "greedy": report, "schemes": schemes }), args.out.as_deref())
}

fn sweep(args: SweepArgs) -> Result<()> {
    let mut spec = match &args.config {
        Some(p) => ExperimentSpec::load(p).with_context(|| format!("loading spec {}", p.display()))?,
        None => ExperimentSpec::default(),
    };
    if let Some(s) = args.seed {
        spec.system.rng_seed = s;
    }
    if !args.scheme.is_empty() {
        spec.schemes = args.scheme;
    }
    if !args.power_dbm.is_empty() {
        spec.power_dbm = args.power_dbm;
    }
    if let Some(d) = args.drops {
        spec.drops = d;
    }
    if let Some(r) = args.realizations {
        spec.realizations = r;
    }
    if let Some(c) = args.cap {
        spec.exhaustive_cap = c;
    }
    if args.out.is_some() {
        spec.output_path = args.out;
    }
    spec.record_timing |= args.timing;
    let exec = if args.sequential { Execution::Sequential } else { Execution::default() };
    let out = run_experiment(&spec, exec)?;
    let skipped = out.rows.iter().filter(|r| r.status == RowStatus::SkippedCap).count();
    if skipped > 0 {
        eprintln!("warning: {skipped} rows skipped because the exhaustive search exceeds the cap");
    }
    if let Some(p) = &spec.output_path {
        eprintln!("wrote {} and {}", p.display(), summary_path(p).display());
    }
    emit(&serde_json::to_value(&out.summary)?, None)
}

fn oracle(args: OracleArgs) -> Result<()> {
    if args.trials == 0 {
        bail!("--trials must be at least 1");
    }
    let report = run_oracle_suite(args.seed, args.trials);
    emit(&serde_json::to_value(&report)?, args.out.as_deref())?;
    if !report.passed() {
        let failed: Vec<_> = report.checks.iter().filter(|c| !c.passed()).map(|c| c.name.as_str()).collect();
        bail!("oracle checks failed: {}", failed.join(", "));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(a) => generate(a),
        Command::Solve(a) => solve(a),
        Command::Sweep(a) => sweep(a),
        Command::Oracle(a) => oracle(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
