//! Baselines, the exact oracle and the Monte Carlo experiment driver.

pub mod baselines;
pub mod experiment;
pub mod oracle;

pub use baselines::{eval_orthogonal, solve_exhaustive, solve_single_fdc, RatePair, DEFAULT_EXHAUSTIVE_CAP};
pub use experiment::{run_experiment, ExperimentOutput, ExperimentSpec, ResultRow, RowStatus, Scheme, SummaryRow};
pub use oracle::{run_oracle_suite, OracleReport};
