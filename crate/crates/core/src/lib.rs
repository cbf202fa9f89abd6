//! Coordinated frequency-resource-block allocation for clustered mmWave
//! small-cell networks with analog beamforming.
//!
//! Base stations are grouped into FDCs (frequency-division clusters). Inside an
//! FDC every user owns one FRB (frequency resource block); across FDCs the same
//! FRB is reused, so the allocation problem is to choose one permutation per FDC
//! that maximises the worst link's SINR.

pub mod channel;
pub mod config;
pub mod coordinator;
pub mod error;
pub mod harness;
pub mod lbap;
pub mod metrics;
pub mod par;
pub mod seed;
pub mod topology;

pub use channel::{build_gain_tensor, GainTensor, SmallScaleRealization};
pub use config::SystemConfig;
pub use coordinator::{solve_degraded, solve_greedy, SolveReport};
pub use lbap::{solve_lbap, CostMatrix};
pub use metrics::Allocation;
pub use par::Execution;
pub use topology::Scenario;
