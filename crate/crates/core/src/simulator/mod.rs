//! Seeded Monte Carlo execution of the consensus round with a BAR
//! population, for cross-checking the analytic expected payoffs.
//!
//! Agents `0..f` are Byzantine (σ_f), `f..f+g` rational and the rest honest.
//! Every round draws a uniform proposer, fixes the block's validity (trap
//! blocks included), lets every agent endorse according to its strategy,
//! decides by quorum and books rewards, losses, check costs and fines.

mod config;
mod engine;
mod report;

use thiserror::Error;

use crate::endorsement::ModelError;

pub use config::{Deviant, SimConfig, SimConfigFile};
pub use engine::{
    accusation_check, replay_totals, run_simulation, run_with_trace, write_trace_csv, AgentType, ClassMeans,
    RoundRecord, SimCounts, SimResult,
};
pub use report::{empirical_vs_analytic, DeviationEntry, DeviationReport, FLAG_STANDARD_ERRORS};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("invalid simulation config:\n  - {}", .0.join("\n  - "))]
    InvalidConfig(Vec<String>),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("result does not match the requested comparison: {0}")]
    MismatchedConfig(String),
    #[error("could not write output: {0}")]
    Output(String),
}

pub type Result<T, E = SimError> = std::result::Result<T, E>;
