//! Analytic model of the quorum endorsement stage game: payoffs, beliefs,
//! expected payoffs, per-point equilibrium classification and simplex scans.

mod adapter;
mod classify;
mod params;
mod payoff;
mod scan;
mod strategy;
mod svg;

use thiserror::Error;

pub use adapter::{as_generic_game, EndorsementGame};
pub use classify::{
    classify_point, deviation_payoffs, special_areas, PointVerdict, Region, SpecialArea, StrategyVerdict,
};
pub use params::{Amendments, ProtocolConfig, ProtocolParams, ValidationConfig};
pub use payoff::{
    acceptance_class, belief_matrix, beliefs_for, expected_payoffs, expected_via_cells, inequality_report,
    realized_payoff, stage_payoff, BeliefMatrix, ExpectedPayoffs, Inequality, InequalityReport, Sign,
};
pub use scan::{simplex_scan, RegionSummary, ScanSummary, SimplexMap, MAX_SCAN_AGENTS};
pub use strategy::{Acceptance, BlockOutcomeClass, Strategy, Validity};
pub use svg::{render_svg, SVG_VERSION_LINE};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("invalid protocol parameters:\n  - {}", .0.join("\n  - "))]
    InvalidParams(Vec<String>),
    #[error("invalid population (f={f}, g={g}, n={n}); need f + g ≤ n and g ≥ 1")]
    InvalidPoint { f: usize, g: usize, n: usize },
    #[error("n={n} exceeds the full-scan limit of {limit} agents")]
    TooLarge { n: usize, limit: usize },
    #[error("could not parse configuration: {0}")]
    Parse(String),
    #[error("could not serialize output: {0}")]
    Output(String),
}

pub type Result<T, E = ModelError> = std::result::Result<T, E>;

/// Comparison slack proportional to the magnitude of the economic constants.
pub fn payoff_tolerance(params: &ProtocolParams) -> f64 {
    1e-9 * (1.0 + params.reward + params.check_cost + params.loss + params.fine())
}
