use serde::Serialize;

use super::{Result, SimError, SimResult};
use crate::endorsement::{deviation_payoffs, payoff_tolerance, ProtocolParams, Strategy};
use crate::game::SimplexPoint;

/// Deviations beyond this many standard errors are flagged.
pub const FLAG_STANDARD_ERRORS: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeviationEntry {
    pub strategy: Strategy,
    pub agent: usize,
    pub empirical: f64,
    pub analytic: f64,
    pub standard_error: f64,
    pub deviation: f64,
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeviationReport {
    pub sigma: Strategy,
    pub point: SimplexPoint,
    pub entries: Vec<DeviationEntry>,
}

impl DeviationReport {
    pub fn all_within(&self) -> bool {
        self.entries.iter().all(|e| !e.flagged)
    }
}

/// Compares each run's focal agent (the deviant, or the first rational)
/// with the analytic expected payoff of its strategy when the other
/// rationals play `sigma`. Runs must share `params`, `point` and `sigma`.
pub fn empirical_vs_analytic(
    results: &[SimResult],
    params: &ProtocolParams,
    point: SimplexPoint,
    sigma: Strategy,
) -> Result<DeviationReport> {
    if results.is_empty() {
        return Err(SimError::MismatchedConfig("no simulation results given".into()));
    }
    let analytic = deviation_payoffs(params, point, sigma)?;
    let exact_tolerance = payoff_tolerance(params);
    let mut entries = Vec::with_capacity(results.len());
    for result in results {
        let c = &result.config;
        if c.params != *params {
            return Err(SimError::MismatchedConfig("protocol parameters differ".into()));
        }
        if c.point != point {
            return Err(SimError::MismatchedConfig(format!("simulated point {} differs from {point}", c.point)));
        }
        if c.rational_strategy != sigma {
            return Err(SimError::MismatchedConfig(format!(
                "simulated rationals play {}, comparison expects {sigma}",
                c.rational_strategy
            )));
        }
        let (agent, strategy) =
            c.focal().ok_or_else(|| SimError::MismatchedConfig("simulation has no rational agent".into()))?;
        let rounds = result.rounds as f64;
        let mean = result.totals[agent] / rounds;
        let variance = if result.rounds > 1 {
            ((result.sum_squares[agent] / rounds - mean * mean) * rounds / (rounds - 1.0)).max(0.0)
        } else {
            0.0
        };
        let standard_error = (variance / rounds).sqrt();
        let expected = analytic[strategy.index()];
        let deviation = (mean - expected).abs();
        let flagged = if standard_error <= exact_tolerance {
            deviation > exact_tolerance
        } else {
            deviation > FLAG_STANDARD_ERRORS * standard_error
        };
        entries.push(DeviationEntry {
            strategy,
            agent,
            empirical: mean,
            analytic: expected,
            standard_error,
            deviation,
            flagged,
        });
    }
    Ok(DeviationReport { sigma, point, entries })
}
