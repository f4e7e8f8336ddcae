//! Generic finite games and the BAR family of equilibrium checks.
//!
//! Every checker here is exhaustive: Byzantine worst cases are found by
//! enumerating pure joint profiles, and coalition deviations are enumerated
//! outright. The work is bounded by [`EVALUATION_BUDGET`] payoff evaluations;
//! a check that would exceed it fails with [`GameError::BudgetExceeded`]
//! instead of silently truncating.

mod barne;
pub mod fixtures;
mod mixed;
mod norm;
mod stability;
mod strong;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;
use thiserror::Error;

pub use barne::{barne_at_counts, barne_at_sets, maxmin_table, MaxMinEntry};
pub use mixed::{find_symmetric_mixed_barne, mixed_regret, MixedBarne, MixedStrategy, SearchStage};
pub use norm::{norm_distance, Norm, SimplexPoint};
pub use stability::{
    check_inclusion_chain, delta_stable, find_non_monotone_witnesses, globally_stable,
    prescribed_monotonicity_violations, ChainReport, NonMonotoneWitness, NonMonotoneWitnesses,
};
pub use strong::bar_strong;

/// Index into a game's strategy list.
pub type StrategyId = usize;

/// Upper bound on payoff evaluations for a single exhaustive check.
pub const EVALUATION_BUDGET: u128 = 100_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GameError {
    #[error("exhaustive check needs {required} payoff evaluations, budget is {budget}")]
    BudgetExceeded { required: u128, budget: u128 },
    #[error("invalid type assignment: {0}")]
    InvalidAssignment(String),
    #[error("game must be symmetric for {0}")]
    SymmetryRequired(&'static str),
    #[error("invalid simplex point (f={f}, g={g}, n={n})")]
    InvalidPoint { f: usize, g: usize, n: usize },
    #[error("simplex points live in different games (n={0} vs n={1})")]
    MismatchedPlayers(usize, usize),
    #[error("invalid mixed strategy: {0}")]
    InvalidMixedStrategy(String),
    #[error("strategy index {0} out of range")]
    UnknownStrategy(StrategyId),
    #[error("invalid profile: {0}")]
    InvalidProfile(String),
    #[error("invalid game description: {0}")]
    InvalidGame(String),
    #[error("mixed equilibrium search did not converge (best regret {regret:e})")]
    NoConvergence { best: MixedStrategy, regret: f64 },
}

pub type Result<T, E = GameError> = std::result::Result<T, E>;

/// A finite n-player game with a common strategy set.
///
/// Implementations must define `payoff` for every pure joint profile. When
/// `is_symmetric` returns true the payoff must be permutation invariant:
/// `u_i(s) == u_{π(i)}(s ∘ π⁻¹)`.
pub trait Game: Sync {
    fn players(&self) -> usize;

    fn strategies(&self) -> &[String];

    fn payoff(&self, player: usize, profile: &[StrategyId]) -> f64;

    fn is_symmetric(&self) -> bool;

    /// The protocol strategy τ played by honest agents.
    fn prescribed(&self) -> StrategyId;

    /// Absolute slack used when comparing payoffs for argmax membership.
    fn tie_tolerance(&self) -> f64 {
        1e-9
    }

    fn strategy_count(&self) -> usize {
        self.strategies().len()
    }

    fn strategy_index(&self, name: &str) -> Option<StrategyId> {
        self.strategies().iter().position(|s| s == name)
    }
}

/// Partition of the players into Byzantine, rational and (implied) honest.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TypeAssignment {
    pub byzantine: Vec<usize>,
    pub rational: Vec<usize>,
    pub prescribed: StrategyId,
}

impl TypeAssignment {
    pub fn new(byzantine: Vec<usize>, rational: Vec<usize>, prescribed: StrategyId) -> Self {
        Self { byzantine, rational, prescribed }
    }

    /// F = first `f` players, G = the next `g`.
    pub fn canonical(f: usize, g: usize, prescribed: StrategyId) -> Self {
        Self { byzantine: (0..f).collect(), rational: (f..f + g).collect(), prescribed }
    }

    pub fn honest(&self, n: usize) -> Vec<usize> {
        (0..n).filter(|i| !self.byzantine.contains(i) && !self.rational.contains(i)).collect()
    }

    pub fn validate(&self, game: &dyn Game) -> Result<()> {
        let n = game.players();
        if self.prescribed >= game.strategy_count() {
            return Err(GameError::UnknownStrategy(self.prescribed));
        }
        let mut seen = vec![false; n];
        for &i in self.byzantine.iter().chain(&self.rational) {
            if i >= n {
                return Err(GameError::InvalidAssignment(format!("player {i} out of range (n={n})")));
            }
            if seen[i] {
                return Err(GameError::InvalidAssignment(format!(
                    "player {i} assigned twice (F and G must be disjoint)"
                )));
            }
            seen[i] = true;
        }
        Ok(())
    }
}

/// Outcome of an equilibrium check, with a counterexample when it fails.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

impl Verdict {
    pub fn pass() -> Self {
        Self { holds: true, witness: None }
    }

    pub fn fail(witness: Witness) -> Self {
        Self { holds: false, witness: Some(witness) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// A rational's max-min payoff improves by switching strategy.
    UnilateralDeviation { player: usize, from: StrategyId, to: StrategyId, gain: f64 },
    /// BAR-strong immunity failure: a Byzantine deviation lowers a non-Byzantine's payoff.
    ByzantineHarm { byzantine: Vec<usize>, byzantine_profile: Vec<StrategyId>, victim: usize, loss: f64 },
    /// BAR-strong coalition failure: a rational coalition strictly gains.
    CoalitionDeviation {
        byzantine: Vec<usize>,
        byzantine_profile: Vec<StrategyId>,
        coalition: Vec<usize>,
        coalition_profile: Vec<StrategyId>,
        min_gain: f64,
    },
    /// A population point where the symmetric BARNE check fails.
    PointFailure { f: usize, g: usize, cause: Box<Witness> },
}

/// Evaluations needed to enumerate `strategies^len` profiles, saturating.
pub(crate) fn profile_count(strategies: usize, len: usize) -> u128 {
    (0..len).fold(1u128, |acc, _| acc.saturating_mul(strategies as u128))
}

pub(crate) fn check_budget(required: u128) -> Result<()> {
    if required > EVALUATION_BUDGET {
        Err(GameError::BudgetExceeded { required, budget: EVALUATION_BUDGET })
    } else {
        Ok(())
    }
}

/// Steps through every pure profile in `0..strategies` of length `len`,
/// last coordinate fastest.
pub(crate) struct Odometer {
    digits: Vec<StrategyId>,
    base: usize,
    started: bool,
}

impl Odometer {
    pub(crate) fn new(len: usize, base: usize) -> Self {
        Self { digits: vec![0; len], base, started: false }
    }

    /// Advances and returns the current profile, or `None` once exhausted.
    pub(crate) fn next_profile(&mut self) -> Option<&[StrategyId]> {
        if !self.started {
            self.started = true;
            return if self.base == 0 && !self.digits.is_empty() { None } else { Some(&self.digits) };
        }
        for d in self.digits.iter_mut().rev() {
            *d += 1;
            if *d < self.base {
                return Some(&self.digits);
            }
            *d = 0;
        }
        None
    }
}

/// Randomly spot-checks the permutation invariance of a game flagged symmetric.
///
/// Returns the first offending `(permutation, profile)` pair, if any.
pub fn spot_check_symmetry<R: Rng>(
    game: &dyn Game,
    samples: usize,
    rng: &mut R,
) -> Option<(Vec<usize>, Vec<StrategyId>)> {
    let n = game.players();
    let k = game.strategy_count();
    let tol = game.tie_tolerance();
    for _ in 0..samples {
        let profile: Vec<StrategyId> = (0..n).map(|_| rng.random_range(0..k)).collect();
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(rng);
        // player j's strategy moves to seat perm[j]
        let mut permuted = vec![0; n];
        for (j, &s) in profile.iter().enumerate() {
            permuted[perm[j]] = s;
        }
        for i in 0..n {
            if (game.payoff(i, &profile) - game.payoff(perm[i], &permuted)).abs() > tol {
                return Some((perm, profile));
            }
        }
    }
    None
}
