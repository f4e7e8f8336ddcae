//! Stability refinements of symmetric BARNE and the checks tying the
//! solution concepts together.

use std::collections::BTreeMap;

use serde::Serialize;

use super::Game;
use super::{
    bar_strong, barne_at_counts, norm_distance, GameError, Norm, Result, SimplexPoint, StrategyId, Verdict, Witness,
};

/// σ is a symmetric BARNE at every feasible integer `(f, g)` within `delta`
/// of `(f_dot, g_dot)`. Infeasible lattice points are outside the ball.
pub fn delta_stable(
    game: &dyn Game,
    sigma: StrategyId,
    f_dot: usize,
    g_dot: usize,
    delta: f64,
    norm: Norm,
) -> Result<Verdict> {
    let n = game.players();
    let center = SimplexPoint::new(n, f_dot, g_dot)?;
    for point in SimplexPoint::all(n) {
        if norm_distance(center, point, norm)? > delta + 1e-12 {
            continue;
        }
        if let Some(w) = failure_at(game, sigma, point)? {
            return Ok(Verdict::fail(w));
        }
    }
    Ok(Verdict::pass())
}

/// σ is a symmetric BARNE at every `(f, g)` with `f ≤ f_bar` and `g ≤ g_bar`.
pub fn globally_stable(game: &dyn Game, sigma: StrategyId, f_bar: usize, g_bar: usize) -> Result<Verdict> {
    let n = game.players();
    for point in SimplexPoint::all(n).filter(|p| p.f <= f_bar && p.g <= g_bar) {
        if let Some(w) = failure_at(game, sigma, point)? {
            return Ok(Verdict::fail(w));
        }
    }
    Ok(Verdict::pass())
}

fn failure_at(game: &dyn Game, sigma: StrategyId, point: SimplexPoint) -> Result<Option<Witness>> {
    let verdict = barne_at_counts(game, point.f, point.g, sigma)?;
    Ok(verdict.witness.map(|cause| Witness::PointFailure { f: point.f, g: point.g, cause: Box::new(cause) }))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CenterCheck {
    pub f: usize,
    pub g: usize,
    pub delta_stable: bool,
    pub barne: bool,
}

/// Verdicts of the four concepts for the prescribed strategy, and how many
/// of the implications BAR-strong ⇒ globally stable ⇒ δ-stable ⇒ BARNE fail.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainReport {
    pub sigma: StrategyId,
    pub f_bar: usize,
    pub g_bar: usize,
    pub delta: usize,
    pub bar_strong: bool,
    pub globally_stable: bool,
    pub centers: Vec<CenterCheck>,
    pub violations: usize,
}

/// Evaluates the inclusion chain for `τ = game.prescribed()` with the
/// BAR-strong candidate `τ^n`, at every center `(ḟ, ġ)` with
/// `ḟ ≤ f_bar − delta`, `ġ ≤ g_bar − delta` (∞-norm balls).
pub fn check_inclusion_chain(game: &dyn Game, f_bar: usize, g_bar: usize, delta: usize) -> Result<ChainReport> {
    let n = game.players();
    if f_bar + g_bar > n {
        return Err(GameError::InvalidPoint { f: f_bar, g: g_bar, n });
    }
    let sigma = game.prescribed();
    let strong = bar_strong(game, f_bar, g_bar, &vec![sigma; n])?.holds;
    let global = globally_stable(game, sigma, f_bar, g_bar)?.holds;

    let mut violations = usize::from(strong && !global);
    let mut centers = Vec::new();
    for f in 0..=f_bar.saturating_sub(delta) {
        for g in 0..=g_bar.saturating_sub(delta) {
            if f + delta > f_bar || g + delta > g_bar || f + g > n {
                continue;
            }
            let local = delta_stable(game, sigma, f, g, delta as f64, Norm::Infinity)?.holds;
            let barne = barne_at_counts(game, f, g, sigma)?.holds;
            violations += usize::from(global && !local) + usize::from(local && !barne);
            centers.push(CenterCheck { f, g, delta_stable: local, barne });
        }
    }
    Ok(ChainReport { sigma, f_bar, g_bar, delta, bar_strong: strong, globally_stable: global, centers, violations })
}

/// Counterexamples `(f, g, g')` to "τ^g BARNE at (f, g) ⇒ τ^{g'} BARNE at (f, g')",
/// over points with at least one rational (g = 0 holds vacuously).
pub fn prescribed_monotonicity_violations(game: &dyn Game) -> Result<Vec<(usize, usize, usize)>> {
    let n = game.players();
    let tau = game.prescribed();
    let table = verdict_table(game, tau)?;
    let mut out = Vec::new();
    for f in 0..=n {
        for g in 1..=n - f {
            if !table[&(f, g)] {
                continue;
            }
            out.extend((1..=n - f).filter(|&gp| !table[&(f, gp)]).map(|gp| (f, g, gp)));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NonMonotoneWitness {
    pub sigma: StrategyId,
    pub f: usize,
    pub g: usize,
    pub f_prime: usize,
    pub g_prime: usize,
}

/// Non-monotonicity witnesses: a BARNE that is lost when the rational count
/// shrinks (σ ≠ τ, g' < g) and one lost when the Byzantine count shrinks (f' < f).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Default)]
pub struct NonMonotoneWitnesses {
    pub fewer_rationals: Option<NonMonotoneWitness>,
    pub fewer_byzantines: Option<NonMonotoneWitness>,
}

pub fn find_non_monotone_witnesses(game: &dyn Game) -> Result<NonMonotoneWitnesses> {
    let n = game.players();
    let mut found = NonMonotoneWitnesses::default();
    for sigma in 0..game.strategy_count() {
        let table = verdict_table(game, sigma)?;
        for f in 0..=n {
            for g in 1..=n - f {
                if !table[&(f, g)] {
                    continue;
                }
                if found.fewer_rationals.is_none() && sigma != game.prescribed() {
                    if let Some(gp) = (1..g).find(|&gp| !table[&(f, gp)]) {
                        found.fewer_rationals = Some(NonMonotoneWitness { sigma, f, g, f_prime: f, g_prime: gp });
                    }
                }
                if found.fewer_byzantines.is_none() {
                    if let Some(fp) = (0..f).find(|&fp| !table[&(fp, g)]) {
                        found.fewer_byzantines = Some(NonMonotoneWitness { sigma, f, g, f_prime: fp, g_prime: g });
                    }
                }
            }
        }
    }
    Ok(found)
}

fn verdict_table(game: &dyn Game, sigma: StrategyId) -> Result<BTreeMap<(usize, usize), bool>> {
    SimplexPoint::all(game.players()).map(|p| Ok(((p.f, p.g), barne_at_counts(game, p.f, p.g, sigma)?.holds))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::fixtures::{CongestionGame, TableGame};

    const A: StrategyId = 0;

    #[test]
    fn all_safe_is_one_stable_when_byzantines_outnumber_capacity() {
        // f = 3 > k = 2: A is (f − k)-stable in the ∞-norm
        let game = CongestionGame::new(4, 2).unwrap();
        assert!(delta_stable(&game, A, 3, 1, 1.0, Norm::Infinity).unwrap().holds);
        assert!(delta_stable(&game, A, 3, 0, 1.0, Norm::Infinity).unwrap().holds);
        // two fewer Byzantines leave a free fast slot
        let verdict = delta_stable(&game, A, 3, 1, 2.0, Norm::Infinity).unwrap();
        assert!(!verdict.holds);
        assert!(matches!(verdict.witness, Some(Witness::PointFailure { f: 1, .. })));
    }

    #[test]
    fn dominant_strategy_is_stable_everywhere() {
        // x pays 1 whatever the opponent does, y pays 0
        let game = TableGame::new(
            2,
            vec!["x".into(), "y".into()],
            vec![vec![1.0, 1.0], vec![1.0, 0.0], vec![0.0, 1.0], vec![0.0, 0.0]],
            true,
            1,
        )
        .unwrap();
        for point in SimplexPoint::all(2) {
            assert!(delta_stable(&game, 0, point.f, point.g, 2.0, Norm::TwoStar).unwrap().holds);
        }
        assert!(globally_stable(&game, 0, 2, 2).unwrap().holds);
        let verdict = delta_stable(&game, 1, 0, 0, 1.0, Norm::Infinity).unwrap();
        assert!(matches!(verdict.witness, Some(Witness::PointFailure { g: 1, .. })));
    }

    #[test]
    fn safe_server_is_not_globally_stable() {
        let game = CongestionGame::new(4, 2).unwrap();
        let verdict = globally_stable(&game, A, 2, 2).unwrap();
        assert!(!verdict.holds);
        assert!(matches!(verdict.witness, Some(Witness::PointFailure { f: 0, g: 1, .. })));
    }

    #[test]
    fn global_stability_implies_local_stability_on_congestion() {
        for n in [4, 5] {
            for k in 1..n {
                for prescribed in 0..2 {
                    let game = CongestionGame::new(n, k).unwrap().with_prescribed(prescribed);
                    for f_bar in 0..=n {
                        for g_bar in 0..=n - f_bar {
                            for delta in 0..=2 {
                                let report = check_inclusion_chain(&game, f_bar, g_bar, delta).unwrap();
                                assert_eq!(report.violations, 0, "{report:?}");
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn prescribed_strategy_is_monotone_on_congestion() {
        for prescribed in 0..2 {
            let game = CongestionGame::new(5, 2).unwrap().with_prescribed(prescribed);
            let v = prescribed_monotonicity_violations(&game).unwrap();
            assert!(v.is_empty(), "{prescribed}: {v:?}");
        }
    }
}
