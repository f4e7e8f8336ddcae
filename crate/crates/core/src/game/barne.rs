use serde::Serialize;

use super::{
    check_budget, profile_count, Game, GameError, Odometer, Result, StrategyId, TypeAssignment, Verdict, Witness,
};

/// Worst-case (over Byzantine pure joint profiles) payoff of one pure reply.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MaxMinEntry {
    pub strategy: StrategyId,
    pub value: f64,
    /// Byzantine joint profile attaining the minimum, aligned with `assign.byzantine`.
    pub minimizer: Vec<StrategyId>,
}

/// For rational `player`, the min-over-Byzantines payoff of every pure reply
/// `t`, with the other rationals fixed at `profile` (aligned with
/// `assign.rational`) and honest agents at the prescribed strategy.
pub fn maxmin_table(
    game: &dyn Game,
    assign: &TypeAssignment,
    profile: &[StrategyId],
    player: usize,
) -> Result<Vec<MaxMinEntry>> {
    assign.validate(game)?;
    let pos = assign
        .rational
        .iter()
        .position(|&i| i == player)
        .ok_or_else(|| GameError::InvalidAssignment(format!("player {player} is not rational")))?;
    check_profile(game, assign, profile)?;
    let k = game.strategy_count();
    check_budget(profile_count(k, assign.byzantine.len()).saturating_mul(k as u128))?;

    let mut joint = base_profile(game, assign, profile);
    let mut table = Vec::with_capacity(k);
    for t in 0..k {
        joint[assign.rational[pos]] = t;
        table.push(worst_case(game, assign, &mut joint, player, t));
    }
    Ok(table)
}

/// Checks whether `candidate` (one strategy per member of `assign.rational`)
/// is a BARNE at the given sets. Argmax ties count as best replies.
pub fn barne_at_sets(game: &dyn Game, assign: &TypeAssignment, candidate: &[StrategyId]) -> Result<Verdict> {
    assign.validate(game)?;
    check_profile(game, assign, candidate)?;
    let k = game.strategy_count();
    let g = assign.rational.len() as u128;
    check_budget(profile_count(k, assign.byzantine.len()).saturating_mul(k as u128).saturating_mul(g))?;

    let tol = game.tie_tolerance();
    let mut joint = base_profile(game, assign, candidate);
    for (pos, &player) in assign.rational.iter().enumerate() {
        let own = candidate[pos];
        let mut values = Vec::with_capacity(k);
        for t in 0..k {
            joint[player] = t;
            values.push(worst_case(game, assign, &mut joint, player, t).value);
        }
        joint[player] = own;
        let (best, best_value) = argmax(&values);
        if values[own] < best_value - tol {
            return Ok(Verdict::fail(Witness::UnilateralDeviation {
                player,
                from: own,
                to: best,
                gain: best_value - values[own],
            }));
        }
    }
    Ok(Verdict::pass())
}

/// Symmetric BARNE check at population counts `(f, g)`.
///
/// Permutation invariance makes every size-respecting partition equivalent,
/// so only the canonical one (F first, then G) is evaluated.
pub fn barne_at_counts(game: &dyn Game, f: usize, g: usize, sigma: StrategyId) -> Result<Verdict> {
    if !game.is_symmetric() {
        return Err(GameError::SymmetryRequired("barne_at_counts"));
    }
    let n = game.players();
    if f + g > n {
        return Err(GameError::InvalidPoint { f, g, n });
    }
    if sigma >= game.strategy_count() {
        return Err(GameError::UnknownStrategy(sigma));
    }
    let assign = TypeAssignment::canonical(f, g, game.prescribed());
    barne_at_sets(game, &assign, &vec![sigma; g])
}

fn check_profile(game: &dyn Game, assign: &TypeAssignment, profile: &[StrategyId]) -> Result<()> {
    if profile.len() != assign.rational.len() {
        return Err(GameError::InvalidProfile(format!(
            "expected {} rational strategies, got {}",
            assign.rational.len(),
            profile.len()
        )));
    }
    if let Some(&bad) = profile.iter().find(|&&s| s >= game.strategy_count()) {
        return Err(GameError::UnknownStrategy(bad));
    }
    Ok(())
}

fn base_profile(game: &dyn Game, assign: &TypeAssignment, rational: &[StrategyId]) -> Vec<StrategyId> {
    let mut joint = vec![assign.prescribed; game.players()];
    for (&i, &s) in assign.rational.iter().zip(rational) {
        joint[i] = s;
    }
    joint
}

fn worst_case(
    game: &dyn Game,
    assign: &TypeAssignment,
    joint: &mut [StrategyId],
    player: usize,
    strategy: StrategyId,
) -> MaxMinEntry {
    let mut odo = Odometer::new(assign.byzantine.len(), game.strategy_count());
    let mut best = MaxMinEntry { strategy, value: f64::INFINITY, minimizer: Vec::new() };
    while let Some(byz) = odo.next_profile() {
        for (&i, &s) in assign.byzantine.iter().zip(byz) {
            joint[i] = s;
        }
        let u = game.payoff(player, joint);
        if u < best.value {
            best.value = u;
            best.minimizer = byz.to_vec();
        }
    }
    best
}

/// First index attaining the maximum.
pub(crate) fn argmax(values: &[f64]) -> (usize, f64) {
    values.iter().copied().enumerate().fold((0, f64::NEG_INFINITY), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc })
}
