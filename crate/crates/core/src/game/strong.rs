use itertools::Itertools;

use super::{check_budget, profile_count, Game, GameError, Odometer, Result, StrategyId, Verdict, Witness};

/// `(f̄, ḡ)` BAR-strong check of a full joint profile.
///
/// Immunity: no Byzantine set of size ≤ f̄ can lower any
/// non-Byzantine's payoff. Coalition-proofness: for every Byzantine context of size
/// ≤ f̄, no non-empty rational coalition of size ≤ ḡ has a joint deviation
/// that strictly improves every member.
pub fn bar_strong(game: &dyn Game, f_bar: usize, g_bar: usize, candidate: &[StrategyId]) -> Result<Verdict> {
    let n = game.players();
    let k = game.strategy_count();
    if candidate.len() != n {
        return Err(GameError::InvalidProfile(format!(
            "expected a joint profile of {n} strategies, got {}",
            candidate.len()
        )));
    }
    if let Some(&bad) = candidate.iter().find(|&&s| s >= k) {
        return Err(GameError::UnknownStrategy(bad));
    }
    let f_bar = f_bar.min(n);
    check_budget(required_evaluations(n, k, f_bar, g_bar))?;

    let tol = game.tie_tolerance();
    let base: Vec<f64> = (0..n).map(|i| game.payoff(i, candidate)).collect();

    // immunity over every Byzantine context first, then coalition-proofness
    for f in 0..=f_bar {
        for byz in (0..n).combinations(f) {
            let mut odo = Odometer::new(f, k);
            while let Some(byz_profile) = odo.next_profile() {
                let context = with_deviation(candidate, &byz, byz_profile);
                let victim = (0..n)
                    .filter(|i| !byz.contains(i))
                    .map(|i| (i, base[i] - game.payoff(i, &context)))
                    .find(|&(_, loss)| loss > tol);
                if let Some((victim, loss)) = victim {
                    return Ok(Verdict::fail(Witness::ByzantineHarm {
                        byzantine: byz.clone(),
                        byzantine_profile: byz_profile.to_vec(),
                        victim,
                        loss,
                    }));
                }
            }
        }
    }

    for f in 0..=f_bar {
        for byz in (0..n).combinations(f) {
            let rest: Vec<usize> = (0..n).filter(|i| !byz.contains(i)).collect();
            let mut odo = Odometer::new(f, k);
            while let Some(byz_profile) = odo.next_profile() {
                let context = with_deviation(candidate, &byz, byz_profile);
                let context_payoff: Vec<f64> = (0..n).map(|i| game.payoff(i, &context)).collect();
                for g in 1..=g_bar.min(rest.len()) {
                    for coalition in rest.iter().copied().combinations(g) {
                        if let Some((coalition_profile, min_gain)) =
                            coalition_gain(game, &context, &context_payoff, &coalition, tol)
                        {
                            return Ok(Verdict::fail(Witness::CoalitionDeviation {
                                byzantine: byz.clone(),
                                byzantine_profile: byz_profile.to_vec(),
                                coalition,
                                coalition_profile,
                                min_gain,
                            }));
                        }
                    }
                }
            }
        }
    }
    Ok(Verdict::pass())
}

/// Returns a joint deviation of `coalition` that strictly improves all of its members.
fn coalition_gain(
    game: &dyn Game,
    context: &[StrategyId],
    context_payoff: &[f64],
    coalition: &[usize],
    tol: f64,
) -> Option<(Vec<StrategyId>, f64)> {
    let mut joint = context.to_vec();
    let mut odo = Odometer::new(coalition.len(), game.strategy_count());
    while let Some(dev) = odo.next_profile() {
        for (&i, &s) in coalition.iter().zip(dev) {
            joint[i] = s;
        }
        let min_gain =
            coalition.iter().map(|&i| game.payoff(i, &joint) - context_payoff[i]).fold(f64::INFINITY, f64::min);
        if min_gain > tol {
            return Some((dev.to_vec(), min_gain));
        }
    }
    None
}

fn with_deviation(profile: &[StrategyId], players: &[usize], strategies: &[StrategyId]) -> Vec<StrategyId> {
    let mut joint = profile.to_vec();
    for (&i, &s) in players.iter().zip(strategies) {
        joint[i] = s;
    }
    joint
}

fn binomial(n: usize, k: usize) -> u128 {
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i as u128 + 1))
}

fn required_evaluations(n: usize, k: usize, f_bar: usize, g_bar: usize) -> u128 {
    let mut total = 0u128;
    for f in 0..=f_bar {
        let contexts = binomial(n, f).saturating_mul(profile_count(k, f));
        let mut per_context = n as u128;
        for g in 1..=g_bar.min(n - f) {
            per_context = per_context
                .saturating_add(binomial(n - f, g).saturating_mul(profile_count(k, g)).saturating_mul(g as u128));
        }
        total = total.saturating_add(contexts.saturating_mul(per_context));
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::fixtures::{CongestionGame, PrisonersDilemma};
    use crate::game::Odometer;

    fn all_profiles(game: &dyn Game) -> Vec<Vec<StrategyId>> {
        let mut odo = Odometer::new(game.players(), game.strategy_count());
        let mut out = Vec::new();
        while let Some(p) = odo.next_profile() {
            out.push(p.to_vec());
        }
        out
    }

    #[test]
    fn congestion_has_no_bar_strong_profile_with_a_byzantine() {
        let game = CongestionGame::new(4, 2).unwrap();
        for profile in all_profiles(&game) {
            assert!(!bar_strong(&game, 1, 3, &profile).unwrap().holds, "{profile:?}");
        }
    }

    #[test]
    fn oracle_assignment_fails_immunity_with_crash_witness() {
        let game = CongestionGame::new(4, 2).unwrap();
        let verdict = bar_strong(&game, 1, 3, &[1, 1, 0, 0]).unwrap();
        match verdict.witness.unwrap() {
            Witness::ByzantineHarm { byzantine_profile, victim, loss, .. } => {
                assert_eq!(byzantine_profile, vec![1]);
                assert!(victim < 2);
                assert_eq!(loss, 2.0);
            }
            w => panic!("unexpected witness {w:?}"),
        }
    }

    #[test]
    fn unilateral_strong_check_is_nash_check() {
        let pd = PrisonersDilemma::default();
        let cong = CongestionGame::new(4, 2).unwrap();
        for game in [&pd as &dyn Game, &cong] {
            for profile in all_profiles(game) {
                let nash = (0..game.players()).all(|i| {
                    let mut dev = profile.clone();
                    (0..game.strategy_count()).all(|t| {
                        dev[i] = t;
                        game.payoff(i, &dev) <= game.payoff(i, &profile)
                    })
                });
                assert_eq!(bar_strong(game, 0, 1, &profile).unwrap().holds, nash, "{profile:?}");
            }
        }
    }

    #[test]
    fn prisoners_dilemma_has_no_two_coalition_proof_profile() {
        let game = PrisonersDilemma::default();
        for profile in all_profiles(&game) {
            assert!(!bar_strong(&game, 0, 2, &profile).unwrap().holds);
        }
        // defection is the Nash equilibrium but the pair jointly prefers cooperating
        let verdict = bar_strong(&game, 0, 2, &[1, 1]).unwrap();
        assert!(matches!(
            verdict.witness,
            Some(Witness::CoalitionDeviation { ref coalition_profile, .. }) if coalition_profile == &vec![0, 0]
        ));
    }

    #[test]
    fn evaluation_count_matches_small_enumeration() {
        // n=2, k=2, f̄=0, ḡ=1: base n + C(2,1)·2·1 = 2 + 4
        assert_eq!(required_evaluations(2, 2, 0, 1), 6);
        assert!(required_evaluations(30, 6, 10, 10) > crate::game::EVALUATION_BUDGET);
    }
}
