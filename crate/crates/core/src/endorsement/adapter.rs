use super::{payoff_tolerance, realized_payoff, ProtocolParams, Strategy, Validity};
use crate::game::{Game, StrategyId};

/// The endorsement stage game as a generic symmetric game over the six
/// strategies (indexed as in [`Strategy::ALL`]), with σ_h prescribed.
///
/// A strategy also fixes proposal behaviour: σ_f proposes invalid blocks,
/// σ_h valid ones, and any other strategy proposes whichever validity pays
/// it more given the profile's endorsements. Non-faulty proposals become
/// traps with the trap probability. Payoffs are exact expectations over the
/// uniform proposer and the trap draw.
#[derive(Debug, Clone)]
pub struct EndorsementGame {
    params: ProtocolParams,
    names: Vec<String>,
}

pub fn as_generic_game(params: &ProtocolParams) -> EndorsementGame {
    EndorsementGame { params: *params, names: Strategy::ALL.iter().map(|s| s.to_string()).collect() }
}

impl EndorsementGame {
    pub fn params(&self) -> &ProtocolParams {
        &self.params
    }

    fn valid_share(&self, proposer: Strategy, valid_accepted: bool, invalid_accepted: bool) -> f64 {
        let honest_share = 1.0 - self.params.trap_rate();
        match proposer {
            Strategy::Faulty => 0.0,
            Strategy::Honest => honest_share,
            s => {
                let u_valid = realized_payoff(&self.params, Validity::Valid, valid_accepted, s);
                let u_invalid = realized_payoff(&self.params, Validity::Invalid, invalid_accepted, s);
                if u_valid >= u_invalid {
                    honest_share
                } else {
                    0.0
                }
            }
        }
    }
}

impl Game for EndorsementGame {
    fn players(&self) -> usize {
        self.params.n
    }

    fn strategies(&self) -> &[String] {
        &self.names
    }

    fn payoff(&self, player: usize, profile: &[StrategyId]) -> f64 {
        let q = self.params.quorum;
        let strategies: Vec<Strategy> = profile.iter().map(|&s| Strategy::ALL[s]).collect();
        let endorsements = |v: Validity| strategies.iter().filter(|s| s.endorses(v)).count();
        let valid_accepted = endorsements(Validity::Valid) >= q;
        let invalid_accepted = endorsements(Validity::Invalid) >= q;

        let p_valid = strategies.iter().map(|&s| self.valid_share(s, valid_accepted, invalid_accepted)).sum::<f64>()
            / strategies.len() as f64;
        let me = strategies[player];
        p_valid * realized_payoff(&self.params, Validity::Valid, valid_accepted, me)
            + (1.0 - p_valid) * realized_payoff(&self.params, Validity::Invalid, invalid_accepted, me)
    }

    fn is_symmetric(&self) -> bool {
        true
    }

    fn prescribed(&self) -> StrategyId {
        Strategy::Honest.index()
    }

    fn tie_tolerance(&self) -> f64 {
        payoff_tolerance(&self.params)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::endorsement::{classify_point, ProtocolConfig};
    use crate::game::{barne_at_counts, maxmin_table, TypeAssignment};

    fn small(q: usize) -> ProtocolParams {
        ProtocolConfig::base(6, q, 10.0, 1.0, 1000.0).quorum_bounds(false).validate().unwrap()
    }

    #[test]
    fn adapter_agrees_with_classifier_at_a_small_point() {
        let params = small(4);
        let game = as_generic_game(&params);
        let verdict = classify_point(&params, 1, 2).unwrap();
        for s in Strategy::UNDOMINATED {
            assert_eq!(barne_at_counts(&game, 1, 2, s.index()).unwrap().holds, verdict.is_barne(s), "{s}");
        }
    }

    #[test]
    fn faulty_is_the_byzantine_minimizer_against_honesty() {
        let params = small(4);
        let game = as_generic_game(&params);
        let assign = TypeAssignment::canonical(1, 2, game.prescribed());
        let h = Strategy::Honest.index();
        let table = maxmin_table(&game, &assign, &[h, h], 1).unwrap();
        let faulty = game.payoff(1, &[Strategy::Faulty.index(), h, h, h, h, h]);
        assert!((table[h].value - faulty).abs() <= game.tie_tolerance());
    }

    #[test]
    fn everyone_honest_earns_reward_minus_check() {
        let params = small(4);
        let game = as_generic_game(&params);
        let h = Strategy::Honest.index();
        assert_eq!(game.payoff(0, &[h; 6]), 9.0);
    }
}
