use serde::Serialize;

use super::{payoff_tolerance, Acceptance, BlockOutcomeClass, ModelError, ProtocolParams, Result, Strategy, Validity};
use crate::game::SimplexPoint;

/// Utility of one agent for a block of given validity and final acceptance.
///
/// Every agent bears the loss when an invalid block is accepted; endorsers
/// of an accepted block earn the reward; endorsing an invalid block is fined
/// whether or not it is accepted; checking costs `c_c`.
pub fn realized_payoff(params: &ProtocolParams, validity: Validity, accepted: bool, strategy: Strategy) -> f64 {
    let endorses = strategy.endorses(validity);
    let invalid = validity == Validity::Invalid;
    let mut u = 0.0;
    if accepted && endorses {
        u += params.reward;
    }
    if accepted && invalid {
        u -= params.loss;
    }
    if invalid && endorses {
        u -= params.fine();
    }
    if strategy.checks() {
        u -= params.check_cost;
    }
    u
}

/// Payoff cell of the stage game. On a pivotal block the focal endorsement
/// decides acceptance.
pub fn stage_payoff(params: &ProtocolParams, outcome: BlockOutcomeClass, strategy: Strategy) -> f64 {
    let accepted = match outcome.acceptance {
        Acceptance::Accepted => true,
        Acceptance::Rejected => false,
        Acceptance::Pivotal => strategy.endorses(outcome.validity),
    };
    realized_payoff(params, outcome.validity, accepted, strategy)
}

/// Acceptance of a block from the focal rational's view, with Byzantines at
/// σ_f, honest agents at σ_h and the other `g − 1` rationals at `sigma`.
pub fn acceptance_class(
    params: &ProtocolParams,
    point: SimplexPoint,
    sigma: Strategy,
    validity: Validity,
) -> Acceptance {
    let others = point.g.saturating_sub(1) * usize::from(sigma.endorses(validity));
    let count = match validity {
        Validity::Valid => point.honest() + others,
        Validity::Invalid => point.f + others,
    };
    Acceptance::from_other_endorsements(count, params.quorum)
}

/// Joint beliefs over (acceptance, validity) of the proposed block.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Default)]
pub struct BeliefMatrix {
    #[serde(rename = "p_AV")]
    pub accepted_valid: f64,
    #[serde(rename = "p_AI")]
    pub accepted_invalid: f64,
    #[serde(rename = "p_RV")]
    pub rejected_valid: f64,
    #[serde(rename = "p_RI")]
    pub rejected_invalid: f64,
    #[serde(rename = "p_PV")]
    pub pivotal_valid: f64,
    #[serde(rename = "p_PI")]
    pub pivotal_invalid: f64,
}

impl BeliefMatrix {
    pub fn get(&self, acceptance: Acceptance, validity: Validity) -> f64 {
        match (acceptance, validity) {
            (Acceptance::Accepted, Validity::Valid) => self.accepted_valid,
            (Acceptance::Accepted, Validity::Invalid) => self.accepted_invalid,
            (Acceptance::Rejected, Validity::Valid) => self.rejected_valid,
            (Acceptance::Rejected, Validity::Invalid) => self.rejected_invalid,
            (Acceptance::Pivotal, Validity::Valid) => self.pivotal_valid,
            (Acceptance::Pivotal, Validity::Invalid) => self.pivotal_invalid,
        }
    }

    fn slot(&mut self, acceptance: Acceptance, validity: Validity) -> &mut f64 {
        match (acceptance, validity) {
            (Acceptance::Accepted, Validity::Valid) => &mut self.accepted_valid,
            (Acceptance::Accepted, Validity::Invalid) => &mut self.accepted_invalid,
            (Acceptance::Rejected, Validity::Valid) => &mut self.rejected_valid,
            (Acceptance::Rejected, Validity::Invalid) => &mut self.rejected_invalid,
            (Acceptance::Pivotal, Validity::Valid) => &mut self.pivotal_valid,
            (Acceptance::Pivotal, Validity::Invalid) => &mut self.pivotal_invalid,
        }
    }

    /// Cells in (acceptance, validity) order, all six.
    pub fn cells(&self) -> [(BlockOutcomeClass, f64); 6] {
        let mut out = [(BlockOutcomeClass { validity: Validity::Valid, acceptance: Acceptance::Accepted }, 0.0); 6];
        let mut i = 0;
        for acceptance in [Acceptance::Accepted, Acceptance::Rejected, Acceptance::Pivotal] {
            for validity in [Validity::Valid, Validity::Invalid] {
                out[i] = (BlockOutcomeClass { validity, acceptance }, self.get(acceptance, validity));
                i += 1;
            }
        }
        out
    }

    pub fn valid(&self) -> f64 {
        self.accepted_valid + self.rejected_valid + self.pivotal_valid
    }

    pub fn invalid(&self) -> f64 {
        self.accepted_invalid + self.rejected_invalid + self.pivotal_invalid
    }

    pub fn accepted(&self) -> f64 {
        self.accepted_valid + self.accepted_invalid
    }

    pub fn rejected(&self) -> f64 {
        self.rejected_valid + self.rejected_invalid
    }

    pub fn pivotal(&self) -> f64 {
        self.pivotal_valid + self.pivotal_invalid
    }

    pub fn total(&self) -> f64 {
        self.cells().iter().map(|(_, p)| p).sum()
    }
}

fn check_point(params: &ProtocolParams, point: SimplexPoint) -> Result<()> {
    if point.n != params.n || point.g == 0 || point.f + point.g > params.n {
        return Err(ModelError::InvalidPoint { f: point.f, g: point.g, n: params.n });
    }
    Ok(())
}

/// Probability that a proposer playing `strategy` proposes a valid block.
///
/// σ_f proposers propose invalid blocks, honest ones valid blocks; any other
/// proposer picks validity by comparing its own stage payoffs (ties go to
/// valid). Non-faulty proposers then turn the block into a trap with the
/// trap probability.
fn valid_share(params: &ProtocolParams, strategy: Strategy, valid: Acceptance, invalid: Acceptance) -> f64 {
    let honest_share = 1.0 - params.trap_rate();
    match strategy {
        Strategy::Faulty => 0.0,
        Strategy::Honest => honest_share,
        s => {
            let u_valid = stage_payoff(params, BlockOutcomeClass { validity: Validity::Valid, acceptance: valid }, s);
            let u_invalid =
                stage_payoff(params, BlockOutcomeClass { validity: Validity::Invalid, acceptance: invalid }, s);
            if u_valid >= u_invalid {
                honest_share
            } else {
                0.0
            }
        }
    }
}

/// Beliefs of a focal rational playing `own` while the other rationals play
/// `others`. The proposer is uniform over all n agents, focal included.
pub fn beliefs_for(
    params: &ProtocolParams,
    point: SimplexPoint,
    others: Strategy,
    own: Strategy,
) -> Result<BeliefMatrix> {
    check_point(params, point)?;
    let valid_class = acceptance_class(params, point, others, Validity::Valid);
    let invalid_class = acceptance_class(params, point, others, Validity::Invalid);
    let honest = valid_share(params, Strategy::Honest, valid_class, invalid_class);
    let rational = valid_share(params, others, valid_class, invalid_class);
    let focal = valid_share(params, own, valid_class, invalid_class);
    let n = params.n as f64;
    let weights =
        [(point.f as f64, 0.0), (point.honest() as f64, honest), ((point.g - 1) as f64, rational), (1.0, focal)];
    let p_valid: f64 = weights.iter().map(|(count, v)| count * v).sum::<f64>() / n;
    let p_invalid: f64 = weights.iter().map(|(count, v)| count * (1.0 - v)).sum::<f64>() / n;

    let mut beliefs = BeliefMatrix::default();
    *beliefs.slot(valid_class, Validity::Valid) += p_valid;
    *beliefs.slot(invalid_class, Validity::Invalid) += p_invalid;
    Ok(beliefs)
}

/// Beliefs at the symmetric profile where every rational plays `sigma`.
pub fn belief_matrix(params: &ProtocolParams, point: SimplexPoint, sigma: Strategy) -> Result<BeliefMatrix> {
    beliefs_for(params, point, sigma, sigma)
}

/// Expected payoffs of the three undominated strategies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExpectedPayoffs {
    pub honest: f64,
    pub blind_endorse: f64,
    pub abstain: f64,
}

impl ExpectedPayoffs {
    pub fn get(&self, strategy: Strategy) -> Option<f64> {
        match strategy {
            Strategy::Honest => Some(self.honest),
            Strategy::BlindEndorse => Some(self.blind_endorse),
            Strategy::Abstain => Some(self.abstain),
            _ => None,
        }
    }

    /// Closed forms in terms of the belief entries.
    pub fn from_beliefs(params: &ProtocolParams, p: &BeliefMatrix) -> Self {
        let (r, c, l, fine) = (params.reward, params.check_cost, params.loss, params.fine());
        Self {
            honest: (p.accepted_valid + p.pivotal_valid) * r - c - p.accepted_invalid * l,
            blind_endorse: (p.accepted() + p.pivotal()) * r
                - (p.accepted_invalid + p.pivotal_invalid) * l
                - p.invalid() * fine,
            abstain: -p.accepted_invalid * l,
        }
    }
}

pub fn expected_payoffs(params: &ProtocolParams, point: SimplexPoint, sigma: Strategy) -> Result<ExpectedPayoffs> {
    Ok(ExpectedPayoffs::from_beliefs(params, &belief_matrix(params, point, sigma)?))
}

/// Expected payoff of `strategy` as the belief-weighted sum of stage payoffs.
pub fn expected_via_cells(params: &ProtocolParams, beliefs: &BeliefMatrix, strategy: Strategy) -> f64 {
    beliefs.cells().iter().map(|&(outcome, p)| p * stage_payoff(params, outcome, strategy)).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Sign {
    #[serde(rename = "<")]
    Less,
    #[serde(rename = "=")]
    Equal,
    #[serde(rename = ">")]
    Greater,
}

impl Sign {
    pub fn of(difference: f64, tolerance: f64) -> Self {
        if difference > tolerance {
            Sign::Greater
        } else if difference < -tolerance {
            Sign::Less
        } else {
            Sign::Equal
        }
    }
}

/// `lhs ≶ rhs`, with the sign taken with the model's payoff tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Inequality {
    pub lhs: f64,
    pub rhs: f64,
    pub sign: Sign,
}

/// The three pairwise comparisons between undominated strategies:
/// participation `(p_AV + p_PV) r_e ≶ c_c` (honest vs abstain), no-laziness
/// `p_PI L + p_I L_e ≶ (p_AI + p_PI) r_e + c_c` (honest vs blind), and
/// `p_PI L + p_I L_e ≶ (p_A + p_P) r_e` (abstain vs blind).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InequalityReport {
    pub honest_vs_abstain: Inequality,
    pub honest_vs_blind: Inequality,
    pub abstain_vs_blind: Inequality,
}

impl InequalityReport {
    pub fn from_beliefs(params: &ProtocolParams, p: &BeliefMatrix) -> Self {
        let tol = payoff_tolerance(params);
        let make = |lhs: f64, rhs: f64| Inequality { lhs, rhs, sign: Sign::of(lhs - rhs, tol) };
        let (r, c, l, fine) = (params.reward, params.check_cost, params.loss, params.fine());
        let threat = p.pivotal_invalid * l + p.invalid() * fine;
        Self {
            honest_vs_abstain: make((p.accepted_valid + p.pivotal_valid) * r, c),
            honest_vs_blind: make(threat, (p.accepted_invalid + p.pivotal_invalid) * r + c),
            abstain_vs_blind: make(threat, (p.accepted() + p.pivotal()) * r),
        }
    }
}

pub fn inequality_report(params: &ProtocolParams, point: SimplexPoint, sigma: Strategy) -> Result<InequalityReport> {
    Ok(InequalityReport::from_beliefs(params, &belief_matrix(params, point, sigma)?))
}
