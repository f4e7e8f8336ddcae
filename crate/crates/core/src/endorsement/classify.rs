use serde::Serialize;

use super::{
    beliefs_for, expected_via_cells, payoff_tolerance, Amendments, ModelError, ProtocolParams, Result, Strategy,
};
use crate::game::SimplexPoint;

/// Named equilibrium regions of the simplex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Region {
    #[serde(rename = "HonestBARNE")]
    Honest,
    #[serde(rename = "ThreatlessBARNE")]
    Threatless,
    #[serde(rename = "HonestVetoBARNE")]
    HonestVeto,
    #[serde(rename = "BreakdownBARNE")]
    Breakdown,
    #[serde(rename = "ColdStartBARNE")]
    ColdStart,
}

impl Region {
    pub fn label(self) -> &'static str {
        match self {
            Region::Honest => "HonestBARNE",
            Region::Threatless => "ThreatlessBARNE",
            Region::HonestVeto => "HonestVetoBARNE",
            Region::Breakdown => "BreakdownBARNE",
            Region::ColdStart => "ColdStartBARNE",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StrategyVerdict {
    pub is_barne: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub region: Option<Region>,
    /// Expected payoff of the candidate when every rational plays it.
    pub payoff: f64,
    /// Most profitable unilateral deviation (the candidate itself on ties).
    pub best_reply: Strategy,
    pub best_payoff: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PointVerdict {
    pub f: usize,
    pub g: usize,
    pub honest: StrategyVerdict,
    pub blind_endorse: StrategyVerdict,
    pub abstain: StrategyVerdict,
}

impl PointVerdict {
    pub fn get(&self, strategy: Strategy) -> Option<&StrategyVerdict> {
        match strategy {
            Strategy::Honest => Some(&self.honest),
            Strategy::BlindEndorse => Some(&self.blind_endorse),
            Strategy::Abstain => Some(&self.abstain),
            _ => None,
        }
    }

    pub fn is_barne(&self, strategy: Strategy) -> bool {
        self.get(strategy).is_some_and(|v| v.is_barne)
    }
}

/// Expected payoff of each of the six strategies (in [`Strategy::ALL`] order)
/// for a focal rational whose `g − 1` fellow rationals play `sigma`.
pub fn deviation_payoffs(params: &ProtocolParams, point: SimplexPoint, sigma: Strategy) -> Result<[f64; 6]> {
    let mut out = [0.0; 6];
    for (slot, t) in out.iter_mut().zip(Strategy::ALL) {
        *slot = expected_via_cells(params, &beliefs_for(params, point, sigma, t)?, t);
    }
    Ok(out)
}

/// Classifies σ_h, σ_e and σ_0 at `(f, g)`: a candidate is a BARNE when no
/// strategy among all six pays more against it (Byzantines at σ_f).
pub fn classify_point(params: &ProtocolParams, f: usize, g: usize) -> Result<PointVerdict> {
    let n = params.n;
    if g == 0 || f + g > n {
        return Err(ModelError::InvalidPoint { f, g, n });
    }
    let point = SimplexPoint { f, g, n };
    let tol = payoff_tolerance(params);
    let verdict = |sigma: Strategy| -> Result<StrategyVerdict> {
        let payoffs = deviation_payoffs(params, point, sigma)?;
        let own = payoffs[sigma.index()];
        let (best_index, best_payoff) = payoffs
            .iter()
            .copied()
            .enumerate()
            .fold((sigma.index(), own), |acc, (i, u)| if u > acc.1 + tol { (i, u) } else { acc });
        let is_barne = best_index == sigma.index();
        Ok(StrategyVerdict {
            is_barne,
            region: is_barne.then(|| region_label(params, f, g, sigma)),
            payoff: own,
            best_reply: Strategy::ALL[best_index],
            best_payoff,
        })
    };
    Ok(PointVerdict {
        f,
        g,
        honest: verdict(Strategy::Honest)?,
        blind_endorse: verdict(Strategy::BlindEndorse)?,
        abstain: verdict(Strategy::Abstain)?,
    })
}

fn region_label(params: &ProtocolParams, f: usize, g: usize, sigma: Strategy) -> Region {
    match sigma {
        Strategy::Honest => Region::Honest,
        Strategy::Abstain => Region::ColdStart,
        _ if params.amendments != Amendments::Base => Region::Threatless,
        _ => match (f + g).cmp(&params.quorum) {
            std::cmp::Ordering::Less => Region::HonestVeto,
            std::cmp::Ordering::Greater => Region::Breakdown,
            std::cmp::Ordering::Equal => Region::Threatless,
        },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum SpecialArea {
    /// f ≥ Q: Byzantines alone can get a block accepted.
    ByzantineQuorum,
    /// f > n − Q: Byzantines alone can block acceptance.
    ByzantineVeto,
    /// h ≥ Q.
    HonestQuorum,
    /// h > n − Q.
    HonestVeto,
}

pub fn special_areas(params: &ProtocolParams, f: usize, g: usize) -> Result<Vec<SpecialArea>> {
    let (n, q) = (params.n, params.quorum);
    if f + g > n {
        return Err(ModelError::InvalidPoint { f, g, n });
    }
    let mut out = Vec::new();
    if f >= q {
        out.push(SpecialArea::ByzantineQuorum);
    }
    if f + q > n {
        out.push(SpecialArea::ByzantineVeto);
    }
    if f + g + q <= n {
        out.push(SpecialArea::HonestQuorum);
    }
    if f + g < q {
        out.push(SpecialArea::HonestVeto);
    }
    Ok(out)
}
