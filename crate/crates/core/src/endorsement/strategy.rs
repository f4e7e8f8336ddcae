use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// The six pure strategies of a non-proposing agent: whether to check the
/// block, and how to endorse given (or without) the check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum Strategy {
    /// σ_ce: check, then endorse regardless.
    CheckAndEndorse,
    /// σ_c0: check, then abstain regardless.
    CheckAndAbstain,
    /// σ_h: check, endorse exactly the valid blocks. The prescribed strategy.
    Honest,
    /// σ_f: check, endorse exactly the invalid blocks. The Byzantine minimizer.
    Faulty,
    /// σ_e: endorse without checking.
    BlindEndorse,
    /// σ_0: neither check nor endorse.
    Abstain,
}

impl Strategy {
    /// Ordering used as strategy indices in generic games.
    pub const ALL: [Strategy; 6] = [
        Strategy::CheckAndEndorse,
        Strategy::CheckAndAbstain,
        Strategy::Honest,
        Strategy::Faulty,
        Strategy::BlindEndorse,
        Strategy::Abstain,
    ];

    /// The strategies not weakly dominated for a rational agent.
    pub const UNDOMINATED: [Strategy; 3] = [Strategy::Honest, Strategy::BlindEndorse, Strategy::Abstain];

    pub fn index(self) -> usize {
        Self::ALL.iter().position(|&s| s == self).expect("listed")
    }

    pub fn checks(self) -> bool {
        matches!(self, Strategy::CheckAndEndorse | Strategy::CheckAndAbstain | Strategy::Honest | Strategy::Faulty)
    }

    pub fn endorses(self, validity: Validity) -> bool {
        match self {
            Strategy::CheckAndEndorse | Strategy::BlindEndorse => true,
            Strategy::CheckAndAbstain | Strategy::Abstain => false,
            Strategy::Honest => validity == Validity::Valid,
            Strategy::Faulty => validity == Validity::Invalid,
        }
    }

    /// Short code: ce, c0, h, f, e, 0.
    pub fn code(self) -> &'static str {
        match self {
            Strategy::CheckAndEndorse => "ce",
            Strategy::CheckAndAbstain => "c0",
            Strategy::Honest => "h",
            Strategy::Faulty => "f",
            Strategy::BlindEndorse => "e",
            Strategy::Abstain => "0",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Strategy::CheckAndEndorse => "check_and_endorse",
            Strategy::CheckAndAbstain => "check_and_abstain",
            Strategy::Honest => "honest",
            Strategy::Faulty => "faulty",
            Strategy::BlindEndorse => "blind_endorse",
            Strategy::Abstain => "abstain",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "sigma_{}", self.code())
    }
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.trim().to_ascii_lowercase().replace('-', "_");
        let key = key.strip_prefix("sigma_").or_else(|| key.strip_prefix("σ_")).unwrap_or(&key);
        Strategy::ALL
            .into_iter()
            .find(|st| key == st.code() || key == st.name())
            .ok_or_else(|| format!("unknown strategy {s:?} (expected one of h, e, 0, ce, c0, f)"))
    }
}

impl From<Strategy> for String {
    fn from(s: Strategy) -> Self {
        s.to_string()
    }
}

impl TryFrom<String> for Strategy {
    type Error = String;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Validity {
    Valid,
    Invalid,
}

/// Acceptance as seen by the focal agent, from the other agents' endorsements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Acceptance {
    /// At least Q endorsements without the focal agent.
    Accepted,
    /// At most Q − 2: rejected whatever the focal agent does.
    Rejected,
    /// Exactly Q − 1: the focal endorsement decides.
    Pivotal,
}

impl Acceptance {
    pub fn from_other_endorsements(count: usize, quorum: usize) -> Self {
        if count >= quorum {
            Acceptance::Accepted
        } else if count + 1 == quorum {
            Acceptance::Pivotal
        } else {
            Acceptance::Rejected
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BlockOutcomeClass {
    pub validity: Validity,
    pub acceptance: Acceptance,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decision_tree_leaves() {
        let checked: Vec<_> = Strategy::ALL.iter().filter(|s| s.checks()).collect();
        assert_eq!(checked.len(), 4);
        assert!(Strategy::Honest.endorses(Validity::Valid));
        assert!(!Strategy::Honest.endorses(Validity::Invalid));
        assert!(Strategy::Faulty.endorses(Validity::Invalid));
        assert!(!Strategy::Faulty.endorses(Validity::Valid));
    }

    #[test]
    fn names_round_trip() {
        for s in Strategy::ALL {
            assert_eq!(s.to_string().parse::<Strategy>().unwrap(), s);
            assert_eq!(s.name().parse::<Strategy>().unwrap(), s);
            assert_eq!(Strategy::ALL[s.index()], s);
        }
        assert_eq!("σ_e".parse::<Strategy>().unwrap(), Strategy::BlindEndorse);
        assert!("sigma_x".parse::<Strategy>().is_err());
        assert_eq!(serde_json::to_string(&Strategy::Abstain).unwrap(), "\"sigma_0\"");
    }

    #[test]
    fn pivotal_means_one_short_of_quorum() {
        assert_eq!(Acceptance::from_other_endorsements(7, 7), Acceptance::Accepted);
        assert_eq!(Acceptance::from_other_endorsements(6, 7), Acceptance::Pivotal);
        assert_eq!(Acceptance::from_other_endorsements(5, 7), Acceptance::Rejected);
        assert_eq!(Acceptance::from_other_endorsements(0, 1), Acceptance::Pivotal);
    }
}
