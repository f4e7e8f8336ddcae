use serde::{Deserialize, Serialize};

use super::{Result, SimError};
use crate::endorsement::{ProtocolConfig, ProtocolParams, Strategy};
use crate::game::SimplexPoint;

/// A single rational agent playing something other than the symmetric candidate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Deviant {
    pub agent: usize,
    pub strategy: Strategy,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimConfig {
    pub params: ProtocolParams,
    pub point: SimplexPoint,
    pub rational_strategy: Strategy,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub deviant: Option<Deviant>,
    pub rounds: u64,
    pub seed: u64,
}

impl SimConfig {
    pub fn new(
        params: ProtocolParams,
        point: SimplexPoint,
        rational_strategy: Strategy,
        rounds: u64,
        seed: u64,
    ) -> Result<Self> {
        let config = Self { params, point, rational_strategy, deviant: None, rounds, seed };
        config.validate()?;
        Ok(config)
    }

    /// Lets the rational agent `agent` play `strategy` instead.
    pub fn with_deviant(mut self, agent: usize, strategy: Strategy) -> Result<Self> {
        self.deviant = Some(Deviant { agent, strategy });
        self.validate()?;
        Ok(self)
    }

    /// The first rational agent, whose payoff a comparison reads unless a
    /// deviant is set.
    pub fn focal(&self) -> Option<(usize, Strategy)> {
        match self.deviant {
            Some(d) => Some((d.agent, d.strategy)),
            None if self.point.g > 0 => Some((self.point.f, self.rational_strategy)),
            None => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let mut errors = Vec::new();
        let (f, g, n) = (self.point.f, self.point.g, self.params.n);
        if self.point.n != n || f + g > n {
            errors.push(format!("population (f={f}, g={g}) does not fit n={n}"));
        }
        if self.rounds == 0 {
            errors.push("rounds must be at least 1".to_string());
        }
        if let Some(d) = self.deviant {
            if d.agent < f || d.agent >= f + g {
                errors.push(format!("deviant agent {} is not rational (rational agents are {f}..{})", d.agent, f + g));
            }
        }
        if errors.is_empty() {
            Ok(())
        } else {
            Err(SimError::InvalidConfig(errors))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointSpec {
    pub f: usize,
    pub g: usize,
}

/// Simulation config as read from JSON: the protocol keys plus `point`,
/// `rational_strategy`, optional `deviant`, `rounds` and `seed`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfigFile {
    #[serde(flatten)]
    pub protocol: ProtocolConfig,
    pub point: PointSpec,
    pub rational_strategy: Strategy,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub deviant: Option<Deviant>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rounds: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl SimConfigFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| SimError::InvalidConfig(vec![e.to_string()]))
    }

    /// Validates everything; command-line overrides win over file values.
    /// A seed must come from one of the two.
    pub fn resolve(&self, rounds: Option<u64>, seed: Option<u64>) -> Result<SimConfig> {
        let mut errors = Vec::new();
        let params = match self.protocol.validate() {
            Ok(p) => Some(p),
            Err(crate::endorsement::ModelError::InvalidParams(v)) => {
                errors.extend(v);
                None
            }
            Err(e) => return Err(e.into()),
        };
        let seed = seed.or(self.seed);
        if seed.is_none() {
            errors.push("a seed is required (set \"seed\" in the config or pass --seed)".to_string());
        }
        let rounds = rounds.or(self.rounds);
        if rounds.is_none() {
            errors.push("rounds is required (set \"rounds\" in the config or pass --rounds)".to_string());
        }
        let (f, g, n) = (self.point.f, self.point.g, self.protocol.n);
        if f + g > n {
            errors.push(format!("population (f={f}, g={g}) does not fit n={n}"));
        }
        if rounds == Some(0) {
            errors.push("rounds must be at least 1".to_string());
        }
        if let Some(d) = self.deviant {
            if d.agent < f || d.agent >= f + g {
                errors.push(format!("deviant agent {} is not rational (rational agents are {f}..{})", d.agent, f + g));
            }
        }
        match (params, seed, rounds) {
            (Some(params), Some(seed), Some(rounds)) if errors.is_empty() => Ok(SimConfig {
                params,
                point: SimplexPoint { f, g, n },
                rational_strategy: self.rational_strategy,
                deviant: self.deviant,
                rounds,
                seed,
            }),
            _ => Err(SimError::InvalidConfig(errors)),
        }
    }
}
