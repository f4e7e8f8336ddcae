use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{ModelError, Result};

/// Protocol variant: plain quorum voting, fines for endorsing invalid
/// blocks, or fines plus protocol-sanctioned trap blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Amendments {
    #[serde(alias = "Base")]
    Base,
    #[serde(alias = "Fines")]
    Fines,
    #[serde(alias = "FinesAndTraps", alias = "traps")]
    FinesAndTraps,
}

impl Amendments {
    pub const ALL: [Amendments; 3] = [Amendments::Base, Amendments::Fines, Amendments::FinesAndTraps];

    pub fn has_fines(self) -> bool {
        self != Amendments::Base
    }

    pub fn has_traps(self) -> bool {
        self == Amendments::FinesAndTraps
    }
}

impl fmt::Display for Amendments {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Amendments::Base => "base",
            Amendments::Fines => "fines",
            Amendments::FinesAndTraps => "fines_and_traps",
        })
    }
}

impl FromStr for Amendments {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "base" => Ok(Amendments::Base),
            "fines" => Ok(Amendments::Fines),
            "fines_and_traps" | "finesandtraps" | "traps" => Ok(Amendments::FinesAndTraps),
            other => Err(format!("unknown amendment level {other:?}")),
        }
    }
}

/// How strictly parameters are checked against the modelling assumptions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValidationConfig {
    /// Minimum ratio for L / r_e, r_e / c_c and L_e / r_e.
    #[serde(default = "default_dominance")]
    pub dominance_factor: f64,
    /// Require n/4 ≤ Q ≤ n − max(2, n/20).
    #[serde(default = "default_true")]
    pub quorum_bounds: bool,
}

fn default_dominance() -> f64 {
    10.0
}

fn default_true() -> bool {
    true
}

impl Default for ValidationConfig {
    fn default() -> Self {
        Self { dominance_factor: default_dominance(), quorum_bounds: true }
    }
}

/// Unvalidated protocol configuration as read from JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolConfig {
    pub n: usize,
    #[serde(rename = "Q")]
    pub quorum: usize,
    #[serde(rename = "r_e")]
    pub reward: f64,
    #[serde(rename = "c_c")]
    pub check_cost: f64,
    #[serde(rename = "L")]
    pub loss: f64,
    #[serde(rename = "L_e", default, skip_serializing_if = "Option::is_none")]
    pub endorse_fine: Option<f64>,
    #[serde(rename = "p_prop", default, skip_serializing_if = "Option::is_none")]
    pub trap_probability: Option<f64>,
    pub amendments: Amendments,
    #[serde(default)]
    pub validation: ValidationConfig,
}

impl ProtocolConfig {
    pub fn base(n: usize, quorum: usize, reward: f64, check_cost: f64, loss: f64) -> Self {
        Self {
            n,
            quorum,
            reward,
            check_cost,
            loss,
            endorse_fine: None,
            trap_probability: None,
            amendments: Amendments::Base,
            validation: ValidationConfig::default(),
        }
    }

    pub fn with_fines(mut self, endorse_fine: f64) -> Self {
        self.amendments = Amendments::Fines;
        self.endorse_fine = Some(endorse_fine);
        self
    }

    pub fn with_traps(mut self, endorse_fine: f64, trap_probability: f64) -> Self {
        self.amendments = Amendments::FinesAndTraps;
        self.endorse_fine = Some(endorse_fine);
        self.trap_probability = Some(trap_probability);
        self
    }

    pub fn dominance_factor(mut self, factor: f64) -> Self {
        self.validation.dominance_factor = factor;
        self
    }

    pub fn quorum_bounds(mut self, enabled: bool) -> Self {
        self.validation.quorum_bounds = enabled;
        self
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| ModelError::Parse(e.to_string()))
    }

    /// Checks every modelling assumption and reports all violations at once.
    pub fn validate(&self) -> Result<ProtocolParams> {
        let mut errors = Vec::new();
        let n = self.n;
        let q = self.quorum;
        let k = self.validation.dominance_factor;
        let fines = self.amendments.has_fines();
        let traps = self.amendments.has_traps();

        for (name, value) in [("r_e", self.reward), ("c_c", self.check_cost), ("L", self.loss)] {
            if !(value.is_finite() && value > 0.0) {
                errors.push(format!("{name} must be a positive number, got {value}"));
            }
        }
        if !(k.is_finite() && k >= 1.0) {
            errors.push(format!("dominance_factor must be at least 1, got {k}"));
        }
        if !(q > 1 && q <= n) {
            errors.push(format!("quorum must satisfy 1 < Q ≤ n, got Q={q}, n={n}"));
        }
        if self.validation.quorum_bounds {
            let nf = n as f64;
            let upper = nf - (nf / 20.0).max(2.0);
            if (q as f64) < nf / 4.0 || (q as f64) > upper {
                errors.push(format!(
                    "quorum bound n/4 ≤ Q ≤ n − max(2, n/20) violated: need {} ≤ Q ≤ {upper}, got Q={q} \
                     (disable with validation.quorum_bounds = false)",
                    nf / 4.0
                ));
            }
        }
        if self.loss < k * self.reward {
            errors.push(format!(
                "L ≥ {k}·r_e required (loss must dominate the reward), got L={}, r_e={}",
                self.loss, self.reward
            ));
        }
        if self.reward < k * self.check_cost {
            errors.push(format!(
                "r_e ≥ {k}·c_c required (reward must dominate the check cost), got r_e={}, c_c={}",
                self.reward, self.check_cost
            ));
        }

        let endorse_fine = match (fines, self.endorse_fine) {
            (false, _) => 0.0,
            (true, None) => {
                errors.push(format!("L_e is required when amendments = {}", self.amendments));
                0.0
            }
            (true, Some(fine)) => {
                if !(fine.is_finite() && fine > 0.0) {
                    errors.push(format!("L_e must be a positive number, got {fine}"));
                } else if fine < k * self.reward {
                    errors.push(format!(
                        "L_e ≥ {k}·r_e required (fine must dominate the reward), got L_e={fine}, r_e={}",
                        self.reward
                    ));
                }
                fine
            }
        };

        let trap_probability = match (traps, self.trap_probability) {
            (false, _) => 0.0,
            (true, None) => {
                errors.push("p_prop is required when amendments = fines_and_traps".to_string());
                0.0
            }
            (true, Some(p)) => {
                if !(0.0..=1.0).contains(&p) {
                    errors.push(format!("p_prop must lie in [0, 1], got {p}"));
                } else if endorse_fine > 0.0 {
                    let floor = (self.reward + self.check_cost) / endorse_fine;
                    if p <= floor {
                        errors.push(format!("trap probability must exceed (r_e + c_c)/L_e = {floor}, got p_prop={p}"));
                    }
                }
                p
            }
        };

        if !errors.is_empty() {
            return Err(ModelError::InvalidParams(errors));
        }
        Ok(ProtocolParams {
            n,
            quorum: q,
            reward: self.reward,
            check_cost: self.check_cost,
            loss: self.loss,
            endorse_fine,
            trap_probability,
            amendments: self.amendments,
            validation: self.validation,
        })
    }
}

/// Validated protocol parameters; fines and trap probability are zero when
/// the corresponding amendment is off.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProtocolParams {
    pub n: usize,
    #[serde(rename = "Q")]
    pub quorum: usize,
    #[serde(rename = "r_e")]
    pub reward: f64,
    #[serde(rename = "c_c")]
    pub check_cost: f64,
    #[serde(rename = "L")]
    pub loss: f64,
    #[serde(rename = "L_e")]
    pub endorse_fine: f64,
    #[serde(rename = "p_prop")]
    pub trap_probability: f64,
    pub amendments: Amendments,
    pub validation: ValidationConfig,
}

impl ProtocolParams {
    pub fn from_json(text: &str) -> Result<Self> {
        ProtocolConfig::from_json(text)?.validate()
    }

    /// Fine actually charged for endorsing an invalid block.
    pub fn fine(&self) -> f64 {
        if self.amendments.has_fines() {
            self.endorse_fine
        } else {
            0.0
        }
    }

    /// Probability that a non-faulty proposer turns its block into a trap.
    pub fn trap_rate(&self) -> f64 {
        if self.amendments.has_traps() {
            self.trap_probability
        } else {
            0.0
        }
    }

    pub fn to_config(&self) -> ProtocolConfig {
        ProtocolConfig {
            n: self.n,
            quorum: self.quorum,
            reward: self.reward,
            check_cost: self.check_cost,
            loss: self.loss,
            endorse_fine: self.amendments.has_fines().then_some(self.endorse_fine),
            trap_probability: self.amendments.has_traps().then_some(self.trap_probability),
            amendments: self.amendments,
            validation: self.validation,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn violations(config: &ProtocolConfig) -> Vec<String> {
        match config.validate() {
            Err(ModelError::InvalidParams(v)) => v,
            other => panic!("expected violations, got {other:?}"),
        }
    }

    #[test]
    fn default_economics_pass() {
        let params = ProtocolConfig::base(60, 30, 10.0, 1.0, 1000.0).validate().unwrap();
        assert_eq!(params.fine(), 0.0);
        assert_eq!(params.trap_rate(), 0.0);
    }

    #[test]
    fn every_violation_is_listed() {
        let config = ProtocolConfig::base(10, 11, 10.0, 5.0, 20.0);
        let v = violations(&config);
        assert_eq!(v.len(), 4, "{v:?}");
        assert!(v.iter().any(|m| m.contains("1 < Q ≤ n")));
        assert!(v.iter().any(|m| m.contains("L ≥")));
        assert!(v.iter().any(|m| m.contains("r_e ≥")));
    }

    #[test]
    fn fines_need_a_fine() {
        let mut config = ProtocolConfig::base(60, 40, 10.0, 1.0, 1000.0);
        config.amendments = Amendments::Fines;
        assert!(violations(&config)[0].contains("L_e is required"));
    }

    #[test]
    fn traps_must_beat_the_free_ride() {
        let config = ProtocolConfig::base(60, 40, 10.0, 1.0, 1000.0).with_traps(1000.0, 0.011);
        assert!(violations(&config)[0].contains("trap probability"));
        assert!(ProtocolConfig::base(60, 40, 10.0, 1.0, 1000.0).with_traps(1000.0, 0.0111).validate().is_ok());
    }

    #[test]
    fn quorum_bounds_can_be_disabled() {
        let config = ProtocolConfig::base(4, 3, 10.0, 1.0, 1000.0);
        assert!(violations(&config)[0].contains("quorum bound"));
        assert!(config.quorum_bounds(false).validate().is_ok());
    }

    #[test]
    fn json_round_trip_uses_protocol_keys() {
        let text = r#"{"n": 60, "Q": 40, "r_e": 10, "c_c": 1, "L": 1000, "L_e": 30,
                       "amendments": "fines", "validation": {"dominance_factor": 3}}"#;
        let params = ProtocolParams::from_json(text).unwrap();
        assert_eq!(params.fine(), 30.0);
        assert!(params.validation.quorum_bounds);
        let echoed = serde_json::to_string(&params).unwrap();
        assert!(echoed.contains("\"Q\":40") && echoed.contains("\"L_e\":30.0"));
        let back: ProtocolParams = serde_json::from_str(&echoed).unwrap();
        assert_eq!(back, params);
    }

    #[test]
    fn amendment_names_parse() {
        assert_eq!("FinesAndTraps".parse::<Amendments>().unwrap(), Amendments::FinesAndTraps);
        assert_eq!("fines-and-traps".parse::<Amendments>().unwrap(), Amendments::FinesAndTraps);
        assert!("none".parse::<Amendments>().is_err());
    }
}
