//! Small reference games, constructible directly or from a JSON description.

use serde::Deserialize;
use serde_json::Value;

use super::{Game, GameError, Result, StrategyId};

/// n players choose between a safe server A and a fast server B that crashes
/// when more than `k` players use it.
#[derive(Debug, Clone, PartialEq)]
pub struct CongestionGame {
    n: usize,
    k: usize,
    u_a: f64,
    u_b_fast: f64,
    u_b_crashed: f64,
    prescribed: StrategyId,
    strategies: Vec<String>,
}

impl CongestionGame {
    pub const SAFE: StrategyId = 0;
    pub const FAST: StrategyId = 1;

    pub fn new(n: usize, k: usize) -> Result<Self> {
        if n == 0 {
            return Err(GameError::InvalidGame("congestion game needs at least one player".into()));
        }
        if k > n {
            return Err(GameError::InvalidGame(format!("capacity k={k} exceeds n={n}")));
        }
        Ok(Self {
            n,
            k,
            u_a: 1.0,
            u_b_fast: 2.0,
            u_b_crashed: 0.0,
            prescribed: Self::SAFE,
            strategies: vec!["A".into(), "B".into()],
        })
    }

    /// Payoffs must satisfy fast > safe > crashed.
    pub fn with_payoffs(mut self, safe: f64, fast: f64, crashed: f64) -> Result<Self> {
        if !(fast > safe && safe > crashed) {
            return Err(GameError::InvalidGame(format!(
                "congestion payoffs need fast > safe > crashed, got {fast}, {safe}, {crashed}"
            )));
        }
        self.u_a = safe;
        self.u_b_fast = fast;
        self.u_b_crashed = crashed;
        Ok(self)
    }

    pub fn with_prescribed(mut self, prescribed: StrategyId) -> Self {
        self.prescribed = prescribed.min(1);
        self
    }

    pub fn capacity(&self) -> usize {
        self.k
    }

    /// The socially optimal assignment: the first `k` players on B, the rest on A.
    pub fn oracle_assignment(&self) -> Vec<StrategyId> {
        (0..self.n).map(|i| if i < self.k { Self::FAST } else { Self::SAFE }).collect()
    }
}

impl Game for CongestionGame {
    fn players(&self) -> usize {
        self.n
    }

    fn strategies(&self) -> &[String] {
        &self.strategies
    }

    fn payoff(&self, player: usize, profile: &[StrategyId]) -> f64 {
        if profile[player] == Self::SAFE {
            return self.u_a;
        }
        let load = profile.iter().filter(|&&s| s == Self::FAST).count();
        if load <= self.k {
            self.u_b_fast
        } else {
            self.u_b_crashed
        }
    }

    fn is_symmetric(&self) -> bool {
        true
    }

    fn prescribed(&self) -> StrategyId {
        self.prescribed
    }
}

/// Two-player prisoner's dilemma with cooperate = 0, defect = 1.
#[derive(Debug, Clone, PartialEq)]
pub struct PrisonersDilemma {
    temptation: f64,
    reward: f64,
    punishment: f64,
    sucker: f64,
    strategies: Vec<String>,
}

impl PrisonersDilemma {
    pub const COOPERATE: StrategyId = 0;
    pub const DEFECT: StrategyId = 1;

    pub fn new(temptation: f64, reward: f64, punishment: f64, sucker: f64) -> Result<Self> {
        if !(temptation > reward && reward > punishment && punishment > sucker) {
            return Err(GameError::InvalidGame(format!(
                "prisoner's dilemma needs T > R > P > S, got {temptation}, {reward}, {punishment}, {sucker}"
            )));
        }
        Ok(Self { temptation, reward, punishment, sucker, strategies: vec!["C".into(), "D".into()] })
    }
}

impl Default for PrisonersDilemma {
    fn default() -> Self {
        Self::new(5.0, 3.0, 1.0, 0.0).expect("textbook payoffs are ordered")
    }
}

impl Game for PrisonersDilemma {
    fn players(&self) -> usize {
        2
    }

    fn strategies(&self) -> &[String] {
        &self.strategies
    }

    fn payoff(&self, player: usize, profile: &[StrategyId]) -> f64 {
        let me = profile[player];
        let other = profile[1 - player];
        match (me, other) {
            (Self::COOPERATE, Self::COOPERATE) => self.reward,
            (Self::COOPERATE, _) => self.sucker,
            (_, Self::COOPERATE) => self.temptation,
            _ => self.punishment,
        }
    }

    fn is_symmetric(&self) -> bool {
        true
    }

    fn prescribed(&self) -> StrategyId {
        Self::COOPERATE
    }
}

/// A game given by its full payoff table.
///
/// Rows enumerate joint profiles lexicographically (player 0 most
/// significant); each row holds one payoff per player.
#[derive(Debug, Clone, PartialEq)]
pub struct TableGame {
    players: usize,
    strategies: Vec<String>,
    table: Vec<Vec<f64>>,
    symmetric: bool,
    prescribed: StrategyId,
}

impl TableGame {
    pub fn new(
        players: usize,
        strategies: Vec<String>,
        table: Vec<Vec<f64>>,
        symmetric: bool,
        prescribed: StrategyId,
    ) -> Result<Self> {
        let k = strategies.len();
        if players == 0 || k == 0 {
            return Err(GameError::InvalidGame("table game needs players and strategies".into()));
        }
        if prescribed >= k {
            return Err(GameError::UnknownStrategy(prescribed));
        }
        let rows = k
            .checked_pow(players as u32)
            .filter(|&r| r <= 1 << 24)
            .ok_or_else(|| GameError::InvalidGame(format!("{k}^{players} payoff rows is too many for a table")))?;
        if table.len() != rows {
            return Err(GameError::InvalidGame(format!(
                "payoff table has {} rows, expected {k}^{players} = {rows}",
                table.len()
            )));
        }
        if let Some((r, row)) = table.iter().enumerate().find(|(_, row)| row.len() != players) {
            return Err(GameError::InvalidGame(format!("row {r} has {} payoffs, expected {players}", row.len())));
        }
        Ok(Self { players, strategies, table, symmetric, prescribed })
    }

    /// Symmetric two-player game from the row player's matrix `m[own][other]`.
    pub fn symmetric_two_player(strategies: Vec<String>, m: &[Vec<f64>], prescribed: StrategyId) -> Result<Self> {
        let k = strategies.len();
        if m.len() != k || m.iter().any(|row| row.len() != k) {
            return Err(GameError::InvalidGame(format!("payoff matrix must be {k}×{k}")));
        }
        let table = (0..k * k).map(|r| vec![m[r / k][r % k], m[r % k][r / k]]).collect();
        Self::new(2, strategies, table, true, prescribed)
    }
}

impl Game for TableGame {
    fn players(&self) -> usize {
        self.players
    }

    fn strategies(&self) -> &[String] {
        &self.strategies
    }

    fn payoff(&self, player: usize, profile: &[StrategyId]) -> f64 {
        let k = self.strategies.len();
        let row = profile.iter().fold(0, |acc, &s| acc * k + s);
        self.table[row][player]
    }

    fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    fn prescribed(&self) -> StrategyId {
        self.prescribed
    }
}

/// JSON description of a fixture game.
///
/// Either `payoff_table` (with `strategies`) or `rule` (`"congestion"` or
/// `"pd"`) must be present; `params` carries rule parameters.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixtureSpec {
    pub players: usize,
    #[serde(default)]
    pub strategies: Vec<String>,
    #[serde(default)]
    pub payoff_table: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub rule: Option<String>,
    #[serde(default)]
    pub params: Value,
    #[serde(default)]
    pub symmetric: Option<bool>,
    /// Name of the prescribed strategy; defaults to the first.
    #[serde(default)]
    pub prescribed: Option<String>,
}

impl FixtureSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| GameError::InvalidGame(e.to_string()))
    }

    pub fn build(&self) -> Result<Box<dyn Game + Send>> {
        match (&self.rule, &self.payoff_table) {
            (Some(_), Some(_)) => Err(GameError::InvalidGame("give either rule or payoff_table, not both".into())),
            (None, None) => Err(GameError::InvalidGame("fixture needs a rule or a payoff_table".into())),
            (None, Some(table)) => {
                let prescribed = self.prescribed_index(&self.strategies)?;
                Ok(Box::new(TableGame::new(
                    self.players,
                    self.strategies.clone(),
                    table.clone(),
                    self.symmetric.unwrap_or(false),
                    prescribed,
                )?))
            }
            (Some(rule), None) => match rule.as_str() {
                "congestion" => {
                    let k = self.param("k")?.unwrap_or(2.0);
                    if k < 0.0 || k.fract() != 0.0 {
                        return Err(GameError::InvalidGame(format!("capacity k must be a whole number, got {k}")));
                    }
                    let game = CongestionGame::new(self.players, k as usize)?.with_payoffs(
                        self.param("u_a")?.unwrap_or(1.0),
                        self.param("u_b1")?.unwrap_or(2.0),
                        self.param("u_b2")?.unwrap_or(0.0),
                    )?;
                    let prescribed = self.prescribed_index(game.strategies())?;
                    Ok(Box::new(game.with_prescribed(prescribed)))
                }
                "pd" => {
                    if self.players != 2 {
                        return Err(GameError::InvalidGame("prisoner's dilemma has exactly 2 players".into()));
                    }
                    let game = PrisonersDilemma::new(
                        self.param("t")?.unwrap_or(5.0),
                        self.param("r")?.unwrap_or(3.0),
                        self.param("p")?.unwrap_or(1.0),
                        self.param("s")?.unwrap_or(0.0),
                    )?;
                    if self.prescribed_index(game.strategies())? != PrisonersDilemma::COOPERATE {
                        return Err(GameError::InvalidGame("prisoner's dilemma prescribes C".into()));
                    }
                    Ok(Box::new(game))
                }
                other => Err(GameError::InvalidGame(format!("unknown rule {other:?}"))),
            },
        }
    }

    fn prescribed_index(&self, strategies: &[String]) -> Result<StrategyId> {
        match &self.prescribed {
            None => Ok(0),
            Some(name) => strategies
                .iter()
                .position(|s| s == name)
                .ok_or_else(|| GameError::InvalidGame(format!("prescribed strategy {name:?} not in {strategies:?}"))),
        }
    }

    fn param(&self, key: &str) -> Result<Option<f64>> {
        match self.params.get(key) {
            None | Some(Value::Null) => Ok(None),
            Some(v) => {
                v.as_f64().map(Some).ok_or_else(|| GameError::InvalidGame(format!("parameter {key} must be a number")))
            }
        }
    }
}
