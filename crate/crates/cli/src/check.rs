//! `check`: equilibrium concepts on the built-in fixture games.

use std::collections::BTreeMap;
use std::fs;
use std::str::FromStr;

use barne_core::endorsement::{as_generic_game, Amendments, ProtocolConfig, Strategy};
use barne_core::game::fixtures::{CongestionGame, FixtureSpec, PrisonersDilemma};
use barne_core::game::{
    bar_strong, barne_at_counts, check_inclusion_chain, delta_stable, find_symmetric_mixed_barne, globally_stable,
    Game, GameError, Norm, StrategyId, Verdict,
};
use serde_json::{json, Value};

use crate::{CliError, Result};

pub const FIXTURES: [&str; 3] = ["congestion", "pd", "endorsement-small"];
pub const CONCEPTS: [&str; 6] = ["barne", "bar-strong", "delta-stable", "globally-stable", "mixed", "inclusion-chain"];

/// key=value arguments; every key must be consumed.
struct Args {
    values: BTreeMap<String, String>,
    used: Vec<String>,
}

impl Args {
    fn parse(raw: &[String]) -> Result<Self> {
        let mut values = BTreeMap::new();
        for item in raw {
            let (k, v) =
                item.split_once('=').ok_or_else(|| CliError::Invalid(format!("argument {item:?} is not key=value")))?;
            values.insert(k.trim().to_string(), v.trim().to_string());
        }
        Ok(Self { values, used: Vec::new() })
    }

    fn raw(&mut self, key: &str) -> Option<String> {
        self.used.push(key.to_string());
        self.values.get(key).cloned()
    }

    fn get<T: FromStr>(&mut self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        self.raw(key).map(|v| v.parse::<T>().map_err(|e| CliError::Invalid(format!("{key}={v}: {e}")))).transpose()
    }

    fn or<T: FromStr>(&mut self, key: &str, default: T) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        Ok(self.get(key)?.unwrap_or(default))
    }

    fn require<T: FromStr>(&mut self, key: &str) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        self.get(key)?.ok_or_else(|| CliError::Invalid(format!("missing argument {key}=…")))
    }

    fn finish(&self) -> Result<()> {
        let unknown: Vec<&String> = self.values.keys().filter(|k| !self.used.contains(k)).collect();
        if unknown.is_empty() {
            Ok(())
        } else {
            Err(CliError::Invalid(format!("unknown arguments {unknown:?}")))
        }
    }
}

struct Fixture {
    game: Box<dyn Game + Send>,
    /// Profile used by the BAR-strong check when none is given.
    default_profile: Vec<StrategyId>,
    /// The endorsement fixture also accepts σ names such as `h` or `sigma_e`.
    endorsement: bool,
}

fn invalid(e: impl std::fmt::Display) -> CliError {
    CliError::Invalid(e.to_string())
}

fn build_fixture(name: &str, args: &mut Args) -> Result<Fixture> {
    match name {
        "congestion" => {
            let mut game = CongestionGame::new(args.or("n", 4)?, args.or("k", 2)?).map_err(invalid)?;
            if let (Some(a), Some(b1), Some(b2)) = (args.get("u_a")?, args.get("u_b1")?, args.get("u_b2")?) {
                game = game.with_payoffs(a, b1, b2).map_err(invalid)?;
            }
            let default_profile = game.oracle_assignment();
            Ok(Fixture { game: Box::new(game), default_profile, endorsement: false })
        }
        "pd" => {
            let game = PrisonersDilemma::default();
            let default_profile = vec![game.prescribed(); 2];
            Ok(Fixture { game: Box::new(game), default_profile, endorsement: false })
        }
        "endorsement-small" => {
            let n = args.or("n", 5)?;
            let amendments: Amendments = args.or("amendments", Amendments::Base)?;
            let base = ProtocolConfig::base(
                n,
                args.or("Q", 3)?,
                args.or("r_e", 10.0)?,
                args.or("c_c", 1.0)?,
                args.or("L", 1000.0)?,
            )
            .quorum_bounds(false);
            let config = match amendments {
                Amendments::Base => base,
                Amendments::Fines => base.with_fines(args.or("L_e", 100.0)?),
                Amendments::FinesAndTraps => base.with_traps(args.or("L_e", 1000.0)?, args.or("p_prop", 0.05)?),
            };
            let params = config.validate().map_err(invalid)?;
            if n > 8 {
                return Err(CliError::Invalid(format!("endorsement-small supports n ≤ 8, got {n}")));
            }
            Ok(Fixture {
                game: Box::new(as_generic_game(&params)),
                default_profile: vec![Strategy::Honest.index(); n],
                endorsement: true,
            })
        }
        path if path.ends_with(".json") => {
            let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("cannot read {path}: {e}")))?;
            let game = FixtureSpec::from_json(&text).and_then(|s| s.build()).map_err(invalid)?;
            let default_profile = vec![game.prescribed(); game.players()];
            Ok(Fixture { game, default_profile, endorsement: false })
        }
        other => Err(CliError::Invalid(format!(
            "unknown fixture {other:?} (expected one of {FIXTURES:?} or a .json fixture file)"
        ))),
    }
}

impl Fixture {
    fn strategy(&self, name: &str) -> Result<StrategyId> {
        if let Some(i) = self.game.strategy_index(name) {
            return Ok(i);
        }
        if self.endorsement {
            if let Ok(s) = Strategy::from_str(name) {
                return Ok(s.index());
            }
        }
        match name.parse::<StrategyId>() {
            Ok(i) if i < self.game.strategy_count() => Ok(i),
            _ => Err(CliError::Invalid(format!(
                "unknown strategy {name:?} (expected one of {:?})",
                self.game.strategies()
            ))),
        }
    }

    fn sigma(&self, args: &mut Args) -> Result<StrategyId> {
        match args.raw("sigma") {
            Some(name) => self.strategy(&name),
            None => Ok(self.game.prescribed()),
        }
    }
}

pub fn run(fixture_name: &str, concept: &str, raw: &[String]) -> Result<Value> {
    let mut args = Args::parse(raw)?;
    let concept = concept.replace('_', "-");
    if !CONCEPTS.contains(&concept.as_str()) {
        return Err(CliError::Invalid(format!("unknown concept {concept:?} (expected one of {CONCEPTS:?})")));
    }
    let fixture = build_fixture(fixture_name, &mut args)?;
    let game = fixture.game.as_ref();

    let (holds, details) = match concept.as_str() {
        "barne" => {
            let (f, g) = (args.require("f")?, args.require("g")?);
            let sigma = fixture.sigma(&mut args)?;
            args.finish()?;
            verdict(barne_at_counts(game, f, g, sigma).map_err(invalid)?, json!({ "f": f, "g": g, "sigma": sigma }))
        }
        "bar-strong" => {
            let (f_bar, g_bar) = (args.or("f_bar", 1)?, args.or("g_bar", 1)?);
            let profile = match args.raw("profile") {
                Some(list) => list.split(',').map(|s| fixture.strategy(s.trim())).collect::<Result<Vec<_>>>()?,
                None => fixture.default_profile.clone(),
            };
            args.finish()?;
            let v = bar_strong(game, f_bar, g_bar, &profile).map_err(invalid)?;
            verdict(v, json!({ "f_bar": f_bar, "g_bar": g_bar, "profile": profile }))
        }
        "delta-stable" => {
            let (f, g) = (args.require("f")?, args.require("g")?);
            let delta: f64 = args.or("delta", 1.0)?;
            let norm = args.or("norm", Norm::Infinity)?;
            let sigma = fixture.sigma(&mut args)?;
            args.finish()?;
            let v = delta_stable(game, sigma, f, g, delta, norm).map_err(invalid)?;
            verdict(v, json!({ "f": f, "g": g, "delta": delta, "norm": norm, "sigma": sigma }))
        }
        "globally-stable" => {
            let (f_bar, g_bar) = (args.require("f_bar")?, args.require("g_bar")?);
            let sigma = fixture.sigma(&mut args)?;
            args.finish()?;
            let v = globally_stable(game, sigma, f_bar, g_bar).map_err(invalid)?;
            verdict(v, json!({ "f_bar": f_bar, "g_bar": g_bar, "sigma": sigma }))
        }
        "mixed" => {
            let (f, g) = (args.require("f")?, args.require("g")?);
            let tolerance = args.or("tolerance", 1e-6)?;
            args.finish()?;
            match find_symmetric_mixed_barne(game, f, g, tolerance) {
                Ok(found) => (true, json!({ "f": f, "g": g, "tolerance": tolerance, "equilibrium": found })),
                Err(GameError::NoConvergence { best, regret }) => {
                    (false, json!({ "f": f, "g": g, "tolerance": tolerance, "best": best, "regret": regret }))
                }
                Err(e) => return Err(invalid(e)),
            }
        }
        "inclusion-chain" => {
            let requested: (Option<usize>, Option<usize>, Option<usize>) =
                (args.get("f_bar")?, args.get("g_bar")?, args.get("delta")?);
            args.finish()?;
            let n = game.players();
            let sweep: Vec<(usize, usize, usize)> = match requested {
                (Some(f), Some(g), d) => vec![(f, g, d.unwrap_or(1))],
                (None, None, None) => (0..=n.min(2))
                    .flat_map(|f| (0..=(n - f).min(2)).flat_map(move |g| (0..=1).map(move |d| (f, g, d))))
                    .collect(),
                _ => return Err(CliError::Invalid("give both f_bar and g_bar, or neither to sweep".into())),
            };
            let mut reports = Vec::new();
            for (f_bar, g_bar, delta) in sweep {
                reports.push(check_inclusion_chain(game, f_bar, g_bar, delta).map_err(invalid)?);
            }
            let violations: usize = reports.iter().map(|r| r.violations).sum();
            (violations == 0, json!({ "chains": reports.len(), "violations": violations, "reports": reports }))
        }
        _ => unreachable!("concept validated above"),
    };

    Ok(json!({
        "fixture": fixture_name,
        "concept": concept,
        "game": {
            "players": game.players(),
            "strategies": game.strategies(),
            "prescribed": game.prescribed(),
        },
        "holds": holds,
        "details": details,
    }))
}

fn verdict(v: Verdict, mut details: Value) -> (bool, Value) {
    if let Some(w) = v.witness {
        details["witness"] = json!(w);
    }
    (v.holds, details)
}
