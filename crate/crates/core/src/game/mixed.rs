//! Numerical search for a symmetric mixed BARNE at a population point.
//!
//! Rationals other than the focal player mix independently with σ; the
//! Byzantine worst case is taken over pure joint profiles, which suffices
//! because expected payoff is multilinear. By symmetry only the multisets of
//! Byzantine strategies and of the other rationals' strategies matter, so the
//! payoff tables are indexed by compositions.

use serde::Serialize;

use super::barne::argmax;
use super::{check_budget, Game, GameError, Result, StrategyId};

const WEIGHT_SUM_TOLERANCE: f64 = 1e-12;
const BEST_RESPONSE_ITERATIONS: usize = 10_000;
const BEST_RESPONSE_PATIENCE: usize = 500;
const BEST_RESPONSE_STEP: f64 = 0.5;
const MAX_GRID_RESOLUTION: usize = 200;
const MAX_GRID_POINTS: usize = 20_000;
const GRID_WORK_BUDGET: f64 = 2e8;
const REFINEMENT_MOVES: usize = 20_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MixedStrategy {
    weights: Vec<f64>,
}

impl MixedStrategy {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(GameError::InvalidMixedStrategy("no strategies".into()));
        }
        if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
            return Err(GameError::InvalidMixedStrategy(format!("weight {w} is not a probability")));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
            return Err(GameError::InvalidMixedStrategy(format!("weights sum to {sum}, not 1")));
        }
        Ok(Self { weights })
    }

    pub fn pure(strategies: usize, s: StrategyId) -> Self {
        let mut weights = vec![0.0; strategies];
        weights[s] = 1.0;
        Self { weights }
    }

    pub fn uniform(strategies: usize) -> Self {
        Self { weights: vec![1.0 / strategies as f64; strategies] }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Index of the single strategy carrying all the mass, if any.
    pub fn as_pure(&self) -> Option<StrategyId> {
        self.weights.iter().position(|&w| w == 1.0)
    }

    /// Renormalizes after numerical drift; weights must already be non-negative.
    fn normalized(mut weights: Vec<f64>) -> Self {
        for w in &mut weights {
            *w = w.max(0.0);
        }
        let sum: f64 = weights.iter().sum();
        for w in &mut weights {
            *w /= sum;
        }
        Self { weights }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchStage {
    Pure,
    BestResponse,
    Grid,
    Refinement,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MixedBarne {
    pub strategy: MixedStrategy,
    pub regret: f64,
    /// Regret evaluations spent.
    pub iterations: usize,
    pub stage: SearchStage,
}

/// Finds σ with max-min regret ≤ `tolerance` at `(f, g)`.
///
/// Stages, stopping at the first success: pure strategies (prescribed first),
/// damped best response from the uniform mix, a grid over the mixed simplex,
/// then pattern-search refinement of the best point seen.
pub fn find_symmetric_mixed_barne(game: &dyn Game, f: usize, g: usize, tolerance: f64) -> Result<MixedBarne> {
    let tables = RegretTables::new(game, f, g)?;
    let k = game.strategy_count();
    let mut search = Search { tables: &tables, tolerance, evaluations: 0, best: None };

    let mut order: Vec<StrategyId> = (0..k).collect();
    order.retain(|&s| s != game.prescribed());
    order.insert(0, game.prescribed());
    for s in order {
        if let Some(found) = search.try_point(MixedStrategy::pure(k, s), SearchStage::Pure) {
            return Ok(found);
        }
    }

    let mut current = MixedStrategy::uniform(k);
    let mut since_improvement = 0;
    for _ in 0..BEST_RESPONSE_ITERATIONS {
        let before = search.best_regret();
        if let Some(found) = search.try_point(current.clone(), SearchStage::BestResponse) {
            return Ok(found);
        }
        since_improvement = if search.best_regret() < before { 0 } else { since_improvement + 1 };
        if since_improvement >= BEST_RESPONSE_PATIENCE {
            break;
        }
        let br = tables.best_reply(&current);
        let weights = current
            .weights
            .iter()
            .enumerate()
            .map(|(s, &w)| (1.0 - BEST_RESPONSE_STEP) * w + if s == br { BEST_RESPONSE_STEP } else { 0.0 })
            .collect();
        current = MixedStrategy::normalized(weights);
    }

    let resolution = grid_resolution(k, tables.evaluation_cost());
    for counts in compositions(resolution, k) {
        let weights = counts.iter().map(|&c| c as f64 / resolution as f64).collect();
        if let Some(found) = search.try_point(MixedStrategy::normalized(weights), SearchStage::Grid) {
            return Ok(found);
        }
    }

    let (start, _) = search.best.clone().expect("pure stage evaluates at least one point");
    if let Some(found) = search.refine(start, 1.0 / resolution as f64) {
        return Ok(found);
    }
    let (best, regret) = search.best.expect("search evaluated points");
    Err(GameError::NoConvergence { best, regret })
}

/// Max-min regret of the symmetric mix σ at `(f, g)`.
pub fn mixed_regret(game: &dyn Game, f: usize, g: usize, sigma: &MixedStrategy) -> Result<f64> {
    let tables = RegretTables::new(game, f, g)?;
    if sigma.weights.len() != game.strategy_count() {
        return Err(GameError::InvalidMixedStrategy(format!(
            "expected {} weights, got {}",
            game.strategy_count(),
            sigma.weights.len()
        )));
    }
    Ok(tables.regret(sigma))
}

struct Search<'a> {
    tables: &'a RegretTables,
    tolerance: f64,
    evaluations: usize,
    best: Option<(MixedStrategy, f64)>,
}

impl Search<'_> {
    fn best_regret(&self) -> f64 {
        self.best.as_ref().map_or(f64::INFINITY, |(_, r)| *r)
    }

    fn evaluate(&mut self, sigma: &MixedStrategy) -> f64 {
        self.evaluations += 1;
        let regret = self.tables.regret(sigma);
        if regret < self.best_regret() {
            self.best = Some((sigma.clone(), regret));
        }
        regret
    }

    fn try_point(&mut self, sigma: MixedStrategy, stage: SearchStage) -> Option<MixedBarne> {
        let regret = self.evaluate(&sigma);
        (regret <= self.tolerance).then_some(MixedBarne {
            strategy: sigma,
            regret,
            iterations: self.evaluations,
            stage,
        })
    }

    /// Pattern search: move mass `step` between pairs of strategies while it
    /// lowers regret, halving the step when no move helps.
    fn refine(&mut self, start: MixedStrategy, mut step: f64) -> Option<MixedBarne> {
        let k = start.weights.len();
        let mut current = start;
        let mut regret = self.tables.regret(&current);
        let mut moves = 0;
        while step > 1e-15 && moves < REFINEMENT_MOVES {
            let mut improved = false;
            'pairs: for to in 0..k {
                for from in 0..k {
                    if to == from || current.weights[from] <= 0.0 {
                        continue;
                    }
                    let shift = step.min(current.weights[from]);
                    let mut weights = current.weights.clone();
                    weights[from] -= shift;
                    weights[to] += shift;
                    let candidate = MixedStrategy::normalized(weights);
                    moves += 1;
                    let r = self.evaluate(&candidate);
                    if r < regret {
                        current = candidate;
                        regret = r;
                        improved = true;
                        break 'pairs;
                    }
                }
            }
            if regret <= self.tolerance {
                return Some(MixedBarne {
                    strategy: current,
                    regret,
                    iterations: self.evaluations,
                    stage: SearchStage::Refinement,
                });
            }
            if !improved {
                step /= 2.0;
            }
        }
        None
    }
}

/// Focal payoffs at the canonical partition, indexed by Byzantine multiset,
/// focal pure strategy and other-rationals multiset.
struct RegretTables {
    strategies: usize,
    others: usize,
    byzantine_sets: usize,
    other_sets: Vec<Vec<usize>>,
    /// `payoff[(b * k + t) * |M| + m]`
    payoff: Vec<f64>,
}

impl RegretTables {
    fn new(game: &dyn Game, f: usize, g: usize) -> Result<Self> {
        let n = game.players();
        if !game.is_symmetric() {
            return Err(GameError::SymmetryRequired("find_symmetric_mixed_barne"));
        }
        if g == 0 || f + g > n {
            return Err(GameError::InvalidPoint { f, g, n });
        }
        let k = game.strategy_count();
        let byz_sets = compositions(f, k);
        let other_sets = compositions(g - 1, k);
        check_budget((byz_sets.len() as u128) * (k as u128) * (other_sets.len() as u128))?;

        let focal = f;
        let mut profile = vec![game.prescribed(); n];
        let mut payoff = Vec::with_capacity(byz_sets.len() * k * other_sets.len());
        for b in &byz_sets {
            fill_seats(&mut profile[..f], b);
            for t in 0..k {
                profile[focal] = t;
                for m in &other_sets {
                    fill_seats(&mut profile[f + 1..f + g], m);
                    payoff.push(game.payoff(focal, &profile));
                }
            }
        }
        Ok(Self { strategies: k, others: g - 1, byzantine_sets: byz_sets.len(), other_sets, payoff })
    }

    fn evaluation_cost(&self) -> usize {
        self.payoff.len().max(1)
    }

    /// `expected[b][t]`: focal payoff of pure t against σ^{g−1} and Byzantine multiset b.
    fn expected(&self, sigma: &MixedStrategy) -> Vec<Vec<f64>> {
        let probs: Vec<f64> =
            self.other_sets.iter().map(|m| multinomial_probability(self.others, m, &sigma.weights)).collect();
        let k = self.strategies;
        let width = self.other_sets.len();
        (0..self.byzantine_sets)
            .map(|b| {
                (0..k)
                    .map(|t| {
                        let row = &self.payoff[(b * k + t) * width..(b * k + t + 1) * width];
                        row.iter().zip(&probs).map(|(u, p)| u * p).sum()
                    })
                    .collect()
            })
            .collect()
    }

    fn maxmin_values(&self, expected: &[Vec<f64>]) -> Vec<f64> {
        (0..self.strategies).map(|t| expected.iter().map(|row| row[t]).fold(f64::INFINITY, f64::min)).collect()
    }

    fn regret(&self, sigma: &MixedStrategy) -> f64 {
        let expected = self.expected(sigma);
        let best = self.maxmin_values(&expected).into_iter().fold(f64::NEG_INFINITY, f64::max);
        let own = expected
            .iter()
            .map(|row| row.iter().zip(&sigma.weights).map(|(u, w)| u * w).sum::<f64>())
            .fold(f64::INFINITY, f64::min);
        (best - own).max(0.0)
    }

    fn best_reply(&self, sigma: &MixedStrategy) -> StrategyId {
        argmax(&self.maxmin_values(&self.expected(sigma))).0
    }
}

fn fill_seats(seats: &mut [StrategyId], counts: &[usize]) {
    let mut i = 0;
    for (s, &c) in counts.iter().enumerate() {
        for _ in 0..c {
            seats[i] = s;
            i += 1;
        }
    }
}

/// All ways to write `total` as an ordered sum of `parts` non-negative integers.
fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    fn rec(left: usize, parts: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if parts == 1 {
            prefix.push(left);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for c in 0..=left {
            prefix.push(c);
            rec(left - c, parts - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if parts > 0 {
        rec(total, parts, &mut Vec::with_capacity(parts), &mut out);
    }
    out
}

fn multinomial_probability(total: usize, counts: &[usize], weights: &[f64]) -> f64 {
    let mut p = 1.0;
    let mut remaining = total;
    for (&c, &w) in counts.iter().zip(weights) {
        p *= binomial(remaining, c) * w.powi(c as i32);
        remaining -= c;
    }
    p
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn grid_points(resolution: usize, k: usize) -> f64 {
    binomial(resolution + k - 1, k - 1)
}

fn grid_resolution(k: usize, cost: usize) -> usize {
    let mut r = MAX_GRID_RESOLUTION;
    while r > 1
        && (grid_points(r, k) > MAX_GRID_POINTS as f64 || grid_points(r, k) * (cost * k) as f64 > GRID_WORK_BUDGET)
    {
        r -= 1;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::fixtures::{CongestionGame, PrisonersDilemma, TableGame};

    fn two_by_two(m: [[f64; 2]; 2]) -> TableGame {
        TableGame::symmetric_two_player(vec!["A".into(), "B".into()], &[m[0].to_vec(), m[1].to_vec()], 0).unwrap()
    }

    #[test]
    fn weights_must_form_a_distribution() {
        assert!(MixedStrategy::new(vec![0.5, 0.5]).is_ok());
        assert!(MixedStrategy::new(vec![0.5, 0.4]).is_err());
        assert!(MixedStrategy::new(vec![1.5, -0.5]).is_err());
        assert!(MixedStrategy::new(vec![]).is_err());
    }

    #[test]
    fn anti_coordination_mixes_evenly() {
        let game = two_by_two([[0.0, 1.0], [1.0, 0.0]]);
        let found = find_symmetric_mixed_barne(&game, 0, 2, 1e-9).unwrap();
        assert!((found.strategy.weights()[0] - 0.5).abs() < 1e-6, "{found:?}");
        assert!(found.regret <= 1e-9);
    }

    #[test]
    fn asymmetric_rewards_shift_the_mix() {
        // u(A,B)=2, u(B,A)=1: indifference at p(A) = 2/3
        let game = two_by_two([[0.0, 2.0], [1.0, 0.0]]);
        let found = find_symmetric_mixed_barne(&game, 0, 2, 1e-9).unwrap();
        assert!((found.strategy.weights()[0] - 2.0 / 3.0).abs() < 1e-6, "{found:?}");
        assert!(found.strategy.as_pure().is_none());
    }

    #[test]
    fn dominant_strategy_is_found_as_pure() {
        let game = PrisonersDilemma::default();
        let found = find_symmetric_mixed_barne(&game, 0, 2, 1e-9).unwrap();
        assert_eq!(found.strategy.as_pure(), Some(PrisonersDilemma::DEFECT));
        assert_eq!(found.stage, SearchStage::Pure);
    }

    #[test]
    fn congestion_with_spare_capacity_mixes() {
        // f=0, g=4, k=2: no pure symmetric BARNE exists
        let game = CongestionGame::new(4, 2).unwrap();
        for s in 0..2 {
            assert!(mixed_regret(&game, 0, 4, &MixedStrategy::pure(2, s)).unwrap() > 0.1);
        }
        let found = find_symmetric_mixed_barne(&game, 0, 4, 1e-9).unwrap();
        assert!(found.regret <= 1e-9);
        assert!(found.strategy.as_pure().is_none());
    }

    #[test]
    fn regret_of_pure_strategy_matches_barne_check() {
        let game = CongestionGame::new(5, 2).unwrap();
        for f in 0..=5 {
            for g in 1..=5 - f {
                for s in 0..2 {
                    let regret = mixed_regret(&game, f, g, &MixedStrategy::pure(2, s)).unwrap();
                    let barne = crate::game::barne_at_counts(&game, f, g, s).unwrap().holds;
                    assert_eq!(regret <= 1e-9, barne, "f={f} g={g} s={s}");
                }
            }
        }
    }

    #[test]
    fn point_without_rationals_is_rejected() {
        let game = CongestionGame::new(4, 2).unwrap();
        assert!(matches!(find_symmetric_mixed_barne(&game, 1, 0, 1e-9), Err(GameError::InvalidPoint { .. })));
    }

    #[test]
    fn impossible_tolerance_reports_best_iterate() {
        let game = two_by_two([[0.0, 2.0], [1.0, 0.0]]);
        match find_symmetric_mixed_barne(&game, 0, 2, -1.0) {
            Err(GameError::NoConvergence { best, regret }) => {
                assert!(regret < 1e-9);
                assert!((best.weights()[0] - 2.0 / 3.0).abs() < 1e-6);
            }
            other => panic!("expected no convergence, got {other:?}"),
        }
    }

    #[test]
    fn compositions_are_counted_by_stars_and_bars() {
        assert_eq!(compositions(3, 3).len(), 10);
        assert_eq!(compositions(0, 6), vec![vec![0; 6]]);
        assert!(compositions(4, 2).iter().all(|c| c.iter().sum::<usize>() == 4));
    }

    #[test]
    fn grid_resolution_respects_point_cap() {
        assert_eq!(grid_resolution(2, 1), 200);
        let r = grid_resolution(6, 1);
        assert!(grid_points(r, 6) <= MAX_GRID_POINTS as f64);
        assert!(grid_points(r + 1, 6) > MAX_GRID_POINTS as f64);
    }
}
