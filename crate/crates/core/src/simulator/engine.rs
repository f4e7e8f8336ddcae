use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{Result, SimConfig, SimError};
use crate::endorsement::{realized_payoff, Amendments, ProtocolParams, Strategy, Validity};

/// Rounds per parallel work unit. Partial sums are combined in chunk order,
/// so aggregates do not depend on the thread count.
const CHUNK_ROUNDS: u64 = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AgentType {
    Byzantine,
    Rational,
    Honest,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoundRecord {
    pub round: u64,
    pub proposer: usize,
    pub proposer_type: AgentType,
    pub block_valid: bool,
    pub is_trap: bool,
    pub endorsements: Vec<usize>,
    pub accepted: bool,
    pub fines_issued: Vec<usize>,
    pub deltas: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
pub struct SimCounts {
    pub valid_proposals: u64,
    pub accepted_blocks: u64,
    pub traps: u64,
    pub fines: u64,
}

/// Mean per-round utility of each class, `None` for empty classes. The
/// deviant is reported separately and excluded from `rational`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassMeans {
    pub byzantine: Option<f64>,
    pub rational: Option<f64>,
    pub honest: Option<f64>,
    pub deviant: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimResult {
    pub config: SimConfig,
    pub seed: u64,
    pub rounds: u64,
    pub totals: Vec<f64>,
    /// Per-agent sum of squared per-round utilities.
    pub sum_squares: Vec<f64>,
    pub per_round_mean: Vec<f64>,
    pub class_means: ClassMeans,
    pub counts: SimCounts,
}

struct Population {
    strategies: Vec<Strategy>,
    types: Vec<AgentType>,
}

impl Population {
    fn new(config: &SimConfig) -> Self {
        let (f, g, n) = (config.point.f, config.point.g, config.params.n);
        let mut strategies = Vec::with_capacity(n);
        let mut types = Vec::with_capacity(n);
        for i in 0..n {
            let (t, s) = if i < f {
                (AgentType::Byzantine, Strategy::Faulty)
            } else if i < f + g {
                let s = match config.deviant {
                    Some(d) if d.agent == i => d.strategy,
                    _ => config.rational_strategy,
                };
                (AgentType::Rational, s)
            } else {
                (AgentType::Honest, Strategy::Honest)
            };
            strategies.push(s);
            types.push(t);
        }
        Self { strategies, types }
    }

    fn endorsement_count(&self, validity: Validity) -> usize {
        self.strategies.iter().filter(|s| s.endorses(validity)).count()
    }
}

#[derive(Clone)]
struct Accumulator {
    totals: Vec<f64>,
    sum_squares: Vec<f64>,
    counts: SimCounts,
}

impl Accumulator {
    fn new(n: usize) -> Self {
        Self { totals: vec![0.0; n], sum_squares: vec![0.0; n], counts: SimCounts::default() }
    }

    fn add(&mut self, record: &RoundRecord) {
        for (i, &d) in record.deltas.iter().enumerate() {
            self.totals[i] += d;
            self.sum_squares[i] += d * d;
        }
        self.counts.valid_proposals += u64::from(record.block_valid);
        self.counts.accepted_blocks += u64::from(record.accepted);
        self.counts.traps += u64::from(record.is_trap);
        self.counts.fines += record.fines_issued.len() as u64;
    }

    fn merge(&mut self, other: &Accumulator) {
        for i in 0..self.totals.len() {
            self.totals[i] += other.totals[i];
            self.sum_squares[i] += other.sum_squares[i];
        }
        self.counts.valid_proposals += other.counts.valid_proposals;
        self.counts.accepted_blocks += other.counts.accepted_blocks;
        self.counts.traps += other.counts.traps;
        self.counts.fines += other.counts.fines;
    }
}

/// Endorsers of an invalid block are fined, whether or not it was accepted,
/// provided fines are in force.
pub fn accusation_check(record: &RoundRecord, amendments: Amendments) -> Vec<usize> {
    if !amendments.has_fines() || record.block_valid {
        return Vec::new();
    }
    record.endorsements.clone()
}

fn play_round(params: &ProtocolParams, population: &Population, seed: u64, round: u64) -> RoundRecord {
    let n = params.n;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(round);

    let proposer = rng.random_range(0..n);
    let proposer_strategy = population.strategies[proposer];
    let proposer_type = population.types[proposer];

    // proposal phase
    let intends_valid = match (proposer_type, proposer_strategy) {
        (AgentType::Byzantine, _) | (_, Strategy::Faulty) => false,
        (AgentType::Honest, _) => true,
        (AgentType::Rational, s) => {
            let valid_accepted = population.endorsement_count(Validity::Valid) >= params.quorum;
            let invalid_accepted = population.endorsement_count(Validity::Invalid) >= params.quorum;
            realized_payoff(params, Validity::Valid, valid_accepted, s)
                >= realized_payoff(params, Validity::Invalid, invalid_accepted, s)
        }
    };
    let trap_rate = params.trap_rate();
    let is_trap = intends_valid && trap_rate > 0.0 && rng.random::<f64>() < trap_rate;
    let block_valid = intends_valid && !is_trap;
    let validity = if block_valid { Validity::Valid } else { Validity::Invalid };

    // endorsing phase: every agent, proposer included, follows its strategy
    let endorsements: Vec<usize> = (0..n).filter(|&i| population.strategies[i].endorses(validity)).collect();

    // decision phase
    let accepted = endorsements.len() >= params.quorum;
    let mut record = RoundRecord {
        round,
        proposer,
        proposer_type,
        block_valid,
        is_trap,
        endorsements,
        accepted,
        fines_issued: Vec::new(),
        deltas: Vec::new(),
    };
    record.fines_issued = accusation_check(&record, params.amendments);

    let mut deltas = vec![0.0; n];
    for &i in &record.endorsements {
        if accepted {
            deltas[i] += params.reward;
        }
    }
    for (i, d) in deltas.iter_mut().enumerate() {
        if accepted && !block_valid {
            *d -= params.loss;
        }
        if population.strategies[i].checks() {
            *d -= params.check_cost;
        }
    }
    for &i in &record.fines_issued {
        deltas[i] -= params.endorse_fine;
    }
    record.deltas = deltas;
    record
}

fn finish(config: &SimConfig, population: &Population, acc: Accumulator) -> SimResult {
    let rounds = config.rounds as f64;
    let per_round_mean: Vec<f64> = acc.totals.iter().map(|t| t / rounds).collect();
    let deviant = config.deviant.map(|d| d.agent);
    let class_mean = |t: AgentType| {
        let members: Vec<f64> = (0..config.params.n)
            .filter(|&i| population.types[i] == t && Some(i) != deviant)
            .map(|i| per_round_mean[i])
            .collect();
        (!members.is_empty()).then(|| members.iter().sum::<f64>() / members.len() as f64)
    };
    SimResult {
        config: *config,
        seed: config.seed,
        rounds: config.rounds,
        class_means: ClassMeans {
            byzantine: class_mean(AgentType::Byzantine),
            rational: class_mean(AgentType::Rational),
            honest: class_mean(AgentType::Honest),
            deviant: deviant.map(|i| per_round_mean[i]),
        },
        totals: acc.totals,
        sum_squares: acc.sum_squares,
        per_round_mean,
        counts: acc.counts,
    }
}

/// Runs `config.rounds` iid rounds; bit-identical for a given config.
pub fn run_simulation(config: &SimConfig) -> Result<SimResult> {
    config.validate()?;
    let params = &config.params;
    let population = Population::new(config);
    let chunks = config.rounds.div_ceil(CHUNK_ROUNDS);
    let partials: Vec<Accumulator> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = Accumulator::new(params.n);
            let end = ((c + 1) * CHUNK_ROUNDS).min(config.rounds);
            for round in c * CHUNK_ROUNDS..end {
                acc.add(&play_round(params, &population, config.seed, round));
            }
            acc
        })
        .collect();
    let mut total = Accumulator::new(params.n);
    for p in &partials {
        total.merge(p);
    }
    Ok(finish(config, &population, total))
}

/// Like [`run_simulation`] but also returns every round record. The
/// aggregates equal those of `run_simulation` exactly.
pub fn run_with_trace(config: &SimConfig) -> Result<(SimResult, Vec<RoundRecord>)> {
    config.validate()?;
    let population = Population::new(config);
    let records: Vec<RoundRecord> = (0..config.rounds)
        .into_par_iter()
        .map(|round| play_round(&config.params, &population, config.seed, round))
        .collect();
    let totals = replay_accumulator(&records, config.params.n, config.rounds);
    Ok((finish(config, &population, totals), records))
}

fn replay_accumulator(records: &[RoundRecord], n: usize, rounds: u64) -> Accumulator {
    let mut total = Accumulator::new(n);
    for chunk in 0..rounds.div_ceil(CHUNK_ROUNDS) {
        let mut acc = Accumulator::new(n);
        let start = (chunk * CHUNK_ROUNDS) as usize;
        let end = (((chunk + 1) * CHUNK_ROUNDS).min(rounds)) as usize;
        for r in &records[start..end] {
            acc.add(r);
        }
        total.merge(&acc);
    }
    total
}

/// Per-agent totals recomputed from a record stream, summed in the same
/// order as the simulator.
pub fn replay_totals(records: &[RoundRecord], n: usize) -> Vec<f64> {
    replay_accumulator(records, n, records.len() as u64).totals
}

/// One CSV row per round; agent lists are space separated and per-agent
/// deltas semicolon separated.
pub fn write_trace_csv<W: Write>(records: &[RoundRecord], out: W) -> Result<()> {
    let err = |e: csv::Error| SimError::Output(e.to_string());
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "round",
        "proposer",
        "proposer_type",
        "block_valid",
        "is_trap",
        "endorsement_count",
        "endorsers",
        "accepted",
        "fined",
        "deltas",
    ])
    .map_err(err)?;
    let join = |v: &[usize]| v.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(" ");
    for r in records {
        let proposer_type = match r.proposer_type {
            AgentType::Byzantine => "byzantine",
            AgentType::Rational => "rational",
            AgentType::Honest => "honest",
        };
        w.write_record([
            r.round.to_string(),
            r.proposer.to_string(),
            proposer_type.to_string(),
            r.block_valid.to_string(),
            r.is_trap.to_string(),
            r.endorsements.len().to_string(),
            join(&r.endorsements),
            r.accepted.to_string(),
            join(&r.fines_issued),
            r.deltas.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(";"),
        ])
        .map_err(err)?;
    }
    w.flush().map_err(|e| SimError::Output(e.to_string()))
}
