//! `compare`: region changes between scans at the three amendment levels.

use std::collections::BTreeSet;

use barne_core::endorsement::{ProtocolParams, Strategy};
use serde::{Deserialize, Serialize};

use crate::{CliError, Result};

#[derive(Debug, Deserialize)]
struct ScanFile {
    params: ProtocolParams,
    grid: Vec<Row>,
}

#[derive(Debug, Deserialize)]
struct Row {
    f: usize,
    g: usize,
    honest: Flag,
    blind_endorse: Flag,
    abstain: Flag,
}

#[derive(Debug, Deserialize)]
struct Flag {
    is_barne: bool,
}

type Region = BTreeSet<(usize, usize)>;

impl ScanFile {
    fn region(&self, strategy: Strategy) -> Region {
        self.grid
            .iter()
            .filter(|r| match strategy {
                Strategy::Honest => r.honest.is_barne,
                Strategy::BlindEndorse => r.blind_endorse.is_barne,
                _ => r.abstain.is_barne,
            })
            .map(|r| (r.f, r.g))
            .collect()
    }
}

#[derive(Debug, Serialize)]
pub struct Step {
    pub gained: usize,
    pub lost: usize,
}

impl Step {
    fn between(from: &Region, to: &Region) -> Self {
        Self { gained: to.difference(from).count(), lost: from.difference(to).count() }
    }
}

#[derive(Debug, Serialize)]
pub struct StrategyDiff {
    pub strategy: Strategy,
    /// Region sizes in the base, fines and traps scans.
    pub counts: [usize; 3],
    pub base_to_fines: Step,
    pub fines_to_traps: Step,
}

#[derive(Debug, Serialize)]
pub struct CompareReport {
    pub n: usize,
    pub quorum: usize,
    pub amendments: [String; 3],
    pub strategies: Vec<StrategyDiff>,
    /// Honest region of each scan contains the previous one.
    pub honest_monotone: bool,
    /// No point of the traps scan has blind endorsement as a BARNE.
    pub blind_vanishes: bool,
    /// Every region is unchanged across the three scans.
    pub identical: bool,
}

fn parse(label: &str, text: &str) -> Result<ScanFile> {
    serde_json::from_str(text).map_err(|e| CliError::Invalid(format!("{label} scan is not a scan JSON: {e}")))
}

pub fn compare(base: &str, fines: &str, traps: &str) -> Result<CompareReport> {
    let scans = [parse("base", base)?, parse("fines", fines)?, parse("traps", traps)?];
    let p0 = scans[0].params;
    for (label, scan) in ["fines", "traps"].iter().zip(&scans[1..]) {
        let p = scan.params;
        let shared = p.n == p0.n
            && p.quorum == p0.quorum
            && p.reward == p0.reward
            && p.check_cost == p0.check_cost
            && p.loss == p0.loss;
        if !shared {
            return Err(CliError::Invalid(format!(
                "{label} scan does not share n, Q, r_e, c_c and L with the base scan"
            )));
        }
    }

    let strategies: Vec<StrategyDiff> = Strategy::UNDOMINATED
        .iter()
        .map(|&s| {
            let r = scans.each_ref().map(|scan| scan.region(s));
            StrategyDiff {
                strategy: s,
                counts: [r[0].len(), r[1].len(), r[2].len()],
                base_to_fines: Step::between(&r[0], &r[1]),
                fines_to_traps: Step::between(&r[1], &r[2]),
            }
        })
        .collect();
    let honest = scans.each_ref().map(|scan| scan.region(Strategy::Honest));
    Ok(CompareReport {
        n: p0.n,
        quorum: p0.quorum,
        amendments: scans.each_ref().map(|scan| scan.params.amendments.to_string()),
        honest_monotone: honest[0].is_subset(&honest[1]) && honest[1].is_subset(&honest[2]),
        blind_vanishes: scans[2].region(Strategy::BlindEndorse).is_empty(),
        identical: strategies.iter().all(|d| {
            d.base_to_fines.gained + d.base_to_fines.lost + d.fines_to_traps.gained + d.fines_to_traps.lost == 0
        }),
        strategies,
    })
}
