use std::collections::BTreeSet;
use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use super::{classify_point, ModelError, PointVerdict, ProtocolParams, Result, Strategy};

/// Largest population accepted by a full integer scan.
pub const MAX_SCAN_AGENTS: usize = 500;

/// Extent of one strategy's BARNE region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
pub struct RegionSummary {
    pub count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f_min: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f_max: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g_min: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g_max: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ScanSummary {
    pub points: usize,
    pub honest: RegionSummary,
    pub blind_endorse: RegionSummary,
    pub abstain: RegionSummary,
}

/// Per-point verdicts over every integer (f, g) with g ≥ 1 and f + g ≤ n,
/// ordered by f then g.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimplexMap {
    pub params: ProtocolParams,
    pub grid: Vec<PointVerdict>,
    pub summary: ScanSummary,
}

pub fn simplex_scan(params: &ProtocolParams) -> Result<SimplexMap> {
    let n = params.n;
    if n > MAX_SCAN_AGENTS {
        return Err(ModelError::TooLarge { n, limit: MAX_SCAN_AGENTS });
    }
    let rows: Vec<Vec<PointVerdict>> = (0..n)
        .into_par_iter()
        .map(|f| (1..=n - f).map(|g| classify_point(params, f, g)).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    let grid: Vec<PointVerdict> = rows.into_iter().flatten().collect();
    let summary = ScanSummary {
        points: grid.len(),
        honest: summarize(&grid, Strategy::Honest),
        blind_endorse: summarize(&grid, Strategy::BlindEndorse),
        abstain: summarize(&grid, Strategy::Abstain),
    };
    Ok(SimplexMap { params: *params, grid, summary })
}

fn summarize(grid: &[PointVerdict], strategy: Strategy) -> RegionSummary {
    let members: Vec<&PointVerdict> = grid.iter().filter(|v| v.is_barne(strategy)).collect();
    RegionSummary {
        count: members.len(),
        f_min: members.iter().map(|v| v.f).min(),
        f_max: members.iter().map(|v| v.f).max(),
        g_min: members.iter().map(|v| v.g).min(),
        g_max: members.iter().map(|v| v.g).max(),
    }
}

impl SimplexMap {
    /// Points where `strategy` is a symmetric BARNE.
    pub fn region(&self, strategy: Strategy) -> BTreeSet<(usize, usize)> {
        self.grid.iter().filter(|v| v.is_barne(strategy)).map(|v| (v.f, v.g)).collect()
    }

    pub fn verdict(&self, f: usize, g: usize) -> Option<&PointVerdict> {
        self.grid.iter().find(|v| v.f == f && v.g == g)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let err = |e: csv::Error| ModelError::Output(e.to_string());
        w.write_record(["f", "g", "barne_h", "barne_e", "barne_0", "region_h", "region_e", "region_0"]).map_err(err)?;
        for v in &self.grid {
            let label = |s: Strategy| v.get(s).and_then(|sv| sv.region).map_or("", |r| r.label());
            w.write_record([
                v.f.to_string(),
                v.g.to_string(),
                v.honest.is_barne.to_string(),
                v.blind_endorse.is_barne.to_string(),
                v.abstain.is_barne.to_string(),
                label(Strategy::Honest).to_string(),
                label(Strategy::BlindEndorse).to_string(),
                label(Strategy::Abstain).to_string(),
            ])
            .map_err(err)?;
        }
        w.flush().map_err(|e| ModelError::Output(e.to_string()))
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        String::from_utf8(buf).map_err(|e| ModelError::Output(e.to_string()))
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| ModelError::Output(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::endorsement::ProtocolConfig;

    #[test]
    fn traps_make_honesty_an_equilibrium_outside_byzantine_veto() {
        let params = ProtocolConfig::base(6, 4, 10.0, 1.0, 1000.0).with_traps(1000.0, 0.05).validate().unwrap();
        let map = simplex_scan(&params).unwrap();
        let expected: BTreeSet<_> = (0..=2).flat_map(|f| (1..=6 - f).map(move |g| (f, g))).collect();
        assert_eq!(map.region(Strategy::Honest), expected);
        assert_eq!(map.summary.points, 21);
    }

    #[test]
    fn two_thirds_quorum_has_no_honest_region_in_base() {
        let params = ProtocolConfig::base(10, 7, 10.0, 1.0, 1000.0).validate().unwrap();
        assert!(simplex_scan(&params).unwrap().region(Strategy::Honest).is_empty());
    }

    #[test]
    fn fines_need_enough_byzantines_to_be_credible() {
        // c_c / L_e = 0.02, so εn = 2; n − Q = 40
        let params =
            ProtocolConfig::base(100, 60, 10.0, 1.0, 1000.0).with_fines(50.0).dominance_factor(5.0).validate().unwrap();
        let map = simplex_scan(&params).unwrap();
        let fs: BTreeSet<usize> = map.region(Strategy::Honest).iter().map(|&(f, _)| f).collect();
        assert_eq!(fs, (2..=40).collect());
        assert_eq!(map.summary.honest.f_min, Some(2));
    }

    #[test]
    fn oversized_scans_are_refused() {
        let params = ProtocolConfig::base(501, 300, 10.0, 1.0, 1000.0).validate().unwrap();
        assert_eq!(simplex_scan(&params), Err(ModelError::TooLarge { n: 501, limit: 500 }));
    }

    #[test]
    fn csv_has_expected_header_and_rows() {
        let params = ProtocolConfig::base(10, 7, 10.0, 1.0, 1000.0).validate().unwrap();
        let map = simplex_scan(&params).unwrap();
        let csv = map.to_csv_string().unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("f,g,barne_h,barne_e,barne_0,region_h,region_e,region_0"));
        assert_eq!(lines.count(), map.grid.len());
        assert!(csv.contains("3,4,false,"), "{csv}");
    }
}
