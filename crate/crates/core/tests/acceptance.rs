//! Acceptance run: prints one PASS/FAIL line per criterion, exits 1 on any failure.

use std::collections::BTreeSet;
use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use barne_core::endorsement::{
    as_generic_game, belief_matrix, classify_point, expected_via_cells, simplex_scan, Amendments, ProtocolConfig,
    ProtocolParams, Strategy,
};
use barne_core::game::fixtures::{CongestionGame, TableGame};
use barne_core::game::{
    bar_strong, barne_at_counts, barne_at_sets, check_inclusion_chain, delta_stable, find_non_monotone_witnesses,
    find_symmetric_mixed_barne, maxmin_table, prescribed_monotonicity_violations, Game, Norm, StrategyId,
    TypeAssignment,
};
use barne_core::simulator::{empirical_vs_analytic, run_simulation, SimConfig};
use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);
type Region = BTreeSet<(usize, usize)>;

const REWARD: f64 = 10.0;
const CHECK: f64 = 1.0;
const LOSS: f64 = 1000.0;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    let took = start.elapsed();
    ensure(took < limit, || format!("took {took:.1?}, limit {limit:?}"))
}

fn figure_configs() -> [ProtocolParams; 3] {
    [
        ProtocolConfig::base(60, 30, REWARD, CHECK, LOSS),
        ProtocolConfig::base(60, 40, REWARD, CHECK, LOSS).with_fines(30.0).dominance_factor(3.0),
        ProtocolConfig::base(60, 40, REWARD, CHECK, LOSS).with_traps(1000.0, 0.02),
    ]
    .map(|c| c.validate().expect("figure config is valid"))
}

fn small_grid() -> Vec<ProtocolParams> {
    let mut out = Vec::new();
    for n in 4..=6 {
        for q in 3..=4 {
            for amendments in Amendments::ALL {
                let base = ProtocolConfig::base(n, q, REWARD, CHECK, LOSS).quorum_bounds(false);
                let config = match amendments {
                    Amendments::Base => base,
                    Amendments::Fines => base.with_fines(100.0),
                    Amendments::FinesAndTraps => base.with_traps(1000.0, 0.05),
                };
                out.push(config.validate().expect("small config is valid"));
            }
        }
    }
    out
}

fn region_where(n: usize, pred: impl Fn(usize, usize) -> bool) -> Region {
    (0..n).flat_map(|f| (1..=n - f).map(move |g| (f, g))).filter(|&(f, g)| pred(f, g)).collect()
}

fn diff(label: &str, got: &Region, want: &Region) -> Result<(), String> {
    ensure(got == want, || {
        let extra: Vec<_> = got.difference(want).take(5).collect();
        let missing: Vec<_> = want.difference(got).take(5).collect();
        format!("{label}: extra {extra:?}, missing {missing:?}")
    })
}

fn ac1() -> Outcome {
    let start = Instant::now();
    let [base, fines, traps] = figure_configs();
    let expected = [
        region_where(60, |f, _| f == 29),
        region_where(60, |f, _| (2..=20).contains(&f)),
        region_where(60, |f, _| f <= 20),
    ];
    for (params, want) in [base, fines, traps].iter().zip(&expected) {
        let map = simplex_scan(params).map_err(|e| e.to_string())?;
        diff(&format!("{} honest", params.amendments), &map.region(Strategy::Honest), want)?;
    }
    within(start, Duration::from_secs(10))?;
    Ok(format!("three honest regions exact in {:.2?}", start.elapsed()))
}

fn ac2() -> Outcome {
    let configs = figure_configs();
    for params in &configs {
        let (n, q) = (params.n, params.quorum);
        let map = simplex_scan(params).map_err(|e| e.to_string())?;
        let abstain = if params.amendments == Amendments::Base {
            region_where(n, |f, g| f + g > n - q + 1 && f < q)
        } else {
            region_where(n, |f, g| f + g > n - q + 1)
        };
        diff(&format!("{} abstain", params.amendments), &map.region(Strategy::Abstain), &abstain)?;
        match params.amendments {
            Amendments::Base => {
                let sliver = ((CHECK / (LOSS - REWARD)) * n as f64).floor() as usize;
                let want = region_where(n, |f, g| f + g != q || f <= sliver.min(n - q));
                diff("Base blind", &map.region(Strategy::BlindEndorse), &want)?;
            }
            Amendments::FinesAndTraps => diff("traps blind", &map.region(Strategy::BlindEndorse), &Region::new())?,
            Amendments::Fines => {}
        }
    }
    Ok("abstain regions exact at all levels, blind-endorse exact in Base and empty with traps".into())
}

fn ac3() -> Outcome {
    let start = Instant::now();
    let mut checked = 0;
    for params in small_grid() {
        let game = as_generic_game(&params);
        for (f, g) in region_where(params.n, |_, _| true) {
            let verdict = classify_point(&params, f, g).map_err(|e| e.to_string())?;
            for s in Strategy::UNDOMINATED {
                let oracle = barne_at_counts(&game, f, g, s.index()).map_err(|e| e.to_string())?.holds;
                ensure(verdict.is_barne(s) == oracle, || {
                    format!(
                        "n={} Q={} {} ({f},{g}) {s}: classifier {} oracle {oracle}",
                        params.n,
                        params.quorum,
                        params.amendments,
                        verdict.is_barne(s)
                    )
                })?;
                checked += 1;
            }
        }
    }
    within(start, Duration::from_secs(300))?;
    Ok(format!("{checked} verdicts agree in {:.2?}", start.elapsed()))
}

fn ac4() -> Outcome {
    let faulty = Strategy::Faulty.index();
    let mut checked = 0;
    for params in small_grid() {
        let game = as_generic_game(&params);
        let h = game.prescribed();
        for (f, g) in region_where(params.n, |_, _| true) {
            let assign = TypeAssignment::canonical(f, g, h);
            let table = maxmin_table(&game, &assign, &vec![h; g], f).map_err(|e| e.to_string())?;
            let mut profile = vec![h; params.n];
            profile[..f].fill(faulty);
            let against_faulty = game.payoff(f, &profile);
            ensure((table[h].value - against_faulty).abs() <= game.tie_tolerance(), || {
                format!(
                    "n={} Q={} ({f},{g}): min {} but faulty gives {against_faulty}",
                    params.n, params.quorum, table[h].value
                )
            })?;
            checked += 1;
        }
    }
    Ok(format!("faulty play attains the minimum at {checked} points"))
}

fn ac5() -> Outcome {
    let mut fewer_rationals = None;
    let mut fewer_byzantines = None;
    for params in small_grid() {
        let game = as_generic_game(&params);
        let violations = prescribed_monotonicity_violations(&game).map_err(|e| e.to_string())?;
        ensure(violations.is_empty(), || format!("n={} Q={}: {violations:?}", params.n, params.quorum))?;
        let found = find_non_monotone_witnesses(&game).map_err(|e| e.to_string())?;
        fewer_rationals = fewer_rationals.or(found.fewer_rationals.map(|w| (params.n, params.quorum, w)));
        fewer_byzantines = fewer_byzantines.or(found.fewer_byzantines.map(|w| (params.n, params.quorum, w)));
    }
    let (n1, q1, w1) = fewer_rationals.ok_or("no witness for fewer rationals")?;
    let (n2, q2, w2) = fewer_byzantines.ok_or("no witness for fewer Byzantines")?;
    Ok(format!(
        "no counterexamples; witnesses n={n1} Q={q1} σ={} ({},{})→({},{}) and n={n2} Q={q2} σ={} ({},{})→({},{})",
        Strategy::ALL[w1.sigma],
        w1.f,
        w1.g,
        w1.f_prime,
        w1.g_prime,
        Strategy::ALL[w2.sigma],
        w2.f,
        w2.g,
        w2.f_prime,
        w2.g_prime
    ))
}

fn ac6() -> Outcome {
    let mut reports = 0;
    for n in [4, 5] {
        for k in 1..n {
            for prescribed in 0..2 {
                let game = CongestionGame::new(n, k).map_err(|e| e.to_string())?.with_prescribed(prescribed);
                for f_bar in 0..=n {
                    for g_bar in 0..=n - f_bar {
                        for delta in 0..=2 {
                            let r = check_inclusion_chain(&game, f_bar, g_bar, delta).map_err(|e| e.to_string())?;
                            ensure(r.violations == 0, || format!("congestion n={n} k={k}: {r:?}"))?;
                            reports += 1;
                        }
                    }
                }
            }
        }
    }
    for params in small_grid() {
        let game = as_generic_game(&params);
        for (f_bar, g_bar) in [(0, 1), (0, 2), (1, 1), (1, 2), (2, 1)] {
            for delta in 0..=1 {
                let r = check_inclusion_chain(&game, f_bar, g_bar, delta).map_err(|e| e.to_string())?;
                ensure(r.violations == 0, || format!("endorsement n={} Q={}: {r:?}", params.n, params.quorum))?;
                reports += 1;
            }
        }
    }
    Ok(format!("0 violations over {reports} chains"))
}

fn ac7() -> Outcome {
    let game = CongestionGame::new(4, 2).map_err(|e| e.to_string())?;
    let k = game.capacity();
    for f_bar in 1..=4 {
        for profile in (0..4).map(|_| 0..2).multi_cartesian_product() {
            let v = bar_strong(&game, f_bar, 1, &profile).map_err(|e| e.to_string())?;
            ensure(!v.holds, || format!("f̄={f_bar} {profile:?} is BAR-strong"))?;
        }
    }
    for f in 0..=4 {
        let g = 4 - f;
        let on_fast = k.saturating_sub(f).min(g);
        let candidate: Vec<StrategyId> =
            (0..g).map(|i| if i < on_fast { CongestionGame::FAST } else { CongestionGame::SAFE }).collect();
        let assign = TypeAssignment::canonical(f, g, game.prescribed());
        let v = barne_at_sets(&game, &assign, &candidate).map_err(|e| e.to_string())?;
        ensure(v.holds, || format!("f={f}: {on_fast} on the fast server is not a BARNE"))?;
    }
    let stable = delta_stable(&game, CongestionGame::SAFE, 3, 1, 1.0, Norm::Infinity).map_err(|e| e.to_string())?;
    ensure(stable.holds, || "all-safe at f=3 is not 1-stable".into())?;
    Ok("no strong profile for f̄≥1, fast-server BARNEs hold, all-safe 1-stable at f=3".into())
}

fn ac8() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut triples = Vec::new();
    for i in 0..20 {
        let n = rng.random_range(6..=16);
        let q = rng.random_range(n / 2 + 1..n);
        let base = ProtocolConfig::base(n, q, REWARD, CHECK, 200.0).quorum_bounds(false).dominance_factor(2.0);
        let config = match i % 3 {
            0 => base,
            1 => base.with_fines(50.0),
            _ => base.with_traps(50.0, 0.3),
        };
        let params = config.validate().map_err(|e| e.to_string())?;
        let f = rng.random_range(0..n);
        let g = rng.random_range(1..=n - f);
        let sigma = Strategy::UNDOMINATED[rng.random_range(0..3)];
        triples.push((params, f, g, sigma));
    }
    let mut exact = 0;
    for (params, f, g, sigma) in &triples {
        let point = barne_core::game::SimplexPoint::new(params.n, *f, *g).map_err(|e| e.to_string())?;
        let base = SimConfig::new(*params, point, *sigma, 200_000, 2024).map_err(|e| e.to_string())?;
        let mut results = Vec::new();
        for t in Strategy::UNDOMINATED {
            let c = if t == *sigma { base } else { base.with_deviant(*f, t).map_err(|e| e.to_string())? };
            results.push(run_simulation(&c).map_err(|e| e.to_string())?);
        }
        let report = empirical_vs_analytic(&results, params, point, *sigma).map_err(|e| e.to_string())?;
        ensure(report.all_within(), || {
            format!("n={} Q={} {} ({f},{g}) {sigma}: {:?}", params.n, params.quorum, params.amendments, report.entries)
        })?;
        exact += report.entries.iter().filter(|e| e.standard_error == 0.0).count();
    }
    within(start, Duration::from_secs(120))?;
    Ok(format!("20 triples × 3 strategies within 4 SE ({exact} deterministic exact) in {:.2?}", start.elapsed()))
}

fn ac9() -> Outcome {
    let (n, q, fine) = (60, 40, 1000.0);
    let rate = 1.01 * (REWARD + CHECK) / fine;
    let traps =
        ProtocolConfig::base(n, q, REWARD, CHECK, LOSS).with_traps(fine, rate).validate().map_err(|e| e.to_string())?;
    let fines =
        ProtocolConfig::base(n, q, REWARD, CHECK, LOSS).with_fines(fine).validate().map_err(|e| e.to_string())?;
    let mut points = 0;
    for (f, g) in region_where(n, |_, _| true) {
        let point = barne_core::game::SimplexPoint::new(n, f, g).map_err(|e| e.to_string())?;
        for sigma in Strategy::UNDOMINATED {
            let p = belief_matrix(&traps, point, sigma).map_err(|e| e.to_string())?;
            let (h, e) = (
                expected_via_cells(&traps, &p, Strategy::Honest),
                expected_via_cells(&traps, &p, Strategy::BlindEndorse),
            );
            ensure(h > e, || format!("traps ({f},{g}) others {sigma}: u_h={h} u_e={e}"))?;
        }
        points += 1;
        if f == 0 {
            let p = belief_matrix(&fines, point, Strategy::Honest).map_err(|e| e.to_string())?;
            let (h, e) = (
                expected_via_cells(&fines, &p, Strategy::Honest),
                expected_via_cells(&fines, &p, Strategy::BlindEndorse),
            );
            ensure(e > h, || format!("fines only (0,{g}): u_e={e} not above u_h={h}"))?;
        }
    }
    Ok(format!("u_h > u_e at {points} points with traps; u_e > u_h at f=0 with fines only"))
}

fn ac10() -> Outcome {
    let mut searched = 0;
    for params in small_grid() {
        let game = as_generic_game(&params);
        for (f, g) in region_where(params.n, |_, _| true) {
            let found = find_symmetric_mixed_barne(&game, f, g, 1e-6).map_err(|e| e.to_string())?;
            ensure(found.regret <= 1e-6, || format!("({f},{g}) regret {}", found.regret))?;
            if params.amendments == Amendments::FinesAndTraps && f + params.quorum <= params.n {
                ensure(found.strategy.as_pure() == Some(Strategy::Honest.index()), || {
                    format!("n={} Q={} ({f},{g}) returned {:?}", params.n, params.quorum, found.strategy)
                })?;
            }
            searched += 1;
        }
    }
    let fixture = TableGame::symmetric_two_player(vec!["A".into(), "B".into()], &[vec![0.0, 2.0], vec![1.0, 0.0]], 0)
        .map_err(|e| e.to_string())?;
    let found = find_symmetric_mixed_barne(&fixture, 0, 2, 1e-9).map_err(|e| e.to_string())?;
    let p = found.strategy.weights()[0];
    ensure((p - 2.0 / 3.0).abs() <= 1e-6, || format!("fixture mix p(A)={p}, expected 2/3"))?;
    Ok(format!("{searched} small-grid points solved; fixture p(A)={p:.9}"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("AC1 honest regions at scale", ac1),
        ("AC2 abstain and blind-endorse regions", ac2),
        ("AC3 classifier vs exhaustive oracle", ac3),
        ("AC4 faulty play is the Byzantine minimizer", ac4),
        ("AC5 monotonicity in rationals and witnesses", ac5),
        ("AC6 inclusion chain", ac6),
        ("AC7 congestion example", ac7),
        ("AC8 simulator vs expected payoffs", ac8),
        ("AC9 trap threshold boundary", ac9),
        ("AC10 mixed equilibrium finder", ac10),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let outcome = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".to_string()));
        match outcome {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(reason) => {
                failed += 1;
                println!("FAIL {name}: {reason}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
