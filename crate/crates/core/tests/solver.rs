mod common;

use std::time::Instant;

use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tbdag::dag::{best_response, DagCfr, RmVariant};
use tbdag::game::{GameBuilder, Side};
use tbdag::solver::*;
use tbdag::tbdag::BuildOptions;
use tbdag::Game;

fn config(algorithm: Algorithm, eps: f64) -> SolveConfig {
    SolveConfig { algorithm, eps, ..SolveConfig::default() }
}

fn unreduced(g: &Game) -> Setup {
    Setup::new(g, BuildOptions { reduce: false, ..BuildOptions::default() }).unwrap()
}

/// Realization per terminal of the uniform strategy of `side`.
fn uniform_realization(setup: &Setup, side: Side) -> Vec<f64> {
    let dag = &setup.dags[side.index()];
    let x = DagCfr::new(&dag.problem, RmVariant::Rm).next_strategy();
    dag.terminal_realization(&x)
}

#[test]
fn fig2_value_is_zero() {
    let g = preset("fig2");
    let start = Instant::now();
    let r = solve(&g, &config(Algorithm::PcfrPlus, 1e-3)).unwrap();
    assert!(start.elapsed().as_secs_f64() < 5.0);
    assert!(r.converged && r.gap <= 1e-3);
    assert!(r.value.abs() <= 1e-3, "value {}", r.value);
}

#[test]
fn kuhn_value() {
    let g = preset("2K3");
    let r = solve(&g, &config(Algorithm::PcfrPlus, 1e-4)).unwrap();
    assert!(r.converged);
    assert!((r.value + 1.0 / 18.0).abs() <= 1e-3, "value {}", r.value);
}

#[test]
fn every_algorithm_converges_on_small_games() {
    for name in ["fig2", "2K3", "fig8"] {
        let g = preset(name);
        for algorithm in Algorithm::ALL {
            for mode in [UpdateMode::Simultaneous, UpdateMode::Alternating] {
                // The plain variants average uniformly and converge slowly.
                let eps = match algorithm {
                    Algorithm::Cfr | Algorithm::CfrMwu => 1e-2,
                    _ => 1e-3,
                };
                let cfg = SolveConfig { mode, ..config(algorithm, eps) };
                let r = solve(&g, &cfg).unwrap();
                assert!(r.converged, "{name} {} {mode:?}: gap {}", algorithm.name(), r.gap);
            }
        }
    }
}

#[test]
fn loose_eps_stops_at_first_iteration() {
    let g = preset("3K3[1,3]");
    let r = solve(&g, &config(Algorithm::Cfr, 100.0)).unwrap();
    assert_eq!(r.iterations, 1);
    assert!(r.converged);
    assert_eq!(r.log.len(), 1);
}

#[test]
fn config_validation() {
    let g = preset("fig2");
    assert!(solve(&g, &config(Algorithm::Cfr, 0.0)).is_err());
    assert!(solve(&g, &config(Algorithm::Cfr, f64::NAN)).is_err());
    assert!(solve(&g, &SolveConfig { max_iters: 0, ..SolveConfig::default() }).is_err());
    for a in Algorithm::ALL {
        assert_eq!(a.name().parse::<Algorithm>().unwrap(), a);
    }
    assert!("cfr++".parse::<Algorithm>().is_err());
    assert_eq!("alt".parse::<UpdateMode>().unwrap(), UpdateMode::Alternating);
}

#[test]
fn fig2_utilities_against_uniform_guess() {
    let g = preset("fig2");
    let setup = unreduced(&g);
    let [dmax, dmin] = &setup.dags;
    let y = DagCfr::new(&dmin.problem, RmVariant::Rm).next_strategy();
    let u = assemble_utility(&g, dmax, dmin, &y).unwrap();
    let parents = parents(&g);
    for (t, &z) in g.terminals().iter().enumerate() {
        let got = u[dmax.terminal_slot[t] as usize];
        let parent = parents[z as usize].unwrap();
        let guessed = g.is_side_node(parent, Side::Min);
        let expect = g.node(z).utility * g.chance_reach(z) * if guessed { 0.5 } else { 1.0 };
        assert!((got - expect).abs() < 1e-15, "z={z}");
        if guessed {
            assert_eq!(got.abs(), 0.5 * g.chance_reach(z));
        }
    }
    // Nonterminal slots carry nothing.
    let slots: std::collections::BTreeSet<u32> = dmax.terminal_slot.iter().copied().collect();
    for (o, &v) in u.iter().enumerate() {
        if !slots.contains(&(o as u32)) {
            assert_eq!(v, 0.0);
        }
    }
}

#[test]
fn pure_opponent_zeroes_avoided_terminals() {
    let g = preset("fig2");
    let setup = unreduced(&g);
    let [dmax, dmin] = &setup.dags;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..10 {
        let w: Vec<f64> = (0..dmin.num_obs()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let y = best_response(&dmin.problem, &w).unwrap().flow;
        let u = assemble_utility(&g, dmax, dmin, &y).unwrap();
        for t in 0..g.terminals().len() {
            if y[dmin.terminal_slot[t] as usize] == 0.0 {
                assert_eq!(u[dmax.terminal_slot[t] as usize], 0.0);
            }
        }
    }
}

#[test]
fn probability_flow_conservation() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for name in ["fig2", "3K3[2,3]", "2K4", "fig9-C6"] {
        let g = preset(name);
        for reduce in [false, true] {
            let setup = Setup::new(&g, BuildOptions { reduce, ..BuildOptions::default() }).unwrap();
            let [dmax, dmin] = &setup.dags;
            let mut a = DagCfr::new(&dmax.problem, RmVariant::Rm);
            let mut b = DagCfr::new(&dmin.problem, RmVariant::RmPlus);
            for _ in 0..20 {
                let (x, y) = (a.next_strategy(), b.next_strategy());
                let mass: f64 = g
                    .terminals()
                    .iter()
                    .enumerate()
                    .map(|(t, &z)| {
                        g.chance_reach(z) * x[dmax.terminal_slot[t] as usize] * y[dmin.terminal_slot[t] as usize]
                    })
                    .sum();
                assert!((mass - 1.0).abs() < 1e-9, "{name}: {mass}");
                let ua: Vec<f64> = (0..dmax.num_obs()).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let ub: Vec<f64> = (0..dmin.num_obs()).map(|_| rng.gen_range(-1.0..1.0)).collect();
                a.observe_utility(&ua).unwrap();
                b.observe_utility(&ub).unwrap();
            }
        }
    }
}

#[test]
fn oracle_matches_dag_best_response_against_uniform() {
    for name in ["3K3[1,2]", "3K3[1,3]", "3K3[2,3]", "fig2", "fig8", "2K3"] {
        let g = preset(name);
        let setup = Setup::new(&g, BuildOptions::default()).unwrap();
        for side in Side::BOTH {
            let opp = uniform_realization(&setup, side.opponent());
            let dag = dag_best_response(&g, &setup.dags[side.index()], &opp).unwrap();
            let oracle = enumeration_oracle(&g, side, &opp, ENUMERATION_BUDGET).unwrap();
            assert!((dag - oracle.value).abs() <= 1e-9, "{name} {side}: {dag} vs {}", oracle.value);
        }
    }
}

#[test]
fn oracle_on_single_infoset_side() {
    let mut b = GameBuilder::new(&["chance", "P1", "P2"], &[1], &[2]);
    let kids: Vec<(String, usize)> = [0.25, -1.0, 0.75].iter().enumerate().map(|(i, &u)| (format!("a{i}"), b.terminal(u))).collect();
    let root = b.player(1, "only", kids);
    let g = b.build(root).unwrap();
    let r = enumeration_oracle(&g, Side::Max, &[1.0; 3], ENUMERATION_BUDGET).unwrap();
    assert_eq!(r.value, 0.75);
    assert_eq!(r.strategy, vec![Some(2)]);
    let r = enumeration_oracle(&g, Side::Min, &[1.0, 0.0, 0.0], ENUMERATION_BUDGET).unwrap();
    assert_eq!(r.value, -0.25);
}

#[test]
fn oracle_budget_and_length_errors() {
    let g = preset("2L133");
    let opp = vec![1.0; g.terminals().len()];
    assert!(enumeration_oracle(&g, Side::Max, &opp, 1000).unwrap_err().is_budget());
    assert!(enumeration_oracle(&g, Side::Max, &opp[1..], 1000).is_err());
}

#[test]
fn three_player_kuhn_certified_by_oracle() {
    for name in ["3K3[1,2]", "3K3[1,3]", "3K3[2,3]"] {
        let g = preset(name);
        let r = solve(&g, &config(Algorithm::PcfrPlus, 1e-4)).unwrap();
        assert!(r.converged && r.iterations <= 100_000, "{name}: gap {}", r.gap);
        let last = r.log.last().unwrap();
        let omax = enumeration_oracle(&g, Side::Max, &r.y_avg, ENUMERATION_BUDGET).unwrap();
        let omin = enumeration_oracle(&g, Side::Min, &r.x_avg, ENUMERATION_BUDGET).unwrap();
        assert!((omax.value - last.br_max).abs() <= 1e-6, "{name}");
        assert!((omin.value - last.br_min).abs() <= 1e-6, "{name}");
    }
}

#[test]
fn fig2_min_cannot_exploit_the_average() {
    let g = preset("fig2");
    let r = solve(&g, &config(Algorithm::PcfrPlus, 1e-3)).unwrap();
    let o = enumeration_oracle(&g, Side::Min, &r.x_avg, ENUMERATION_BUDGET).unwrap();
    assert!(o.value <= 1e-3);
}

#[test]
fn gap_is_zero_at_an_exact_equilibrium() {
    // Matching pennies: MIN does not see MAX's coin.
    let mut b = GameBuilder::new(&["chance", "P1", "P2"], &[1], &[2]);
    let mut heads_tails = Vec::new();
    for mine in 0..2 {
        let kids: Vec<(String, usize)> =
            (0..2).map(|theirs| (format!("g{theirs}"), b.terminal(if mine == theirs { 1.0 } else { -1.0 }))).collect();
        heads_tails.push((format!("c{mine}"), b.player(2, "guess", kids)));
    }
    let root = b.player(1, "coin", heads_tails);
    let g = b.build(root).unwrap();
    let setup = Setup::new(&g, BuildOptions::default()).unwrap();
    let x = DagCfr::new(&setup.dags[0].problem, RmVariant::Rm).next_strategy();
    let y = DagCfr::new(&setup.dags[1].problem, RmVariant::Rm).next_strategy();
    assert!(gap(&g, &setup.dags, &x, &y).unwrap().abs() <= 1e-9);
    assert!(expected_value(&g, &setup.dags, &x, &y).abs() <= 1e-12);
}

#[test]
fn gap_is_bounded_by_average_regret() {
    for name in ["fig2", "3K3[1,3]", "2K3"] {
        let g = preset(name);
        for algorithm in [Algorithm::Cfr, Algorithm::CfrMwu] {
            let cfg = SolveConfig { eps: 1e-9, max_iters: 500, log_every: 5, ..config(algorithm, 1e-9) };
            let r = solve(&g, &cfg).unwrap();
            for p in &r.log {
                assert!(p.gap >= -1e-9);
                assert!(p.gap <= p.regret_bound + 1e-9, "{name} {} t={}: {} > {}", algorithm.name(), p.iter, p.gap, p.regret_bound);
            }
        }
    }
}

#[test]
fn mwu_gap_within_rate_bound() {
    for (name, g) in small_presets(2000) {
        let cfg = SolveConfig { max_iters: 2000, log_every: 10, ..config(Algorithm::CfrMwu, 1e-9) };
        let r = solve(&g, &cfg).unwrap();
        for p in r.log.iter().filter(|p| p.iter >= 10) {
            assert!(p.gap <= 4.0 * p.bound, "{name} t={}: {} > 4 * {}", p.iter, p.gap, p.bound);
        }
    }
}

#[test]
fn solves_are_deterministic() {
    let g = preset("3K3[2,3]");
    for mode in [UpdateMode::Simultaneous, UpdateMode::Alternating] {
        let cfg = SolveConfig { max_iters: 300, mode, ..config(Algorithm::PcfrPlus, 1e-9) };
        let (a, b) = (solve(&g, &cfg).unwrap(), solve(&g, &cfg).unwrap());
        assert_eq!(a.iterations, b.iterations);
        assert_eq!(a.x_avg, b.x_avg);
        assert_eq!(a.y_avg, b.y_avg);
        let strip = |r: &SolveReport| r.log.iter().map(|p| (p.iter, p.gap, p.value)).collect::<Vec<_>>();
        assert_eq!(strip(&a), strip(&b));
    }
}

#[test]
fn averages_are_feasible() {
    for name in ["fig2", "3K3[1,2]", "fig9-C6", "3D2[1,3]"] {
        let g = preset(name);
        let setup = Setup::new(&g, BuildOptions::default()).unwrap();
        for algorithm in Algorithm::ALL {
            let cfg = SolveConfig { max_iters: 200, ..config(algorithm, 1e-9) };
            let r = solve_with(&g, &setup, &cfg, |_| {}).unwrap();
            setup.dags[0].problem.check_flow(&r.x_flow, 1e-8).unwrap();
            setup.dags[1].problem.check_flow(&r.y_flow, 1e-8).unwrap();
            assert!(r.x_avg.iter().chain(&r.y_avg).all(|&v| (-1e-12..=1.0 + 1e-9).contains(&v)));
        }
    }
}

#[test]
fn strategy_documents_round_trip() {
    let g = preset("fig2");
    let setup = Setup::new(&g, BuildOptions::default()).unwrap();
    let r = solve_with(&g, &setup, &config(Algorithm::PcfrPlus, 1e-3), |_| {}).unwrap();
    for (side, flow, avg) in [(Side::Max, &r.x_flow, &r.x_avg), (Side::Min, &r.y_flow, &r.y_avg)] {
        let doc = strategy_json(&g, &setup.dags[side.index()], flow, true);
        assert!(doc.get("behavioral").is_some());
        let (s, back) = parse_realization(&g, &doc).unwrap();
        assert_eq!(s, side);
        assert!(back.iter().zip(avg.iter()).all(|(a, b)| (a - b).abs() < 1e-12));
    }
}

#[test]
fn csv_log_layout() {
    let g = preset("fig2");
    let r = solve(&g, &SolveConfig { max_iters: 30, ..config(Algorithm::Cfr, 1e-9) }).unwrap();
    let mut out = Vec::new();
    write_csv(&mut out, &r.log, Some("manifest {}")).unwrap();
    let text = String::from_utf8(out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "# manifest {}");
    assert_eq!(lines[1], "iter,time_ms,gap,br_max,br_min,value,bound");
    assert_eq!(lines.len(), 2 + r.log.len());
    assert!(lines[2].starts_with("1,"));
    assert!(lines.iter().skip(2).all(|l| l.split(',').count() == 7));
}
