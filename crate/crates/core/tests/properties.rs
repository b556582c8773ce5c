mod common;

use common::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tbdag::belief_game::{evaluate_pure, make_belief_game, NODE_BUDGET};
use tbdag::dag::{best_response, DagCfr, DagGeneric, RmVariant, EXPANSION_BUDGET};
use tbdag::game::{analyze, inflate_all, parse_game, serialize_game, NodeId, Side, SplitMode};
use tbdag::solver::{dag_best_response, enumeration_oracle, ENUMERATION_BUDGET};
use tbdag::tbdag::{build_tbdag, canonical_form, check_size_bounds, BuildOptions};
use tbdag::Game;

fn opts(reduce: bool) -> BuildOptions {
    BuildOptions { reduce, ..BuildOptions::default() }
}

fn level(g: &Game, dep: &[u32], d: u32) -> Vec<NodeId> {
    (0..g.num_nodes() as u32).filter(|&x| dep[x as usize] == d).collect()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, ..ProptestConfig::default() })]

    #[test]
    fn serialization_round_trips(g in random_game_strategy()) {
        let text = serialize_game(&g);
        let back = parse_game(&text).unwrap();
        prop_assert_eq!(serialize_game(&back), text);
    }

    #[test]
    fn split_matches_brute_force(g in random_game_strategy(), seed in any::<u64>()) {
        let dep = depths(&g);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for side in Side::BOTH {
            let an = analyze(&g, side).unwrap();
            for d in 0..=g.depth() {
                let all = level(&g, &dep, d);
                let subset: Vec<NodeId> = all.iter().copied().filter(|_| rng.gen_bool(0.6)).collect();
                for h in [all, subset] {
                    prop_assert_eq!(normalize(an.split_observation(&h).unwrap()), brute_split(&g, side, &h));
                    // Public blocks are unions of observation blocks.
                    for block in an.split_public(&h).unwrap() {
                        let p = an.public_state(block[0]);
                        prop_assert!(block.iter().all(|&x| an.public_state(x) == p));
                    }
                }
            }
        }
    }

    #[test]
    fn cliques_agree_with_definition(g in random_game_strategy()) {
        let par = parents(&g);
        let dep = depths(&g);
        for side in Side::BOTH {
            let an = analyze(&g, side).unwrap();
            for d in 0..=g.depth() {
                let h = level(&g, &dep, d);
                for &a in &h {
                    for &b in &h {
                        if a != b {
                            prop_assert_eq!(an.adjacent(a, b), brute_adjacent(&g, side, &par, &dep, a, b));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn dag_invariants(g in random_game_strategy(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for side in Side::BOTH {
            let an = analyze(&g, side).unwrap();
            let full = build_tbdag(&g, &an, opts(false)).unwrap();
            let red = build_tbdag(&g, &an, opts(true)).unwrap();
            prop_assert!(check_size_bounds(&full, &g, &an, 1.0).holds);
            prop_assert!(check_size_bounds(&red, &g, &an, 1.0).holds);
            let mut cfr = DagCfr::new(&red.problem, RmVariant::PredictiveRmPlus);
            for _ in 0..5 {
                let x = cfr.next_strategy();
                prop_assert!(red.problem.check_flow(&x, 1e-9).is_ok());
                let u: Vec<f64> = (0..red.num_obs()).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let dot: f64 = x.iter().zip(&u).map(|(a, b)| a * b).sum();
                prop_assert!(best_response(&red.problem, &u).unwrap().value >= dot - 1e-9);
                cfr.observe_utility(&u).unwrap();
            }
            // Reduction keeps the terminal realization polytope.
            let per_z: Vec<f64> = (0..g.terminals().len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let a = dag_best_response(&g, &full, &per_z).unwrap();
            let b = dag_best_response(&g, &red, &per_z).unwrap();
            prop_assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn dag_cfr_equals_generic(g in random_game_strategy(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for side in Side::BOTH {
            let an = analyze(&g, side).unwrap();
            let dag = build_tbdag(&g, &an, opts(false)).unwrap();
            let Ok(mut generic) = DagGeneric::new(&dag.problem, RmVariant::RmPlus, 2.0, EXPANSION_BUDGET) else { continue };
            let mut cfr = DagCfr::new(&dag.problem, RmVariant::RmPlus);
            for _ in 0..25 {
                let (x, y) = (cfr.next_strategy(), generic.next_strategy());
                let diff = x.iter().zip(&y).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                prop_assert!(diff <= 1e-12);
                let u: Vec<f64> = (0..dag.num_obs()).map(|_| rng.gen_range(-1.0..1.0)).collect();
                cfr.observe_utility(&u).unwrap();
                generic.observe_utility(&u);
            }
        }
    }

    #[test]
    fn oracle_agrees_with_dag(g in random_game_strategy(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for side in Side::BOTH {
            let an = analyze(&g, side).unwrap();
            let dag = build_tbdag(&g, &an, opts(true)).unwrap();
            // Any nonnegative opponent weights will do.
            let opp: Vec<f64> = (0..g.terminals().len()).map(|_| rng.gen_range(0.0..1.0)).collect();
            let Ok(o) = enumeration_oracle(&g, side, &opp, ENUMERATION_BUDGET) else { continue };
            let d = dag_best_response(&g, &dag, &opp).unwrap();
            prop_assert!((o.value - d).abs() <= 1e-9, "oracle {} dag {}", o.value, d);
        }
    }

    #[test]
    fn belief_game_is_equivalent(g in random_game_strategy(), seed in any::<u64>()) {
        let an = analyses(&g);
        let bg = make_belief_game(&g, [&an[0], &an[1]], SplitMode::Observation, NODE_BUDGET).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..10 {
            let pi: Vec<u32> = (0..g.infosets().len() as u32).map(|i| rng.gen_range(0..g.num_actions(i) as u32)).collect();
            let rho = [bg.map_pure_strategy(&g, Side::Max, &pi), bg.map_pure_strategy(&g, Side::Min, &pi)];
            let profile: Vec<u32> = (0..bg.game.infosets().len() as u32)
                .map(|i| rho[bg.game.side_of_infoset(i).unwrap().index()][i as usize])
                .collect();
            prop_assert_eq!(evaluate_pure(&g, &pi), evaluate_pure(&bg.game, &profile));
        }
    }

    #[test]
    fn inflation_is_idempotent_and_invisible(g in random_game_strategy()) {
        let once = inflate_all(&g).unwrap();
        let twice = inflate_all(&once).unwrap();
        prop_assert_eq!(serialize_game(&once), serialize_game(&twice));
        prop_assert!(once.infosets().len() >= g.infosets().len());
        for side in Side::BOTH {
            let a = build_tbdag(&g, &analyze(&g, side).unwrap(), opts(false)).unwrap();
            let b = build_tbdag(&once, &analyze(&once, side).unwrap(), opts(false)).unwrap();
            prop_assert_eq!(canonical_form(&a, &g), canonical_form(&b, &once));
        }
    }
}
