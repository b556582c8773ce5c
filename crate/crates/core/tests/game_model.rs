mod common;

use common::fig2::*;
use common::*;
use tbdag::game::*;
use tbdag::Error;

fn doc(nodes: &str) -> String {
    format!(r#"{{"players":["chance","P1","P2"],"teams":{{"max":[1],"min":[2]}},"root":0,"nodes":{nodes}}}"#)
}

#[test]
fn fig2_counts() {
    let g = preset("fig2");
    assert_eq!(g.num_nodes(), 23);
    assert_eq!(g.terminals().len(), 12);
    assert_eq!(g.num_nontrivial_infosets(), 4);
    assert_eq!(g.depth(), 4);
    assert_eq!(g.branching(), 2);
    // Ids used throughout the tests.
    assert_eq!(g.infoset(I_DE).members, vec![D, E]);
    assert_eq!(g.infoset(I_FG).members, vec![F, G]);
    assert_eq!(g.infoset(I_HI).members, vec![H, I]);
    assert_eq!(g.infoset(I_LM).members, vec![L, M]);
    assert_eq!(g.infoset(I_B).members, vec![B]);
    assert_eq!(g.infoset(I_C).members, vec![C]);
}

#[test]
fn single_terminal_game() {
    let g = parse_game(&doc(r#"[{"kind":"terminal","actions":[],"utility":2.5}]"#)).unwrap();
    assert_eq!(g.num_nodes(), 1);
    assert_eq!(g.node(0).utility, 2.5);
    assert_eq!(g.terminals(), &[0]);
}

#[test]
fn rejects_non_timeable_infoset() {
    // Infoset 7 has members at depths 1 and 2.
    let text = doc(
        r#"[
        {"kind":"chance","actions":[{"label":"x","child":1,"prob":0.5},{"label":"y","child":2,"prob":"1/2"}]},
        {"kind":"player","player":1,"infoset":7,"actions":[{"label":"a","child":3},{"label":"b","child":4}]},
        {"kind":"player","player":2,"infoset":3,"actions":[{"label":"c","child":5}]},
        {"kind":"terminal","utility":1},
        {"kind":"terminal","utility":-1},
        {"kind":"player","player":1,"infoset":7,"actions":[{"label":"a","child":6},{"label":"b","child":7}]},
        {"kind":"terminal","utility":0},
        {"kind":"terminal","utility":0}
    ]"#,
    );
    let err = parse_game(&text).unwrap_err();
    assert!(matches!(err, Error::Invalid(_)), "{err}");
    assert!(err.to_string().contains("depth"), "{err}");
}

#[test]
fn rejects_bad_documents() {
    let cases = [
        ("not json", "{"),
        (
            "dangling child",
            r#"[{"kind":"player","player":1,"infoset":0,"actions":[{"label":"a","child":9}]}]"#,
        ),
        (
            "probabilities",
            r#"[{"kind":"chance","actions":[{"label":"a","child":1,"prob":0.5},{"label":"b","child":2,"prob":0.4}]},
                {"kind":"terminal","utility":0},{"kind":"terminal","utility":0}]"#,
        ),
        ("no actions", r#"[{"kind":"player","player":1,"infoset":0,"actions":[]}]"#),
        (
            "action mismatch",
            r#"[{"kind":"chance","actions":[{"label":"x","child":1,"prob":0.5},{"label":"y","child":4,"prob":0.5}]},
                {"kind":"player","player":1,"infoset":0,"actions":[{"label":"a","child":2},{"label":"b","child":3}]},
                {"kind":"terminal","utility":0},{"kind":"terminal","utility":0},
                {"kind":"player","player":1,"infoset":0,"actions":[{"label":"b","child":5},{"label":"a","child":6}]},
                {"kind":"terminal","utility":0},{"kind":"terminal","utility":0}]"#,
        ),
    ];
    for (what, nodes) in cases {
        let text = if nodes == "{" { nodes.to_string() } else { doc(nodes) };
        assert!(parse_game(&text).is_err(), "{what} accepted");
    }
    let empty = r#"{"players":[],"teams":{"max":[],"min":[]},"root":0,"nodes":[{"kind":"terminal","utility":0}]}"#;
    assert!(parse_game(empty).is_err());
}

#[test]
fn rational_probabilities() {
    let text = doc(
        r#"[{"kind":"chance","actions":[{"label":"a","child":1,"prob":"1/3"},{"label":"b","child":2,"prob":"2/3"}]},
            {"kind":"terminal","utility":3},{"kind":"terminal","utility":0}]"#,
    );
    let g = parse_game(&text).unwrap();
    assert!((g.chance_reach(1) - 1.0 / 3.0).abs() < 1e-15);
}

#[test]
fn round_trip() {
    for name in ["fig2", "3K3", "3K3[1,3]", "2L133", "3D2", "fig8", "fig9-C6", "wc-k1-b2-d5"] {
        let g = preset(name);
        let back = parse_game(&serialize_game(&g)).unwrap();
        assert_eq!(g, back, "{name}");
    }
}

#[test]
fn coordinator_views() {
    let g = preset("fig2");
    let max = CoordinatorView::new(&g, Side::Max).unwrap();
    assert_eq!(max.infosets().len(), 4);
    assert!(!max.perfect_recall());
    assert_eq!(max.seq(g.root()), 0);
    assert_eq!(max.seq_len(max.seq(D)), 1);

    let k2 = preset("2K3");
    for side in Side::BOTH {
        let v = CoordinatorView::new(&k2, side).unwrap();
        assert!(v.perfect_recall());
        let own: Vec<u32> = k2.side_infosets(side);
        assert_eq!(v.infosets(), own.as_slice());
    }

    // Bracket lists the MIN team: players 1 and 3 against 2.
    let k3 = preset("3K3[1,3]");
    assert_eq!(k3.team(Side::Min), vec![1, 3]);
    assert_eq!(k3.team(Side::Max), vec![2]);
    let v = CoordinatorView::new(&k3, Side::Max).unwrap();
    assert!(v.perfect_recall());
}

#[test]
fn sequences_extend_by_at_most_one_pair() {
    for (_, g) in small_presets(2000) {
        let par = parents(&g);
        for side in Side::BOTH {
            let v = CoordinatorView::new(&g, side).unwrap();
            for h in 1..g.num_nodes() as u32 {
                let p = par[h as usize].unwrap();
                let (sp, sh) = (v.seq(p), v.seq(h));
                assert!(sh == sp || v.seq_parent(sh) == Some(sp));
            }
        }
    }
}

#[test]
fn fig3_public_states_and_k() {
    let g = preset("fig2");
    let an = analyze(&g, Side::Max).unwrap();
    assert_eq!(an.k(), 3);
    let p = an.public_state(D);
    assert_eq!(an.li_union(p), vec![I_B, I_DE, I_C]);
    let mut states: Vec<Vec<NodeId>> =
        (0..an.num_public_states() as u32).map(|p| an.public_members(p).to_vec()).filter(|m| m.len() > 1 || !g.node(m[0]).is_terminal()).collect();
    states.sort();
    let mut expected = vec![vec![A], vec![B, C], vec![D, E], vec![F, G], vec![H], vec![I], vec![L], vec![M]];
    expected.sort();
    assert_eq!(states, expected);
    assert_eq!(an.num_public_states(), 8 + 12);
    assert!(!an.perfect_recall());
}

#[test]
fn perfect_recall_sides_have_k_one() {
    for (name, g) in small_presets(20_000) {
        for side in Side::BOTH {
            let an = analyze(&g, side).unwrap();
            // Idle sides own no infosets and have nothing to forget.
            if an.perfect_recall() {
                let expected = usize::from(!g.side_infosets(side).is_empty());
                assert_eq!(an.k(), expected, "{name} {side}");
            }
        }
    }
}

#[test]
fn split_examples() {
    let g = preset("fig2");
    let an = analyze(&g, Side::Max).unwrap();
    assert_eq!(an.split_observation(&[D, E, F]).unwrap(), vec![vec![D, E], vec![F]]);
    assert_eq!(an.split_observation(&[H]).unwrap(), vec![vec![H]]);
    assert!(an.split_observation(&[D, H]).is_err());
    assert!(an.split_public(&[]).unwrap().is_empty());
    assert_eq!(an.split_public(&[D, E]).unwrap(), vec![vec![D, E]]);
}

#[test]
fn fig8_public_vs_observation_split() {
    let g = preset("fig8");
    let an = analyze(&g, Side::Max).unwrap();
    // Second-layer nodes C, E, G under the left chance node.
    let left = g.node(g.node(0).actions[0].child);
    let ceg: Vec<NodeId> = left.actions.iter().map(|a| a.child).collect();
    assert_eq!(an.split_public(&ceg).unwrap(), vec![ceg.clone()]);
    assert_eq!(an.split_observation(&ceg).unwrap(), ceg.iter().map(|&x| vec![x]).collect::<Vec<_>>());
}

#[test]
fn fig9_split_matches_brute_force() {
    for c in [4, 6] {
        let g = preset(&format!("fig9-C{c}"));
        let an = analyze(&g, Side::Max).unwrap();
        let dep = depths(&g);
        for level in 0..=g.depth() {
            let h: Vec<NodeId> = (0..g.num_nodes() as u32).filter(|&x| dep[x as usize] == level).collect();
            assert_eq!(normalize(an.split_observation(&h).unwrap()), brute_split(&g, Side::Max, &h), "C={c} level {level}");
        }
    }
}

#[test]
fn cliques_sound_and_complete() {
    for (name, g) in small_presets(500) {
        let par = parents(&g);
        let dep = depths(&g);
        for side in Side::BOTH {
            let an = analyze(&g, side).unwrap();
            for a in 0..g.num_nodes() as u32 {
                for b in a + 1..g.num_nodes() as u32 {
                    if dep[a as usize] == dep[b as usize] {
                        assert_eq!(an.adjacent(a, b), brute_adjacent(&g, side, &par, &dep, a, b), "{name} {side} {a} {b}");
                    }
                }
            }
            for c in 0..an.num_cliques() {
                let m = an.clique_members(c);
                for (i, &x) in m.iter().enumerate() {
                    for &y in &m[i + 1..] {
                        assert!(brute_adjacent(&g, side, &par, &dep, x, y));
                    }
                }
            }
        }
    }
}

#[test]
fn binarize_limits_branching_and_keeps_k() {
    let fig2 = preset("fig2");
    assert!(!analyze(&fig2, Side::Max).unwrap().action_recall());
    assert!(matches!(binarize_actions(&fig2), Err(tbdag::Error::Unsupported(_))));
    for name in ["3K3", "3K3[2,3]", "2K4", "3D2", "3L133[1,3]"] {
        let g = preset(name);
        let bin = binarize_actions(&g).unwrap();
        for (h, n) in bin.nodes().iter().enumerate() {
            if bin.is_side_node(h as u32, Side::Max) || bin.is_side_node(h as u32, Side::Min) {
                assert!(n.actions.len() <= 2, "{name}");
            }
        }
        for side in Side::BOTH {
            assert_eq!(analyze(&g, side).unwrap().k(), analyze(&bin, side).unwrap().k(), "{name} {side}");
        }
    }
}

#[test]
fn binarize_preserves_value() {
    use tbdag::solver::{solve, SolveConfig};
    let cfg = SolveConfig { eps: 1e-4, ..Default::default() };
    for name in ["2K3", "3K3[1,3]", "3K3[2,3]"] {
        let g = preset(name);
        let a = solve(&g, &cfg).unwrap();
        let b = solve(&binarize_actions(&g).unwrap(), &cfg).unwrap();
        assert!((a.value - b.value).abs() <= 1e-3, "{name}: {} vs {}", a.value, b.value);
    }
}

#[test]
fn inflate_fixpoints() {
    for c in 2..=20 {
        let g = preset(&format!("fig9-C{c}"));
        assert_eq!(inflate_all(&g).unwrap(), g, "fig9 C={c}");
    }
    let k = preset("2K3");
    assert_eq!(inflate(&k, Side::Max).unwrap(), k);
    for (name, g) in small_presets(2000) {
        let once = inflate_all(&g).unwrap();
        assert_eq!(inflate_all(&once).unwrap(), once, "{name}");
    }
}

#[test]
fn fig8_inflation_splits_last_layer_pairs() {
    let g = preset("fig8");
    let inflated = inflate(&g, Side::Max).unwrap();
    assert_eq!(g.num_nontrivial_infosets(), 5);
    assert_eq!(inflated.num_nontrivial_infosets(), 0);
    assert_eq!(inflated.num_nodes(), g.num_nodes());
}
