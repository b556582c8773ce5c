//! Small hand-built games: the signaling game, the public-state
//! counterexample, the inflation family and the worst-case chain.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::game::{Game, GameBuilder};

/// Nature flips a bit; P1 (knows it) picks one of two routes; P2 sees only
/// the route family; P3 (MIN) tries to guess the bit. MAX = {P1, P2}.
pub fn signaling_fig2() -> Result<Game> {
    let mut b = GameBuilder::new(&["chance", "P1", "P2", "P3"], &[1, 2], &[3]);
    let z1 = b.terminal(1.0);
    let z2 = b.terminal(-1.0);
    let h = b.player(3, "hi", vec![("0", z1), ("1", z2)]);
    let z3 = b.terminal(-1.0);
    let d = b.player(2, "de", vec![("0", h), ("1", z3)]);
    let z5 = b.terminal(-1.0);
    let z6 = b.terminal(1.0);
    let i = b.player(3, "hi", vec![("0", z5), ("1", z6)]);
    let z4 = b.terminal(-1.0);
    let e = b.player(2, "de", vec![("0", z4), ("1", i)]);
    let z7 = b.terminal(1.0);
    let z8 = b.terminal(-1.0);
    let l = b.player(3, "lm", vec![("0", z7), ("1", z8)]);
    let z9 = b.terminal(-1.0);
    let f = b.player(2, "fg", vec![("0", l), ("1", z9)]);
    let z11 = b.terminal(-1.0);
    let z12 = b.terminal(1.0);
    let m = b.player(3, "lm", vec![("0", z11), ("1", z12)]);
    let z10 = b.terminal(-1.0);
    let g = b.player(2, "fg", vec![("0", z10), ("1", m)]);
    let nb = b.player(1, "b", vec![("l", d), ("r", f)]);
    let nc = b.player(1, "c", vec![("L", e), ("R", g)]);
    let a = b.chance(vec![("0", 0.5, nb), ("1", 0.5, nc)]);
    b.build(a)
}

/// P1 picks a side; Nature then reaches three of six second-layer nodes
/// (C, E, G on the left, D, F, H on the right). Last-layer infosets pair
/// neighbouring leaf parents across subtrees, chaining C-D-E-F-G-H.
pub fn public_counterexample_fig8() -> Result<Game> {
    let mut b = GameBuilder::new(&["chance", "P1", "idle"], &[1], &[2]);
    // Leaf parents 0..12, two per second-layer node in order C D E F G H.
    let infoset_of = |j: usize| -> String {
        if j == 0 || j == 11 {
            format!("leaf{j}")
        } else {
            format!("pair{}", j.div_ceil(2))
        }
    };
    let mut second = Vec::new();
    for x in 0..6 {
        let mut kids = Vec::new();
        for j in [2 * x, 2 * x + 1] {
            let z0 = b.terminal(((j % 3) as f64) - 1.0);
            let z1 = b.terminal((((j + 1) % 3) as f64) - 1.0);
            kids.push(b.player(1, &infoset_of(j), vec![("0", z0), ("1", z1)]));
        }
        let name = ["C", "D", "E", "F", "G", "H"][x];
        second.push(b.player(1, name, vec![("0", kids[0]), ("1", kids[1])]));
    }
    let third = 1.0 / 3.0;
    let a = b.chance(vec![("C", third, second[0]), ("E", third, second[2]), ("G", third, second[4])]);
    let bb = b.chance(vec![("D", third, second[1]), ("F", third, second[3]), ("H", third, second[5])]);
    let root = b.player(1, "root", vec![("A", a), ("B", bb)]);
    b.build(root)
}

/// Nature picks c in 1..=C. At layer t (1..=C-2) the nodes with c = t and
/// c = t+2 share an infoset and choose a in {0, 2}; play continues only if
/// c = t + a. Survivors reach P1, who knows c and names c or c+1; P2 sees
/// only the named number and picks one of two options.
pub fn inflation_counterexample_fig9(c_max: u32) -> Result<Game> {
    if c_max < 2 {
        return Err(Error::Params("fig9 requires C > 1".into()));
    }
    let mut b = GameBuilder::new(&["chance", "P1", "P2", "idle"], &[1, 2], &[3]);
    let mut outcomes = Vec::new();
    let prob = 1.0 / c_max as f64;
    for c in 1..=c_max {
        // Final two moves.
        let mut named = Vec::new();
        for n in [c, c + 1] {
            let g0 = b.terminal(if n == c { 1.0 } else { -1.0 });
            let g1 = b.terminal(if n == c { -1.0 } else { 1.0 });
            named.push((n.to_string(), b.player(2, &format!("named{n}"), vec![("g0", g0), ("g1", g1)])));
        }
        let mut cur = b.player(1, &format!("knows{c}"), named);
        for t in (1..=c_max.saturating_sub(2)).rev() {
            cur = if c == t || c == t + 2 {
                let stop = b.terminal(0.0);
                let (a0, a2) = if c == t { (cur, stop) } else { (stop, cur) };
                b.player(1, &format!("layer{t}"), vec![("0", a0), ("2", a2)])
            } else {
                b.chance(vec![("pass", 1.0, cur)])
            };
        }
        outcomes.push((c.to_string(), prob, cur));
    }
    let root = b.chance(outcomes);
    b.build(root)
}

/// Chain of d-3 mini-games. Each mini-game root (Nature) leads to k MAX
/// subgame roots, k MIN subgame roots and the next mini-game. A subgame
/// root has b actions: b-1 lead to a same-player node then a terminal,
/// the last to a Nature step, a same-player node, then a terminal. All
/// non-root player nodes of one side at the same depth share an infoset.
pub fn worst_case(k: u32, b_actions: u32, d: u32) -> Result<Game> {
    if d < 4 {
        return Err(Error::Params("worst_case requires d >= 4".into()));
    }
    if k < 1 || b_actions < 2 {
        return Err(Error::Params("worst_case requires k >= 1 and b >= 2".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(((k as u64) << 32) | ((b_actions as u64) << 16) | d as u64);
    let mut b = GameBuilder::new(&["chance", "P1", "P2"], &[1], &[2]);
    let games = d - 3;
    let mut next: Option<usize> = None;
    for j in (0..games).rev() {
        let mut kids: Vec<(String, usize)> = Vec::new();
        for player in [1u32, 2] {
            for idx in 0..k {
                let mut acts = Vec::new();
                for a in 0..b_actions {
                    let u = rng.gen_range(-4..=4) as f64 / 4.0;
                    let z = b.terminal(u);
                    let child = if a + 1 < b_actions {
                        b.player(player, &format!("tier{player}:{}", j + 2), vec![("go", z)])
                    } else {
                        let inner = b.player(player, &format!("tier{player}:{}", j + 3), vec![("go", z)]);
                        b.chance(vec![("step", 1.0, inner)])
                    };
                    acts.push((a.to_string(), child));
                }
                let root = b.player(player, &format!("root{player}:{j}:{idx}"), acts);
                kids.push((format!("p{player}s{idx}"), root));
            }
        }
        if let Some(n) = next {
            kids.push(("next".to_string(), n));
        }
        let p = 1.0 / kids.len() as f64;
        next = Some(b.chance(kids.into_iter().map(|(l, c)| (l, p, c)).collect()));
    }
    b.build(next.unwrap())
}
