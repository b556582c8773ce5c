#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;
use tbdag::game::{Game, GameBuilder, NodeId, Side, StructuralAnalysis};
use tbdag::zoo::{generate, list_presets};

/// Node ids of the signaling game in preorder.
pub mod fig2 {
    pub const A: u32 = 0;
    pub const B: u32 = 1;
    pub const D: u32 = 2;
    pub const H: u32 = 3;
    pub const F: u32 = 7;
    pub const L: u32 = 8;
    pub const C: u32 = 12;
    pub const E: u32 = 13;
    pub const I: u32 = 15;
    pub const G: u32 = 18;
    pub const M: u32 = 20;
    /// Infoset ids by first appearance.
    pub const I_B: u32 = 0;
    pub const I_DE: u32 = 1;
    pub const I_HI: u32 = 2;
    pub const I_FG: u32 = 3;
    pub const I_LM: u32 = 4;
    pub const I_C: u32 = 5;
}

pub fn preset(name: &str) -> Game {
    generate(&tbdag::zoo::preset(name).unwrap()).unwrap()
}

/// Presets with at most `max_nodes` nodes.
pub fn small_presets(max_nodes: usize) -> Vec<(String, Game)> {
    list_presets()
        .into_iter()
        .filter_map(|(name, spec)| {
            let g = generate(&spec).ok()?;
            (g.num_nodes() <= max_nodes).then_some((name, g))
        })
        .collect()
}

pub fn parents(g: &Game) -> Vec<Option<NodeId>> {
    let mut p = vec![None; g.num_nodes()];
    for (h, n) in g.nodes().iter().enumerate() {
        for a in &n.actions {
            p[a.child as usize] = Some(h as NodeId);
        }
    }
    p
}

pub fn depths(g: &Game) -> Vec<u32> {
    let par = parents(g);
    let mut d = vec![0; g.num_nodes()];
    // Preorder: parents precede children.
    for h in 1..g.num_nodes() {
        d[h] = d[par[h].unwrap() as usize] + 1;
    }
    d
}

/// Whether `a` is an ancestor of (or equal to) `b`.
pub fn precedes(par: &[Option<NodeId>], a: NodeId, mut b: NodeId) -> bool {
    loop {
        if a == b {
            return true;
        }
        match par[b as usize] {
            Some(p) => b = p,
            None => return false,
        }
    }
}

/// Connectivity adjacency from the definition: same-depth h != h' are
/// adjacent iff some side infoset has descendants of both.
pub fn brute_adjacent(g: &Game, side: Side, par: &[Option<NodeId>], dep: &[u32], a: NodeId, b: NodeId) -> bool {
    if a == b || dep[a as usize] != dep[b as usize] {
        return false;
    }
    g.side_infosets(side).into_iter().any(|i| {
        let m = &g.infoset(i).members;
        m.iter().any(|&x| precedes(par, a, x)) && m.iter().any(|&x| precedes(par, b, x))
    })
}

/// Connected components of the brute-force graph restricted to `h`.
pub fn brute_split(g: &Game, side: Side, h: &[NodeId]) -> Vec<Vec<NodeId>> {
    let par = parents(g);
    let dep = depths(g);
    let mut comp: Vec<usize> = (0..h.len()).collect();
    fn find(c: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while c[r] != r {
            r = c[r];
        }
        c[x] = r;
        r
    }
    for i in 0..h.len() {
        for j in i + 1..h.len() {
            if brute_adjacent(g, side, &par, &dep, h[i], h[j]) {
                let (a, b) = (find(&mut comp, i), find(&mut comp, j));
                comp[a] = b;
            }
        }
    }
    let mut blocks: BTreeMap<usize, Vec<NodeId>> = BTreeMap::new();
    for i in 0..h.len() {
        let r = find(&mut comp, i);
        blocks.entry(r).or_default().push(h[i]);
    }
    let mut out: Vec<Vec<NodeId>> = blocks.into_values().map(|mut b| {
        b.sort_unstable();
        b
    }).collect();
    out.sort();
    out
}

pub fn normalize(mut blocks: Vec<Vec<NodeId>>) -> Vec<Vec<NodeId>> {
    for b in &mut blocks {
        b.sort_unstable();
    }
    blocks.sort();
    blocks
}

pub fn analyses(g: &Game) -> [StructuralAnalysis; 2] {
    [tbdag::game::analyze(g, Side::Max).unwrap(), tbdag::game::analyze(g, Side::Min).unwrap()]
}

/// Shape of a random timeable game: internal levels alternate among
/// chance and players 1..=3 at random; infosets group same-level nodes of
/// one player with equal action counts into at most `groups` classes.
#[derive(Clone, Debug)]
pub struct RandomGameSpec {
    pub seed: u64,
    pub depth: u32,
    pub max_actions: u32,
    pub groups: u32,
    pub stop_prob: f64,
}

pub fn random_game(spec: &RandomGameSpec) -> Game {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(spec.seed);
    let mut b = GameBuilder::new(&["chance", "P1", "P2", "P3"], &[1, 3], &[2]);
    fn rec(
        b: &mut GameBuilder,
        rng: &mut rand_chacha::ChaCha8Rng,
        spec: &RandomGameSpec,
        depth: u32,
    ) -> usize {
        if depth == spec.depth || (depth > 0 && rng.gen_bool(spec.stop_prob)) {
            return b.terminal(rng.gen_range(-3..=3) as f64);
        }
        let n = rng.gen_range(1..=spec.max_actions);
        let who = rng.gen_range(0..4u32);
        let kids: Vec<usize> = (0..n).map(|_| rec(b, rng, spec, depth + 1)).collect();
        if who == 0 {
            let p = 1.0 / n as f64;
            b.chance(kids.into_iter().enumerate().map(|(i, c)| (format!("c{i}"), p, c)).collect())
        } else {
            let group = rng.gen_range(0..spec.groups);
            let key = format!("p{who}d{depth}n{n}g{group}");
            b.player(who, &key, kids.into_iter().enumerate().map(|(i, c)| (format!("a{i}"), c)).collect())
        }
    }
    let root = rec(&mut b, &mut rng, spec, 0);
    b.build(root).unwrap()
}

pub fn random_game_strategy() -> impl Strategy<Value = Game> {
    (any::<u64>(), 2u32..=5, 1u32..=3, 1u32..=3, 0.0f64..0.4).prop_map(|(seed, depth, max_actions, groups, stop_prob)| {
        random_game(&RandomGameSpec { seed, depth, max_actions, groups, stop_prob })
    })
}

/// Public-split TB-DAG edge count by a direct construction that uses
/// public states computed from the brute-force connectivity graph.
pub fn brute_public_edges(g: &Game, side: Side) -> usize {
    let dep = depths(g);
    let mut public = vec![0usize; g.num_nodes()];
    let mut next = 0;
    for level in 0..=g.depth() {
        let h: Vec<NodeId> = (0..g.num_nodes() as u32).filter(|&x| dep[x as usize] == level).collect();
        for block in brute_split(g, side, &h) {
            for x in block {
                public[x as usize] = next;
            }
            next += 1;
        }
    }
    let mut memo: BTreeSet<Vec<NodeId>> = BTreeSet::new();
    let mut edges = 0;
    let mut stack = vec![vec![g.root()]];
    while let Some(belief) = stack.pop() {
        if !memo.insert(belief.clone()) {
            continue;
        }
        if belief.len() == 1 && g.node(belief[0]).is_terminal() {
            edges += 1;
            continue;
        }
        let infosets: BTreeSet<u32> = belief
            .iter()
            .filter(|&&h| g.is_side_node(h, side))
            .map(|&h| g.node(h).infoset.unwrap())
            .collect();
        let infosets: Vec<u32> = infosets.into_iter().collect();
        // Odometer over one action per infoset.
        let mut digits = vec![0u32; infosets.len()];
        loop {
            edges += 1;
            let mut parts: BTreeMap<usize, Vec<NodeId>> = BTreeMap::new();
            for &h in &belief {
                let node = g.node(h);
                let kids: Vec<NodeId> = if g.is_side_node(h, side) {
                    let pos = infosets.iter().position(|&i| i == node.infoset.unwrap()).unwrap();
                    vec![node.actions[digits[pos] as usize].child]
                } else {
                    node.actions.iter().map(|a| a.child).collect()
                };
                for c in kids {
                    parts.entry(public[c as usize]).or_default().push(c);
                }
            }
            edges += parts.len();
            for (_, mut b) in parts {
                b.sort_unstable();
                stack.push(b);
            }
            let mut j = 0;
            while j < digits.len() {
                digits[j] += 1;
                if (digits[j] as usize) < g.num_actions(infosets[j]) {
                    break;
                }
                digits[j] = 0;
                j += 1;
            }
            if j == digits.len() {
                break;
            }
        }
    }
    edges
}
