//! Explicit belief game: a perfect-recall game in which each side picks a
//! prescription at its current belief, then Nature (or the prescribed
//! player) moves. Exponential in general; used to cross-check the TB-DAG.

use std::collections::HashMap;

use fnv::FnvBuildHasher;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::game::{
    serialize_game_with_extras, Game, InfosetId, NodeId, NodeKind, RawAction, RawGame, RawNode, Side, SplitMode,
    SplitScratch, StructuralAnalysis,
};
use crate::tbdag::{belief_infosets, candidate_set, decode_prescription, encode_prescription, num_prescriptions};

/// Default node budget.
pub const NODE_BUDGET: usize = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Role {
    MaxPrescribes,
    MinPrescribes,
    ChanceResolves,
    Terminal,
}

/// What a belief-game node stands for: the original node and both
/// sides' current beliefs (ids into [`BeliefGame::beliefs`]).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Annotation {
    pub node: NodeId,
    pub belief_max: u32,
    pub belief_min: u32,
    pub role: Role,
}

#[derive(Clone, Debug)]
pub struct BeliefGame {
    pub game: Game,
    /// One per belief-game node.
    pub annotations: Vec<Annotation>,
    /// Interned beliefs per side (index by `Side::index`).
    pub beliefs: [Vec<Vec<NodeId>>; 2],
    /// Interned belief-game sequences per side, including the empty one.
    pub num_sequences: [usize; 2],
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct BeliefGameStats {
    pub nodes: usize,
    /// Nodes left after removing single-child chains.
    pub compact_nodes: usize,
    pub terminals: usize,
    pub infosets_max: usize,
    pub infosets_min: usize,
    pub sequences_max: usize,
    pub sequences_min: usize,
    pub depth: u32,
}

#[derive(Default)]
struct SideState {
    beliefs: Vec<Vec<NodeId>>,
    belief_ids: HashMap<Vec<NodeId>, u32, FnvBuildHasher>,
    infosets: Vec<Vec<InfosetId>>,
    /// (belief, prescription) -> belief ids of the split candidate set.
    splits: HashMap<(u32, u32), Vec<u32>, FnvBuildHasher>,
    seqs: HashMap<(u32, u32, u32), u32, FnvBuildHasher>,
}

impl SideState {
    fn intern_belief(&mut self, g: &Game, side: Side, b: Vec<NodeId>) -> u32 {
        if let Some(&id) = self.belief_ids.get(&b) {
            return id;
        }
        let id = self.beliefs.len() as u32;
        self.infosets.push(belief_infosets(g, side, &b));
        self.belief_ids.insert(b.clone(), id);
        self.beliefs.push(b);
        id
    }

    fn intern_seq(&mut self, parent: u32, belief: u32, presc: u32) -> u32 {
        let next = self.seqs.len() as u32 + 1;
        *self.seqs.entry((parent, belief, presc)).or_insert(next)
    }
}

struct Ctx<'a> {
    g: &'a Game,
    an: [&'a StructuralAnalysis; 2],
    split: SplitMode,
    budget: usize,
    sides: [SideState; 2],
    nodes: Vec<RawNode>,
    ann: Vec<Annotation>,
    infoset_keys: HashMap<(u8, u32, u32), u64, FnvBuildHasher>,
    scratch: SplitScratch,
}

impl Ctx<'_> {
    fn push(&mut self, node: RawNode, ann: Annotation) -> Result<usize> {
        if self.nodes.len() >= self.budget {
            return Err(Error::budget("belief game node", format!("more than {} nodes", self.budget)));
        }
        self.nodes.push(node);
        self.ann.push(ann);
        Ok(self.nodes.len() - 1)
    }

    fn infoset_key(&mut self, side: Side, seq: u32, belief: u32) -> u64 {
        let next = self.infoset_keys.len() as u64;
        *self.infoset_keys.entry((side.index() as u8, seq, belief)).or_insert(next)
    }

    fn prescription_label(&self, side: Side, belief: u32, presc: u32) -> String {
        let infosets = &self.sides[side.index()].infosets[belief as usize];
        if infosets.is_empty() {
            return "-".into();
        }
        let mut digits = Vec::new();
        decode_prescription(self.g, infosets, presc as usize, &mut digits);
        infosets
            .iter()
            .zip(&digits)
            .map(|(&i, &d)| self.g.label(self.g.infoset(i).labels[d as usize]).to_string())
            .collect::<Vec<_>>()
            .join(".")
    }

    /// Beliefs that `belief` under `presc` splits into.
    fn successors(&mut self, side: Side, belief: u32, presc: u32) -> Vec<u32> {
        let si = side.index();
        if let Some(v) = self.sides[si].splits.get(&(belief, presc)) {
            return v.clone();
        }
        let g = self.g;
        let st = &self.sides[si];
        let infosets = st.infosets[belief as usize].clone();
        let mut digits = Vec::new();
        decode_prescription(g, &infosets, presc as usize, &mut digits);
        let mut cand = Vec::new();
        candidate_set(g, side, &st.beliefs[belief as usize], &infosets, &digits, &mut cand);
        let mut blocks = Vec::new();
        self.an[si].split_sorted(self.split, &cand, &mut self.scratch, &mut blocks);
        let ids: Vec<u32> = blocks.into_iter().map(|b| self.sides[si].intern_belief(g, side, b)).collect();
        self.sides[si].splits.insert((belief, presc), ids.clone());
        ids
    }

    fn block_of(&self, side: Side, blocks: &[u32], h: NodeId) -> u32 {
        let st = &self.sides[side.index()];
        *blocks.iter().find(|&&b| st.beliefs[b as usize].binary_search(&h).is_ok()).expect("successor covered")
    }

    fn make(&mut self, h: NodeId, b: [u32; 2], seq: [u32; 2]) -> Result<usize> {
        let g = self.g;
        let ann = |role| Annotation { node: h, belief_max: b[0], belief_min: b[1], role };
        let key = self.infoset_key(Side::Max, seq[0], b[0]);
        let id = self.push(
            RawNode { kind: NodeKind::Player, player: Some(1), infoset: Some(key), actions: vec![], utility: None },
            ann(Role::MaxPrescribes),
        )?;
        let n_max = num_prescriptions(g, &self.sides[0].infosets[b[0] as usize]).unwrap() as u32;
        let mut max_actions = Vec::with_capacity(n_max as usize);
        for pa in 0..n_max {
            let key = self.infoset_key(Side::Min, seq[1], b[1]);
            let mid = self.push(
                RawNode { kind: NodeKind::Player, player: Some(2), infoset: Some(key), actions: vec![], utility: None },
                ann(Role::MinPrescribes),
            )?;
            let n_min = num_prescriptions(g, &self.sides[1].infosets[b[1] as usize]).unwrap() as u32;
            let mut min_actions = Vec::with_capacity(n_min as usize);
            for pb in 0..n_min {
                let child = self.resolve(h, b, seq, [pa, pb])?;
                min_actions.push(RawAction { label: self.prescription_label(Side::Min, b[1], pb), child, prob: None });
            }
            self.nodes[mid].actions = min_actions;
            max_actions.push(RawAction { label: self.prescription_label(Side::Max, b[0], pa), child: mid, prob: None });
        }
        self.nodes[id].actions = max_actions;
        Ok(id)
    }

    fn resolve(&mut self, h: NodeId, b: [u32; 2], seq: [u32; 2], presc: [u32; 2]) -> Result<usize> {
        let g = self.g;
        let node = g.node(h);
        let ann = |role| Annotation { node: h, belief_max: b[0], belief_min: b[1], role };
        if node.is_terminal() {
            return self.push(
                RawNode { kind: NodeKind::Terminal, player: None, infoset: None, actions: vec![], utility: Some(node.utility) },
                ann(Role::Terminal),
            );
        }
        let id = self.push(
            RawNode { kind: NodeKind::Chance, player: None, infoset: None, actions: vec![], utility: None },
            ann(Role::ChanceResolves),
        )?;
        let moves: Vec<(usize, f64)> = match node.kind {
            NodeKind::Chance => node.actions.iter().enumerate().map(|(a, act)| (a, act.prob)).collect(),
            _ => {
                let side = g.team_of(node.player.unwrap()).expect("every player is on a team");
                let si = side.index();
                let infosets = &self.sides[si].infosets[b[si] as usize];
                let mut digits = Vec::new();
                decode_prescription(g, infosets, presc[si] as usize, &mut digits);
                let pos = infosets.binary_search(&node.infoset.unwrap()).unwrap();
                vec![(digits[pos] as usize, 1.0)]
            }
        };
        let next: [Vec<u32>; 2] = [
            self.successors(Side::Max, b[0], presc[0]),
            self.successors(Side::Min, b[1], presc[1]),
        ];
        let next_seq = [
            self.sides[0].intern_seq(seq[0], b[0], presc[0]),
            self.sides[1].intern_seq(seq[1], b[1], presc[1]),
        ];
        let mut actions = Vec::with_capacity(moves.len());
        for (a, p) in moves {
            let c = node.actions[a].child;
            let nb = [self.block_of(Side::Max, &next[0], c), self.block_of(Side::Min, &next[1], c)];
            let child = self.make(c, nb, next_seq)?;
            actions.push(RawAction { label: g.label(node.actions[a].label).to_string(), child, prob: Some(p) });
        }
        self.nodes[id].actions = actions;
        Ok(id)
    }
}

/// Builds the belief game. `analyses` are indexed by `Side::index`.
pub fn make_belief_game(
    g: &Game,
    analyses: [&StructuralAnalysis; 2],
    split: SplitMode,
    budget: usize,
) -> Result<BeliefGame> {
    let mut ctx = Ctx {
        g,
        an: analyses,
        split,
        budget,
        sides: [SideState::default(), SideState::default()],
        nodes: Vec::new(),
        ann: Vec::new(),
        infoset_keys: HashMap::default(),
        scratch: SplitScratch::default(),
    };
    let root = g.root();
    let b = [
        ctx.sides[0].intern_belief(g, Side::Max, vec![root]),
        ctx.sides[1].intern_belief(g, Side::Min, vec![root]),
    ];
    ctx.make(root, b, [0, 0])?;
    let raw = RawGame {
        players: vec!["chance".into(), "MAX".into(), "MIN".into()],
        max: vec![1],
        min: vec![2],
        root: 0,
        nodes: std::mem::take(&mut ctx.nodes),
    };
    // Nodes were pushed in preorder, so validation keeps their ids.
    let game = raw.into_game()?;
    let [s0, s1] = ctx.sides;
    Ok(BeliefGame {
        game,
        annotations: ctx.ann,
        num_sequences: [s0.seqs.len() + 1, s1.seqs.len() + 1],
        beliefs: [s0.beliefs, s1.beliefs],
    })
}

impl BeliefGame {
    pub fn stats(&self) -> BeliefGameStats {
        let g = &self.game;
        let single = g.nodes().iter().filter(|n| n.actions.len() == 1).count();
        BeliefGameStats {
            nodes: g.num_nodes(),
            compact_nodes: g.num_nodes() - single,
            terminals: g.terminals().len(),
            infosets_max: g.side_infosets(Side::Max).len(),
            infosets_min: g.side_infosets(Side::Min).len(),
            sequences_max: self.num_sequences[0],
            sequences_min: self.num_sequences[1],
            depth: g.depth(),
        }
    }

    /// Belief (original node ids) behind a belief-game infoset.
    pub fn infoset_belief(&self, i: InfosetId) -> (Side, &[NodeId]) {
        let h = self.game.infoset(i).members[0];
        let a = &self.annotations[h as usize];
        match a.role {
            Role::MaxPrescribes => (Side::Max, &self.beliefs[0][a.belief_max as usize]),
            _ => (Side::Min, &self.beliefs[1][a.belief_min as usize]),
        }
    }

    /// Serializes with an "annotations" block.
    pub fn to_json(&self) -> String {
        let mut extra = Map::new();
        let ann: Vec<Value> = self
            .annotations
            .iter()
            .map(|a| json!([a.node, a.belief_max, a.belief_min, a.role]))
            .collect();
        extra.insert(
            "annotations".into(),
            json!({"columns": ["node", "belief_max", "belief_min", "role"], "rows": ann, "beliefs": {
                "max": self.beliefs[0], "min": self.beliefs[1]}}),
        );
        serialize_game_with_extras(&self.game, extra)
    }

    /// Maps a pure strategy of `side` in the original game (action index
    /// per infoset id; entries of other sides ignored) to the belief game.
    /// Beliefs the mapped strategy reaches prescribe `pi`; the others get
    /// prescription 0. Returns an action per belief-game infoset (entries
    /// of the other side are 0).
    pub fn map_pure_strategy(&self, g: &Game, side: Side, pi: &[u32]) -> Vec<u32> {
        let bg = &self.game;
        let mut out = vec![0u32; bg.infosets().len()];
        let mut reached = vec![false; bg.infosets().len()];
        let mut stack = vec![bg.root()];
        while let Some(x) = stack.pop() {
            let node = bg.node(x);
            if node.is_terminal() {
                continue;
            }
            if bg.is_side_node(x, side) {
                let i = node.infoset.unwrap();
                if !reached[i as usize] {
                    reached[i as usize] = true;
                    let (_, belief) = self.infoset_belief(i);
                    let infosets = belief_infosets(g, side, belief);
                    let digits: Vec<u32> = infosets.iter().map(|&j| pi[j as usize]).collect();
                    out[i as usize] = encode_prescription(g, &infosets, &digits) as u32;
                }
                stack.push(node.actions[out[i as usize] as usize].child);
            } else {
                stack.extend(node.actions.iter().map(|a| a.child));
            }
        }
        out
    }
}

/// Expected MAX utility of a pure profile (action per infoset, both sides
/// in one vector), by a depth-first walk from the root.
pub fn evaluate_pure(g: &Game, profile: &[u32]) -> f64 {
    fn walk(g: &Game, h: NodeId, p: f64, profile: &[u32], total: &mut f64) {
        let node = g.node(h);
        match node.kind {
            NodeKind::Terminal => *total += p * node.utility,
            NodeKind::Chance => {
                for a in &node.actions {
                    walk(g, a.child, p * a.prob, profile, total);
                }
            }
            NodeKind::Player => {
                let a = profile[node.infoset.unwrap() as usize] as usize;
                walk(g, node.actions[a].child, p, profile, total);
            }
        }
    }
    let mut total = 0.0;
    walk(g, g.root(), 1.0, profile, &mut total);
    total
}

/// Terminals reached by `side`'s pure strategy when every other move is
/// allowed (its reach set).
pub fn reach_set(g: &Game, side: Side, pi: &[u32]) -> Vec<NodeId> {
    let mut out = Vec::new();
    let mut stack = vec![g.root()];
    while let Some(h) = stack.pop() {
        let node = g.node(h);
        if node.is_terminal() {
            out.push(h);
        } else if g.is_side_node(h, side) {
            stack.push(node.actions[pi[node.infoset.unwrap() as usize] as usize].child);
        } else {
            stack.extend(node.actions.iter().map(|a| a.child));
        }
    }
    out.sort_unstable();
    out
}
