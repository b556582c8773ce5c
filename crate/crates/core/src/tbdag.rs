//! Team belief DAG construction. Decision points are beliefs (sets of
//! same-depth nodes the coordinator considers possible), their actions are
//! prescriptions (one action per infoset touching the belief), and each
//! observation point fans out to the beliefs its candidate set splits into.

use std::collections::HashMap;

use fnv::FnvBuildHasher;
use serde::Serialize;
use serde_json::{json, Value};

use crate::csr::Csr;
use crate::dag::{DagDecisionProblem, DecId, ObsId};
use crate::error::{Error, Result};
use crate::game::{Game, InfosetId, NodeId, Side, SplitMode, SplitScratch, StructuralAnalysis};

/// Default edge budget.
pub const EDGE_BUDGET: usize = 100_000_000;
/// Default cap on the number of infosets a single belief may touch.
pub const FANOUT_CAP: usize = 24;

#[derive(Clone, Copy, Debug)]
pub struct BuildOptions {
    pub split: SplitMode,
    pub reduce: bool,
    pub edge_budget: usize,
    pub fanout_cap: usize,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions { split: SplitMode::Observation, reduce: true, edge_budget: EDGE_BUDGET, fanout_cap: FANOUT_CAP }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct BuildStats {
    /// Decision points.
    pub num_dec: usize,
    /// Observation points, not counting the virtual source.
    pub num_obs: usize,
    /// Edges, not counting the edge out of the virtual source.
    pub edges: usize,
    /// Lookups answered by an existing decision point.
    pub dedup_hits: usize,
    pub max_belief: usize,
    /// Largest number of prescriptions at one belief.
    pub max_fanout: usize,
    /// Largest number of infosets touching one belief.
    pub max_infosets: usize,
}

/// One side's TB-DAG. Observation point 0 is a virtual source whose only
/// child is the decision point of the root belief.
#[derive(Clone, Debug)]
pub struct TbDag {
    pub side: Side,
    pub split: SplitMode,
    pub reduced: bool,
    pub problem: DagDecisionProblem,
    belief: Csr,
    /// Prescription index of each observation point (u32::MAX at the source).
    prescription: Vec<u32>,
    /// Observation point carrying each terminal, in `g.terminals()` order.
    pub terminal_slot: Vec<ObsId>,
    pub stats: BuildStats,
}

/// Infosets of `side` touching `belief`, ascending.
pub fn belief_infosets(g: &Game, side: Side, belief: &[NodeId]) -> Vec<InfosetId> {
    let mut out: Vec<InfosetId> =
        belief.iter().filter(|&&h| g.is_side_node(h, side)).map(|&h| g.node(h).infoset.unwrap()).collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Number of prescriptions for the given infosets, or None on overflow.
pub fn num_prescriptions(g: &Game, infosets: &[InfosetId]) -> Option<usize> {
    infosets.iter().try_fold(1usize, |acc, &i| acc.checked_mul(g.num_actions(i)))
}

/// Mixed-radix decoding; the first infoset is the most significant digit.
pub fn decode_prescription(g: &Game, infosets: &[InfosetId], mut index: usize, digits: &mut Vec<u32>) {
    digits.clear();
    digits.resize(infosets.len(), 0);
    for (d, &i) in digits.iter_mut().zip(infosets).rev() {
        let r = g.num_actions(i);
        *d = (index % r) as u32;
        index /= r;
    }
}

/// Inverse of [`decode_prescription`].
pub fn encode_prescription(g: &Game, infosets: &[InfosetId], digits: &[u32]) -> usize {
    infosets.iter().zip(digits).fold(0, |acc, (&i, &d)| acc * g.num_actions(i) + d as usize)
}

/// Next-step candidates: side nodes follow the prescription, every other
/// node contributes all children. Sorted when `belief` is.
pub fn candidate_set(
    g: &Game,
    side: Side,
    belief: &[NodeId],
    infosets: &[InfosetId],
    digits: &[u32],
    out: &mut Vec<NodeId>,
) {
    out.clear();
    for &h in belief {
        let node = g.node(h);
        if g.is_side_node(h, side) {
            let pos = infosets.binary_search(&node.infoset.unwrap()).unwrap();
            out.push(node.actions[digits[pos] as usize].child);
        } else {
            out.extend(node.actions.iter().map(|a| a.child));
        }
    }
}

struct Builder<'a> {
    g: &'a Game,
    an: &'a StructuralAnalysis,
    side: Side,
    opts: BuildOptions,
    memo: HashMap<Box<[NodeId]>, DecId, FnvBuildHasher>,
    belief_off: Vec<u32>,
    belief_data: Vec<NodeId>,
    dec_first: Vec<u32>,
    dec_count: Vec<u32>,
    obs_start: Vec<u32>,
    obs_len: Vec<u32>,
    obs_data: Vec<DecId>,
    prescription: Vec<u32>,
    terminal_index: Vec<u32>,
    terminal_slot: Vec<ObsId>,
    scratch: SplitScratch,
    stats: BuildStats,
}

impl Builder<'_> {
    fn charge(&mut self, edges: usize) -> Result<()> {
        self.stats.edges += edges;
        if self.stats.edges > self.opts.edge_budget {
            return Err(Error::budget(
                "TB-DAG edge",
                format!("more than {} edges for side {}", self.opts.edge_budget, self.side),
            ));
        }
        Ok(())
    }

    fn new_dec(&mut self, belief: &[NodeId], fanout: usize) -> DecId {
        let s = self.dec_first.len() as DecId;
        self.belief_data.extend_from_slice(belief);
        self.belief_off.push(self.belief_data.len() as u32);
        self.dec_first.push(self.prescription.len() as u32);
        self.dec_count.push(fanout as u32);
        for a in 0..fanout {
            self.prescription.push(a as u32);
            self.obs_start.push(0);
            self.obs_len.push(0);
        }
        self.memo.insert(belief.into(), s);
        self.stats.max_belief = self.stats.max_belief.max(belief.len());
        self.stats.max_fanout = self.stats.max_fanout.max(fanout);
        s
    }

    fn make_dec(&mut self, belief: Vec<NodeId>) -> Result<DecId> {
        if let Some(&s) = self.memo.get(belief.as_slice()) {
            self.stats.dedup_hits += 1;
            return Ok(s);
        }
        let g = self.g;
        if belief.len() == 1 && g.node(belief[0]).is_terminal() {
            let z = belief[0];
            let s = self.new_dec(&belief, 1);
            let o = self.dec_first[s as usize];
            self.terminal_slot[self.terminal_index[z as usize] as usize] = o;
            self.charge(1)?;
            return Ok(s);
        }
        let infosets = belief_infosets(g, self.side, &belief);
        if infosets.len() > self.opts.fanout_cap {
            return Err(Error::budget(
                "prescription fan-out",
                format!(
                    "belief of {} nodes in public state {} touches {} infosets (cap {})",
                    belief.len(),
                    self.an.public_state(belief[0]),
                    infosets.len(),
                    self.opts.fanout_cap
                ),
            ));
        }
        self.stats.max_infosets = self.stats.max_infosets.max(infosets.len());
        let fanout = num_prescriptions(g, &infosets)
            .filter(|&n| n <= self.opts.edge_budget)
            .ok_or_else(|| Error::budget("TB-DAG edge", format!("belief with {} infosets", infosets.len())))?;
        self.charge(fanout)?;
        let s = self.new_dec(&belief, fanout);
        let first = self.dec_first[s as usize];
        let mut digits = Vec::new();
        let mut cand = Vec::new();
        let mut blocks = Vec::new();
        for idx in 0..fanout {
            decode_prescription(g, &infosets, idx, &mut digits);
            candidate_set(g, self.side, &belief, &infosets, &digits, &mut cand);
            self.an.split_sorted(self.opts.split, &cand, &mut self.scratch, &mut blocks);
            let parts = std::mem::take(&mut blocks);
            self.charge(parts.len())?;
            let mut kids = Vec::with_capacity(parts.len());
            for b in parts {
                kids.push(self.make_dec(b)?);
            }
            let o = (first as usize) + idx;
            self.obs_start[o] = self.obs_data.len() as u32;
            self.obs_len[o] = kids.len() as u32;
            self.obs_data.extend_from_slice(&kids);
        }
        Ok(s)
    }
}

/// Builds `side`'s TB-DAG from the game. `an` must be the analysis of
/// the same side.
pub fn build_tbdag(g: &Game, an: &StructuralAnalysis, opts: BuildOptions) -> Result<TbDag> {
    let side = an.side;
    let mut terminal_index = vec![u32::MAX; g.num_nodes()];
    for (t, &z) in g.terminals().iter().enumerate() {
        terminal_index[z as usize] = t as u32;
    }
    let mut b = Builder {
        g,
        an,
        side,
        opts,
        memo: HashMap::default(),
        belief_off: vec![0],
        belief_data: Vec::new(),
        dec_first: Vec::new(),
        dec_count: Vec::new(),
        obs_start: vec![0],
        obs_len: vec![1],
        obs_data: vec![0],
        prescription: vec![u32::MAX],
        terminal_index,
        terminal_slot: vec![u32::MAX; g.terminals().len()],
        scratch: SplitScratch::default(),
        stats: BuildStats::default(),
    };
    let root = b.make_dec(vec![g.root()])?;
    debug_assert_eq!(root, 0);
    drop(b.memo);

    let num_obs = b.prescription.len();
    let mut obs_off = Vec::with_capacity(num_obs + 1);
    let mut obs_data = Vec::with_capacity(b.obs_data.len());
    obs_off.push(0u32);
    for o in 0..num_obs {
        let st = b.obs_start[o] as usize;
        obs_data.extend_from_slice(&b.obs_data[st..st + b.obs_len[o] as usize]);
        obs_off.push(obs_data.len() as u32);
    }
    let mut dec_off = Vec::with_capacity(b.dec_first.len() + 1);
    dec_off.push(0u32);
    for (&f, &c) in b.dec_first.iter().zip(&b.dec_count) {
        debug_assert_eq!(f, *dec_off.last().unwrap() + 1);
        dec_off.push(f + c - 1);
    }
    let dec_data: Vec<u32> = (1..num_obs as u32).collect();
    let problem = DagDecisionProblem::from_csr(
        Csr { off: obs_off, data: obs_data },
        Csr { off: dec_off, data: dec_data },
    )?;
    let mut stats = b.stats;
    stats.num_dec = problem.num_dec();
    stats.num_obs = problem.num_obs() - 1;
    let dag = TbDag {
        side,
        split: opts.split,
        reduced: false,
        problem,
        belief: Csr { off: b.belief_off, data: b.belief_data },
        prescription: b.prescription,
        terminal_slot: b.terminal_slot,
        stats,
    };
    if opts.reduce {
        Ok(reduce(&dag, g, an))
    } else {
        Ok(dag)
    }
}

/// Postprocessing. Terminal decision points with the same parents and the
/// same coordinator sequence are merged; then every non-root decision point
/// with one parent and one child is spliced out, its child observation
/// point folding into the parent observation point.
pub fn reduce(dag: &TbDag, g: &Game, an: &StructuralAnalysis) -> TbDag {
    let p = &dag.problem;
    let (n_obs, n_dec) = (p.num_obs(), p.num_dec());
    let view = an.view();
    let root_dec = p.obs_children(0)[0];

    // obs_alias: where an observation point's content goes; dec_alive marks
    // decision points that survive.
    let mut obs_alias: Vec<ObsId> = (0..n_obs as u32).collect();
    let mut dec_alive = vec![true; n_dec];
    let mut groups: HashMap<(Vec<ObsId>, u32), DecId, FnvBuildHasher> = HashMap::default();
    for s in 0..n_dec as DecId {
        let belief = dag.belief(s);
        if s == root_dec || belief.len() != 1 || !g.node(belief[0]).is_terminal() {
            continue;
        }
        let key = (p.dec_parents(s).to_vec(), view.seq(belief[0]));
        match groups.get(&key) {
            Some(&keep) => {
                dec_alive[s as usize] = false;
                obs_alias[p.dec_children(s)[0] as usize] = p.dec_children(keep)[0];
            }
            None => {
                groups.insert(key, s);
            }
        }
    }
    drop(groups);
    for &s in p.topo() {
        if !dec_alive[s as usize] || s == root_dec {
            continue;
        }
        let parents = p.dec_parents(s);
        let kids = p.dec_children(s);
        if parents.len() == 1 && kids.len() == 1 {
            dec_alive[s as usize] = false;
            obs_alias[kids[0] as usize] = obs_alias[parents[0] as usize];
        }
    }
    // Aliases always point to an earlier-resolved point; resolve chains.
    for o in 0..n_obs {
        let a = obs_alias[o] as usize;
        if a != o {
            obs_alias[o] = obs_alias[a];
        }
    }
    let mut obs_new = vec![u32::MAX; n_obs];
    let mut prescription = Vec::new();
    for o in 0..n_obs {
        if obs_alias[o] == o as u32 {
            obs_new[o] = prescription.len() as u32;
            prescription.push(dag.prescription[o]);
        }
    }
    let mut dec_new = vec![u32::MAX; n_dec];
    let mut kept = 0u32;
    for s in 0..n_dec {
        if dec_alive[s] {
            dec_new[s] = kept;
            kept += 1;
        }
    }
    let mut belief_off = vec![0u32];
    let mut belief_data = Vec::new();
    let mut dec_lists: Vec<Vec<u32>> = Vec::with_capacity(kept as usize);
    let mut pairs: Vec<(u32, u32)> = Vec::new();
    for s in 0..n_dec as DecId {
        if !dec_alive[s as usize] {
            continue;
        }
        belief_data.extend_from_slice(dag.belief(s));
        belief_off.push(belief_data.len() as u32);
        dec_lists.push(p.dec_children(s).iter().map(|&o| obs_new[obs_alias[o as usize] as usize]).collect());
        let mut ps: Vec<u32> = p.dec_parents(s).iter().map(|&o| obs_new[obs_alias[o as usize] as usize]).collect();
        ps.sort_unstable();
        ps.dedup();
        pairs.extend(ps.into_iter().map(|o| (o, dec_new[s as usize])));
    }
    let obs_children = Csr::from_rows(prescription.len(), &pairs);
    drop(pairs);
    let problem = DagDecisionProblem::from_csr(obs_children, Csr::from_lists(&dec_lists))
        .expect("reduction preserves DAG validity");
    let terminal_slot = dag.terminal_slot.iter().map(|&o| obs_new[obs_alias[o as usize] as usize]).collect();
    let mut stats = dag.stats.clone();
    stats.num_dec = problem.num_dec();
    stats.num_obs = problem.num_obs() - 1;
    stats.edges = problem.num_edges() - 1;
    TbDag {
        side: dag.side,
        split: dag.split,
        reduced: true,
        problem,
        belief: Csr { off: belief_off, data: belief_data },
        prescription,
        terminal_slot,
        stats,
    }
}

/// Bound check against |H| (b+1)^(k+1).
#[derive(Clone, Debug, Serialize)]
pub struct SizeReport {
    pub side: Side,
    pub edges: usize,
    pub nodes: usize,
    pub b: usize,
    pub k: usize,
    pub bound: f64,
    /// bound / edges.
    pub slack: f64,
    pub holds: bool,
    /// edges / (|H| log2 |A|), compared against 3^(k+1) for binarized games.
    pub binary_ratio: f64,
    pub binary_bound: f64,
}

/// `log_actions` is log2 of the largest action count before binarization
/// (use the game's own value when the game was not binarized).
pub fn check_size_bounds(dag: &TbDag, g: &Game, an: &StructuralAnalysis, log_actions: f64) -> SizeReport {
    let (b, k) = (g.branching(), an.k());
    let nodes = g.num_nodes();
    let bound = nodes as f64 * ((b + 1) as f64).powi(k as i32 + 1);
    let edges = dag.stats.edges;
    SizeReport {
        side: dag.side,
        edges,
        nodes,
        b,
        k,
        bound,
        slack: bound / edges.max(1) as f64,
        holds: (edges as f64) <= bound,
        binary_ratio: edges as f64 / (nodes as f64 * log_actions.max(1.0)),
        binary_bound: 3f64.powi(k as i32 + 1),
    }
}

/// Edge counts of the observation-split and public-split TB-DAGs.
pub fn compare_splits(g: &Game, an: &StructuralAnalysis, reduce: bool, edge_budget: usize) -> Result<(usize, usize)> {
    let mut opts = BuildOptions { reduce, edge_budget, ..BuildOptions::default() };
    let obs = build_tbdag(g, an, opts)?.stats.edges;
    opts.split = SplitMode::Public;
    let public = build_tbdag(g, an, opts)?.stats.edges;
    Ok((obs, public))
}

/// Signature of an observation point: sorted child beliefs and terminals.
pub type ObsSignature = (Vec<Vec<NodeId>>, Vec<NodeId>);

/// Labeling-free form of a TB-DAG: per decision point its belief and the
/// sorted signatures of its observation points, sorted by belief. Two
/// TB-DAGs of games with the same node numbering are isomorphic iff their
/// canonical forms are equal.
pub fn canonical_form(dag: &TbDag, g: &Game) -> Vec<(Vec<NodeId>, Vec<ObsSignature>)> {
    let p = &dag.problem;
    let mut terms: Vec<Vec<NodeId>> = vec![Vec::new(); p.num_obs()];
    for (t, &o) in dag.terminal_slot.iter().enumerate() {
        terms[o as usize].push(g.terminals()[t]);
    }
    let sig = |o: ObsId| -> ObsSignature {
        let mut kids: Vec<Vec<NodeId>> = p.obs_children(o).iter().map(|&s| dag.belief(s).to_vec()).collect();
        kids.sort();
        let mut t = terms[o as usize].clone();
        t.sort_unstable();
        (kids, t)
    };
    let mut out: Vec<(Vec<NodeId>, Vec<ObsSignature>)> = (0..p.num_dec() as DecId)
        .map(|s| {
            let mut obs: Vec<ObsSignature> = p.dec_children(s).iter().map(|&o| sig(o)).collect();
            obs.sort();
            (dag.belief(s).to_vec(), obs)
        })
        .collect();
    out.sort();
    out
}

impl TbDag {
    pub fn belief(&self, s: DecId) -> &[NodeId] {
        self.belief.row(s as usize)
    }

    pub fn num_dec(&self) -> usize {
        self.problem.num_dec()
    }

    /// Observation points including the virtual source.
    pub fn num_obs(&self) -> usize {
        self.problem.num_obs()
    }

    /// The root-belief decision point.
    pub fn root_dec(&self) -> DecId {
        self.problem.obs_children(0)[0]
    }

    /// Decision point whose belief is exactly `belief`, if any.
    pub fn find_belief(&self, belief: &[NodeId]) -> Option<DecId> {
        (0..self.num_dec() as DecId).find(|&s| self.belief(s) == belief)
    }

    /// Infosets touching the belief of `s`.
    pub fn infosets(&self, g: &Game, s: DecId) -> Vec<InfosetId> {
        belief_infosets(g, self.side, self.belief(s))
    }

    /// The (infoset, action) pairs prescribed on the way into `o`.
    pub fn prescription(&self, g: &Game, o: ObsId) -> Vec<(InfosetId, u32)> {
        let Some(s) = self.problem.obs_parent(o) else { return Vec::new() };
        let infosets = self.infosets(g, s);
        let mut digits = Vec::new();
        decode_prescription(g, &infosets, self.prescription[o as usize] as usize, &mut digits);
        infosets.into_iter().zip(digits).collect()
    }

    /// Sum of flow into each terminal's slot, in `g.terminals()` order.
    pub fn terminal_realization(&self, x: &[f64]) -> Vec<f64> {
        self.terminal_slot.iter().map(|&o| x[o as usize]).collect()
    }

    pub fn to_json(&self, g: &Game) -> Value {
        let p = &self.problem;
        let dec: Vec<Value> = (0..p.num_dec() as DecId)
            .map(|s| {
                json!({
                    "id": s,
                    "belief": self.belief(s),
                    "parents": p.dec_parents(s),
                    "children": p.dec_children(s),
                })
            })
            .collect();
        let obs: Vec<Value> = (0..p.num_obs() as ObsId)
            .map(|o| {
                let presc: Vec<Value> = self
                    .prescription(g, o)
                    .into_iter()
                    .map(|(i, a)| json!([i, g.label(g.infoset(i).labels[a as usize])]))
                    .collect();
                json!({"id": o, "parent": p.obs_parent(o), "children": p.obs_children(o), "prescription": presc})
            })
            .collect();
        let terminals: serde_json::Map<String, Value> = g
            .terminals()
            .iter()
            .zip(&self.terminal_slot)
            .map(|(z, o)| (z.to_string(), json!(o)))
            .collect();
        json!({
            "side": self.side.name(),
            "split": self.split,
            "reduced": self.reduced,
            "stats": self.stats,
            "decision_points": dec,
            "observation_points": obs,
            "terminal_slots": terminals,
        })
    }
}
