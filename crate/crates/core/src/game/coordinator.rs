use fnv::FnvHashMap;

use super::model::{Game, InfosetId, NodeId, Side};
use crate::error::{Error, Result};

pub type SeqId = u32;

/// The merged coordinator of one side: its infosets and the interned
/// coordinator sequence of every node.
#[derive(Clone, Debug)]
pub struct CoordinatorView {
    pub side: Side,
    infosets: Vec<InfosetId>,
    node_seq: Vec<SeqId>,
    seq_parent: Vec<SeqId>,
    seq_pair: Vec<(InfosetId, u32)>,
    seq_len: Vec<u32>,
    index: FnvHashMap<(SeqId, InfosetId, u32), SeqId>,
    perfect_recall: bool,
    action_recall: bool,
}

impl CoordinatorView {
    pub fn new(g: &Game, side: Side) -> Result<Self> {
        if g.team(side).is_empty() {
            return Err(Error::invalid(format!("side {side} has no players")));
        }
        let n = g.num_nodes();
        let mut view = CoordinatorView {
            side,
            infosets: g.side_infosets(side),
            node_seq: vec![0; n],
            seq_parent: vec![0],
            seq_pair: vec![(u32::MAX, u32::MAX)],
            seq_len: vec![0],
            index: FnvHashMap::default(),
            perfect_recall: true,
            action_recall: true,
        };
        // Action sequences, interned per (parent, Option<label>).
        let mut aseq = vec![0u32; n];
        let mut aindex: FnvHashMap<(u32, u32), u32> = FnvHashMap::default();
        for h in 0..n as NodeId {
            let node = g.node(h);
            let own = g.is_side_node(h, side);
            for (a, act) in node.actions.iter().enumerate() {
                let c = act.child as usize;
                view.node_seq[c] = if own {
                    view.intern(view.node_seq[h as usize], node.infoset.unwrap(), a as u32)
                } else {
                    view.node_seq[h as usize]
                };
                let tag = if own { act.label } else { u32::MAX };
                let next = aindex.len() as u32 + 1;
                aseq[c] = *aindex.entry((aseq[h as usize], tag)).or_insert(next);
            }
        }
        for &i in &view.infosets {
            let members = &g.infoset(i).members;
            let s0 = view.node_seq[members[0] as usize];
            let a0 = aseq[members[0] as usize];
            for &m in &members[1..] {
                if view.node_seq[m as usize] != s0 {
                    view.perfect_recall = false;
                }
                if aseq[m as usize] != a0 {
                    view.action_recall = false;
                }
            }
        }
        Ok(view)
    }

    fn intern(&mut self, parent: SeqId, infoset: InfosetId, action: u32) -> SeqId {
        if let Some(&s) = self.index.get(&(parent, infoset, action)) {
            return s;
        }
        let s = self.seq_parent.len() as SeqId;
        self.seq_parent.push(parent);
        self.seq_pair.push((infoset, action));
        self.seq_len.push(self.seq_len[parent as usize] + 1);
        self.index.insert((parent, infoset, action), s);
        s
    }

    /// Infosets of the coordinator, ascending.
    pub fn infosets(&self) -> &[InfosetId] {
        &self.infosets
    }

    pub fn seq(&self, h: NodeId) -> SeqId {
        self.node_seq[h as usize]
    }

    pub fn num_sequences(&self) -> usize {
        self.seq_parent.len()
    }

    pub fn seq_parent(&self, s: SeqId) -> Option<SeqId> {
        (s != 0).then(|| self.seq_parent[s as usize])
    }

    pub fn seq_last(&self, s: SeqId) -> Option<(InfosetId, u32)> {
        (s != 0).then(|| self.seq_pair[s as usize])
    }

    pub fn seq_len(&self, s: SeqId) -> usize {
        self.seq_len[s as usize] as usize
    }

    /// The sequence `s` extended by `(infoset, action)`, if it occurs.
    pub fn extend(&self, s: SeqId, infoset: InfosetId, action: u32) -> Option<SeqId> {
        self.index.get(&(s, infoset, action)).copied()
    }

    /// (infoset, action) pairs of `s`, root first.
    pub fn pairs(&self, mut s: SeqId) -> Vec<(InfosetId, u32)> {
        let mut out = Vec::with_capacity(self.seq_len(s));
        while s != 0 {
            out.push(self.seq_pair[s as usize]);
            s = self.seq_parent[s as usize];
        }
        out.reverse();
        out
    }

    pub fn perfect_recall(&self) -> bool {
        self.perfect_recall
    }

    pub fn action_recall(&self) -> bool {
        self.action_recall
    }
}
