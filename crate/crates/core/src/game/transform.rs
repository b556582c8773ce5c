use std::collections::HashMap;

use super::coordinator::CoordinatorView;
use super::model::{Game, InfosetId, NodeId, NodeKind, RawAction, RawGame, RawNode, Side};
use crate::error::{Error, Result};

/// Replaces every player node by a binary tree over per-action bitstrings
/// (binary index in label order, then a trailing 0). One global width is
/// used so that the result stays timeable; chance nodes are preceded by
/// single-outcome padding of the same height.
pub fn binarize_actions(g: &Game) -> Result<Game> {
    for side in Side::BOTH {
        let view = CoordinatorView::new(g, side)?;
        if !view.action_recall() {
            return Err(Error::Unsupported(format!("side {side} does not have action recall")));
        }
    }
    let b_max = g
        .nodes()
        .iter()
        .filter(|n| n.kind == NodeKind::Player)
        .map(|n| n.actions.len())
        .max()
        .unwrap_or(1);
    let width = usize::BITS as usize - (b_max.max(1) - 1).leading_zeros() as usize;
    let height = width + 1;

    struct Ctx<'a> {
        g: &'a Game,
        width: usize,
        height: usize,
        out: Vec<RawNode>,
        keys: HashMap<(InfosetId, Vec<u8>), u64>,
    }

    impl Ctx<'_> {
        fn push(&mut self, n: RawNode) -> usize {
            self.out.push(n);
            self.out.len() - 1
        }

        fn pad(&mut self, below: usize, steps: usize) -> usize {
            let mut cur = below;
            for _ in 0..steps {
                cur = self.push(RawNode {
                    kind: NodeKind::Chance,
                    player: None,
                    infoset: None,
                    actions: vec![RawAction { label: "pass".into(), child: cur, prob: Some(1.0) }],
                    utility: None,
                });
            }
            cur
        }

        fn emit(&mut self, h: NodeId) -> usize {
            let node = self.g.node(h);
            match node.kind {
                NodeKind::Terminal => self.push(RawNode {
                    kind: NodeKind::Terminal,
                    player: None,
                    infoset: None,
                    actions: vec![],
                    utility: Some(node.utility),
                }),
                NodeKind::Chance => {
                    let actions = node
                        .actions
                        .iter()
                        .map(|a| RawAction {
                            label: self.g.label(a.label).to_string(),
                            child: self.emit(a.child),
                            prob: Some(a.prob),
                        })
                        .collect();
                    let c = self.push(RawNode { kind: NodeKind::Chance, player: None, infoset: None, actions, utility: None });
                    self.pad(c, self.height - 1)
                }
                NodeKind::Player => {
                    let mut order: Vec<usize> = (0..node.actions.len()).collect();
                    order.sort_by(|&a, &b| self.g.action_label(h, a).cmp(self.g.action_label(h, b)));
                    let codes: Vec<(Vec<u8>, NodeId)> = order
                        .iter()
                        .enumerate()
                        .map(|(rank, &a)| {
                            let mut bits: Vec<u8> = (0..self.width).rev().map(|j| ((rank >> j) & 1) as u8).collect();
                            bits.push(0);
                            (bits, node.actions[a].child)
                        })
                        .collect();
                    self.subtree(h, &codes, Vec::new())
                }
            }
        }

        fn subtree(&mut self, h: NodeId, codes: &[(Vec<u8>, NodeId)], prefix: Vec<u8>) -> usize {
            if prefix.len() == self.height {
                let child = codes.iter().find(|(c, _)| *c == prefix).unwrap().1;
                return self.emit(child);
            }
            let node = self.g.node(h);
            let mut actions = Vec::new();
            for bit in [0u8, 1] {
                let mut next = prefix.clone();
                next.push(bit);
                if codes.iter().any(|(c, _)| c.starts_with(&next)) {
                    let child = self.subtree(h, codes, next);
                    actions.push(RawAction { label: bit.to_string(), child, prob: None });
                }
            }
            let n_keys = self.keys.len() as u64;
            let key = *self.keys.entry((node.infoset.unwrap(), prefix)).or_insert(n_keys);
            self.push(RawNode { kind: NodeKind::Player, player: node.player, infoset: Some(key), actions, utility: None })
        }
    }

    let mut ctx = Ctx { g, width, height, out: Vec::new(), keys: HashMap::new() };
    let root = ctx.emit(g.root());
    let raw = g.to_raw();
    RawGame { players: raw.players, max: raw.max, min: raw.min, root, nodes: ctx.out }.into_game()
}

/// Whether some pure coordinator strategy plays to both nodes.
fn co_playable(view: &CoordinatorView, a: NodeId, b: NodeId) -> bool {
    let pa = view.pairs(view.seq(a));
    let pb = view.pairs(view.seq(b));
    pa.iter().all(|&(i, x)| pb.iter().all(|&(j, y)| i != j || x == y))
}

/// Complete inflation for one side: splits infosets into the connected
/// components of the co-playability relation until nothing changes.
pub fn inflate(g: &Game, side: Side) -> Result<Game> {
    let mut cur = g.clone();
    loop {
        let view = CoordinatorView::new(&cur, side)?;
        let mut key_of: Vec<Option<u64>> = vec![None; cur.num_nodes()];
        let mut next_key = 0u64;
        let mut changed = false;
        for (id, info) in cur.infosets().iter().enumerate() {
            let members = &info.members;
            let mut comp: Vec<usize> = (0..members.len()).collect();
            if cur.side_of_infoset(id as InfosetId) == Some(side) && members.len() > 1 {
                let mut dsu = super::analysis::Dsu::new(members.len());
                for x in 0..members.len() {
                    for y in x + 1..members.len() {
                        if co_playable(&view, members[x], members[y]) {
                            dsu.union(x as u32, y as u32);
                        }
                    }
                }
                for (x, c) in comp.iter_mut().enumerate() {
                    *c = dsu.find(x as u32) as usize;
                }
            } else {
                comp.iter_mut().for_each(|c| *c = 0);
            }
            let mut keys: HashMap<usize, u64> = HashMap::new();
            for (x, &m) in members.iter().enumerate() {
                let k = *keys.entry(comp[x]).or_insert_with(|| {
                    next_key += 1;
                    next_key - 1
                });
                key_of[m as usize] = Some(k);
            }
            changed |= keys.len() > 1;
        }
        if !changed {
            return Ok(cur);
        }
        let mut raw = cur.to_raw();
        for (h, n) in raw.nodes.iter_mut().enumerate() {
            n.infoset = key_of[h];
        }
        cur = raw.into_game()?;
    }
}

/// Inflates both sides.
pub fn inflate_all(g: &Game) -> Result<Game> {
    let mut cur = g.clone();
    for side in Side::BOTH {
        if !cur.team(side).is_empty() {
            cur = inflate(&cur, side)?;
        }
    }
    Ok(cur)
}
