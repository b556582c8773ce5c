use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type NodeId = u32;
pub type InfosetId = u32;

/// Tolerance on the sum of chance probabilities at a node.
pub const PROB_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Max,
    Min,
}

impl Side {
    pub const BOTH: [Side; 2] = [Side::Max, Side::Min];

    pub fn opponent(self) -> Side {
        match self {
            Side::Max => Side::Min,
            Side::Min => Side::Max,
        }
    }

    /// +1 for MAX, -1 for MIN: multiply a MAX utility to get this side's.
    pub fn sign(self) -> f64 {
        match self {
            Side::Max => 1.0,
            Side::Min => -1.0,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Side::Max => "max",
            Side::Min => "min",
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Side {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "max" => Ok(Side::Max),
            "min" => Ok(Side::Min),
            other => Err(Error::Params(format!("unknown side {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NodeKind {
    Chance,
    Player,
    Terminal,
}

impl NodeKind {
    pub fn name(self) -> &'static str {
        match self {
            NodeKind::Chance => "chance",
            NodeKind::Player => "player",
            NodeKind::Terminal => "terminal",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Action {
    /// Index into the game's label pool.
    pub label: u32,
    pub child: NodeId,
    /// Chance probability; 0 at player nodes.
    pub prob: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Node {
    pub kind: NodeKind,
    pub parent: Option<NodeId>,
    pub depth: u32,
    pub player: Option<u32>,
    pub infoset: Option<InfosetId>,
    pub actions: Vec<Action>,
    /// MAX utility at terminals; 0 elsewhere.
    pub utility: f64,
}

impl Node {
    pub fn is_terminal(&self) -> bool {
        self.kind == NodeKind::Terminal
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Infoset {
    pub player: u32,
    pub depth: u32,
    pub members: Vec<NodeId>,
    pub labels: Vec<u32>,
}

/// A validated, timeable extensive-form game. Node ids are dense and in
/// preorder; infoset ids are dense in order of first appearance.
#[derive(Clone, Debug, PartialEq)]
pub struct Game {
    players: Vec<String>,
    team_of: Vec<Option<Side>>,
    nodes: Vec<Node>,
    infosets: Vec<Infoset>,
    labels: Vec<String>,
    terminals: Vec<NodeId>,
    reach: Vec<f64>,
    depth: u32,
    branching: usize,
}

impl Game {
    pub fn players(&self) -> &[String] {
        &self.players
    }

    pub fn team_of(&self, player: u32) -> Option<Side> {
        self.team_of.get(player as usize).copied().flatten()
    }

    pub fn team(&self, side: Side) -> Vec<u32> {
        (1..self.players.len() as u32)
            .filter(|&p| self.team_of(p) == Some(side))
            .collect()
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, h: NodeId) -> &Node {
        &self.nodes[h as usize]
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn root(&self) -> NodeId {
        0
    }

    pub fn infosets(&self) -> &[Infoset] {
        &self.infosets
    }

    pub fn infoset(&self, i: InfosetId) -> &Infoset {
        &self.infosets[i as usize]
    }

    pub fn num_actions(&self, i: InfosetId) -> usize {
        self.infosets[i as usize].labels.len()
    }

    pub fn label(&self, id: u32) -> &str {
        &self.labels[id as usize]
    }

    pub fn action_label(&self, h: NodeId, a: usize) -> &str {
        self.label(self.nodes[h as usize].actions[a].label)
    }

    pub fn terminals(&self) -> &[NodeId] {
        &self.terminals
    }

    /// Product of chance probabilities on the path to `h`.
    pub fn chance_reach(&self, h: NodeId) -> f64 {
        self.reach[h as usize]
    }

    /// Maximum node depth.
    pub fn depth(&self) -> u32 {
        self.depth
    }

    /// Maximum number of actions at any node.
    pub fn branching(&self) -> usize {
        self.branching
    }

    /// Whether `h` is a player node belonging to `side`.
    pub fn is_side_node(&self, h: NodeId, side: Side) -> bool {
        let n = &self.nodes[h as usize];
        n.kind == NodeKind::Player && n.player.and_then(|p| self.team_of(p)) == Some(side)
    }

    pub fn side_of_infoset(&self, i: InfosetId) -> Option<Side> {
        self.team_of(self.infosets[i as usize].player)
    }

    /// Infoset ids owned by `side`'s players, ascending.
    pub fn side_infosets(&self, side: Side) -> Vec<InfosetId> {
        (0..self.infosets.len() as u32)
            .filter(|&i| self.side_of_infoset(i) == Some(side))
            .collect()
    }

    /// Number of infosets with at least two members.
    pub fn num_nontrivial_infosets(&self) -> usize {
        self.infosets.iter().filter(|i| i.members.len() > 1).count()
    }

    /// Converts back to the raw form (used by transforms and serialization).
    pub fn to_raw(&self) -> RawGame {
        let mut max = Vec::new();
        let mut min = Vec::new();
        for p in 1..self.players.len() as u32 {
            match self.team_of(p) {
                Some(Side::Max) => max.push(p),
                Some(Side::Min) => min.push(p),
                None => {}
            }
        }
        let nodes = self
            .nodes
            .iter()
            .map(|n| RawNode {
                kind: n.kind,
                player: n.player,
                infoset: n.infoset.map(u64::from),
                actions: n
                    .actions
                    .iter()
                    .map(|a| RawAction {
                        label: self.labels[a.label as usize].clone(),
                        child: a.child as usize,
                        prob: (n.kind == NodeKind::Chance).then_some(a.prob),
                    })
                    .collect(),
                utility: n.is_terminal().then_some(n.utility),
            })
            .collect();
        RawGame { players: self.players.clone(), max, min, root: 0, nodes }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RawAction {
    pub label: String,
    pub child: usize,
    pub prob: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RawNode {
    pub kind: NodeKind,
    pub player: Option<u32>,
    pub infoset: Option<u64>,
    pub actions: Vec<RawAction>,
    pub utility: Option<f64>,
}

/// Unvalidated game with arbitrary node numbering and infoset keys.
#[derive(Clone, Debug, PartialEq)]
pub struct RawGame {
    pub players: Vec<String>,
    pub max: Vec<u32>,
    pub min: Vec<u32>,
    pub root: usize,
    pub nodes: Vec<RawNode>,
}

impl RawGame {
    /// Validates and renumbers into canonical preorder form.
    pub fn into_game(self) -> Result<Game> {
        let RawGame { players, max, min, root, nodes: raw } = self;
        if players.is_empty() {
            return Err(Error::invalid("player list is empty"));
        }
        if players[0] != "chance" {
            return Err(Error::invalid(format!("player 0 must be \"chance\", got {:?}", players[0])));
        }
        let mut team_of = vec![None; players.len()];
        for (side, list) in [(Side::Max, &max), (Side::Min, &min)] {
            for &p in list {
                if p == 0 || p as usize >= players.len() {
                    return Err(Error::invalid(format!("team {side} lists unknown player {p}")));
                }
                if team_of[p as usize].is_some() {
                    return Err(Error::invalid(format!("player {p} assigned to more than one team")));
                }
                team_of[p as usize] = Some(side);
            }
        }
        if let Some(p) = (1..players.len()).find(|&p| team_of[p].is_none()) {
            return Err(Error::invalid(format!("player {p} is not assigned to a team")));
        }
        if root >= raw.len() {
            return Err(Error::invalid(format!("root {root} out of range ({} nodes)", raw.len())));
        }

        // Preorder renumbering.
        let n = raw.len();
        let mut new_id = vec![u32::MAX; n];
        let mut order = Vec::with_capacity(n);
        let mut parent_of = vec![None; n];
        let mut stack = vec![root];
        new_id[root] = 0;
        while let Some(old) = stack.pop() {
            new_id[old] = order.len() as u32;
            order.push(old);
            for a in raw[old].actions.iter().rev() {
                if a.child >= n {
                    return Err(Error::invalid(format!(
                        "node {old} has dangling child reference {}",
                        a.child
                    )));
                }
                if a.child == root || parent_of[a.child].is_some() {
                    return Err(Error::invalid(format!("node {} has more than one parent", a.child)));
                }
                parent_of[a.child] = Some(old);
                stack.push(a.child);
            }
        }
        if order.len() != n {
            let orphan = (0..n).find(|&i| new_id[i] == u32::MAX && i != root).unwrap_or(0);
            return Err(Error::invalid(format!("node {orphan} is not reachable from the root")));
        }

        let mut labels: Vec<String> = Vec::new();
        let mut label_ids: HashMap<String, u32> = HashMap::new();
        let mut intern = |s: &str| -> u32 {
            if let Some(&id) = label_ids.get(s) {
                return id;
            }
            let id = labels.len() as u32;
            labels.push(s.to_string());
            label_ids.insert(s.to_string(), id);
            id
        };

        let mut nodes: Vec<Node> = Vec::with_capacity(n);
        let mut infosets: Vec<Infoset> = Vec::new();
        let mut infoset_ids: HashMap<u64, InfosetId> = HashMap::new();
        let mut reach = Vec::with_capacity(n);
        let mut terminals = Vec::new();
        let mut depth_max = 0;
        let mut branching = 0;

        for (new, &old) in order.iter().enumerate() {
            let r = &raw[old];
            let parent = parent_of[old].map(|p| new_id[p]);
            let depth = parent.map_or(0, |p| nodes[p as usize].depth + 1);
            let parent_reach = parent.map_or(1.0, |p| {
                let pn: &Node = &nodes[p as usize];
                let a = pn.actions.iter().find(|a| a.child == new as u32).expect("child listed");
                if pn.kind == NodeKind::Chance {
                    reach[p as usize] * a.prob
                } else {
                    reach[p as usize]
                }
            });
            reach.push(parent_reach);
            depth_max = depth_max.max(depth);
            branching = branching.max(r.actions.len());

            let mut seen = std::collections::HashSet::new();
            for a in &r.actions {
                if !seen.insert(a.label.as_str()) {
                    return Err(Error::invalid(format!("node {old} repeats action label {:?}", a.label)));
                }
            }
            let mut node = Node {
                kind: r.kind,
                parent,
                depth,
                player: None,
                infoset: None,
                actions: Vec::with_capacity(r.actions.len()),
                utility: 0.0,
            };
            match r.kind {
                NodeKind::Terminal => {
                    if !r.actions.is_empty() {
                        return Err(Error::invalid(format!("terminal node {old} has actions")));
                    }
                    let u = r
                        .utility
                        .ok_or_else(|| Error::invalid(format!("terminal node {old} has no utility")))?;
                    if !u.is_finite() {
                        return Err(Error::invalid(format!("terminal node {old} has non-finite utility")));
                    }
                    node.utility = u;
                    terminals.push(new as u32);
                }
                NodeKind::Chance => {
                    if r.actions.is_empty() {
                        return Err(Error::invalid(format!("chance node {old} has zero actions")));
                    }
                    let mut total = 0.0;
                    for a in &r.actions {
                        let p = a.prob.ok_or_else(|| {
                            Error::invalid(format!("chance node {old} action {:?} has no probability", a.label))
                        })?;
                        if !p.is_finite() || p < 0.0 {
                            return Err(Error::invalid(format!("chance node {old} has invalid probability {p}")));
                        }
                        total += p;
                        node.actions.push(Action { label: intern(&a.label), child: new_id[a.child], prob: p });
                    }
                    if (total - 1.0).abs() > PROB_TOLERANCE {
                        return Err(Error::invalid(format!(
                            "chance probabilities at node {old} sum to {total}, not 1"
                        )));
                    }
                }
                NodeKind::Player => {
                    let p = r
                        .player
                        .ok_or_else(|| Error::invalid(format!("player node {old} has no player")))?;
                    if p == 0 || p as usize >= players.len() {
                        return Err(Error::invalid(format!("player node {old} has invalid player {p}")));
                    }
                    let key = r
                        .infoset
                        .ok_or_else(|| Error::invalid(format!("player node {old} has no infoset")))?;
                    if r.actions.is_empty() {
                        return Err(Error::invalid(format!("player node {old} has zero actions")));
                    }
                    for a in &r.actions {
                        node.actions.push(Action { label: intern(&a.label), child: new_id[a.child], prob: 0.0 });
                    }
                    let node_labels: Vec<u32> = node.actions.iter().map(|a| a.label).collect();
                    let id = match infoset_ids.get(&key) {
                        Some(&id) => {
                            let info = &mut infosets[id as usize];
                            if info.player != p {
                                return Err(Error::invalid(format!(
                                    "infoset {key} mixes players {} and {p}",
                                    info.player
                                )));
                            }
                            if info.labels != node_labels {
                                return Err(Error::invalid(format!(
                                    "infoset {key}: node {old} action labels differ from other members"
                                )));
                            }
                            if info.depth != depth {
                                return Err(Error::invalid(format!(
                                    "infoset {key} is not timeable: members at depths {} and {depth}",
                                    info.depth
                                )));
                            }
                            info.members.push(new as u32);
                            id
                        }
                        None => {
                            let id = infosets.len() as InfosetId;
                            infoset_ids.insert(key, id);
                            infosets.push(Infoset {
                                player: p,
                                depth,
                                members: vec![new as u32],
                                labels: node_labels,
                            });
                            id
                        }
                    };
                    node.player = Some(p);
                    node.infoset = Some(id);
                }
            }
            nodes.push(node);
        }

        Ok(Game { players, team_of, nodes, infosets, labels, terminals, reach, depth: depth_max, branching })
    }
}

/// Convenience builder for generators: nodes may be pushed in any order
/// (typically children first) and infosets are keyed by strings.
#[derive(Debug)]
pub struct GameBuilder {
    raw: RawGame,
    keys: HashMap<String, u64>,
}

impl GameBuilder {
    pub fn new(players: &[&str], max: &[u32], min: &[u32]) -> Self {
        GameBuilder {
            raw: RawGame {
                players: players.iter().map(|s| s.to_string()).collect(),
                max: max.to_vec(),
                min: min.to_vec(),
                root: 0,
                nodes: Vec::new(),
            },
            keys: HashMap::new(),
        }
    }

    fn push(&mut self, node: RawNode) -> usize {
        self.raw.nodes.push(node);
        self.raw.nodes.len() - 1
    }

    pub fn terminal(&mut self, utility: f64) -> usize {
        self.push(RawNode { kind: NodeKind::Terminal, player: None, infoset: None, actions: vec![], utility: Some(utility) })
    }

    pub fn chance<S: Into<String>>(&mut self, outcomes: Vec<(S, f64, usize)>) -> usize {
        let actions = outcomes
            .into_iter()
            .map(|(label, p, child)| RawAction { label: label.into(), child, prob: Some(p) })
            .collect();
        self.push(RawNode { kind: NodeKind::Chance, player: None, infoset: None, actions, utility: None })
    }

    pub fn player<S: Into<String>>(&mut self, player: u32, infoset: &str, actions: Vec<(S, usize)>) -> usize {
        let next = self.keys.len() as u64;
        let key = *self.keys.entry(infoset.to_string()).or_insert(next);
        let actions = actions
            .into_iter()
            .map(|(label, child)| RawAction { label: label.into(), child, prob: None })
            .collect();
        self.push(RawNode { kind: NodeKind::Player, player: Some(player), infoset: Some(key), actions, utility: None })
    }

    pub fn build(mut self, root: usize) -> Result<Game> {
        self.raw.root = root;
        self.raw.into_game()
    }
}
