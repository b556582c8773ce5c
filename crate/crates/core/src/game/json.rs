//! JSON game documents.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use super::model::{Game, NodeKind, RawAction, RawGame, RawNode};
use crate::error::{Error, Result};

#[derive(Serialize, Deserialize)]
struct TeamsDoc {
    max: Vec<u32>,
    min: Vec<u32>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ProbDoc {
    Num(f64),
    Text(String),
}

#[derive(Serialize, Deserialize)]
struct ActionDoc {
    label: String,
    child: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    prob: Option<ProbDoc>,
}

#[derive(Serialize, Deserialize)]
struct NodeDoc {
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    player: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    infoset: Option<u64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    actions: Vec<ActionDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    utility: Option<f64>,
}

#[derive(Serialize, Deserialize)]
struct GameDoc {
    players: Vec<String>,
    teams: TeamsDoc,
    root: usize,
    nodes: Vec<NodeDoc>,
    #[serde(flatten)]
    extra: Map<String, Value>,
}

fn parse_prob(p: &ProbDoc) -> Result<f64> {
    match p {
        ProbDoc::Num(x) => Ok(*x),
        ProbDoc::Text(s) => {
            let bad = || Error::Malformed(format!("bad probability {s:?}"));
            match s.split_once('/') {
                Some((n, d)) => {
                    let n: f64 = n.trim().parse().map_err(|_| bad())?;
                    let d: f64 = d.trim().parse().map_err(|_| bad())?;
                    if d == 0.0 {
                        return Err(bad());
                    }
                    Ok(n / d)
                }
                None => s.trim().parse().map_err(|_| bad()),
            }
        }
    }
}

fn doc_to_raw(doc: GameDoc) -> Result<RawGame> {
    let mut nodes = Vec::with_capacity(doc.nodes.len());
    for (i, n) in doc.nodes.into_iter().enumerate() {
        let kind = match n.kind.as_str() {
            "chance" => NodeKind::Chance,
            "player" => NodeKind::Player,
            "terminal" => NodeKind::Terminal,
            other => return Err(Error::Malformed(format!("node {i} has unknown kind {other:?}"))),
        };
        let mut actions = Vec::with_capacity(n.actions.len());
        for a in n.actions {
            let prob = a.prob.as_ref().map(parse_prob).transpose()?;
            actions.push(RawAction { label: a.label, child: a.child, prob });
        }
        nodes.push(RawNode { kind, player: n.player, infoset: n.infoset, actions, utility: n.utility });
    }
    Ok(RawGame { players: doc.players, max: doc.teams.max, min: doc.teams.min, root: doc.root, nodes })
}

/// Parses a game document together with any extra top-level keys
/// (for example `annotations` or `manifest`).
pub fn parse_game_with_extras(text: &str) -> Result<(Game, Map<String, Value>)> {
    let doc: GameDoc = serde_json::from_str(text).map_err(|e| Error::Malformed(e.to_string()))?;
    let extra = doc.extra.clone();
    let g = doc_to_raw(GameDoc { extra: Map::new(), ..doc })?.into_game()?;
    Ok((g, extra))
}

pub fn parse_game(text: &str) -> Result<Game> {
    parse_game_with_extras(text).map(|(g, _)| g)
}

fn game_to_doc(g: &Game, extra: Map<String, Value>) -> GameDoc {
    let raw = g.to_raw();
    let nodes = raw
        .nodes
        .into_iter()
        .map(|n| NodeDoc {
            kind: n.kind.name().to_string(),
            player: n.player,
            infoset: n.infoset,
            actions: n
                .actions
                .into_iter()
                .map(|a| ActionDoc { label: a.label, child: a.child, prob: a.prob.map(ProbDoc::Num) })
                .collect(),
            utility: n.utility,
        })
        .collect();
    GameDoc { players: raw.players, teams: TeamsDoc { max: raw.max, min: raw.min }, root: raw.root, nodes, extra }
}

/// Serializes a game with additional top-level keys.
pub fn serialize_game_with_extras(g: &Game, extra: Map<String, Value>) -> String {
    serde_json::to_string(&game_to_doc(g, extra)).expect("game document serializes")
}

pub fn serialize_game(g: &Game) -> String {
    serialize_game_with_extras(g, Map::new())
}
