use super::problem::{DagDecisionProblem, ObsId};
use crate::error::{Error, Result};
use crate::game::{CoordinatorView, Game, InfosetId, Side};

/// Tree-form decision problem of a perfect-recall side: decision points
/// are infosets, observation points are sequences.
#[derive(Clone, Debug)]
pub struct SequenceForm {
    pub problem: DagDecisionProblem,
    /// Infoset of each decision point.
    pub infoset: Vec<InfosetId>,
    /// Observation point (sequence) of each terminal, in `g.terminals()` order.
    pub terminal_slot: Vec<ObsId>,
}

pub fn sequence_form(g: &Game, side: Side) -> Result<SequenceForm> {
    let view = CoordinatorView::new(g, side)?;
    if !view.perfect_recall() {
        return Err(Error::Unsupported(format!("side {side} does not have perfect recall")));
    }
    let infosets = view.infosets().to_vec();
    let mut obs_children = vec![Vec::new(); view.num_sequences()];
    let mut dec_children = Vec::with_capacity(infosets.len());
    for (d, &i) in infosets.iter().enumerate() {
        let info = g.infoset(i);
        let parent = view.seq(info.members[0]);
        obs_children[parent as usize].push(d as u32);
        let kids: Vec<u32> = (0..info.labels.len() as u32)
            .map(|a| view.extend(parent, i, a).expect("every action leads to a node"))
            .collect();
        dec_children.push(kids);
    }
    let problem = DagDecisionProblem::new(&obs_children, &dec_children)?;
    let terminal_slot = g.terminals().iter().map(|&z| view.seq(z)).collect();
    Ok(SequenceForm { problem, infoset: infosets, terminal_slot })
}
