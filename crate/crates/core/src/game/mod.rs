//! Game representation, JSON I/O, coordinator views, structural analysis
//! and transforms.

mod analysis;
mod coordinator;
mod json;
mod model;
mod transform;

pub use analysis::{analyze, SplitMode, SplitScratch, StructuralAnalysis};
pub use coordinator::{CoordinatorView, SeqId};
pub use json::{parse_game, parse_game_with_extras, serialize_game, serialize_game_with_extras};
pub use model::{
    Action, Game, GameBuilder, Infoset, InfosetId, Node, NodeId, NodeKind, RawAction, RawGame, RawNode, Side,
    PROB_TOLERANCE,
};
pub use transform::{binarize_actions, inflate, inflate_all};
