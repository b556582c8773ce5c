//! DAG-form decision problems and regret minimization over them.

mod best_response;
mod cfr;
mod problem;
mod regret;
mod sequence_form;
mod tree;

pub use best_response::{best_response, BestResponse};
pub use cfr::DagCfr;
pub use problem::{DagDecisionProblem, DecId, FlowVector, ObsId, ROOT};
pub use regret::{local_observe, local_strategy, LocalRm, RmVariant};
pub use sequence_form::{sequence_form, SequenceForm};
pub use tree::{expand_to_tree, DagGeneric, TreeCfr, TreeExpansion, EXPANSION_BUDGET};
