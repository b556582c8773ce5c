//! Team belief DAG (TB-DAG) construction and regret-minimization solving for
//! timeable two-player zero-sum games where each side may be a team whose
//! coordinator has imperfect recall.
//!
//! The pipeline is: build or parse an [`game::Game`], run
//! [`game::StructuralAnalysis`] per side, build each side's
//! [`tbdag::TbDag`], then run [`solver::solve`] on the pair.

pub mod belief_game;
pub mod dag;
pub(crate) mod csr;
pub mod error;
pub mod game;
pub mod manifest;
pub mod solver;
pub mod tbdag;
pub mod zoo;

pub use error::{Error, Result};
pub use game::{Game, Side};
