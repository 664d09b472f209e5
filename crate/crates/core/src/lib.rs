//! Schelling segregation games on graphs: placements, improving response
//! dynamics, potential functions, cycle constructions and optimal placements.

pub mod counterexamples;
pub mod dynamics;
pub mod graph;
pub mod model;
pub mod optimal;
pub mod potential;

pub use dynamics::{
    apply_move, evaluate_move, improving_jumps, improving_moves, improving_swaps, is_stable, run_ird, state_key, Move,
    MoveKind, RunTrace, Schedule, Verdict,
};
pub use graph::{Connectivity, Graph, GraphBuilder, GraphError, NodeId};
pub use model::{
    AgentId, Aggregation, Game, GameConfig, ModelError, MoveMode, Placement, Rational, Tau, TypeAssignment, TypeId,
};
