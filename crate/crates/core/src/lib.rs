//! Network robustness optimization under targeted attack.
//!
//! - [`graph`]: undirected simple graphs, BA generation, edge-list I/O
//! - [`robustness`]: adaptive highest-degree attack and the R measure
//! - [`aff`]: adaptive fitness with a generation-weighted structural penalty
//! - [`heuristics`]: native rewiring optimizers and the shared search loop
//! - [`nos`]: network optimization strategy catalog and sampler
//! - [`hdsl`]: the heuristic DSL (parser, renderer, validator, interpreter)

pub mod aff;
pub mod graph;
pub mod hdsl;
pub mod heuristics;
pub mod nos;
pub mod robustness;

use rand::SeedableRng;

pub use graph::{generate_ba, BaParams, DegreeSequence, Graph, GraphError, NodeId};
pub use heuristics::{AnnealParams, Heuristic, OptimizerOutcome};
pub use robustness::{attack_trace, robustness_r, AttackTrace, BudgetExhausted, BudgetedEvaluator};

/// Generator used for every seeded draw in the crate.
pub type SearchRng = rand_chacha::ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> SearchRng {
    SearchRng::seed_from_u64(seed)
}
