//! Rewiring optimizers: three degree/neighborhood-aware heuristics and the
//! hill-climbing, annealing and smart-rewiring baselines.
//!
//! Every optimizer proposes one structural move at a time, pays exactly one
//! robustness evaluation for it, and either keeps it or rolls it back.

mod baselines;
mod discovered;
pub mod moves;
pub mod search;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, NodeId};

pub use baselines::{baseline_hc, baseline_sa, baseline_sr, HillClimbProposer, SmartRewireProposer};
pub use discovered::{
    heuristic_v1, heuristic_v2, heuristic_v3, HubNeighborProposer, HubRedistributionProposer,
    SimilarHubSwapProposer,
};
pub use moves::{EdgeOp, Edit, Move};
pub use search::{run_search, Acceptance, AnnealSchedule, Proposer, SearchOptions};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HeuristicError {
    #[error("graph too small: need at least {min_nodes} nodes and {min_edges} edges, got {nodes} and {edges}")]
    TooSmall {
        nodes: usize,
        edges: usize,
        min_nodes: usize,
        min_edges: usize,
    },
    #[error("invalid annealing parameters: {0}")]
    InvalidAnneal(String),
    #[error("unknown heuristic {0:?}")]
    Unknown(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnealParams {
    pub t0: f64,
    pub alpha: f64,
}

impl Default for AnnealParams {
    fn default() -> Self {
        Self { t0: 0.01, alpha: 0.999 }
    }
}

impl AnnealParams {
    pub fn new(t0: f64, alpha: f64) -> Result<Self, HeuristicError> {
        let p = Self { t0, alpha };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), HeuristicError> {
        if !(self.t0 > 0.0 && self.t0.is_finite()) {
            return Err(HeuristicError::InvalidAnneal(format!("t0 = {} must be positive", self.t0)));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(HeuristicError::InvalidAnneal(format!(
                "alpha = {} must lie in (0, 1)",
                self.alpha
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    BudgetExhausted,
    /// Too many consecutive attempts without a legal move.
    Stalled,
    TimedOut,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerOutcome {
    pub final_graph: Graph,
    pub final_r: f64,
    pub initial_r: f64,
    pub evaluations_used: usize,
    pub accepted_moves: usize,
    pub stop: StopReason,
}

fn require_size(g: &Graph, min_nodes: usize, min_edges: usize) -> Result<(), HeuristicError> {
    if g.node_count() < min_nodes || g.edge_count() < min_edges {
        return Err(HeuristicError::TooSmall {
            nodes: g.node_count(),
            edges: g.edge_count(),
            min_nodes,
            min_edges,
        });
    }
    Ok(())
}

/// Nodes ordered by degree, highest first, ties to the lowest id.
pub fn ranked_by_degree(g: &Graph) -> Vec<NodeId> {
    let mut nodes: Vec<NodeId> = (0..g.node_count()).collect();
    nodes.sort_by_key(|&u| (std::cmp::Reverse(g.degree(u)), u));
    nodes
}

/// Nodes ordered by degree, lowest first, ties to the lowest id.
pub fn ranked_by_degree_ascending(g: &Graph) -> Vec<NodeId> {
    let mut nodes: Vec<NodeId> = (0..g.node_count()).collect();
    nodes.sort_by_key(|&u| (g.degree(u), u));
    nodes
}

/// Natively implemented optimizers selectable by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Heuristic {
    V1,
    V2,
    V3,
    Hc,
    Sa,
    Sr,
}

impl Heuristic {
    pub const ALL: [Heuristic; 6] = [
        Heuristic::Hc,
        Heuristic::Sa,
        Heuristic::Sr,
        Heuristic::V1,
        Heuristic::V2,
        Heuristic::V3,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Heuristic::V1 => "v1",
            Heuristic::V2 => "v2",
            Heuristic::V3 => "v3",
            Heuristic::Hc => "hc",
            Heuristic::Sa => "sa",
            Heuristic::Sr => "sr",
        }
    }

    /// Whether the heuristic keeps every node degree unchanged.
    pub fn preserves_degrees(self) -> bool {
        !matches!(self, Heuristic::V2 | Heuristic::V3)
    }

    /// Whether only strictly improving moves are kept.
    pub fn improve_only(self) -> bool {
        !matches!(self, Heuristic::V1 | Heuristic::Sa)
    }

    pub fn run(
        self,
        g: &Graph,
        budget: usize,
        anneal: AnnealParams,
        seed: u64,
    ) -> Result<OptimizerOutcome, HeuristicError> {
        match self {
            Heuristic::V1 => heuristic_v1(g, budget, anneal, seed),
            Heuristic::V2 => heuristic_v2(g, budget, seed),
            Heuristic::V3 => heuristic_v3(g, budget, seed),
            Heuristic::Hc => baseline_hc(g, budget, seed),
            Heuristic::Sa => baseline_sa(g, budget, anneal, seed),
            Heuristic::Sr => baseline_sr(g, budget, seed),
        }
    }
}

impl fmt::Display for Heuristic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Heuristic {
    type Err = HeuristicError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Heuristic::ALL
            .into_iter()
            .find(|h| h.name() == s)
            .ok_or_else(|| HeuristicError::Unknown(s.to_string()))
    }
}
