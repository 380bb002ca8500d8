//! Network optimization strategies: a catalog of network features, search
//! strategies and edge actions, and a sampler that draws (strategy, action)
//! combinations for variation prompts.

use std::fmt::Write as _;

use rand::seq::index;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::seeded_rng;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NosError {
    #[error("cannot sample {requested} distinct strategy/action pairs, only {available} exist")]
    TooMany { requested: usize, available: usize },
    #[error("no entries to render")]
    Empty,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Feature {
    Degree,
    PathCharacteristics,
    ClusteringCoefficient,
    Connectivity,
    CentralityMeasures,
    EdgeAttributes,
    DynamicCharacteristics,
    CommunityStructure,
}

impl Feature {
    pub const ALL: [Feature; 8] = [
        Feature::Degree,
        Feature::PathCharacteristics,
        Feature::ClusteringCoefficient,
        Feature::Connectivity,
        Feature::CentralityMeasures,
        Feature::EdgeAttributes,
        Feature::DynamicCharacteristics,
        Feature::CommunityStructure,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Feature::Degree => "Degree",
            Feature::PathCharacteristics => "Path Characteristics",
            Feature::ClusteringCoefficient => "Clustering Coefficient",
            Feature::Connectivity => "Connectivity",
            Feature::CentralityMeasures => "Centrality Measures",
            Feature::EdgeAttributes => "Edge Attributes",
            Feature::DynamicCharacteristics => "Dynamic Characteristics",
            Feature::CommunityStructure => "Community Structure",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Feature::Degree => "The number of connections each node has.",
            Feature::PathCharacteristics => "Shortest path, average path length, and network diameter.",
            Feature::ClusteringCoefficient => {
                "Local and global measures of how nodes tend to cluster together."
            }
            Feature::Connectivity => "Connected components and the strength of connections between them.",
            Feature::CentralityMeasures => {
                "Degree centrality, betweenness centrality, closeness centrality, and eigenvector centrality."
            }
            Feature::EdgeAttributes => "Weight and direction of edges.",
            Feature::DynamicCharacteristics => "Robustness to failures and ability to recover.",
            Feature::CommunityStructure => "Tightly-knit groups within the network.",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Strategy {
    HighDegreeNodePriority,
    LowDegreeNodePriority,
    BetweennessCentralityPriority,
    ClosenessCentralityPriority,
    EigenvectorCentralityPriority,
    HighWeightEdgePriority,
    LowWeightEdgePriority,
    ShortestPathOptimization,
    CriticalPathOptimization,
    SimilarityBasedNodeSelection,
    BoundaryNodeOptimization,
    HomophilyBasedEdgeOptimization,
    HeterophilyBasedEdgeOptimization,
    HubPeripheralOptimization,
    RandomNodeSelection,
    CentralNodeOptimization,
}

impl Strategy {
    pub const ALL: [Strategy; 16] = [
        Strategy::HighDegreeNodePriority,
        Strategy::LowDegreeNodePriority,
        Strategy::BetweennessCentralityPriority,
        Strategy::ClosenessCentralityPriority,
        Strategy::EigenvectorCentralityPriority,
        Strategy::HighWeightEdgePriority,
        Strategy::LowWeightEdgePriority,
        Strategy::ShortestPathOptimization,
        Strategy::CriticalPathOptimization,
        Strategy::SimilarityBasedNodeSelection,
        Strategy::BoundaryNodeOptimization,
        Strategy::HomophilyBasedEdgeOptimization,
        Strategy::HeterophilyBasedEdgeOptimization,
        Strategy::HubPeripheralOptimization,
        Strategy::RandomNodeSelection,
        Strategy::CentralNodeOptimization,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::HighDegreeNodePriority => "High-Degree Node Priority",
            Strategy::LowDegreeNodePriority => "Low-Degree Node Priority",
            Strategy::BetweennessCentralityPriority => "Betweenness Centrality Priority",
            Strategy::ClosenessCentralityPriority => "Closeness Centrality Priority",
            Strategy::EigenvectorCentralityPriority => "Eigenvector Centrality Priority",
            Strategy::HighWeightEdgePriority => "High-Weight Edge Priority",
            Strategy::LowWeightEdgePriority => "Low-Weight Edge Priority",
            Strategy::ShortestPathOptimization => "Shortest Path Optimization",
            Strategy::CriticalPathOptimization => "Critical Path Optimization",
            Strategy::SimilarityBasedNodeSelection => "Similarity-Based Node Selection",
            Strategy::BoundaryNodeOptimization => "Boundary Node Optimization",
            Strategy::HomophilyBasedEdgeOptimization => "Homophily-Based Edge Optimization",
            Strategy::HeterophilyBasedEdgeOptimization => "Heterophily-Based Edge Optimization",
            Strategy::HubPeripheralOptimization => "Hub-Peripheral Optimization",
            Strategy::RandomNodeSelection => "Random Node Selection",
            Strategy::CentralNodeOptimization => "Central Node Optimization",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Strategy::HighDegreeNodePriority => "Focus on nodes with many connections.",
            Strategy::LowDegreeNodePriority => "Focus on nodes with fewer connections.",
            Strategy::BetweennessCentralityPriority => {
                "Focus on nodes that frequently appear on shortest paths."
            }
            Strategy::ClosenessCentralityPriority => {
                "Focus on nodes that have short average distances to all other nodes."
            }
            Strategy::EigenvectorCentralityPriority => {
                "Focus on nodes that have high influence over the network."
            }
            Strategy::HighWeightEdgePriority => "Focus on edges with higher weights.",
            Strategy::LowWeightEdgePriority => "Focus on edges with lower weights.",
            Strategy::ShortestPathOptimization => "Optimize the shortest paths in the network.",
            Strategy::CriticalPathOptimization => {
                "Optimize paths that are crucial for network performance."
            }
            Strategy::SimilarityBasedNodeSelection => {
                "Focus on nodes with similar attributes or roles."
            }
            Strategy::BoundaryNodeOptimization => {
                "Focus on nodes at the boundary of communities or clusters."
            }
            Strategy::HomophilyBasedEdgeOptimization => {
                "Focus on edges connecting nodes with similar attributes."
            }
            Strategy::HeterophilyBasedEdgeOptimization => {
                "Focus on edges connecting nodes with different attributes."
            }
            Strategy::HubPeripheralOptimization => {
                "Optimize the connectivity between hub nodes and peripheral nodes."
            }
            Strategy::RandomNodeSelection => {
                "Randomly select nodes for optimization to introduce variability."
            }
            Strategy::CentralNodeOptimization => {
                "Focus on nodes that are centrally located within their respective communities."
            }
        }
    }

    /// The network feature whose metric this strategy reads.
    pub fn feature(self) -> Feature {
        use Strategy::*;
        match self {
            HighDegreeNodePriority | LowDegreeNodePriority | SimilarityBasedNodeSelection => {
                Feature::Degree
            }
            BetweennessCentralityPriority
            | ClosenessCentralityPriority
            | EigenvectorCentralityPriority => Feature::CentralityMeasures,
            HighWeightEdgePriority | LowWeightEdgePriority => Feature::EdgeAttributes,
            ShortestPathOptimization | CriticalPathOptimization => Feature::PathCharacteristics,
            HomophilyBasedEdgeOptimization => Feature::ClusteringCoefficient,
            HeterophilyBasedEdgeOptimization => Feature::Connectivity,
            HubPeripheralOptimization | RandomNodeSelection => Feature::DynamicCharacteristics,
            BoundaryNodeOptimization | CentralNodeOptimization => Feature::CommunityStructure,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Action {
    EdgeAddition,
    EdgeRelocation,
    EdgeSwapping,
}

impl Action {
    pub const ALL: [Action; 3] = [Action::EdgeAddition, Action::EdgeRelocation, Action::EdgeSwapping];

    pub fn name(self) -> &'static str {
        match self {
            Action::EdgeAddition => "Edge Addition",
            Action::EdgeRelocation => "Edge Relocation",
            Action::EdgeSwapping => "Edge Swapping",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Action::EdgeAddition => {
                "Involves the addition of new edges to a network, thereby increasing its redundancy and robustness."
            }
            Action::EdgeRelocation => {
                "Refers to the process of moving existing edges from one pair of nodes to another. This strategy alters the degree distribution of the nodes involved."
            }
            Action::EdgeSwapping => {
                "Involves exchanging the endpoints of two edges within the network. This technique preserves the original degree distribution."
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Catalog {
    pub features: &'static [Feature],
    pub strategies: &'static [Strategy],
    pub actions: &'static [Action],
}

pub fn catalog() -> Catalog {
    Catalog {
        features: &Feature::ALL,
        strategies: &Strategy::ALL,
        actions: &Action::ALL,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NosEntry {
    pub feature: Feature,
    pub strategy: Strategy,
    pub action: Action,
}

impl NosEntry {
    pub fn new(strategy: Strategy, action: Action) -> Self {
        Self {
            feature: strategy.feature(),
            strategy,
            action,
        }
    }
}

pub const PAIR_COUNT: usize = Strategy::ALL.len() * Action::ALL.len();

fn pair(i: usize) -> NosEntry {
    let n_actions = Action::ALL.len();
    NosEntry::new(Strategy::ALL[i / n_actions], Action::ALL[i % n_actions])
}

/// `count` distinct (strategy, action) pairs drawn uniformly without
/// replacement. The same seed always yields the same list.
pub fn sample_nos(seed: u64, count: usize) -> Result<Vec<NosEntry>, NosError> {
    if count > PAIR_COUNT {
        return Err(NosError::TooMany {
            requested: count,
            available: PAIR_COUNT,
        });
    }
    let mut rng = seeded_rng(seed);
    Ok(index::sample(&mut rng, PAIR_COUNT, count)
        .into_iter()
        .map(pair)
        .collect())
}

/// One numbered `feature | strategy | action` line per entry.
pub fn render_nos(entries: &[NosEntry]) -> Result<String, NosError> {
    if entries.is_empty() {
        return Err(NosError::Empty);
    }
    let mut out = String::new();
    for (i, e) in entries.iter().enumerate() {
        writeln!(
            out,
            "{}. {} | {} | {}",
            i + 1,
            e.feature.name(),
            e.strategy.name(),
            e.action.name()
        )
        .expect("writing to a String cannot fail");
    }
    Ok(out)
}
