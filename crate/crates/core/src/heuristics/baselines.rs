use rand::Rng;

use super::moves::{Edit, Move};
use super::search::{run_search, Acceptance, Proposer, SearchOptions};
use super::{require_size, AnnealParams, HeuristicError, OptimizerOutcome};
use crate::graph::{Graph, NodeId};
use crate::SearchRng;

fn random_neighbor(g: &Graph, u: NodeId, rng: &mut SearchRng) -> Option<NodeId> {
    let nbrs = g.neighbors(u);
    if nbrs.is_empty() {
        return None;
    }
    Some(nbrs[rng.random_range(0..nbrs.len())])
}

/// Uniform double edge swap: random node `a` with random neighbor `b`,
/// random node `c` with random neighbor `d`, then
/// `{(a,b), (c,d)} -> {(a,d), (c,b)}`.
///
/// The draw order is part of the contract: the DSL program
/// `a := random_node; b := neighbor_of(a); c := random_node; d := neighbor_of(c)`
/// consumes the generator identically.
#[derive(Debug, Clone, Copy, Default)]
pub struct HillClimbProposer;

impl Proposer for HillClimbProposer {
    fn propose(&mut self, g: &Graph, rng: &mut SearchRng) -> Option<Edit> {
        let n = g.node_count();
        let a = rng.random_range(0..n);
        let b = random_neighbor(g, a, rng)?;
        let c = rng.random_range(0..n);
        let d = random_neighbor(g, c, rng)?;
        Move::Swap(a, b, c, d).edit(g)
    }
}

/// Assortative double edge swap around a random node `x`: two distinct
/// neighbors `y1`, `y2` of `x` each contribute one incident edge
/// `(y1,z1)`, `(y2,z2)`. Of the two degree-preserving reconnections, the one
/// that joins the two highest-degree endpoints is preferred; the other is
/// used when the preferred one is illegal.
#[derive(Debug, Clone, Copy, Default)]
pub struct SmartRewireProposer;

impl Proposer for SmartRewireProposer {
    fn propose(&mut self, g: &Graph, rng: &mut SearchRng) -> Option<Edit> {
        let x = rng.random_range(0..g.node_count());
        let nbrs = g.neighbors(x);
        if nbrs.len() < 2 {
            return None;
        }
        let i = rng.random_range(0..nbrs.len());
        let mut j = rng.random_range(0..nbrs.len() - 1);
        if j >= i {
            j += 1;
        }
        let (y1, y2) = (nbrs[i], nbrs[j]);
        let z1 = random_neighbor(g, y1, rng)?;
        let z2 = random_neighbor(g, y2, rng)?;

        // joins (y1,y2) and (z1,z2)
        let parallel = Move::Swap(y1, z1, z2, y2);
        // joins (y1,z2) and (y2,z1)
        let crossed = Move::Swap(y1, z1, y2, z2);

        let mut ends = [y1, z1, y2, z2];
        ends.sort_by_key(|&u| (std::cmp::Reverse(g.degree(u)), u));
        let top = (ends[0].min(ends[1]), ends[0].max(ends[1]));
        let pair = |a: NodeId, b: NodeId| (a.min(b), a.max(b));
        let (first, second) = if top == pair(y1, z2) || top == pair(y2, z1) {
            (crossed, parallel)
        } else {
            (parallel, crossed)
        };
        first.edit(g).or_else(|| second.edit(g))
    }
}

/// Hill climbing over uniform degree-preserving swaps.
pub fn baseline_hc(g: &Graph, budget: usize, seed: u64) -> Result<OptimizerOutcome, HeuristicError> {
    require_size(g, 1, 0)?;
    Ok(run_search(
        g,
        budget,
        Acceptance::Improve,
        seed,
        &mut HillClimbProposer,
        &SearchOptions::default(),
    ))
}

/// Simulated annealing over uniform degree-preserving swaps.
pub fn baseline_sa(
    g: &Graph,
    budget: usize,
    anneal: AnnealParams,
    seed: u64,
) -> Result<OptimizerOutcome, HeuristicError> {
    require_size(g, 1, 0)?;
    anneal.validate()?;
    Ok(run_search(
        g,
        budget,
        Acceptance::Anneal(anneal),
        seed,
        &mut HillClimbProposer,
        &SearchOptions::default(),
    ))
}

/// Hill climbing over assortative (smart) rewiring swaps.
pub fn baseline_sr(g: &Graph, budget: usize, seed: u64) -> Result<OptimizerOutcome, HeuristicError> {
    require_size(g, 1, 0)?;
    Ok(run_search(
        g,
        budget,
        Acceptance::Improve,
        seed,
        &mut SmartRewireProposer,
        &SearchOptions::default(),
    ))
}
