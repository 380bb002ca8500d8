use rand::Rng;

use super::moves::{Edit, Move};
use super::search::{run_search, Acceptance, Proposer, SearchOptions};
use super::{
    ranked_by_degree, ranked_by_degree_ascending, require_size, AnnealParams, HeuristicError,
    OptimizerOutcome,
};
use crate::graph::{Graph, NodeId};
use crate::SearchRng;

fn share(n: usize, fraction: f64, min: usize) -> usize {
    ((n as f64 * fraction).ceil() as usize).max(min).min(n)
}

/// Nodes whose degree is at least that of the `k`-th highest-degree node.
fn upper_tier(g: &Graph, k: usize) -> Vec<NodeId> {
    let cut = g.degree(ranked_by_degree(g)[k - 1]);
    (0..g.node_count()).filter(|&v| g.degree(v) >= cut).collect()
}

/// Nodes whose degree is at most that of the `k`-th lowest-degree node.
fn lower_tier(g: &Graph, k: usize) -> Vec<NodeId> {
    let cut = g.degree(ranked_by_degree_ascending(g)[k - 1]);
    (0..g.node_count()).filter(|&v| g.degree(v) <= cut).collect()
}

fn pick<T: Copy>(items: &[T], rng: &mut SearchRng) -> Option<T> {
    if items.is_empty() {
        None
    } else {
        Some(items[rng.random_range(0..items.len())])
    }
}

/// Degree-preserving swaps around a critical hub `u` and a partner `v` of
/// similar degree. With `a` a neighbor of `u` and `b` a neighbor of `v`, one
/// edge at each of `a` and `b` is exchanged: `{(a,c), (b,e)} -> {(a,e), (b,c)}`.
///
/// Swapping the hub edges `(u,a)`, `(v,b)` themselves barely changes R when
/// `u` and `v` have nearly equal degree, so the exchange happens one hop out.
///
/// `max_diff` is the tolerated degree gap between `u` and `v`. It widens by
/// one whenever the chosen hub has no partner and drops back to 1 after an
/// accepted move.
#[derive(Debug, Clone)]
pub struct SimilarHubSwapProposer {
    max_diff: usize,
}

impl Default for SimilarHubSwapProposer {
    fn default() -> Self {
        Self { max_diff: 1 }
    }
}

impl SimilarHubSwapProposer {
    pub fn max_diff(&self) -> usize {
        self.max_diff
    }
}

impl Proposer for SimilarHubSwapProposer {
    fn propose(&mut self, g: &Graph, rng: &mut SearchRng) -> Option<Edit> {
        let n = g.node_count();
        let critical = share(n, 0.05, 2);
        let u = ranked_by_degree(g)[rng.random_range(0..critical)];
        let du = g.degree(u);
        let partners: Vec<NodeId> = (0..n)
            .filter(|&v| v != u && g.degree(v).abs_diff(du) <= self.max_diff)
            .collect();
        let Some(v) = pick(&partners, rng) else {
            if self.max_diff < g.max_degree() {
                self.max_diff += 1;
            }
            return None;
        };
        let a = pick(g.neighbors(u), rng)?;
        let b = pick(g.neighbors(v), rng)?;
        let c = pick(g.neighbors(a), rng)?;
        let e = pick(g.neighbors(b), rng)?;
        Move::Swap(a, c, b, e).edit(g)
    }

    fn feedback(&mut self, accepted: bool) {
        if accepted {
            self.max_diff = 1;
        }
    }
}

/// Moves edges away from hubs toward low-degree nodes.
///
/// `h` is drawn from the top-decile degree tier and `l` from the bottom
/// tier (all nodes tied with the decile boundary are included). A random
/// neighbor `x` of `h` that `l` can take over is chosen and `(h,x)` becomes
/// `(l,x)`.
#[derive(Debug, Clone, Default)]
pub struct HubRedistributionProposer;

impl Proposer for HubRedistributionProposer {
    fn propose(&mut self, g: &Graph, rng: &mut SearchRng) -> Option<Edit> {
        let decile = share(g.node_count(), 0.1, 1);
        let h = pick(&upper_tier(g, decile), rng)?;
        let l = pick(&lower_tier(g, decile), rng)?;
        if h == l {
            return None;
        }
        let movable: Vec<NodeId> = g
            .neighbors(h)
            .iter()
            .copied()
            .filter(|&x| x != l && !g.has_edge(l, x))
            .collect();
        let x = pick(&movable, rng)?;
        Move::Relocate(h, x, l).edit(g)
    }
}

/// Densifies the neighborhood of a hub: for a top-decile node `h` and two of
/// its non-adjacent neighbors `a`, `b`, add `(a,b)` and drop `(h,a)`.
/// Among the candidate pairs only those whose gaining endpoint `b` has the
/// smallest degree are considered.
#[derive(Debug, Clone, Default)]
pub struct HubNeighborProposer {
    pairs: Vec<(NodeId, NodeId)>,
}

impl Proposer for HubNeighborProposer {
    fn propose(&mut self, g: &Graph, rng: &mut SearchRng) -> Option<Edit> {
        let decile = share(g.node_count(), 0.1, 1);
        let h = pick(&upper_tier(g, decile), rng)?;
        let nbrs = g.neighbors(h);
        self.pairs.clear();
        let mut lowest = usize::MAX;
        for &a in nbrs {
            for &b in nbrs {
                if a == b || g.has_edge(a, b) {
                    continue;
                }
                let db = g.degree(b);
                if db < lowest {
                    lowest = db;
                    self.pairs.clear();
                }
                if db == lowest {
                    self.pairs.push((a, b));
                }
            }
        }
        let (a, b) = pick(&self.pairs, rng)?;
        Move::Relocate(h, a, b).edit(g)
    }
}

/// Similar-degree hub swapping under simulated-annealing acceptance.
/// Preserves the degree sequence exactly.
pub fn heuristic_v1(
    g: &Graph,
    budget: usize,
    anneal: AnnealParams,
    seed: u64,
) -> Result<OptimizerOutcome, HeuristicError> {
    require_size(g, 4, 2)?;
    anneal.validate()?;
    Ok(run_search(
        g,
        budget,
        Acceptance::Anneal(anneal),
        seed,
        &mut SimilarHubSwapProposer::default(),
        &SearchOptions::default(),
    ))
}

/// Hub-to-periphery edge redistribution, improve-only. Preserves edge count.
pub fn heuristic_v2(g: &Graph, budget: usize, seed: u64) -> Result<OptimizerOutcome, HeuristicError> {
    require_size(g, 3, 2)?;
    Ok(run_search(
        g,
        budget,
        Acceptance::Improve,
        seed,
        &mut HubRedistributionProposer,
        &SearchOptions::default(),
    ))
}

/// Hub-neighborhood edge redistribution, improve-only. Preserves edge count.
pub fn heuristic_v3(g: &Graph, budget: usize, seed: u64) -> Result<OptimizerOutcome, HeuristicError> {
    require_size(g, 3, 2)?;
    Ok(run_search(
        g,
        budget,
        Acceptance::Improve,
        seed,
        &mut HubNeighborProposer::default(),
        &SearchOptions::default(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate_ba, BaParams};
    use crate::robustness::robustness_r;
    use crate::seeded_rng;

    #[test]
    fn v1_preserves_degrees() {
        let g = generate_ba(BaParams::new(60, 3, 2, 4)).unwrap();
        let out = heuristic_v1(&g, 400, AnnealParams::default(), 9).unwrap();
        assert_eq!(out.final_graph.degree_sequence(), g.degree_sequence());
        assert!(out.evaluations_used <= 400);
        assert_eq!(out.final_r, robustness_r(&out.final_graph));
    }

    #[test]
    fn v1_leaves_complete_graph_alone() {
        let k4 = Graph::complete(4);
        let out = heuristic_v1(&k4, 100, AnnealParams::default(), 1).unwrap();
        assert_eq!(out.final_graph, k4);
        assert_eq!(out.evaluations_used, 0);
    }

    #[test]
    fn v1_widens_then_resets_max_diff() {
        // hub 0 has degree 5 and no partner within gap 1
        let g = Graph::from_edges(8, &[(0, 1), (0, 2), (0, 3), (0, 4), (0, 5), (6, 7)]).unwrap();
        let mut p = SimilarHubSwapProposer::default();
        let mut rng = seeded_rng(0);
        for _ in 0..20 {
            p.propose(&g, &mut rng);
        }
        assert!(p.max_diff() > 1);
        p.feedback(true);
        assert_eq!(p.max_diff(), 1);
    }

    #[test]
    fn v1_rejects_tiny_graphs() {
        assert!(heuristic_v1(&Graph::path(3), 10, AnnealParams::default(), 0).is_err());
        assert!(heuristic_v1(&Graph::star(4), 10, AnnealParams { t0: 0.0, alpha: 0.5 }, 0).is_err());
    }

    #[test]
    fn v2_relocates_on_star() {
        let star = Graph::star(4);
        let mut rng = seeded_rng(0);
        for _ in 0..20 {
            let edit = HubRedistributionProposer.propose(&star, &mut rng).unwrap();
            let mut g = star.clone();
            assert!(edit.apply(&mut g));
            assert_eq!(g.degree(0), 3);
            assert!((robustness_r(&g) - 0.2).abs() < 1e-15);
        }
        let out = heuristic_v2(&star, 10, 0).unwrap();
        assert!(out.accepted_moves >= 1);
        assert!(out.final_r >= 0.2 - 1e-15);
        assert_eq!(out.final_graph.edge_count(), 4);
    }

    #[test]
    fn tiers_include_boundary_ties() {
        let g = Graph::star(9);
        assert_eq!(upper_tier(&g, 1), vec![0]);
        assert_eq!(lower_tier(&g, 1), (1..10).collect::<Vec<_>>());
    }

    #[test]
    fn v3_prefers_low_degree_receiver() {
        // hub 0 with neighbors 1..4; node 4 also has two extra leaves
        let g = Graph::from_edges(7, &[(0, 1), (0, 2), (0, 3), (0, 4), (4, 5), (4, 6)]).unwrap();
        let mut p = HubNeighborProposer::default();
        let mut rng = seeded_rng(5);
        for _ in 0..20 {
            let edit = p.propose(&g, &mut rng).unwrap();
            let mut h = g.clone();
            assert!(edit.apply(&mut h));
            // the receiving endpoint is a leaf, never node 4
            assert_eq!(h.degree(0), 3);
            let gained = (1..4).filter(|&v| h.degree(v) == 2).count();
            assert_eq!(gained, 1);
        }
    }

    #[test]
    fn v3_on_star_and_triangle() {
        let star = Graph::star(4);
        let mut g = star.clone();
        let edit = Move::Relocate(0, 1, 2).edit(&g).unwrap();
        edit.apply(&mut g);
        assert!(g.has_edge(1, 2) && !g.has_edge(0, 1));
        assert!((robustness_r(&g) - 0.2).abs() < 1e-15);

        let out = heuristic_v3(&star, 10, 3).unwrap();
        assert!(out.final_r >= 0.2 - 1e-15);
        assert_eq!(out.final_graph.edge_count(), 4);

        let tri = Graph::complete(3);
        let out = heuristic_v3(&tri, 10, 3).unwrap();
        assert_eq!(out.final_graph, tri);
        assert_eq!(out.evaluations_used, 0);
    }

    #[test]
    fn v2_v3_keep_edge_count() {
        let g = generate_ba(BaParams::new(80, 3, 2, 5)).unwrap();
        for out in [heuristic_v2(&g, 300, 1).unwrap(), heuristic_v3(&g, 300, 1).unwrap()] {
            assert_eq!(out.final_graph.edge_count(), g.edge_count());
            assert!(out.final_r >= out.initial_r);
            out.final_graph.audit().unwrap();
        }
    }
}
