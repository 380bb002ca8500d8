use rand::Rng;

use super::{check, HeuristicProgram, MoveExpr, ProgramError, Rule, Selector};
use crate::graph::{betweenness, Graph, NodeId};
use crate::heuristics::{run_search, Edit, Move, OptimizerOutcome, Proposer, SearchOptions};
use crate::SearchRng;

/// Selector with its variable reference resolved to a binding slot.
#[derive(Debug, Clone, Copy)]
enum Sel {
    HighestDegree,
    LowestDegree,
    RandomNode,
    HighestBetweenness,
    SimilarDegree(usize, usize),
    NeighborOf(usize),
    HighestDegreeNeighborOf(usize),
    NonAdjacentTo(usize),
}

#[derive(Debug, Clone, Copy)]
enum Act {
    Add(usize, usize),
    Remove(usize, usize),
    Relocate(usize, usize, usize),
    Swap(usize, usize, usize, usize),
}

#[derive(Debug, Clone)]
struct CompiledRule {
    bindings: Vec<Sel>,
    action: Act,
}

fn compile(rule: &Rule) -> CompiledRule {
    let slot = |var: &str| {
        rule.bindings
            .iter()
            .position(|b| b.var == var)
            .expect("program checked before compiling")
    };
    let bindings = rule
        .bindings
        .iter()
        .map(|b| match &b.selector {
            Selector::HighestDegree => Sel::HighestDegree,
            Selector::LowestDegree => Sel::LowestDegree,
            Selector::RandomNode => Sel::RandomNode,
            Selector::HighestBetweenness => Sel::HighestBetweenness,
            Selector::SimilarDegree {
                reference,
                max_diff,
            } => Sel::SimilarDegree(slot(reference), *max_diff),
            Selector::NeighborOf(r) => Sel::NeighborOf(slot(r)),
            Selector::HighestDegreeNeighborOf(r) => Sel::HighestDegreeNeighborOf(slot(r)),
            Selector::NonAdjacentTo(r) => Sel::NonAdjacentTo(slot(r)),
        })
        .collect();
    let action = match &rule.action {
        MoveExpr::AddEdge(a, b) => Act::Add(slot(a), slot(b)),
        MoveExpr::RemoveEdge(a, b) => Act::Remove(slot(a), slot(b)),
        MoveExpr::RelocateEdge(a, b, c) => Act::Relocate(slot(a), slot(b), slot(c)),
        MoveExpr::SwapEdges(a, b, c, d) => Act::Swap(slot(a), slot(b), slot(c), slot(d)),
    };
    CompiledRule { bindings, action }
}

/// Runs a program's rules as a [`Proposer`].
///
/// Ties in `highest_degree`, `lowest_degree`, `highest_betweenness` and
/// `highest_degree_neighbor_of` go to the lowest node id unless random tie
/// breaking is switched on.
#[derive(Debug, Clone)]
pub struct DslProposer {
    rules: Vec<CompiledRule>,
    random_ties: bool,
    slots: Vec<NodeId>,
    pool: Vec<NodeId>,
    betweenness: Option<(Graph, Vec<f64>)>,
}

impl DslProposer {
    pub fn new(p: &HeuristicProgram) -> Result<Self, ProgramError> {
        check(p)?;
        Ok(Self {
            rules: p.rules.iter().map(compile).collect(),
            random_ties: false,
            slots: Vec::new(),
            pool: Vec::new(),
            betweenness: None,
        })
    }

    pub fn with_random_ties(mut self, on: bool) -> Self {
        self.random_ties = on;
        self
    }

    fn betweenness_of(&mut self, g: &Graph) -> &[f64] {
        let stale = !matches!(&self.betweenness, Some((cached, _)) if cached == g);
        if stale {
            self.betweenness = Some((g.clone(), betweenness(g)));
        }
        &self.betweenness.as_ref().expect("filled above").1
    }

    fn uniform(&self, rng: &mut SearchRng) -> Option<NodeId> {
        if self.pool.is_empty() {
            None
        } else {
            Some(self.pool[rng.random_range(0..self.pool.len())])
        }
    }

    /// Best-scoring candidate; candidates must arrive in ascending id order.
    fn extreme(
        &mut self,
        candidates: impl Iterator<Item = NodeId> + Clone,
        score: impl Fn(NodeId) -> f64,
        rng: &mut SearchRng,
    ) -> Option<NodeId> {
        let best = candidates.clone().map(&score).fold(f64::NEG_INFINITY, f64::max);
        if best == f64::NEG_INFINITY {
            return None;
        }
        let tol = 1e-9 * best.abs().max(1.0);
        let mut tied = candidates.filter(|&v| score(v) >= best - tol);
        if !self.random_ties {
            return tied.next();
        }
        self.pool.clear();
        self.pool.extend(tied);
        self.uniform(rng)
    }

    fn select(&mut self, sel: Sel, g: &Graph, rng: &mut SearchRng) -> Option<NodeId> {
        let n = g.node_count();
        match sel {
            Sel::HighestDegree => self.extreme(0..n, |v| g.degree(v) as f64, rng),
            Sel::LowestDegree => self.extreme(0..n, |v| -(g.degree(v) as f64), rng),
            Sel::HighestBetweenness => {
                let scores = self.betweenness_of(g).to_vec();
                self.extreme(0..n, |v| scores[v], rng)
            }
            Sel::RandomNode => {
                if n == 0 {
                    None
                } else {
                    Some(rng.random_range(0..n))
                }
            }
            Sel::NeighborOf(r) => {
                let nbrs = g.neighbors(self.slots[r]);
                if nbrs.is_empty() {
                    None
                } else {
                    Some(nbrs[rng.random_range(0..nbrs.len())])
                }
            }
            Sel::HighestDegreeNeighborOf(r) => {
                let nbrs = g.neighbors(self.slots[r]);
                self.extreme(nbrs.iter().copied(), |v| g.degree(v) as f64, rng)
            }
            Sel::SimilarDegree(r, max_diff) => {
                let u = self.slots[r];
                let du = g.degree(u);
                self.pool.clear();
                self.pool
                    .extend((0..n).filter(|&v| v != u && g.degree(v).abs_diff(du) <= max_diff));
                self.uniform(rng)
            }
            Sel::NonAdjacentTo(r) => {
                let u = self.slots[r];
                self.pool.clear();
                self.pool.extend((0..n).filter(|&v| v != u && !g.has_edge(u, v)));
                self.uniform(rng)
            }
        }
    }

    fn try_rule(&mut self, index: usize, g: &Graph, rng: &mut SearchRng) -> Option<Edit> {
        self.slots.clear();
        for k in 0..self.rules[index].bindings.len() {
            let sel = self.rules[index].bindings[k];
            let node = self.select(sel, g, rng)?;
            self.slots.push(node);
        }
        let s = &self.slots;
        let mv = match self.rules[index].action {
            Act::Add(a, b) => Move::Add(s[a], s[b]),
            Act::Remove(a, b) => Move::Remove(s[a], s[b]),
            Act::Relocate(a, b, c) => Move::Relocate(s[a], s[b], s[c]),
            Act::Swap(a, b, c, d) => Move::Swap(s[a], s[b], s[c], s[d]),
        };
        mv.edit(g)
    }
}

impl Proposer for DslProposer {
    fn propose(&mut self, g: &Graph, rng: &mut SearchRng) -> Option<Edit> {
        (0..self.rules.len()).find_map(|i| self.try_rule(i, g, rng))
    }
}

/// Runs `p` on `g` with the shared search loop and default options.
pub fn interpret(
    p: &HeuristicProgram,
    g: &Graph,
    budget: usize,
    seed: u64,
) -> Result<OptimizerOutcome, ProgramError> {
    interpret_with(p, g, budget, seed, &SearchOptions::default())
}

pub fn interpret_with(
    p: &HeuristicProgram,
    g: &Graph,
    budget: usize,
    seed: u64,
    options: &SearchOptions,
) -> Result<OptimizerOutcome, ProgramError> {
    let mut proposer = DslProposer::new(p)?;
    Ok(run_search(g, budget, p.acceptance, seed, &mut proposer, options))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate_ba, BaParams};
    use crate::hdsl::{parse, HC_PROGRAM};
    use crate::heuristics::baseline_hc;
    use crate::seeded_rng;

    fn program(accept: &str, body: &str) -> HeuristicProgram {
        parse(&format!("HEURISTIC \"t\"\nACCEPT {accept}\nRULE\n{body}\nEND\n")).unwrap()
    }

    fn first_binding(body: &str, g: &Graph, random_ties: bool) -> NodeId {
        let p = program("improve", body);
        let mut dsl = DslProposer::new(&p).unwrap().with_random_ties(random_ties);
        let mut rng = seeded_rng(0);
        let sel = dsl.rules[0].bindings[0];
        dsl.select(sel, g, &mut rng).unwrap()
    }

    #[test]
    fn deterministic_selectors_break_ties_low() {
        // degrees: 0:1 1:2 2:2 3:1
        let p4 = Graph::path(4);
        assert_eq!(first_binding("  u := highest_degree\n  MOVE add_edge(u, u)", &p4, false), 1);
        assert_eq!(first_binding("  u := lowest_degree\n  MOVE add_edge(u, u)", &p4, false), 0);
        assert_eq!(first_binding("  u := highest_betweenness\n  MOVE add_edge(u, u)", &p4, false), 1);
    }

    #[test]
    fn random_ties_reach_every_tied_node() {
        let p4 = Graph::path(4);
        let p = program("improve", "  u := highest_degree\n  MOVE add_edge(u, u)");
        let mut dsl = DslProposer::new(&p).unwrap().with_random_ties(true);
        let mut rng = seeded_rng(3);
        let mut seen = [false; 4];
        for _ in 0..50 {
            seen[dsl.select(Sel::HighestDegree, &p4, &mut rng).unwrap()] = true;
        }
        assert_eq!(seen, [false, true, true, false]);
    }

    #[test]
    fn referenced_selectors() {
        let star = Graph::star(4);
        let p = program(
            "improve",
            "  h := highest_degree\n  m := highest_degree_neighbor_of(h)\n  s := similar_degree(m, 0)\n  x := non_adjacent_to(s)\n  MOVE relocate_edge(h, m, s)",
        );
        let mut dsl = DslProposer::new(&p).unwrap();
        let mut rng = seeded_rng(1);
        for _ in 0..20 {
            let edit = dsl.propose(&star, &mut rng).unwrap();
            let (h, m, s, x) = (dsl.slots[0], dsl.slots[1], dsl.slots[2], dsl.slots[3]);
            assert_eq!((h, m), (0, 1));
            assert!(s >= 2);
            assert!(x != s && x != 0);
            let mut g = star.clone();
            assert!(edit.apply(&mut g));
            assert!(g.has_edge(s, 1) && !g.has_edge(0, 1));
        }
    }

    #[test]
    fn first_legal_rule_wins() {
        // rule 1 can never bind on a complete graph, rule 2 removes an edge
        let text = "HEURISTIC \"t\"\nACCEPT improve\nRULE\n  u := random_node\n  v := non_adjacent_to(u)\n  MOVE add_edge(u, v)\nEND\nRULE\n  u := random_node\n  v := neighbor_of(u)\n  MOVE remove_edge(u, v)\nEND\n";
        let p = parse(text).unwrap();
        let mut dsl = DslProposer::new(&p).unwrap();
        let mut rng = seeded_rng(0);
        let k4 = Graph::complete(4);
        let edit = dsl.propose(&k4, &mut rng).unwrap();
        let mut g = k4.clone();
        assert!(edit.apply(&mut g));
        assert_eq!(g.edge_count(), 5);
    }

    #[test]
    fn unbindable_program_leaves_graph() {
        let p = program("improve", "  u := random_node\n  v := non_adjacent_to(u)\n  MOVE add_edge(u, v)");
        let k4 = Graph::complete(4);
        let out = interpret(&p, &k4, 100, 0).unwrap();
        assert_eq!(out.final_graph, k4);
        assert_eq!(out.evaluations_used, 0);
    }

    #[test]
    fn hc_program_matches_native_baseline() {
        let p = parse(HC_PROGRAM).unwrap();
        for seed in 0..5 {
            let g = generate_ba(BaParams::new(40, 3, 2, seed)).unwrap();
            let native = baseline_hc(&g, 300, seed).unwrap();
            let dsl = interpret(&p, &g, 300, seed).unwrap();
            assert_eq!(dsl, native);
        }
    }

    #[test]
    fn betweenness_cache_follows_graph() {
        let p = program("improve", "  u := highest_betweenness\n  MOVE add_edge(u, u)");
        let mut dsl = DslProposer::new(&p).unwrap();
        let mut rng = seeded_rng(0);
        assert_eq!(dsl.select(Sel::HighestBetweenness, &Graph::path(5), &mut rng), Some(2));
        assert_eq!(dsl.select(Sel::HighestBetweenness, &Graph::star(4), &mut rng), Some(0));
    }
}
