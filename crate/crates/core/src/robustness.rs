//! Targeted-attack simulation and the R robustness measure.
//!
//! Nodes are removed one at a time, always the node with the highest degree
//! in the remaining graph (degrees recomputed after each removal, ties to the
//! lowest id). `s(q)` is the largest-component size after `q` removals divided
//! by `N`, and `R = (1/N) * sum_{q=1..N} s(q)`.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, NodeId};

/// Largest-component sizes after each removal of a full targeted attack.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttackTrace {
    node_count: usize,
    /// `lcc_sizes[q - 1]` is the LCC size after `q` removals.
    lcc_sizes: Vec<usize>,
}

impl AttackTrace {
    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn lcc_sizes(&self) -> &[usize] {
        &self.lcc_sizes
    }

    /// `s(q)` for `q = 1..=N`.
    pub fn fractions(&self) -> Vec<f64> {
        let n = self.node_count as f64;
        self.lcc_sizes.iter().map(|&s| s as f64 / n).collect()
    }

    /// `R * N^2`, the exact integer numerator of the measure.
    pub fn lcc_sum(&self) -> usize {
        self.lcc_sizes.iter().sum()
    }

    pub fn robustness(&self) -> f64 {
        if self.node_count == 0 {
            return 0.0;
        }
        let n = self.node_count as f64;
        self.lcc_sum() as f64 / (n * n)
    }
}

/// Removal order of the adaptive highest-degree attack.
pub fn attack_order(g: &Graph) -> Vec<NodeId> {
    let n = g.node_count();
    let mut degree: Vec<usize> = (0..n).map(|u| g.degree(u)).collect();
    let mut removed = vec![false; n];
    let mut heap: BinaryHeap<(usize, Reverse<NodeId>)> =
        (0..n).map(|u| (degree[u], Reverse(u))).collect();
    let mut order = Vec::with_capacity(n);

    // Degrees only decrease, so an entry is stale exactly when its degree
    // disagrees with the live one.
    while let Some((d, Reverse(u))) = heap.pop() {
        if removed[u] || d != degree[u] {
            continue;
        }
        removed[u] = true;
        order.push(u);
        for &v in g.neighbors(u) {
            if !removed[v] {
                degree[v] -= 1;
                heap.push((degree[v], Reverse(v)));
            }
        }
    }
    order
}

struct DisjointSets {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> usize {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return self.size[ra];
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        self.size[ra]
    }
}

/// Simulates the full attack. The LCC sizes are obtained by re-inserting the
/// removed nodes in reverse order into a union-find structure.
pub fn attack_trace(g: &Graph) -> AttackTrace {
    let n = g.node_count();
    let order = attack_order(g);
    let mut lcc_sizes = vec![0; n];
    let mut alive = vec![false; n];
    let mut sets = DisjointSets::new(n);
    let mut largest = 0;

    // after q removals the survivors are order[q..]
    for q in (1..n).rev() {
        let u = order[q];
        alive[u] = true;
        largest = largest.max(1);
        for &v in g.neighbors(u) {
            if alive[v] {
                largest = largest.max(sets.union(u, v));
            }
        }
        lcc_sizes[q - 1] = largest;
    }
    AttackTrace { node_count: n, lcc_sizes }
}

pub fn robustness_r(g: &Graph) -> f64 {
    attack_trace(g).robustness()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("evaluation budget of {max_attempts} exhausted")]
pub struct BudgetExhausted {
    pub max_attempts: usize,
}

/// Counts robustness evaluations against a hard `max_attempts` budget.
#[derive(Debug, Clone)]
pub struct BudgetedEvaluator {
    max_attempts: usize,
    used: usize,
    best_seen: Option<(f64, Graph)>,
}

impl BudgetedEvaluator {
    pub fn new(max_attempts: usize) -> Self {
        Self {
            max_attempts,
            used: 0,
            best_seen: None,
        }
    }

    pub fn max_attempts(&self) -> usize {
        self.max_attempts
    }

    pub fn used(&self) -> usize {
        self.used
    }

    pub fn remaining(&self) -> usize {
        self.max_attempts - self.used
    }

    pub fn is_exhausted(&self) -> bool {
        self.used >= self.max_attempts
    }

    pub fn best_seen(&self) -> Option<(f64, &Graph)> {
        self.best_seen.as_ref().map(|(r, g)| (*r, g))
    }

    pub fn evaluate(&mut self, g: &Graph) -> Result<f64, BudgetExhausted> {
        if self.is_exhausted() {
            return Err(BudgetExhausted {
                max_attempts: self.max_attempts,
            });
        }
        self.used += 1;
        let r = robustness_r(g);
        if self.best_seen.as_ref().is_none_or(|(best, _)| r > *best) {
            self.best_seen = Some((r, g.clone()));
        }
        Ok(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_trace() {
        let t = attack_trace(&Graph::path(3));
        assert_eq!(t.lcc_sizes(), &[1, 1, 0]);
        assert_eq!(t.lcc_sum(), 2);
        assert!((t.robustness() - 2.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn k4_trace() {
        let t = attack_trace(&Graph::complete(4));
        assert_eq!(t.lcc_sizes(), &[3, 2, 1, 0]);
        assert_eq!(t.robustness(), 0.375);
        assert_eq!(t.fractions(), vec![0.75, 0.5, 0.25, 0.0]);
    }

    #[test]
    fn single_node() {
        let t = attack_trace(&Graph::new(1));
        assert_eq!(t.lcc_sizes(), &[0]);
        assert_eq!(t.robustness(), 0.0);
    }

    #[test]
    fn star_value() {
        assert_eq!(attack_trace(&Graph::star(4)).lcc_sum(), 4);
        assert!((robustness_r(&Graph::star(4)) - 0.16).abs() < 1e-15);
    }

    #[test]
    fn attack_breaks_ties_by_lowest_id() {
        assert_eq!(attack_order(&Graph::path(3)), vec![1, 0, 2]);
        assert_eq!(attack_order(&Graph::complete(4)), vec![0, 1, 2, 3]);
        // 0-1 2-3-4: node 3 first, then 0 (degree 1, lowest id)
        let g = Graph::from_edges(5, &[(0, 1), (2, 3), (3, 4)]).unwrap();
        assert_eq!(attack_order(&g), vec![3, 0, 1, 2, 4]);
    }

    #[test]
    fn input_unmodified() {
        let g = Graph::star(6);
        let copy = g.clone();
        let _ = attack_trace(&g);
        assert_eq!(g, copy);
    }

    #[test]
    fn evaluator_budget() {
        let mut ev = BudgetedEvaluator::new(1);
        assert_eq!(ev.evaluate(&Graph::complete(4)), Ok(0.375));
        assert_eq!(ev.used(), 1);
        assert_eq!(ev.evaluate(&Graph::complete(4)), Err(BudgetExhausted { max_attempts: 1 }));
        assert_eq!(ev.used(), 1);

        let mut ev = BudgetedEvaluator::new(100);
        for _ in 0..100 {
            ev.evaluate(&Graph::path(3)).unwrap();
        }
        assert_eq!(ev.used(), 100);
        assert!(ev.is_exhausted());
    }

    #[test]
    fn evaluator_tracks_best() {
        let mut ev = BudgetedEvaluator::new(5);
        ev.evaluate(&Graph::star(4)).unwrap();
        ev.evaluate(&Graph::complete(5)).unwrap();
        ev.evaluate(&Graph::path(5)).unwrap();
        let (r, g) = ev.best_seen().unwrap();
        assert_eq!(r, 0.4);
        assert_eq!(g, &Graph::complete(5));
    }
}
