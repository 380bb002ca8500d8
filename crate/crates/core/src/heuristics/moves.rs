//! Structural edits with exact rollback.

use serde::{Deserialize, Serialize};

use crate::graph::{Graph, NodeId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EdgeOp {
    Add(NodeId, NodeId),
    Remove(NodeId, NodeId),
}

impl EdgeOp {
    fn apply(self, g: &mut Graph) -> bool {
        match self {
            EdgeOp::Add(u, v) => u != v && g.insert_unchecked(u, v),
            EdgeOp::Remove(u, v) => g.delete_unchecked(u, v),
        }
    }

    fn inverse(self) -> Self {
        match self {
            EdgeOp::Add(u, v) => EdgeOp::Remove(u, v),
            EdgeOp::Remove(u, v) => EdgeOp::Add(u, v),
        }
    }
}

/// A sequence of edge insertions/deletions where every step must change the
/// graph (no duplicate insert, no missing delete, no self-loop).
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Edit {
    ops: Vec<EdgeOp>,
}

impl Edit {
    pub fn new(ops: Vec<EdgeOp>) -> Self {
        Self { ops }
    }

    pub fn ops(&self) -> &[EdgeOp] {
        &self.ops
    }

    /// Applies all steps, or none of them if any step would be a no-op or illegal.
    pub fn apply(&self, g: &mut Graph) -> bool {
        let n = g.node_count();
        let in_range = self.ops.iter().all(|op| match *op {
            EdgeOp::Add(u, v) | EdgeOp::Remove(u, v) => u < n && v < n,
        });
        if !in_range {
            return false;
        }
        for (i, op) in self.ops.iter().enumerate() {
            if !op.apply(g) {
                for done in self.ops[..i].iter().rev() {
                    done.inverse().apply(g);
                }
                return false;
            }
        }
        true
    }

    /// Reverts a successful [`Edit::apply`].
    pub fn undo(&self, g: &mut Graph) {
        for op in self.ops.iter().rev() {
            let reverted = op.inverse().apply(g);
            debug_assert!(reverted);
        }
    }

    /// Whether the edit would apply cleanly to `g`.
    pub fn is_legal(&self, g: &Graph) -> bool {
        let mut scratch = g.clone();
        self.apply(&mut scratch)
    }
}

/// The rewiring actions available to every optimizer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Move {
    Add(NodeId, NodeId),
    Remove(NodeId, NodeId),
    /// Remove `(a, b)`, add `(c, b)`.
    Relocate(NodeId, NodeId, NodeId),
    /// Remove `(a, b)` and `(c, d)`, add `(a, d)` and `(c, b)`.
    Swap(NodeId, NodeId, NodeId, NodeId),
}

impl Move {
    /// The edit realizing this move on `g`, or `None` when it is structurally
    /// illegal (self-loop, duplicate edge, missing edge, or a no-op).
    pub fn edit(&self, g: &Graph) -> Option<Edit> {
        let n = g.node_count();
        let ok = |u: NodeId| u < n;
        match *self {
            Move::Add(a, b) => (ok(a) && ok(b) && a != b && !g.has_edge(a, b))
                .then(|| Edit::new(vec![EdgeOp::Add(a, b)])),
            Move::Remove(a, b) => {
                (ok(a) && ok(b) && g.has_edge(a, b)).then(|| Edit::new(vec![EdgeOp::Remove(a, b)]))
            }
            Move::Relocate(a, b, c) => (ok(a)
                && ok(b)
                && ok(c)
                && c != a
                && c != b
                && g.has_edge(a, b)
                && !g.has_edge(c, b))
                .then(|| Edit::new(vec![EdgeOp::Remove(a, b), EdgeOp::Add(c, b)])),
            Move::Swap(a, b, c, d) => {
                let distinct = a != b && a != c && a != d && b != c && b != d && c != d;
                (ok(a)
                    && ok(b)
                    && ok(c)
                    && ok(d)
                    && distinct
                    && g.has_edge(a, b)
                    && g.has_edge(c, d)
                    && !g.has_edge(a, d)
                    && !g.has_edge(c, b))
                    .then(|| {
                        Edit::new(vec![
                            EdgeOp::Remove(a, b),
                            EdgeOp::Remove(c, d),
                            EdgeOp::Add(a, d),
                            EdgeOp::Add(c, b),
                        ])
                    })
            }
        }
    }
}
