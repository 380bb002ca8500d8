//! Undirected simple graphs over contiguous node ids.
//!
//! Adjacency is kept as sorted neighbor vectors so that every iteration order,
//! and therefore every seeded run, is deterministic.

use std::collections::HashMap;
use std::fmt;
use std::io::{self, BufRead, Write};

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::seeded_rng;

pub type NodeId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("node {node} out of range for graph with {node_count} nodes")]
    NodeOutOfRange { node: NodeId, node_count: usize },
    #[error("self-loop on node {0} is not allowed")]
    SelfLoop(NodeId),
    #[error("invalid generator parameters: {0}")]
    InvalidParams(String),
}

#[derive(Debug, Error)]
pub enum EdgeListError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Undirected simple graph with node ids `0..node_count`.
#[derive(Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Graph {
    adjacency: Vec<Vec<NodeId>>,
    edge_count: usize,
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("node_count", &self.node_count())
            .field("edge_count", &self.edge_count)
            .finish()
    }
}

impl Graph {
    pub fn new(node_count: usize) -> Self {
        Self {
            adjacency: vec![Vec::new(); node_count],
            edge_count: 0,
        }
    }

    /// Builds a graph from an edge slice; duplicate edges are collapsed.
    pub fn from_edges(node_count: usize, edges: &[(NodeId, NodeId)]) -> Result<Self, GraphError> {
        let mut g = Self::new(node_count);
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn complete(node_count: usize) -> Self {
        let mut g = Self::new(node_count);
        for u in 0..node_count {
            for v in (u + 1)..node_count {
                g.insert_unchecked(u, v);
            }
        }
        g
    }

    pub fn path(node_count: usize) -> Self {
        let mut g = Self::new(node_count);
        for u in 1..node_count {
            g.insert_unchecked(u - 1, u);
        }
        g
    }

    /// Star with hub `0` and leaves `1..=leaves`.
    pub fn star(leaves: usize) -> Self {
        let mut g = Self::new(leaves + 1);
        for v in 1..=leaves {
            g.insert_unchecked(0, v);
        }
        g
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn degree(&self, u: NodeId) -> usize {
        self.adjacency[u].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Sorted neighbors of `u`.
    pub fn neighbors(&self, u: NodeId) -> &[NodeId] {
        &self.adjacency[u]
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        u < self.node_count() && v < self.node_count() && self.adjacency[u].binary_search(&v).is_ok()
    }

    fn check(&self, u: NodeId, v: NodeId) -> Result<(), GraphError> {
        let node_count = self.node_count();
        for node in [u, v] {
            if node >= node_count {
                return Err(GraphError::NodeOutOfRange { node, node_count });
            }
        }
        Ok(())
    }

    /// Inserts `{u, v}`. Returns whether the edge was absent before.
    pub fn add_edge(&mut self, u: NodeId, v: NodeId) -> Result<bool, GraphError> {
        self.check(u, v)?;
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        Ok(self.insert_unchecked(u, v))
    }

    /// Deletes `{u, v}`. Returns whether the edge was present before.
    pub fn remove_edge(&mut self, u: NodeId, v: NodeId) -> Result<bool, GraphError> {
        self.check(u, v)?;
        Ok(self.delete_unchecked(u, v))
    }

    pub(crate) fn insert_unchecked(&mut self, u: NodeId, v: NodeId) -> bool {
        match self.adjacency[u].binary_search(&v) {
            Ok(_) => false,
            Err(pos) => {
                self.adjacency[u].insert(pos, v);
                let pos = self.adjacency[v].binary_search(&u).unwrap_err();
                self.adjacency[v].insert(pos, u);
                self.edge_count += 1;
                true
            }
        }
    }

    pub(crate) fn delete_unchecked(&mut self, u: NodeId, v: NodeId) -> bool {
        match self.adjacency[u].binary_search(&v) {
            Err(_) => false,
            Ok(pos) => {
                self.adjacency[u].remove(pos);
                let pos = self.adjacency[v].binary_search(&u).unwrap();
                self.adjacency[v].remove(pos);
                self.edge_count -= 1;
                true
            }
        }
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, nbrs)| nbrs.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    pub fn degree_sequence(&self) -> DegreeSequence {
        DegreeSequence(self.adjacency.iter().map(Vec::len).collect())
    }

    /// Size of the largest connected component, 0 for a graph without nodes.
    pub fn largest_component_size(&self) -> usize {
        component_sizes(self).into_iter().max().unwrap_or(0)
    }

    pub fn is_connected(&self) -> bool {
        self.node_count() == 0 || self.largest_component_size() == self.node_count()
    }

    /// Full recount of the structural invariants: sorted, loop-free, symmetric
    /// adjacency and a consistent edge-count cache.
    pub fn audit(&self) -> Result<(), String> {
        let mut half_degree_sum = 0;
        for (u, nbrs) in self.adjacency.iter().enumerate() {
            if nbrs.windows(2).any(|w| w[0] >= w[1]) {
                return Err(format!("neighbors of {u} not strictly sorted"));
            }
            for &v in nbrs {
                if v == u {
                    return Err(format!("self-loop on {u}"));
                }
                if v >= self.node_count() {
                    return Err(format!("neighbor {v} of {u} out of range"));
                }
                if self.adjacency[v].binary_search(&u).is_err() {
                    return Err(format!("asymmetric edge {u}->{v}"));
                }
            }
            half_degree_sum += nbrs.len();
        }
        if half_degree_sum != 2 * self.edge_count {
            return Err(format!(
                "edge_count {} disagrees with degree sum {half_degree_sum}",
                self.edge_count
            ));
        }
        Ok(())
    }
}

fn component_sizes(g: &Graph) -> Vec<usize> {
    let n = g.node_count();
    let mut seen = vec![false; n];
    let mut stack = Vec::new();
    let mut sizes = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        stack.push(start);
        let mut size = 0;
        while let Some(u) = stack.pop() {
            size += 1;
            for &v in g.neighbors(u) {
                if !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        sizes.push(size);
    }
    sizes
}

/// Per-node degrees `d_k`, indexed by node id.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeSequence(pub Vec<usize>);

impl DegreeSequence {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sum(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }
}

/// Barabási–Albert generator parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaParams {
    /// Target node count.
    pub n: usize,
    /// Size of the seed clique.
    pub n0: usize,
    /// Edges contributed by every arriving node.
    pub m0: usize,
    pub seed: u64,
}

impl BaParams {
    pub fn new(n: usize, n0: usize, m0: usize, seed: u64) -> Self {
        Self { n, n0, m0, seed }
    }

    pub fn validate(&self) -> Result<(), GraphError> {
        if self.n0 < 2 {
            return Err(GraphError::InvalidParams(format!("n0 = {} must be at least 2", self.n0)));
        }
        if self.m0 < 1 || self.m0 > self.n0 {
            return Err(GraphError::InvalidParams(format!(
                "m0 = {} must satisfy 1 <= m0 <= n0 = {}",
                self.m0, self.n0
            )));
        }
        if self.n < self.n0 {
            return Err(GraphError::InvalidParams(format!(
                "n = {} must be at least n0 = {}",
                self.n, self.n0
            )));
        }
        Ok(())
    }

    /// Edge count of every graph these parameters produce.
    pub fn expected_edges(&self) -> usize {
        self.n0 * (self.n0 - 1) / 2 + (self.n - self.n0) * self.m0
    }
}

/// Preferential attachment: a complete seed graph on `n0` nodes, then each
/// arriving node links to `m0` distinct existing nodes drawn with probability
/// proportional to their current degree (rejection of repeats).
pub fn generate_ba(params: BaParams) -> Result<Graph, GraphError> {
    params.validate()?;
    let mut rng = seeded_rng(params.seed);
    let mut g = Graph::complete(params.n0);
    g.adjacency.resize(params.n, Vec::new());

    // every edge endpoint once: uniform draws from this list are degree-proportional
    let mut endpoints: Vec<NodeId> = Vec::with_capacity(2 * params.expected_edges());
    for (u, v) in g.edges() {
        endpoints.push(u);
        endpoints.push(v);
    }

    let mut targets = Vec::with_capacity(params.m0);
    for new in params.n0..params.n {
        targets.clear();
        while targets.len() < params.m0 {
            let t = endpoints[rng.random_range(0..endpoints.len())];
            if !targets.contains(&t) {
                targets.push(t);
            }
        }
        for &t in &targets {
            g.insert_unchecked(new, t);
            endpoints.push(new);
            endpoints.push(t);
        }
    }
    Ok(g)
}

/// Parses the edge-list text format.
///
/// One edge per line as two whitespace-separated non-negative integers; `#`
/// starts a comment line and blank lines are skipped. Duplicates collapse.
/// Ids are compacted to `0..N` in order of first appearance, unless the file
/// carries a `# nodes: N` header (as written by [`write_edge_list`]) and every
/// id is below `N`, in which case ids are kept verbatim.
pub fn read_edge_list<R: BufRead>(source: R) -> Result<Graph, EdgeListError> {
    let mut declared_nodes: Option<usize> = None;
    let mut raw_edges: Vec<(u64, u64)> = Vec::new();

    for (idx, line) in source.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(comment) = trimmed.strip_prefix('#') {
            if let Some(rest) = comment.trim().strip_prefix("nodes:") {
                if let Ok(n) = rest.trim().parse::<usize>() {
                    declared_nodes = Some(n);
                }
            }
            continue;
        }
        let mut fields = trimmed.split_whitespace();
        let (a, b) = match (fields.next(), fields.next(), fields.next()) {
            (Some(a), Some(b), None) => (a, b),
            _ => {
                return Err(EdgeListError::Parse {
                    line: line_no,
                    message: format!("expected two node ids, found {trimmed:?}"),
                })
            }
        };
        let parse = |s: &str| -> Result<u64, EdgeListError> {
            if s.starts_with('-') {
                return Err(EdgeListError::Parse {
                    line: line_no,
                    message: format!("negative node id {s}"),
                });
            }
            s.parse::<u64>().map_err(|_| EdgeListError::Parse {
                line: line_no,
                message: format!("invalid node id {s:?}"),
            })
        };
        let (u, v) = (parse(a)?, parse(b)?);
        if u == v {
            return Err(EdgeListError::Parse {
                line: line_no,
                message: format!("self-loop on node {u}"),
            });
        }
        raw_edges.push((u, v));
    }

    let verbatim = declared_nodes
        .filter(|&n| raw_edges.iter().all(|&(u, v)| (u as usize) < n && (v as usize) < n));

    let (node_count, edges): (usize, Vec<(NodeId, NodeId)>) = match verbatim {
        Some(n) => (n, raw_edges.iter().map(|&(u, v)| (u as usize, v as usize)).collect()),
        None => {
            let mut ids: HashMap<u64, NodeId> = HashMap::new();
            let mut compact = |raw: u64| {
                let next = ids.len();
                *ids.entry(raw).or_insert(next)
            };
            let edges = raw_edges.iter().map(|&(u, v)| (compact(u), compact(v))).collect();
            (ids.len(), edges)
        }
    };

    let mut g = Graph::new(node_count);
    for (u, v) in edges {
        g.insert_unchecked(u, v);
    }
    Ok(g)
}

/// Writes `g` in the edge-list format, with a `# nodes: N` header so that
/// isolated nodes and ids survive a round trip.
pub fn write_edge_list<W: Write>(g: &Graph, mut sink: W) -> io::Result<()> {
    writeln!(sink, "# nodes: {}", g.node_count())?;
    writeln!(sink, "# edges: {}", g.edge_count())?;
    for (u, v) in g.edges() {
        writeln!(sink, "{u} {v}")?;
    }
    Ok(())
}

/// Unnormalized shortest-path betweenness of every node (each unordered
/// pair counted once), by Brandes' accumulation over BFS trees.
pub fn betweenness(g: &Graph) -> Vec<f64> {
    let n = g.node_count();
    let mut centrality = vec![0.0; n];
    let mut sigma = vec![0.0f64; n];
    let mut dist = vec![usize::MAX; n];
    let mut delta = vec![0.0f64; n];
    let mut order = Vec::with_capacity(n);
    let mut queue = std::collections::VecDeque::with_capacity(n);
    for s in 0..n {
        sigma.fill(0.0);
        dist.fill(usize::MAX);
        delta.fill(0.0);
        order.clear();
        sigma[s] = 1.0;
        dist[s] = 0;
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &w in g.neighbors(v) {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
                if dist[w] == dist[v] + 1 {
                    sigma[w] += sigma[v];
                }
            }
        }
        // predecessors of w are its neighbors one level closer to s
        for &w in order.iter().rev() {
            for &v in g.neighbors(w) {
                if dist[v] != usize::MAX && dist[v] + 1 == dist[w] {
                    delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
                }
            }
            if w != s {
                centrality[w] += delta[w];
            }
        }
    }
    for c in &mut centrality {
        *c /= 2.0;
    }
    centrality
}
