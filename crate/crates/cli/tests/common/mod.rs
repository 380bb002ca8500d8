#![allow(dead_code)]

use std::path::Path;
use std::process::{Command, Output};

use netrobust_core::graph::write_edge_list;
use netrobust_core::{seeded_rng, Graph};
use rand::Rng;

pub fn netrobust(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_netrobust"))
        .args(args)
        .output()
        .expect("binary runs")
}

pub fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

pub fn write_graph(path: &Path, g: &Graph) {
    let mut bytes = Vec::new();
    write_edge_list(g, &mut bytes).unwrap();
    std::fs::write(path, bytes).unwrap();
}

/// Sparse planar-ish network shaped like a power grid: random points in
/// the unit square, each joined to its nearest earlier point (a spanning
/// tree), then the shortest remaining pairs until `edges` is reached.
pub fn grid_like(nodes: usize, edges: usize, seed: u64) -> Graph {
    let mut rng = seeded_rng(seed);
    let pts: Vec<(f64, f64)> = (0..nodes).map(|_| (rng.random(), rng.random())).collect();
    let d2 = |a: usize, b: usize| (pts[a].0 - pts[b].0).powi(2) + (pts[a].1 - pts[b].1).powi(2);
    let mut g = Graph::new(nodes);
    for i in 1..nodes {
        let j = (0..i).min_by(|&x, &y| d2(i, x).total_cmp(&d2(i, y))).unwrap();
        g.add_edge(i, j).unwrap();
    }
    let mut pairs: Vec<(usize, usize)> = (0..nodes).flat_map(|u| (u + 1..nodes).map(move |v| (u, v))).collect();
    pairs.sort_by(|&(a, b), &(c, d)| d2(a, b).total_cmp(&d2(c, d)));
    for (u, v) in pairs {
        if g.edge_count() == edges {
            break;
        }
        if !g.has_edge(u, v) {
            g.add_edge(u, v).unwrap();
        }
    }
    g
}
