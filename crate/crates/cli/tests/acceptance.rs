//! Acceptance checks, one PASS/FAIL line each. Runs without the test
//! harness so every line is printed even when an earlier check fails;
//! the process exits non-zero if any check fails.

mod common;

use std::collections::HashMap;
use std::fs;
use std::time::Instant;

use netrobust_cli::RunRecord;
use netrobust_core::aff::{deviation_y, fitness, weight_w, AffParams};
use netrobust_core::hdsl::{interpret, parse, HC_PROGRAM};
use netrobust_core::heuristics::baseline_hc;
use netrobust_core::{
    attack_trace, generate_ba, robustness_r, seeded_rng, AnnealParams, BaParams, Graph, Heuristic,
};
use netrobust_evolve::evolve::{RunStore, TrainingSpec};
use netrobust_evolve::llm::LlmBackendConfig;
use netrobust_evolve::{run_evolution, EvolutionConfig, RunOptions};
use rand::Rng;
use rayon::prelude::*;

struct Check {
    passed: bool,
    detail: String,
}

fn check(passed: bool, detail: impl Into<String>) -> Check {
    Check {
        passed,
        detail: detail.into(),
    }
}

fn random_graph(seed: u64, max_n: usize) -> Graph {
    let mut rng = seeded_rng(seed);
    let n = rng.random_range(1..=max_n);
    let p: f64 = rng.random_range(0.05..0.9);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.random::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, &edges).unwrap()
}

/// Brute force: adjacency matrix, degrees recounted and the LCC found by
/// DFS after every removal. Returns the sum of LCC sizes.
fn brute_force_lcc_sum(g: &Graph) -> usize {
    let n = g.node_count();
    let mut adj = vec![vec![false; n]; n];
    for (u, v) in g.edges() {
        adj[u][v] = true;
        adj[v][u] = true;
    }
    let mut alive = vec![true; n];
    let mut total = 0;
    for _ in 0..n {
        let deg = |u: usize| (0..n).filter(|&v| alive[v] && adj[u][v]).count();
        let target = (0..n)
            .filter(|&u| alive[u])
            .fold(None, |best: Option<usize>, u| match best {
                Some(b) if deg(b) >= deg(u) => Some(b),
                _ => Some(u),
            })
            .unwrap();
        alive[target] = false;
        let mut seen = vec![false; n];
        let mut lcc = 0;
        for s in 0..n {
            if !alive[s] || seen[s] {
                continue;
            }
            seen[s] = true;
            let (mut stack, mut size) = (vec![s], 0);
            while let Some(u) = stack.pop() {
                size += 1;
                for v in 0..n {
                    if alive[v] && adj[u][v] && !seen[v] {
                        seen[v] = true;
                        stack.push(v);
                    }
                }
            }
            lcc = lcc.max(size);
        }
        total += lcc;
    }
    total
}

fn criterion_1() -> Check {
    let named = robustness_r(&Graph::complete(4)) == 0.375
        && robustness_r(&Graph::star(4)) == 0.16
        && attack_trace(&Graph::path(3)).lcc_sum() == 2
        && robustness_r(&Graph::path(3)) == 2.0 / 9.0;
    let complete = (3..=10).all(|n| {
        2 * attack_trace(&Graph::complete(n)).lcc_sum() == n * (n - 1)
            && robustness_r(&Graph::complete(n)) == (n - 1) as f64 / (2 * n) as f64
    });
    let mismatches = (0..200)
        .filter(|&s| {
            let g = random_graph(s, 12);
            attack_trace(&g).lcc_sum() != brute_force_lcc_sum(&g)
        })
        .count();
    check(
        named && complete && mismatches == 0,
        format!("named graphs exact: {named}; K3..K10 exact: {complete}; brute-force mismatches: {mismatches}/200"),
    )
}

fn criterion_2() -> Check {
    let params = AffParams::new(50, 1.5).unwrap();
    let g = generate_ba(BaParams::new(40, 3, 2, 9)).unwrap();
    let identity = fitness(std::slice::from_ref(&g), std::slice::from_ref(&g), 37, &params).unwrap() == 2.0 * robustness_r(&g);
    let tri = fitness(&[Graph::path(3)], &[Graph::complete(3)], 50, &params).unwrap();
    let w25 = weight_w(25, &params).unwrap();
    let w_ends = weight_w(0, &params).unwrap() == 0.0 && weight_w(50, &params).unwrap() == 1.0;
    let y_ok = (0..500).all(|s| {
        let a = random_graph(2 * s + 100_000, 12);
        let mut rng = seeded_rng(s);
        let n = a.node_count();
        let edges: Vec<_> = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .filter(|_| rng.random_bool(0.4))
            .collect();
        let b = Graph::from_edges(n, &edges).unwrap();
        (0.0..=2.0).contains(&deviation_y(&a, &b).unwrap().y)
    });
    check(
        identity && (tri - 1.0 / 3.0).abs() < 1e-12 && w_ends && (w25 - 0.353553).abs() <= 1e-6 && y_ok,
        format!("identity 2*sum R: {identity}; path3->K3 f = {tri:.9}; w(0), w(T) = 0, 1: {w_ends}; w(25) = {w25:.6}; Y in [0,2] on 500 pairs: {y_ok}"),
    )
}

fn criterion_3() -> Check {
    let budget = 1000;
    let failures: Vec<String> = (0..100u64)
        .into_par_iter()
        .flat_map_iter(|seed| {
            let g = generate_ba(BaParams::new(100, 3, 2, seed)).unwrap();
            Heuristic::ALL.into_iter().filter_map(move |h| {
                let out = h.run(&g, budget, AnnealParams::default(), seed).unwrap();
                let ok = out.evaluations_used <= budget
                    && out.final_graph.edge_count() == g.edge_count()
                    && (!h.preserves_degrees() || out.final_graph.degree_sequence() == g.degree_sequence())
                    && (!h.improve_only() || out.final_r >= out.initial_r);
                (!ok).then(|| format!("{h}/seed {seed}"))
            })
        })
        .collect();
    check(
        failures.is_empty(),
        format!("600 runs (6 optimizers x 100 seeds, budget 1000); violations: {failures:?}"),
    )
}

/// Mean final R per optimizer over BA(100, n0, m0) graphs with seeds 1..=10.
fn desk_means(n0: usize, m0: usize) -> HashMap<Heuristic, f64> {
    let jobs: Vec<(Heuristic, u64)> = Heuristic::ALL
        .into_iter()
        .flat_map(|h| (1..=10u64).map(move |s| (h, s)))
        .collect();
    let finals: Vec<(Heuristic, f64)> = jobs
        .par_iter()
        .map(|&(h, s)| {
            let g = generate_ba(BaParams::new(100, n0, m0, s)).unwrap();
            (h, h.run(&g, 30_000, AnnealParams::default(), s).unwrap().final_r)
        })
        .collect();
    let mut means = HashMap::new();
    for h in Heuristic::ALL {
        let v: Vec<f64> = finals.iter().filter(|(x, _)| *x == h).map(|(_, r)| *r).collect();
        means.insert(h, v.iter().sum::<f64>() / v.len() as f64);
    }
    means
}

fn show(means: &HashMap<Heuristic, f64>) -> String {
    Heuristic::ALL
        .iter()
        .map(|h| format!("{h} {:.6}", means[h]))
        .collect::<Vec<_>>()
        .join(", ")
}

fn criterion_4() -> Check {
    let m = desk_means(3, 2);
    let r = |h| m[&h];
    let bands = r(Heuristic::V2) >= 0.33
        && r(Heuristic::V3) >= 0.30
        && (0.25..=0.29).contains(&r(Heuristic::V1))
        && (0.25..=0.30).contains(&r(Heuristic::Sa))
        && (0.23..=0.27).contains(&r(Heuristic::Hc));
    let order = r(Heuristic::V2) > r(Heuristic::V3) && r(Heuristic::V3) > r(Heuristic::Hc).max(r(Heuristic::Sr));
    check(
        bands && order,
        format!("BA(100,3,2), budget 3e4, 10 seeds: {}; bands: {bands}; v2 > v3 > max(hc, sr): {order}", show(&m)),
    )
}

fn criterion_5() -> Check {
    let m = desk_means(6, 4);
    let (v2, v3) = (m[&Heuristic::V2], m[&Heuristic::V3]);
    check(
        v3 >= 0.39 && v3 > v2,
        format!(
            "BA(100,6,4), budget 3e4, 10 seeds: {}; v3 >= 0.39: {}; v3 > v2: {}",
            show(&m),
            v3 >= 0.39,
            v3 > v2
        ),
    )
}

fn criterion_6() -> Check {
    let program = parse(HC_PROGRAM).unwrap();
    let differing: Vec<u64> = (0..20u64)
        .filter(|&k| {
            let g = generate_ba(BaParams::new(30 + 5 * k as usize, 3, 1 + (k as usize % 3), k)).unwrap();
            let budget = 50 * (k as usize + 1);
            interpret(&program, &g, budget, k + 11).unwrap() != baseline_hc(&g, budget, k + 11).unwrap()
        })
        .collect();
    check(
        differing.is_empty(),
        format!("20 (graph, seed, budget <= 1000) triples; differing outcomes: {differing:?}"),
    )
}

fn criterion_7() -> Check {
    let config = EvolutionConfig {
        popsize: 10,
        generations: 10,
        training_budget: 100,
        seed: 42,
        training: TrainingSpec {
            sizes: vec![30],
            densities: vec![2],
            instances: 4,
            n0: 3,
        },
        backend: LlmBackendConfig::mock(7),
        ..EvolutionConfig::default()
    };
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let start = Instant::now();
    let run = |dir: &std::path::Path| {
        run_evolution(
            config.clone(),
            &RunOptions {
                out_dir: Some(dir.to_path_buf()),
                ..RunOptions::default()
            },
        )
    };
    let (first, second) = (run(a.path()), run(b.path()));
    let (Ok(first), Ok(_)) = (first, second) else {
        return check(false, "run failed");
    };
    let monotone = first.stats.windows(2).all(|w| w[1].best_ever >= w[0].best_ever);
    let store = RunStore::new(a.path());
    let parse_ok = (0..=10).all(|t| store.load_generation(t).is_ok_and(|s| s.population.len() == 10));
    let files = |d: &std::path::Path| {
        let mut v: Vec<_> = fs::read_dir(d)
            .unwrap()
            .map(|e| {
                let e = e.unwrap();
                (e.file_name(), fs::read(e.path()).unwrap())
            })
            .collect();
        v.sort();
        v
    };
    let identical = files(a.path()) == files(b.path());
    check(
        first.finished && monotone && parse_ok && identical,
        format!(
            "completed: {}; best-ever non-decreasing: {monotone}; all persisted individuals parse: {parse_ok}; rerun byte-identical: {identical}; two runs took {:.1}s",
            first.finished,
            start.elapsed().as_secs_f64()
        ),
    )
}

fn criterion_8() -> Check {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("grid.el");
    let g = common::grid_like(1494, 2066, 2024);
    common::write_graph(&graph, &g);
    let out = dir.path().join("out");
    let start = Instant::now();
    let o = common::netrobust(&[
        "optimize",
        "--heuristic",
        "v2",
        "--budget",
        "50000",
        "--runs",
        "1",
        "--seed",
        "1",
        "--out",
        out.to_str().unwrap(),
        graph.to_str().unwrap(),
    ]);
    let record: Option<RunRecord> = fs::read_to_string(out.join("record.json"))
        .ok()
        .and_then(|t| serde_json::from_str(&t).ok());
    match record {
        Some(r) if o.status.success() && r.runs.len() == 1 && r.runs[0].evaluations <= 50_000 => check(
            r.runs[0].final_r >= r.runs[0].initial_r,
            format!(
                "synthetic grid stand-in ({} nodes, {} edges), v2, budget 5e4: R {:.6} -> {:.6} in {} evaluations, {:.1}s",
                g.node_count(),
                g.edge_count(),
                r.runs[0].initial_r,
                r.runs[0].final_r,
                r.runs[0].evaluations,
                start.elapsed().as_secs_f64()
            ),
        ),
        _ => check(false, format!("no valid run record; stderr: {}", String::from_utf8_lossy(&o.stderr))),
    }
}

fn main() {
    let criteria: [(&str, fn() -> Check); 8] = [
        ("robustness oracles", criterion_1),
        ("adaptive fitness", criterion_2),
        ("structural invariants", criterion_3),
        ("sparse BA desk-scale table", criterion_4),
        ("dense BA spot check", criterion_5),
        ("DSL equivalence with hc", criterion_6),
        ("evolution smoke test", criterion_7),
        ("grid-scale single run", criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let c = f();
        failed += usize::from(!c.passed);
        println!(
            "criterion {} {}: {} ({})",
            i + 1,
            if c.passed { "PASS" } else { "FAIL" },
            name,
            c.detail
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
