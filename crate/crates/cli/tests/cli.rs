mod common;

use std::fs;

use common::{netrobust, stdout, write_graph};
use netrobust_cli::{Manifest, RunRecord};
use netrobust_core::hdsl::HC_PROGRAM;
use netrobust_core::Graph;

#[test]
fn gen_graphs_writes_files_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = netrobust(&["gen-graphs", "--n", "100", "--n0", "3", "--m0", "2", "--count", "3", "--seed", "7", "--out", out]);
    assert!(o.status.success(), "{o:?}");
    let text = fs::read_to_string(dir.path().join("manifest.json")).unwrap();
    let manifest: Manifest = serde_json::from_str(&text).unwrap();
    assert_eq!(serde_json::to_string_pretty(&manifest).unwrap() + "\n", text);
    assert_eq!(manifest.graphs.len(), 3);
    for entry in &manifest.graphs {
        // 3 seed-clique edges + 97 arrivals x 2
        assert_eq!(entry.edges, 197);
        let g = netrobust_cli::record::load_graph(&dir.path().join(&entry.file)).unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (100, 197));
    }

    let bad = netrobust(&["gen-graphs", "--n", "10", "--n0", "3", "--m0", "4", "--out", out]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn eval_r_prints_six_decimals() {
    let dir = tempfile::tempdir().unwrap();
    let k4 = dir.path().join("k4.el");
    let star = dir.path().join("star.el");
    write_graph(&k4, &Graph::complete(4));
    write_graph(&star, &Graph::star(4));
    assert_eq!(stdout(&netrobust(&["eval-r", k4.to_str().unwrap()])), "0.375000\n");
    assert_eq!(stdout(&netrobust(&["eval-r", star.to_str().unwrap()])), "0.160000\n");

    let bad = dir.path().join("bad.el");
    fs::write(&bad, "0 1\n1 2 3\n").unwrap();
    let o = netrobust(&["eval-r", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
    assert_eq!(netrobust(&["eval-r", "/nonexistent.el"]).status.code(), Some(3));
}

fn ba_file(dir: &std::path::Path) -> String {
    let out = dir.to_str().unwrap();
    assert!(netrobust(&["gen-graphs", "--n", "100", "--seed", "1", "--out", out]).status.success());
    dir.join("ba_n100_m2_s1.el").to_str().unwrap().to_string()
}

#[test]
fn optimize_writes_rows_and_aggregate() {
    let dir = tempfile::tempdir().unwrap();
    let graph = ba_file(dir.path());
    let out = dir.path().join("opt");
    let o = netrobust(&[
        "optimize", "--heuristic", "v2", "--budget", "30000", "--runs", "10", "--seed", "1", "--out",
        out.to_str().unwrap(), &graph,
    ]);
    assert!(o.status.success(), "{o:?}");
    let csv = fs::read_to_string(out.join("runs.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 12);
    assert!(lines[1..11].iter().all(|l| l.starts_with("run,")));
    assert!(lines[11].starts_with("aggregate,10,"));

    let record: RunRecord = serde_json::from_str(&fs::read_to_string(out.join("record.json")).unwrap()).unwrap();
    assert_eq!(record.runs.len(), 10);
    assert!(record.runs.iter().all(|r| r.evaluations <= 30000));
    let finals: Vec<f64> = record.runs.iter().map(|r| r.final_r).collect();
    let mean = finals.iter().sum::<f64>() / 10.0;
    let var = finals.iter().map(|f| (f - mean).powi(2)).sum::<f64>() / 9.0;
    assert!((record.aggregate.mean - mean).abs() < 1e-15);
    assert!((record.aggregate.variance - var).abs() < 1e-15);
    let best = netrobust_cli::record::load_graph(&out.join("best.el")).unwrap();
    assert_eq!(best.edge_count(), 197);
}

/// The CSV without the wall-clock column.
fn timeless(csv: &str) -> Vec<String> {
    csv.lines()
        .map(|l| {
            let mut f: Vec<&str> = l.split(',').collect();
            f.remove(8);
            f.join(",")
        })
        .collect()
}

#[test]
fn dsl_hc_matches_native_hc() {
    let dir = tempfile::tempdir().unwrap();
    let graph = ba_file(dir.path());
    let program = dir.path().join("hc.dsl");
    fs::write(&program, HC_PROGRAM).unwrap();
    let dsl = format!("dsl:{}", program.display());
    let run = |h: &str| {
        let o = netrobust(&["optimize", "--heuristic", h, "--budget", "1000", "--runs", "4", "--seed", "3", &graph]);
        assert!(o.status.success(), "{o:?}");
        timeless(&stdout(&o))
    };
    assert_eq!(run("hc"), run(&dsl));
}

#[test]
fn optimize_rejects_bad_arguments() {
    let dir = tempfile::tempdir().unwrap();
    let graph = ba_file(dir.path());
    let code = |args: &[&str]| netrobust(args).status.code();
    assert_eq!(code(&["optimize", "--heuristic", "v2", "--runs", "0", &graph]), Some(2));
    assert_eq!(code(&["optimize", "--heuristic", "v7", &graph]), Some(2));
    assert_eq!(code(&["optimize", "--heuristic", "sa", "--alpha", "1.5", &graph]), Some(2));
    let bad = dir.path().join("bad.dsl");
    fs::write(&bad, "HEURISTIC \"x\"\nACCEPT sometimes\n").unwrap();
    let o = netrobust(&["optimize", "--heuristic", &format!("dsl:{}", bad.display()), &graph]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
}

const SMOKE: &str = "popsize = 10\ngenerations = 4\ntraining_budget = 100\nseed = 42\n\n[training]\nsizes = [30]\ndensities = [2]\ninstances = 4\nn0 = 3\n\n[backend]\nkind = \"mock\"\nmock_seed = 7\n";

fn contents(dir: &std::path::Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().into_string().unwrap(), fs::read(e.path()).unwrap())
        })
        .collect();
    v.sort();
    v
}

#[test]
fn evolve_completes_and_resumes_byte_identically() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("smoke.toml");
    fs::write(&config, SMOKE).unwrap();
    let cfg = config.to_str().unwrap();
    let whole = dir.path().join("whole");
    let split = dir.path().join("split");

    let o = netrobust(&["evolve", "--config", cfg, "--out", whole.to_str().unwrap()]);
    assert!(o.status.success(), "{o:?}");
    assert!(stdout(&o).starts_with("finished after generation 4"));
    for f in ["config.json", "stats.csv", "best.dsl", "gen_0000.json", "gen_0004.json"] {
        assert!(whole.join(f).exists(), "{f}");
    }

    let o = netrobust(&["evolve", "--config", cfg, "--out", split.to_str().unwrap(), "--stop-after", "2"]);
    assert!(stdout(&o).starts_with("stopped after generation 2"));
    let o = netrobust(&["evolve", "--config", cfg, "--out", split.to_str().unwrap(), "--resume"]);
    assert!(o.status.success(), "{o:?}");
    assert_eq!(contents(&whole), contents(&split));

    let again = netrobust(&["evolve", "--config", cfg, "--out", whole.to_str().unwrap()]);
    assert_eq!(again.status.code(), Some(2));
    let missing = netrobust(&["evolve", "--config", "/nonexistent.toml", "--out", whole.to_str().unwrap()]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn evolve_reports_backend_failures() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("live.toml");
    let live = SMOKE.replace(
        "kind = \"mock\"\nmock_seed = 7\n",
        "kind = \"live\"\nendpoint = \"http://127.0.0.1:9/v1\"\napi_key_env = \"NETROBUST_TEST_UNSET_KEY\"\n",
    );
    fs::write(&config, live).unwrap();
    let o = netrobust(&[
        "evolve", "--config", config.to_str().unwrap(), "--out", dir.path().join("o").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&o.stderr).contains("NETROBUST_TEST_UNSET_KEY"));
}

#[test]
fn bench_emits_one_row_per_algorithm_with_consistent_variance() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("bench.toml");
    fs::write(
        &spec,
        "budget = 1500\nruns = 10\nseed = 1\n\n[[settings]]\nname = \"ba-100-m2\"\nn = 100\nm0 = 2\n",
    )
    .unwrap();
    let out = dir.path().join("out");
    let o = netrobust(&["bench", "--config", spec.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{o:?}");
    let summary = fs::read_to_string(out.join("summary.csv")).unwrap();
    let algos: Vec<&str> = summary.lines().skip(1).map(|l| l.split(',').nth(1).unwrap()).collect();
    assert_eq!(algos, ["hc", "sa", "sr", "v1", "v2", "v3"]);

    let record: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("bench.json")).unwrap()).unwrap();
    for r in record["results"].as_array().unwrap() {
        let finals: Vec<f64> = r["runs"].as_array().unwrap().iter().map(|x| x["final_r"].as_f64().unwrap()).collect();
        assert_eq!(finals.len(), 10);
        let mean = finals.iter().sum::<f64>() / 10.0;
        let var = finals.iter().map(|f| (f - mean).powi(2)).sum::<f64>() / 9.0;
        assert!((r["aggregate"]["variance"].as_f64().unwrap() - var).abs() < 1e-15);
    }
    let runs = fs::read_to_string(out.join("runs.csv")).unwrap();
    assert_eq!(runs.lines().count(), 1 + 60);
}

#[test]
fn bench_accepts_an_edge_list_setting() {
    let dir = tempfile::tempdir().unwrap();
    write_graph(&dir.path().join("grid.el"), &common::grid_like(200, 260, 5));
    let spec = dir.path().join("grid.toml");
    fs::write(
        &spec,
        "budget = 500\nruns = 1\nalgorithms = [\"v2\"]\n\n[[settings]]\nname = \"grid\"\ngraph = \"grid.el\"\n",
    )
    .unwrap();
    let out = dir.path().join("out");
    let o = netrobust(&["bench", "--config", spec.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{o:?}");
    assert_eq!(fs::read_to_string(out.join("summary.csv")).unwrap().lines().count(), 2);

    fs::write(&spec, "budget = 5\nruns = 1\n\n[[settings]]\nname = \"x\"\nn = 10\n").unwrap();
    let o = netrobust(&["bench", "--config", spec.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}
