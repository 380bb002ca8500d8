//! Command implementations behind the `netrobust` binary.

mod bench;
mod error;
pub mod record;

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use log::info;
use netrobust_core::graph::write_edge_list;
use netrobust_core::{generate_ba, robustness_r, AnnealParams, BaParams};
use netrobust_evolve::{run_evolution, EvolutionConfig, RunOptions};
use serde::{Deserialize, Serialize};

pub use bench::{BenchResult, BenchSetting, BenchSpec};
pub use error::CliError;
use record::{load_graph, print_bytes, r6, run_all, runs_csv, write_file, write_json, Aggregate, Optimizer, RunInput, RunRow};

#[derive(Debug, Parser)]
#[command(name = "netrobust", version, about = "Rewire networks to survive targeted attacks")]
pub struct Cli {
    /// More log output (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate Barabási–Albert graphs as edge-list files plus a manifest.
    GenGraphs(GenGraphsArgs),
    /// Print the robustness R of a graph.
    EvalR(EvalArgs),
    /// Run an optimizer several times on one graph.
    Optimize(OptimizeArgs),
    /// Evolve DSL heuristics with a model backend.
    Evolve(EvolveArgs),
    /// Run a benchmark campaign described by a TOML file.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct GenGraphsArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 3)]
    pub n0: usize,
    #[arg(long, default_value_t = 2)]
    pub m0: usize,
    #[arg(long, default_value_t = 1)]
    pub count: usize,
    /// Graph i uses seed + i.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    pub graph: PathBuf,
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    pub graph: PathBuf,
    /// hc, sa, sr, v1, v2, v3 or dsl:<file>.
    #[arg(long)]
    pub heuristic: String,
    /// Robustness evaluations per run.
    #[arg(long, default_value_t = 30_000)]
    pub budget: usize,
    #[arg(long, default_value_t = 1)]
    pub runs: usize,
    /// Run i uses search seed seed + i.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Initial temperature for annealing heuristics.
    #[arg(long)]
    pub t0: Option<f64>,
    /// Cooling factor for annealing heuristics.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Directory for runs.csv, record.json and best.el; CSV goes to stdout otherwise.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvolveArgs {
    /// TOML evolution config.
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Continue from the last generation saved in --out.
    #[arg(long)]
    pub resume: bool,
    /// Stop after this generation, leaving a resumable run.
    #[arg(long)]
    pub stop_after: Option<usize>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// TOML bench spec.
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::GenGraphs(a) => gen_graphs(&a).map(|_| ()),
        Command::EvalR(a) => eval_r(&a),
        Command::Optimize(a) => optimize(&a).map(|_| ()),
        Command::Evolve(a) => evolve(&a),
        Command::Bench(a) => bench::bench(&a.config, &a.out).map(|_| ()),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub file: String,
    pub seed: u64,
    pub nodes: usize,
    pub edges: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub n: usize,
    pub n0: usize,
    pub m0: usize,
    pub seed: u64,
    pub graphs: Vec<ManifestEntry>,
}

pub fn gen_graphs(a: &GenGraphsArgs) -> Result<Manifest, CliError> {
    BaParams::new(a.n, a.n0, a.m0, a.seed)
        .validate()
        .map_err(|e| CliError::Config(e.to_string()))?;
    if a.count == 0 {
        return Err(CliError::Config("--count must be at least 1".into()));
    }
    let mut graphs = Vec::with_capacity(a.count);
    for i in 0..a.count {
        let seed = a.seed + i as u64;
        let g = generate_ba(BaParams::new(a.n, a.n0, a.m0, seed)).map_err(|e| CliError::Config(e.to_string()))?;
        let file = format!("ba_n{}_m{}_s{}.el", a.n, a.m0, seed);
        let mut bytes = Vec::new();
        write_edge_list(&g, &mut bytes).expect("in memory");
        write_file(&a.out.join(&file), &bytes)?;
        println!("{file}: {} nodes, {} edges", g.node_count(), g.edge_count());
        graphs.push(ManifestEntry {
            file,
            seed,
            nodes: g.node_count(),
            edges: g.edge_count(),
        });
    }
    let manifest = Manifest {
        n: a.n,
        n0: a.n0,
        m0: a.m0,
        seed: a.seed,
        graphs,
    };
    write_json(&a.out.join("manifest.json"), &manifest)?;
    Ok(manifest)
}

fn eval_r(a: &EvalArgs) -> Result<(), CliError> {
    let g = load_graph(&a.graph)?;
    println!("{}", r6(robustness_r(&g)));
    Ok(())
}

pub fn anneal_params(t0: Option<f64>, alpha: Option<f64>) -> Result<AnnealParams, CliError> {
    let d = AnnealParams::default();
    AnnealParams::new(t0.unwrap_or(d.t0), alpha.unwrap_or(d.alpha)).map_err(|e| CliError::Config(e.to_string()))
}

/// Everything needed to rerun an `optimize` invocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizeSnapshot {
    pub graph: PathBuf,
    pub heuristic: String,
    pub budget: usize,
    pub runs: usize,
    pub seed: u64,
    pub anneal: AnnealParams,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub run_id: String,
    pub config: OptimizeSnapshot,
    pub runs: Vec<RunRow>,
    pub aggregate: Aggregate,
}

pub fn optimize(a: &OptimizeArgs) -> Result<RunRecord, CliError> {
    if a.runs == 0 {
        return Err(CliError::Config("--runs must be at least 1".into()));
    }
    let anneal = anneal_params(a.t0, a.alpha)?;
    let opt = Optimizer::parse(&a.heuristic, Path::new(""))?;
    let g = load_graph(&a.graph)?;
    let inputs: Vec<RunInput> = (0..a.runs)
        .map(|i| RunInput {
            graph: &g,
            seed: a.seed + i as u64,
        })
        .collect();
    let rows = run_all(&opt, &inputs, a.budget, anneal)?;
    let finals: Vec<f64> = rows.iter().map(|r| r.final_r).collect();
    let aggregate = Aggregate::of(&finals);
    let record = RunRecord {
        run_id: format!("{}-b{}-s{}-r{}", opt, a.budget, a.seed, a.runs),
        config: OptimizeSnapshot {
            graph: a.graph.clone(),
            heuristic: a.heuristic.clone(),
            budget: a.budget,
            runs: a.runs,
            seed: a.seed,
            anneal,
        },
        runs: rows,
        aggregate,
    };
    let csv = runs_csv(&record.runs, &aggregate);
    match &a.out {
        Some(dir) => {
            write_file(&dir.join("runs.csv"), &csv)?;
            write_json(&dir.join("record.json"), &record)?;
            // rerun the best seed to recover its graph
            let best = record
                .runs
                .iter()
                .max_by(|x, y| x.final_r.total_cmp(&y.final_r).then(y.run.cmp(&x.run)))
                .expect("runs >= 1");
            let out = opt.run(&g, a.budget, anneal, best.seed)?;
            let mut bytes = Vec::new();
            write_edge_list(&out.final_graph, &mut bytes).expect("in memory");
            write_file(&dir.join("best.el"), &bytes)?;
            println!(
                "{}: best {} worst {} mean {} variance {:.6e} over {} run(s)",
                record.run_id,
                r6(aggregate.best),
                r6(aggregate.worst),
                r6(aggregate.mean),
                aggregate.variance,
                aggregate.runs
            );
        }
        None => print_bytes(&csv)?,
    }
    Ok(record)
}

fn evolve(a: &EvolveArgs) -> Result<(), CliError> {
    let text = fs::read_to_string(&a.config)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", a.config.display())))?;
    let config: EvolutionConfig =
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", a.config.display())))?;
    let summary = run_evolution(
        config,
        &RunOptions {
            out_dir: Some(a.out.clone()),
            resume: a.resume,
            stop_after: a.stop_after,
        },
    )?;
    info!("outputs in {}", a.out.display());
    let state = if summary.finished { "finished" } else { "stopped" };
    println!(
        "{state} after generation {}: best fitness {:.6} (individual {})",
        summary.generation,
        summary.best.fitness.unwrap_or(0.0),
        summary.best.id
    );
    Ok(())
}
