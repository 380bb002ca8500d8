//! Optimizer selection, seeded multi-run execution and result records.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use netrobust_core::graph::read_edge_list;
use netrobust_core::hdsl::{interpret, parse, HeuristicProgram};
use netrobust_core::heuristics::StopReason;
use netrobust_core::{AnnealParams, Graph, Heuristic, OptimizerOutcome};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::CliError;

pub fn load_graph(path: &Path) -> Result<Graph, CliError> {
    let file = fs::File::open(path).map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    read_edge_list(std::io::BufReader::new(file)).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::Output(format!("cannot create {}: {e}", dir.display())))?;
    }
    fs::write(path, bytes).map_err(|e| CliError::Output(format!("cannot write {}: {e}", path.display())))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("records serialize");
    bytes.push(b'\n');
    write_file(path, &bytes)
}

/// A native heuristic, or a DSL program loaded from `dsl:<file>`.
#[derive(Debug, Clone)]
pub enum Optimizer {
    Native(Heuristic),
    Dsl { path: PathBuf, program: HeuristicProgram },
}

impl Optimizer {
    /// Resolves a name; `dsl:` paths are taken relative to `base`.
    pub fn parse(name: &str, base: &Path) -> Result<Self, CliError> {
        if let Some(file) = name.strip_prefix("dsl:") {
            let path = base.join(file);
            let text = fs::read_to_string(&path)
                .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
            let program = parse(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
            return Ok(Optimizer::Dsl { path, program });
        }
        name.parse()
            .map(Optimizer::Native)
            .map_err(|_| {
                CliError::Config(format!(
                    "unknown heuristic `{name}` (expected one of hc, sa, sr, v1, v2, v3 or dsl:<file>)"
                ))
            })
    }

    pub fn run(&self, g: &Graph, budget: usize, anneal: AnnealParams, seed: u64) -> Result<OptimizerOutcome, CliError> {
        match self {
            Optimizer::Native(h) => h.run(g, budget, anneal, seed).map_err(|e| CliError::Input(e.to_string())),
            Optimizer::Dsl { program, .. } => {
                interpret(program, g, budget, seed).map_err(|e| CliError::Input(e.to_string()))
            }
        }
    }
}

impl fmt::Display for Optimizer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Optimizer::Native(h) => write!(f, "{h}"),
            Optimizer::Dsl { path, .. } => write!(f, "dsl:{}", path.display()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRow {
    pub run: usize,
    pub seed: u64,
    pub initial_r: f64,
    pub final_r: f64,
    pub evaluations: usize,
    pub accepted: usize,
    pub stop: StopReason,
    pub wall_ms: u64,
}

/// Best, worst, mean and sample variance of the final R values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub runs: usize,
    pub best: f64,
    pub worst: f64,
    pub mean: f64,
    pub variance: f64,
}

impl Aggregate {
    pub fn of(values: &[f64]) -> Self {
        let n = values.len();
        let mean = values.iter().sum::<f64>() / n as f64;
        let variance = if n > 1 {
            values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64
        } else {
            0.0
        };
        Self {
            runs: n,
            best: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            worst: values.iter().copied().fold(f64::INFINITY, f64::min),
            mean,
            variance,
        }
    }
}

/// Graph and search seed of one run.
pub struct RunInput<'a> {
    pub graph: &'a Graph,
    pub seed: u64,
}

/// Runs `opt` once per input, in parallel; rows come back in input order.
pub fn run_all(opt: &Optimizer, inputs: &[RunInput], budget: usize, anneal: AnnealParams) -> Result<Vec<RunRow>, CliError> {
    inputs
        .par_iter()
        .enumerate()
        .map(|(run, input)| {
            let start = Instant::now();
            let out = opt.run(input.graph, budget, anneal, input.seed)?;
            Ok(RunRow {
                run,
                seed: input.seed,
                initial_r: out.initial_r,
                final_r: out.final_r,
                evaluations: out.evaluations_used,
                accepted: out.accepted_moves,
                stop: out.stop,
                wall_ms: start.elapsed().as_millis() as u64,
            })
        })
        .collect()
}

pub fn r6(r: f64) -> String {
    format!("{r:.6}")
}

fn stop_name(s: StopReason) -> &'static str {
    match s {
        StopReason::BudgetExhausted => "budget_exhausted",
        StopReason::Stalled => "stalled",
        StopReason::TimedOut => "timed_out",
    }
}

/// Per-run rows followed by one aggregate row, R in fixed 6-decimal form.
pub fn runs_csv(rows: &[RunRow], agg: &Aggregate) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let header = [
        "row", "run", "seed", "initial_r", "final_r", "evaluations", "accepted", "stop", "wall_ms", "best", "worst",
        "mean", "variance",
    ];
    w.write_record(header).expect("in memory");
    for r in rows {
        w.write_record([
            "run".to_string(),
            r.run.to_string(),
            r.seed.to_string(),
            r6(r.initial_r),
            r6(r.final_r),
            r.evaluations.to_string(),
            r.accepted.to_string(),
            stop_name(r.stop).to_string(),
            r.wall_ms.to_string(),
            String::new(),
            String::new(),
            String::new(),
            String::new(),
        ])
        .expect("in memory");
    }
    let mut last = vec![String::new(); header.len()];
    last[0] = "aggregate".into();
    last[1] = agg.runs.to_string();
    last[9] = r6(agg.best);
    last[10] = r6(agg.worst);
    last[11] = r6(agg.mean);
    last[12] = format!("{:.6e}", agg.variance);
    w.write_record(&last).expect("in memory");
    w.into_inner().expect("in memory")
}

pub fn print_bytes(bytes: &[u8]) -> Result<(), CliError> {
    std::io::stdout()
        .write_all(bytes)
        .map_err(|e| CliError::Output(format!("cannot write to stdout: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aggregate_matches_hand_computation() {
        let a = Aggregate::of(&[0.25, 0.5, 0.75]);
        assert_eq!(a.runs, 3);
        assert_eq!((a.best, a.worst, a.mean), (0.75, 0.25, 0.5));
        assert!((a.variance - 0.0625).abs() < 1e-15);
        assert_eq!(Aggregate::of(&[0.3]).variance, 0.0);
    }

    #[test]
    fn optimizer_names() {
        let base = Path::new(".");
        assert!(matches!(Optimizer::parse("v2", base), Ok(Optimizer::Native(Heuristic::V2))));
        assert!(matches!(Optimizer::parse("v9", base), Err(CliError::Config(_))));
        assert!(matches!(Optimizer::parse("dsl:/nonexistent.dsl", base), Err(CliError::Input(_))));
    }
}
