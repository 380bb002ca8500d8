use std::fs;
use std::path::{Path, PathBuf};

use netrobust_core::{generate_ba, AnnealParams, BaParams, Graph};
use serde::{Deserialize, Serialize};

use crate::record::{load_graph, r6, run_all, write_file, write_json, Aggregate, Optimizer, RunInput, RunRow};
use crate::{anneal_params, CliError};

fn default_algorithms() -> Vec<String> {
    ["hc", "sa", "sr", "v1", "v2", "v3"].map(String::from).to_vec()
}

fn default_n0() -> usize {
    3
}

/// One network setting: either a BA family (a fresh graph per run) or a
/// fixed edge-list file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchSetting {
    pub name: String,
    pub n: Option<usize>,
    #[serde(default = "default_n0")]
    pub n0: usize,
    pub m0: Option<usize>,
    /// Relative to the spec file.
    pub graph: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchSpec {
    pub budget: usize,
    pub runs: usize,
    /// Run i uses seed + i for both the BA graph and the search.
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_algorithms")]
    pub algorithms: Vec<String>,
    pub t0: Option<f64>,
    pub alpha: Option<f64>,
    pub settings: Vec<BenchSetting>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchResult {
    pub setting: String,
    pub algorithm: String,
    pub runs: Vec<RunRow>,
    pub aggregate: Aggregate,
}

#[derive(Debug, Serialize)]
struct BenchRecord<'a> {
    spec: &'a BenchSpec,
    anneal: AnnealParams,
    results: &'a [BenchResult],
}

enum Source {
    Ba { n: usize, n0: usize, m0: usize },
    File(Graph),
}

impl BenchSpec {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    fn validate(&self) -> Result<(), CliError> {
        if self.runs == 0 {
            return Err(CliError::Config("runs must be at least 1".into()));
        }
        if self.settings.is_empty() || self.algorithms.is_empty() {
            return Err(CliError::Config("a bench needs at least one setting and one algorithm".into()));
        }
        Ok(())
    }
}

fn source(s: &BenchSetting, base: &Path) -> Result<Source, CliError> {
    match (s.n, s.m0, &s.graph) {
        (Some(n), Some(m0), None) => {
            BaParams::new(n, s.n0, m0, 0)
                .validate()
                .map_err(|e| CliError::Config(format!("setting {}: {e}", s.name)))?;
            Ok(Source::Ba { n, n0: s.n0, m0 })
        }
        (None, None, Some(file)) => Ok(Source::File(load_graph(&base.join(file))?)),
        _ => Err(CliError::Config(format!(
            "setting {} needs either n and m0, or graph",
            s.name
        ))),
    }
}

/// Runs every (setting, algorithm) pair and writes `summary.csv`,
/// `runs.csv` and `bench.json` to `out`.
pub fn bench(spec_path: &Path, out: &Path) -> Result<Vec<BenchResult>, CliError> {
    let spec = BenchSpec::load(spec_path)?;
    spec.validate()?;
    let base = spec_path.parent().unwrap_or(Path::new(""));
    let anneal = anneal_params(spec.t0, spec.alpha)?;
    let optimizers = spec
        .algorithms
        .iter()
        .map(|name| Optimizer::parse(name, base))
        .collect::<Result<Vec<_>, _>>()?;
    let sources = spec
        .settings
        .iter()
        .map(|s| source(s, base))
        .collect::<Result<Vec<_>, _>>()?;

    let mut results = Vec::new();
    for (setting, src) in spec.settings.iter().zip(&sources) {
        let seeds: Vec<u64> = (0..spec.runs as u64).map(|i| spec.seed + i).collect();
        let graphs: Vec<Graph> = match src {
            Source::Ba { n, n0, m0 } => seeds
                .iter()
                .map(|&s| generate_ba(BaParams::new(*n, *n0, *m0, s)).expect("validated"))
                .collect(),
            Source::File(g) => vec![g.clone()],
        };
        let inputs: Vec<RunInput> = seeds
            .iter()
            .enumerate()
            .map(|(i, &seed)| RunInput {
                graph: &graphs[i.min(graphs.len() - 1)],
                seed,
            })
            .collect();
        for (name, opt) in spec.algorithms.iter().zip(&optimizers) {
            let runs = run_all(opt, &inputs, spec.budget, anneal)?;
            let finals: Vec<f64> = runs.iter().map(|r| r.final_r).collect();
            let aggregate = Aggregate::of(&finals);
            println!(
                "{:<16} {:<8} best {} worst {} mean {} var {:.6e}",
                setting.name,
                name,
                r6(aggregate.best),
                r6(aggregate.worst),
                r6(aggregate.mean),
                aggregate.variance
            );
            results.push(BenchResult {
                setting: setting.name.clone(),
                algorithm: name.clone(),
                runs,
                aggregate,
            });
        }
    }

    let mut summary = csv::Writer::from_writer(Vec::new());
    summary
        .write_record(["setting", "algorithm", "runs", "best", "worst", "mean", "variance"])
        .expect("in memory");
    let mut per_run = csv::Writer::from_writer(Vec::new());
    per_run
        .write_record(["setting", "algorithm", "run", "seed", "initial_r", "final_r", "evaluations", "accepted"])
        .expect("in memory");
    for r in &results {
        let a = &r.aggregate;
        summary
            .write_record([
                r.setting.clone(),
                r.algorithm.clone(),
                a.runs.to_string(),
                r6(a.best),
                r6(a.worst),
                r6(a.mean),
                format!("{:.6e}", a.variance),
            ])
            .expect("in memory");
        for row in &r.runs {
            per_run
                .write_record([
                    r.setting.clone(),
                    r.algorithm.clone(),
                    row.run.to_string(),
                    row.seed.to_string(),
                    r6(row.initial_r),
                    r6(row.final_r),
                    row.evaluations.to_string(),
                    row.accepted.to_string(),
                ])
                .expect("in memory");
        }
    }
    write_file(&out.join("summary.csv"), &summary.into_inner().expect("in memory"))?;
    write_file(&out.join("runs.csv"), &per_run.into_inner().expect("in memory"))?;
    write_json(
        &out.join("bench.json"),
        &BenchRecord {
            spec: &spec,
            anneal,
            results: &results,
        },
    )?;
    Ok(results)
}
