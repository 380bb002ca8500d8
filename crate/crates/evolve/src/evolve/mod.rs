//! Population-based search over DSL programs.
//!
//! Generation 0 is the initial population. Each later generation `t`
//! draws E1/M1/M2 offspring from tournament parents, scores them on the
//! training set, recomputes every fitness at weight `w(t)`, and keeps
//! `popsize` members by roulette. The best individual ever seen is
//! archived outside the population.

mod config;
mod engine;
mod select;
mod store;

use std::io;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use netrobust_core::aff::{fitness_from_scores, AffParams, GraphScore};
use netrobust_core::hdsl::{interpret_with, parse, render, HeuristicProgram};
use netrobust_core::heuristics::{SearchOptions, StopReason};
use netrobust_core::{generate_ba, BaParams, Graph};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::llm::LlmError;

pub use config::{EvolutionConfig, TrainingSpec};
pub use engine::{run_evolution, Evolution, GenerationStats, RunOptions, RunSummary};
pub use select::{roulette_survivors, tournament_select, ROULETTE_EPSILON};
pub use store::{EvolutionState, RunStore};

#[derive(Debug, Error)]
pub enum EvolveError {
    #[error("invalid evolution config: {0}")]
    Config(String),
    #[error(transparent)]
    Llm(#[from] LlmError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("cannot resume: {0}")]
    Resume(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Origin {
    Init,
    E1,
    M1,
    M2,
}

/// Programs are stored as canonical DSL text, so persisted populations
/// are readable and re-parse on load.
mod program_text {
    use super::*;
    use serde::de::Error as _;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(p: &HeuristicProgram, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&render(p))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<HeuristicProgram, D::Error> {
        let text = String::deserialize(d)?;
        parse(&text).map_err(D::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Individual {
    pub id: u64,
    pub origin: Origin,
    pub birth_generation: usize,
    pub parent_ids: Vec<u64>,
    pub description: String,
    #[serde(with = "program_text")]
    pub program: HeuristicProgram,
    /// Produced by the fallback mutator after unusable replies.
    pub fallback: bool,
    /// Per training graph, in training-set order.
    pub scores: Vec<GraphScore>,
    /// Some run hit the time limit; fitness is pinned to 0.
    pub timed_out: bool,
    pub fitness: Option<f64>,
}

impl Individual {
    pub fn new(
        id: u64,
        origin: Origin,
        birth_generation: usize,
        parent_ids: Vec<u64>,
        description: String,
        program: HeuristicProgram,
    ) -> Self {
        Self {
            id,
            origin,
            birth_generation,
            parent_ids,
            description,
            program,
            fallback: false,
            scores: Vec::new(),
            timed_out: false,
            fitness: None,
        }
    }

    /// Recomputes fitness at generation `t` from the cached scores.
    pub fn refit(&mut self, t: usize, params: &AffParams) {
        self.fitness = Some(if self.timed_out {
            0.0
        } else {
            fitness_from_scores(&self.scores, t.min(params.total_generations), params)
                .expect("t is clamped to T")
        });
    }
}

/// Penalty schedule for a run of `config.generations` generations. A run
/// with zero generations only ever evaluates at t = 0, where w = 0.
pub fn aff_params(config: &EvolutionConfig) -> Result<AffParams, EvolveError> {
    AffParams::new(config.generations.max(1), config.aff_exponent).map_err(|e| EvolveError::Config(e.to_string()))
}

const STREAM_TRAINING: u64 = 1;
const STREAM_EVAL: u64 = 2;
const STREAM_INIT: u64 = 3;
const STREAM_VARIATION: u64 = 4;
const STREAM_SURVIVORS: u64 = 5;

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Independent seed for draw `index` of `stream` under the master seed.
pub fn derive_seed(master: u64, stream: u64, index: u64) -> u64 {
    splitmix(splitmix(master ^ splitmix(stream)) ^ index)
}

pub fn build_training_set(config: &EvolutionConfig) -> Result<Vec<Graph>, EvolveError> {
    config
        .training
        .shapes()
        .into_iter()
        .enumerate()
        .map(|(i, (n, n0, m0))| {
            let seed = derive_seed(config.seed, STREAM_TRAINING, i as u64);
            generate_ba(BaParams::new(n, n0, m0, seed)).map_err(|e| EvolveError::Config(e.to_string()))
        })
        .collect()
}

/// Runs programs on a fixed training set. Every program sees the same
/// search seed on a given graph.
pub struct Evaluator {
    pub graphs: Vec<Graph>,
    pub seeds: Vec<u64>,
    pub budget: usize,
    pub timeout: Duration,
}

impl Evaluator {
    pub fn new(config: &EvolutionConfig) -> Result<Self, EvolveError> {
        let graphs = build_training_set(config)?;
        let seeds = (0..graphs.len() as u64)
            .map(|j| derive_seed(config.seed, STREAM_EVAL, j))
            .collect();
        Ok(Self {
            graphs,
            seeds,
            budget: config.training_budget,
            timeout: Duration::from_millis(config.timeout_ms),
        })
    }

    /// `None` when the run timed out or the program was rejected.
    fn score(&self, p: &HeuristicProgram, j: usize) -> Option<GraphScore> {
        let options = SearchOptions {
            deadline: Some(Instant::now() + self.timeout),
            ..SearchOptions::default()
        };
        let out = interpret_with(p, &self.graphs[j], self.budget, self.seeds[j], &options).ok()?;
        if out.stop == StopReason::TimedOut {
            return None;
        }
        GraphScore::measure(&self.graphs[j], &out.final_graph).ok()
    }

    /// Fills `scores`/`timed_out` of every individual, in parallel across
    /// (individual, graph) pairs.
    pub fn evaluate(&self, inds: &mut [Individual]) {
        let m = self.graphs.len();
        let results: Vec<Option<GraphScore>> = (0..inds.len() * m)
            .into_par_iter()
            .map(|k| self.score(&inds[k / m].program, k % m))
            .collect();
        for (ind, chunk) in inds.iter_mut().zip(results.chunks(m)) {
            ind.timed_out = chunk.iter().any(Option::is_none);
            ind.scores = if ind.timed_out {
                Vec::new()
            } else {
                chunk.iter().map(|s| s.expect("checked")).collect()
            };
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use netrobust_core::hdsl::HC_PROGRAM;
    use netrobust_core::robustness_r;

    fn tiny() -> EvolutionConfig {
        EvolutionConfig {
            training: TrainingSpec {
                sizes: vec![30],
                densities: vec![2],
                instances: 4,
                n0: 3,
            },
            ..EvolutionConfig::default()
        }
    }

    fn individual(text: &str) -> Individual {
        Individual::new(0, Origin::Init, 0, vec![], String::new(), parse(text).unwrap())
    }

    #[test]
    fn training_set_is_seeded() {
        let c = EvolutionConfig::default();
        let a = build_training_set(&c).unwrap();
        assert_eq!(a.len(), 24);
        assert!(a.iter().all(Graph::is_connected));
        assert_eq!(a, build_training_set(&c).unwrap());
        let other = EvolutionConfig { seed: 1, ..c };
        assert_ne!(a, build_training_set(&other).unwrap());
    }

    #[test]
    fn identity_program_scores_twice_the_original_r() {
        // b is always adjacent to a, so the edge to add already exists
        let idle = "HEURISTIC \"idle\"\nACCEPT improve\nRULE\n  a := random_node\n  b := neighbor_of(a)\n  MOVE add_edge(a, b)\nEND\n";
        let c = tiny();
        let ev = Evaluator::new(&c).unwrap();
        let mut inds = vec![individual(idle)];
        ev.evaluate(&mut inds);
        let expected: f64 = ev.graphs.iter().map(robustness_r).sum::<f64>() * 2.0;
        let params = aff_params(&c).unwrap();
        for t in [0, 7, c.generations] {
            inds[0].refit(t, &params);
            assert!((inds[0].fitness.unwrap() - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn swap_only_program_is_never_penalized() {
        let c = tiny();
        let ev = Evaluator::new(&c).unwrap();
        let mut inds = vec![individual(HC_PROGRAM)];
        ev.evaluate(&mut inds);
        assert!(!inds[0].timed_out);
        assert!(inds[0].scores.iter().all(|s| s.y == 0.0));
        let params = aff_params(&c).unwrap();
        inds[0].refit(c.generations, &params);
        let sum_r: f64 = inds[0].scores.iter().map(|s| s.r).sum();
        assert_eq!(inds[0].fitness.unwrap(), 2.0 * sum_r);
    }

    #[test]
    fn fitness_stays_in_range() {
        let c = tiny();
        let ev = Evaluator::new(&c).unwrap();
        let relocate = "HEURISTIC \"r\"\nACCEPT improve\nRULE\n  h := highest_degree\n  x := neighbor_of(h)\n  l := lowest_degree\n  MOVE relocate_edge(h, x, l)\nEND\n";
        let mut inds = vec![individual(relocate)];
        ev.evaluate(&mut inds);
        let params = aff_params(&c).unwrap();
        let upper: f64 = 2.0 * inds[0].scores.iter().map(|s| s.r).sum::<f64>();
        for t in 0..=c.generations {
            inds[0].refit(t, &params);
            let f = inds[0].fitness.unwrap();
            assert!((0.0..=upper).contains(&f));
        }
    }

    #[test]
    fn timeout_pins_fitness_to_zero() {
        let c = EvolutionConfig {
            timeout_ms: 1,
            training_budget: 10_000_000,
            training: TrainingSpec {
                sizes: vec![400],
                densities: vec![2],
                instances: 1,
                n0: 3,
            },
            ..EvolutionConfig::default()
        };
        let ev = Evaluator::new(&c).unwrap();
        let mut inds = vec![individual(HC_PROGRAM)];
        ev.evaluate(&mut inds);
        assert!(inds[0].timed_out);
        inds[0].refit(3, &aff_params(&c).unwrap());
        assert_eq!(inds[0].fitness, Some(0.0));
    }

    #[test]
    fn persisted_individuals_reparse() {
        let ind = individual(HC_PROGRAM);
        let json = serde_json::to_string(&ind).unwrap();
        assert!(json.contains("swap_edges(a, b, c, d)"));
        assert_eq!(serde_json::from_str::<Individual>(&json).unwrap(), ind);
        let broken = json.replace("MOVE", "MOOVE");
        assert!(serde_json::from_str::<Individual>(&broken).is_err());
    }
}
