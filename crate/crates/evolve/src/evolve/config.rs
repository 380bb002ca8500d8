use netrobust_core::hdsl::{parse, HeuristicProgram};
use netrobust_core::BaParams;
use serde::{Deserialize, Serialize};

use super::EvolveError;
use crate::llm::{LlmBackendConfig, TaskSpec};

/// BA training graphs: one per (size, density, instance).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainingSpec {
    pub sizes: Vec<usize>,
    /// Edges per arriving node (`m0`).
    pub densities: Vec<usize>,
    pub instances: usize,
    /// Seed clique size; raised to `m0` where it would be smaller.
    pub n0: usize,
}

impl Default for TrainingSpec {
    fn default() -> Self {
        Self {
            sizes: vec![50, 100],
            densities: vec![2, 3, 4, 5],
            instances: 3,
            n0: 3,
        }
    }
}

impl TrainingSpec {
    /// Parameters of every training graph, in generation order, without seeds.
    pub fn shapes(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for &n in &self.sizes {
            for &m0 in &self.densities {
                for _ in 0..self.instances {
                    out.push((n, self.n0.max(m0), m0));
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvolutionConfig {
    pub popsize: usize,
    /// Number of generations `T`.
    pub generations: usize,
    pub p_e1: f64,
    pub p_m1: f64,
    pub p_m2: f64,
    pub tournament_k: usize,
    /// Evaluation budget per training graph.
    pub training_budget: usize,
    /// Exponent `p` of the penalty schedule.
    pub aff_exponent: f64,
    pub training: TrainingSpec,
    pub seed: u64,
    /// DSL text shown in every initialization prompt.
    pub seed_program: Option<String>,
    /// Wall-clock cap for one interpreter run on one training graph.
    pub timeout_ms: u64,
    /// Re-prompts after an unusable reply before falling back to a mutation.
    pub extract_retries: usize,
    pub backend: LlmBackendConfig,
    pub task: TaskSpec,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        Self {
            popsize: 10,
            generations: 50,
            p_e1: 0.8,
            p_m1: 0.1,
            p_m2: 0.1,
            tournament_k: 2,
            training_budget: 100,
            aff_exponent: 1.5,
            training: TrainingSpec::default(),
            seed: 0,
            seed_program: None,
            timeout_ms: 5000,
            extract_retries: 3,
            backend: LlmBackendConfig::default(),
            task: TaskSpec::default(),
        }
    }
}

fn config_err(msg: impl Into<String>) -> EvolveError {
    EvolveError::Config(msg.into())
}

/// `ceil(p * popsize)`, tolerant of rounding noise in the product.
fn offspring(p: f64, popsize: usize) -> usize {
    (p * popsize as f64 - 1e-9).ceil().max(0.0) as usize
}

impl EvolutionConfig {
    pub fn validate(&self) -> Result<(), EvolveError> {
        if self.popsize < 2 {
            return Err(config_err(format!("popsize = {} must be at least 2", self.popsize)));
        }
        for (name, p) in [("p_e1", self.p_e1), ("p_m1", self.p_m1), ("p_m2", self.p_m2)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(config_err(format!("{name} = {p} must lie in [0, 1]")));
            }
        }
        let sum = self.p_e1 + self.p_m1 + self.p_m2;
        if sum > 1.0 + 1e-9 {
            return Err(config_err(format!("p_e1 + p_m1 + p_m2 = {sum} exceeds 1")));
        }
        if self.tournament_k == 0 {
            return Err(config_err("tournament_k must be at least 1"));
        }
        if !(self.aff_exponent > 0.0 && self.aff_exponent.is_finite()) {
            return Err(config_err(format!("aff_exponent = {} must be positive", self.aff_exponent)));
        }
        if self.timeout_ms == 0 {
            return Err(config_err("timeout_ms must be positive"));
        }
        let shapes = self.training.shapes();
        if shapes.is_empty() {
            return Err(config_err("training set is empty"));
        }
        for (n, n0, m0) in shapes {
            BaParams::new(n, n0, m0, 0)
                .validate()
                .map_err(|e| config_err(format!("training graph BA({n}, {n0}, {m0}): {e}")))?;
        }
        self.seed_program()?;
        self.backend.validate()?;
        Ok(())
    }

    pub fn seed_program(&self) -> Result<Option<HeuristicProgram>, EvolveError> {
        self.seed_program
            .as_deref()
            .map(|text| parse(text).map_err(|e| config_err(format!("seed_program: {e}"))))
            .transpose()
    }

    /// E1, M1 and M2 offspring per generation.
    pub fn offspring_counts(&self) -> [usize; 3] {
        [
            offspring(self.p_e1, self.popsize),
            offspring(self.p_m1, self.popsize),
            offspring(self.p_m2, self.popsize),
        ]
    }
}
