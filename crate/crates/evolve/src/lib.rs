//! Evolution of network rewiring heuristics through a prompted model.
//!
//! - [`llm`]: prompts, chat backends (live, replay, mock) and reply parsing
//! - [`evolve`]: population, fitness over a training set, selection, persistence

pub mod evolve;
pub mod llm;

pub use evolve::{run_evolution, EvolutionConfig, EvolveError, Individual, RunOptions, RunSummary};
pub use llm::{LlmBackendConfig, LlmClient, LlmError};
