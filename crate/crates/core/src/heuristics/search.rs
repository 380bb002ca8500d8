//! Budgeted propose/evaluate/accept-or-rollback loop shared by every optimizer.

use std::time::Instant;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::moves::Edit;
use super::{AnnealParams, OptimizerOutcome, StopReason};
use crate::graph::Graph;
use crate::robustness::{robustness_r, BudgetedEvaluator};
use crate::{seeded_rng, SearchRng};

/// Consecutive proposal failures after which a run gives up.
pub const DEFAULT_STALL_LIMIT: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Acceptance {
    /// Keep a move only if R strictly increases.
    Improve,
    /// Metropolis acceptance with geometric cooling per evaluation.
    Anneal(AnnealParams),
}

/// Geometric cooling: after `k` evaluations the temperature is `t0 * alpha^k`.
#[derive(Debug, Clone, Copy)]
pub struct AnnealSchedule {
    temperature: f64,
    alpha: f64,
}

impl AnnealSchedule {
    pub fn new(params: AnnealParams) -> Self {
        Self {
            temperature: params.t0,
            alpha: params.alpha,
        }
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    pub fn step(&mut self) {
        self.temperature *= self.alpha;
    }
}

/// Source of candidate edits for [`run_search`].
pub trait Proposer {
    /// A legal edit for `g`, or `None` when this attempt found nothing to do.
    fn propose(&mut self, g: &Graph, rng: &mut SearchRng) -> Option<Edit>;

    /// Called after each evaluated proposal. On rejection the graph has
    /// already been restored.
    fn feedback(&mut self, _accepted: bool) {}
}

#[derive(Debug, Clone, Copy)]
pub struct SearchOptions {
    pub stall_limit: usize,
    pub deadline: Option<Instant>,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            stall_limit: DEFAULT_STALL_LIMIT,
            deadline: None,
        }
    }
}

pub fn run_search<P: Proposer + ?Sized>(
    g: &Graph,
    budget: usize,
    acceptance: Acceptance,
    seed: u64,
    proposer: &mut P,
    options: &SearchOptions,
) -> OptimizerOutcome {
    let mut rng = seeded_rng(seed);
    let mut current = g.clone();
    let initial_r = robustness_r(&current);
    let mut current_r = initial_r;
    let mut evaluator = BudgetedEvaluator::new(budget);
    let mut schedule = match acceptance {
        Acceptance::Anneal(params) => Some(AnnealSchedule::new(params)),
        Acceptance::Improve => None,
    };
    let mut accepted_moves = 0;
    let mut stalls = 0;

    let stop = loop {
        if evaluator.is_exhausted() {
            break StopReason::BudgetExhausted;
        }
        if options.deadline.is_some_and(|d| Instant::now() >= d) {
            break StopReason::TimedOut;
        }
        let Some(edit) = proposer.propose(&current, &mut rng) else {
            stalls += 1;
            if stalls >= options.stall_limit {
                break StopReason::Stalled;
            }
            continue;
        };
        if !edit.apply(&mut current) {
            stalls += 1;
            if stalls >= options.stall_limit {
                break StopReason::Stalled;
            }
            continue;
        }
        stalls = 0;

        let Ok(r) = evaluator.evaluate(&current) else {
            edit.undo(&mut current);
            break StopReason::BudgetExhausted;
        };
        let accept = match schedule.as_mut() {
            None => r > current_r,
            Some(schedule) => {
                let temperature = schedule.temperature();
                schedule.step();
                r > current_r || rng.random::<f64>() < ((r - current_r) / temperature).exp()
            }
        };
        if accept {
            current_r = r;
            accepted_moves += 1;
        } else {
            edit.undo(&mut current);
        }
        proposer.feedback(accept);
    };

    // Any evaluated graph that beats everything before it is accepted, so the
    // evaluator's best is the best accepted graph.
    let (final_graph, final_r) = match evaluator.best_seen() {
        Some((r, best)) if r > initial_r => (best.clone(), r),
        _ => (g.clone(), initial_r),
    };
    OptimizerOutcome {
        final_graph,
        final_r,
        initial_r,
        evaluations_used: evaluator.used(),
        accepted_moves,
        stop,
    }
}
