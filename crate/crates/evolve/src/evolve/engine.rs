use std::path::PathBuf;

use log::{debug, info, warn};
use netrobust_core::aff::AffParams;
use netrobust_core::hdsl::HeuristicProgram;
use netrobust_core::nos::sample_nos;
use netrobust_core::seeded_rng;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    aff_params, derive_seed, roulette_survivors, tournament_select, EvolutionConfig, EvolutionState, Evaluator,
    EvolveError, Individual, Origin, RunStore, STREAM_INIT, STREAM_SURVIVORS, STREAM_VARIATION,
};
use crate::llm::prompt::Parent;
use crate::llm::{extract_program, mock, ChatRequest, LlmClient, Prompter, NOS_PER_PROMPT};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationStats {
    pub generation: usize,
    pub best: f64,
    pub mean: f64,
    pub worst: f64,
    pub best_ever: f64,
    pub best_ever_id: u64,
    /// Individuals created this generation.
    pub created: usize,
    pub fallbacks: usize,
    pub timeouts: usize,
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Persist every generation here.
    pub out_dir: Option<PathBuf>,
    /// Continue from the last generation found in `out_dir`.
    pub resume: bool,
    /// Stop once this generation is complete, as if interrupted.
    pub stop_after: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub best: Individual,
    pub stats: Vec<GenerationStats>,
    pub population: Vec<Individual>,
    /// Last completed generation.
    pub generation: usize,
    pub finished: bool,
}

struct Job<'a> {
    origin: Origin,
    parents: Vec<&'a Individual>,
    nos_seed: u64,
    fallback_seed: u64,
}

/// Reply turned into an individual's text fields.
struct Obtained {
    description: String,
    program: HeuristicProgram,
    fallback: bool,
}

fn best_of(pop: &[Individual]) -> &Individual {
    pop.iter()
        .max_by(|a, b| {
            let (fa, fb) = (a.fitness.unwrap_or(0.0), b.fitness.unwrap_or(0.0));
            fa.total_cmp(&fb).then(b.id.cmp(&a.id))
        })
        .expect("non-empty population")
}

pub struct Evolution {
    config: EvolutionConfig,
    params: AffParams,
    evaluator: Evaluator,
    client: LlmClient,
    prompter: Prompter,
    seed_program: Option<HeuristicProgram>,
}

impl Evolution {
    pub fn new(config: EvolutionConfig) -> Result<Self, EvolveError> {
        config.validate()?;
        let client = LlmClient::new(config.backend.clone())?;
        let prompter = Prompter::new(&config.backend.model, config.backend.temperature, config.task.clone());
        Ok(Self {
            params: aff_params(&config)?,
            evaluator: Evaluator::new(&config)?,
            seed_program: config.seed_program()?,
            client,
            prompter,
            config,
        })
    }

    pub fn config(&self) -> &EvolutionConfig {
        &self.config
    }

    pub fn evaluator(&self) -> &Evaluator {
        &self.evaluator
    }

    /// Runs `f` on a pool sized to the backend's concurrency cap.
    fn in_pool<T: Send>(&self, f: impl FnOnce() -> T + Send) -> Result<T, EvolveError> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.config.backend.concurrency)
            .build()
            .map_err(|e| EvolveError::Config(format!("cannot start worker pool: {e}")))?;
        Ok(pool.install(f))
    }

    /// Asks the backend, re-prompting with the rejection reason on
    /// unusable replies; falls back to `fallback` when retries run out.
    fn obtain(
        &self,
        req: &ChatRequest,
        fallback: impl FnOnce() -> (String, HeuristicProgram),
    ) -> Result<Obtained, EvolveError> {
        let mut current = req.clone();
        for attempt in 1..=self.config.extract_retries + 1 {
            let reply = self.client.complete(&current)?;
            match extract_program(&reply) {
                Ok(x) => {
                    for w in &x.warnings {
                        debug!("{w}");
                    }
                    return Ok(Obtained {
                        description: x.description,
                        program: x.program,
                        fallback: false,
                    });
                }
                Err(e) => {
                    warn!("unusable reply on attempt {attempt}: {e}");
                    current = self.prompter.retry(req, attempt, &e.to_string());
                }
            }
        }
        let (description, program) = fallback();
        info!("falling back to a local mutation: {description}");
        Ok(Obtained {
            description,
            program,
            fallback: true,
        })
    }

    fn evaluate(&self, inds: &mut [Individual], t: usize) {
        self.evaluator.evaluate(inds);
        for ind in inds {
            ind.refit(t, &self.params);
        }
    }

    /// Generation 0, scored at t = 0.
    pub fn initialize(&self) -> Result<Vec<Individual>, EvolveError> {
        let n = self.config.popsize;
        let obtained = self.in_pool(|| {
            (0..n)
                .into_par_iter()
                .map(|i| {
                    let req = self.prompter.init(self.seed_program.as_ref(), i, n);
                    self.obtain(&req, || {
                        let mut rng = seeded_rng(derive_seed(self.config.seed, STREAM_INIT, i as u64));
                        match &self.seed_program {
                            Some(p) => ("mutated seed program".into(), mock::mutate(p, &mut rng)),
                            None => ("random program".into(), mock::random_program(&mut rng)),
                        }
                    })
                })
                .collect::<Result<Vec<_>, _>>()
        })??;
        let mut pop: Vec<Individual> = obtained
            .into_iter()
            .enumerate()
            .map(|(i, o)| Individual {
                fallback: o.fallback,
                ..Individual::new(i as u64, Origin::Init, 0, vec![], o.description, o.program)
            })
            .collect();
        self.evaluate(&mut pop, 0);
        Ok(pop)
    }

    fn request(&self, job: &Job) -> Result<ChatRequest, EvolveError> {
        fn view(i: &Individual) -> Parent<'_> {
            Parent {
                description: &i.description,
                program: &i.program,
            }
        }
        let nos = || sample_nos(job.nos_seed, NOS_PER_PROMPT).expect("12 of 48 pairs");
        Ok(match job.origin {
            Origin::E1 => self.prompter.e1(view(job.parents[0]), view(job.parents[1]), &nos())?,
            Origin::M1 => self.prompter.m1(view(job.parents[0]), &nos())?,
            Origin::M2 => self.prompter.m2(view(job.parents[0])),
            Origin::Init => unreachable!("variation jobs only"),
        })
    }

    /// Offspring of generation `t`, evaluated at `w(t)`. Parents and seeds
    /// are drawn up front so the result does not depend on reply order.
    pub fn variation_step(
        &self,
        pop: &[Individual],
        t: usize,
        next_id: &mut u64,
    ) -> Result<Vec<Individual>, EvolveError> {
        let mut rng = seeded_rng(derive_seed(self.config.seed, STREAM_VARIATION, t as u64));
        let [e1, m1, m2] = self.config.offspring_counts();
        let mut jobs = Vec::with_capacity(e1 + m1 + m2);
        for (origin, count) in [(Origin::E1, e1), (Origin::M1, m1), (Origin::M2, m2)] {
            for _ in 0..count {
                let arity = if origin == Origin::E1 { 2 } else { 1 };
                let parents = (0..arity)
                    .map(|_| tournament_select(pop, self.config.tournament_k, &mut rng))
                    .collect();
                jobs.push(Job {
                    origin,
                    parents,
                    nos_seed: rng.random(),
                    fallback_seed: rng.random(),
                });
            }
        }

        let obtained = self.in_pool(|| {
            jobs.par_iter()
                .map(|job| {
                    let req = self.request(job)?;
                    self.obtain(&req, || {
                        let first = job.parents[0];
                        let mut rng = seeded_rng(job.fallback_seed);
                        (
                            format!("mutated copy of individual {}", first.id),
                            mock::mutate(&first.program, &mut rng),
                        )
                    })
                })
                .collect::<Result<Vec<_>, _>>()
        })??;

        let mut offspring: Vec<Individual> = jobs
            .iter()
            .zip(obtained)
            .map(|(job, o)| {
                let id = *next_id;
                *next_id += 1;
                Individual {
                    fallback: o.fallback,
                    ..Individual::new(
                        id,
                        job.origin,
                        t,
                        job.parents.iter().map(|p| p.id).collect(),
                        o.description,
                        o.program,
                    )
                }
            })
            .collect();
        self.evaluate(&mut offspring, t);
        Ok(offspring)
    }

    fn stats(state: &EvolutionState, created: &[Individual]) -> GenerationStats {
        let fits: Vec<f64> = state.population.iter().map(|i| i.fitness.unwrap_or(0.0)).collect();
        GenerationStats {
            generation: state.generation,
            best: fits.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            mean: fits.iter().sum::<f64>() / fits.len() as f64,
            worst: fits.iter().copied().fold(f64::INFINITY, f64::min),
            best_ever: state.best_ever.fitness.unwrap_or(0.0),
            best_ever_id: state.best_ever.id,
            created: created.len(),
            fallbacks: created.iter().filter(|i| i.fallback).count(),
            timeouts: created.iter().filter(|i| i.timed_out).count(),
        }
    }

    fn resume_from(&self, store: &RunStore) -> Result<Option<EvolutionState>, EvolveError> {
        let Some(t) = store.latest_generation()? else {
            return Ok(None);
        };
        match store.load_config()? {
            Some(saved) if saved == self.config => {}
            Some(_) => {
                return Err(EvolveError::Resume(format!(
                    "configuration differs from the snapshot in {}",
                    store.dir().display()
                )))
            }
            None => {
                return Err(EvolveError::Resume(format!(
                    "{} has generation files but no config snapshot",
                    store.dir().display()
                )))
            }
        }
        let state = store.load_generation(t)?;
        if state.generation != t || state.population.len() != self.config.popsize {
            return Err(EvolveError::Resume(format!("generation file {t} is inconsistent")));
        }
        info!("resuming after generation {t}");
        Ok(Some(state))
    }

    fn start(&self, store: Option<&RunStore>) -> Result<EvolutionState, EvolveError> {
        if let Some(store) = store {
            if store.latest_generation()?.is_some() {
                return Err(EvolveError::Config(format!(
                    "{} already holds a run; resume it or choose another directory",
                    store.dir().display()
                )));
            }
            store.save_config(&self.config)?;
        }
        let population = self.initialize()?;
        let mut state = EvolutionState {
            generation: 0,
            next_id: population.len() as u64,
            best_ever: best_of(&population).clone(),
            population,
            stats: Vec::new(),
        };
        let row = Self::stats(&state, &state.population);
        state.stats.push(row);
        if let Some(store) = store {
            store.save_generation(&state)?;
        }
        Ok(state)
    }

    pub fn run(&self, options: &RunOptions) -> Result<RunSummary, EvolveError> {
        let store = options.out_dir.as_ref().map(RunStore::new);
        let resumed = match (&store, options.resume) {
            (Some(s), true) => self.resume_from(s)?,
            _ => None,
        };
        let mut state = match resumed {
            Some(s) => s,
            None => self.start(store.as_ref())?,
        };

        let total = self.config.generations;
        while state.generation < total && options.stop_after.is_none_or(|s| state.generation < s) {
            let t = state.generation + 1;
            let offspring = self.variation_step(&state.population, t, &mut state.next_id)?;
            let mut pool = std::mem::take(&mut state.population);
            pool.extend(offspring.iter().cloned());
            for ind in &mut pool {
                ind.refit(t, &self.params);
            }
            let top = best_of(&pool);
            if top.fitness > state.best_ever.fitness {
                state.best_ever = top.clone();
            }
            let mut rng = seeded_rng(derive_seed(self.config.seed, STREAM_SURVIVORS, t as u64));
            state.population = roulette_survivors(pool, self.config.popsize, &mut rng);
            state.generation = t;
            let row = Self::stats(&state, &offspring);
            info!(
                "generation {t}: best {:.6}, mean {:.6}, best ever {:.6}",
                row.best, row.mean, row.best_ever
            );
            state.stats.push(row);
            if let Some(store) = &store {
                store.save_generation(&state)?;
            }
        }

        Ok(RunSummary {
            best: state.best_ever,
            finished: state.generation == total,
            generation: state.generation,
            stats: state.stats,
            population: state.population,
        })
    }
}

pub fn run_evolution(config: EvolutionConfig, options: &RunOptions) -> Result<RunSummary, EvolveError> {
    Evolution::new(config)?.run(options)
}
