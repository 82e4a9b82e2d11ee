use std::time::Instant;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{
    add_feedback, build_prompt, evaluate_fitness, select_parents, Candidate, EvolutionConfig, EvolutionError,
    FitnessConfig, PopulationStore, TrainTask,
};
use crate::llm::{Generator, GeneratorRequest, UsageLedger};
use crate::par;
use crate::pddl::Domain;
use crate::sandbox::Executor;
use crate::search::{solve_satisficing, SearchBudget};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationRecord {
    pub generation: usize,
    /// Best score seen over the whole run so far.
    pub incumbent_score: Option<f64>,
    /// Best score in the population after this generation's rollover.
    pub store_best_score: Option<f64>,
    pub accepted_offspring: usize,
    pub rejected_offspring: usize,
    pub generator_calls: usize,
    pub gen_time_seconds: f64,
    pub tokens_in: u64,
    pub tokens_out: u64,
    pub dollar_cost: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunLedger {
    pub config: EvolutionConfig,
    pub fitness: FitnessConfig,
    pub domain_name: String,
    pub seeds: usize,
    pub generations: Vec<GenerationRecord>,
    pub best_score: Option<f64>,
    pub best_source: Option<String>,
    pub tokens_in: u64,
    pub tokens_out: u64,
    pub dollar_cost: f64,
    pub total_seconds: f64,
}

#[derive(Debug, Clone)]
pub struct SynthesisResult {
    pub best: Candidate,
    pub ledger: RunLedger,
}

/// Reject an F that some training plan could reach. Tasks the satisficing
/// search cannot solve within its budget are skipped.
pub fn check_failure_value(domain: &Domain, tasks: &[TrainTask], fitness: &FitnessConfig) -> Result<(), EvolutionError> {
    let budget = SearchBudget {
        max_expansions: 200_000,
        max_seconds: 5.0,
    };
    let lengths = par::map(tasks, |t| {
        solve_satisficing(&t.problem, domain, budget)
            .ok()
            .and_then(|r| r.plan().map(|p| p.len()))
    });
    for (task, len) in tasks.iter().zip(lengths) {
        if let Some(len) = len {
            if len as f64 >= fitness.failure_value {
                return Err(EvolutionError::InvalidConfig(format!(
                    "failure value {} does not exceed the {len}-step plan found for task {}",
                    fitness.failure_value, task.id
                )));
            }
        }
    }
    Ok(())
}

/// Everything a run needs besides the generator, executor, seeds and RNG.
pub struct Synthesis<'a> {
    pub config: EvolutionConfig,
    pub fitness: FitnessConfig,
    pub domain: &'a Domain,
    pub domain_text: &'a str,
    pub tasks: &'a [TrainTask],
    pub template: &'a str,
}

/// Per-generation counters.
struct Tally {
    started: Instant,
    usage_at_start: UsageLedger,
    accepted: usize,
    rejected: usize,
    calls: usize,
}

impl Tally {
    fn new(generator: &dyn Generator) -> Self {
        Self {
            started: Instant::now(),
            usage_at_start: generator.usage(),
            accepted: 0,
            rejected: 0,
            calls: 0,
        }
    }
}

struct Run<'s, 'a> {
    spec: &'s Synthesis<'a>,
    generator: &'s dyn Generator,
    executor: &'s dyn Executor,
    store: PopulationStore,
    best: Option<Candidate>,
    next_id: u64,
    tally: Tally,
    records: Vec<GenerationRecord>,
    started: Instant,
    seeds: usize,
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

impl Run<'_, '_> {
    fn score(&mut self, code: String) -> Result<(Candidate, bool), EvolutionError> {
        let mut candidate = Candidate::new(self.next_id, code);
        self.next_id += 1;
        let report = evaluate_fitness(
            &mut candidate,
            self.spec.domain,
            self.spec.tasks,
            &self.spec.fitness,
            &self.spec.config,
            self.executor,
        )?;
        Ok((add_feedback(candidate), report.rejected))
    }

    fn add(&mut self, candidate: Candidate) -> Result<(), EvolutionError> {
        let score = candidate.score.ok_or(EvolutionError::UnscoredCandidate(candidate.id))?;
        if self.best.as_ref().and_then(|b| b.score).is_none_or(|b| score < b) {
            self.best = Some(candidate.clone());
        }
        log::debug!("candidate {} scored {score}", candidate.id);
        if self.store.add_candidate(candidate)?.generation_ended {
            self.close_generation();
        }
        Ok(())
    }

    fn close_generation(&mut self) {
        let usage = self.generator.usage().since(&self.tally.usage_at_start);
        let record = GenerationRecord {
            generation: self.records.len(),
            incumbent_score: self.best.as_ref().and_then(|b| b.score),
            store_best_score: finite(self.store.best_score()),
            accepted_offspring: self.tally.accepted,
            rejected_offspring: self.tally.rejected,
            generator_calls: self.tally.calls,
            gen_time_seconds: self.tally.started.elapsed().as_secs_f64(),
            tokens_in: usage.tokens_in,
            tokens_out: usage.tokens_out,
            dollar_cost: usage.dollar_cost(),
        };
        log::info!(
            "generation {} done: incumbent {:?}, {} accepted, {} rejected",
            record.generation,
            record.incumbent_score,
            record.accepted_offspring,
            record.rejected_offspring
        );
        self.records.push(record);
        self.tally = Tally::new(self.generator);
    }

    fn ledger(&self) -> RunLedger {
        let usage = self.generator.usage();
        RunLedger {
            config: self.spec.config.clone(),
            fitness: self.spec.fitness.clone(),
            domain_name: self.spec.domain.name.clone(),
            seeds: self.seeds,
            generations: self.records.clone(),
            best_score: self.best.as_ref().and_then(|b| b.score),
            best_source: self.best.as_ref().map(|b| b.code.clone()),
            tokens_in: usage.tokens_in,
            tokens_out: usage.tokens_out,
            dollar_cost: usage.dollar_cost(),
            total_seconds: self.started.elapsed().as_secs_f64(),
        }
    }
}

impl Synthesis<'_> {
    /// Score and add the seeds, then evolve until G generations have
    /// closed. Returns the best candidate seen anywhere in the run.
    pub fn run(
        &self,
        generator: &dyn Generator,
        executor: &dyn Executor,
        seeds: &[String],
        rng: &mut impl Rng,
    ) -> Result<SynthesisResult, EvolutionError> {
        self.config.check()?;
        if self.config.evaluator_enabled {
            check_failure_value(self.domain, self.tasks, &self.fitness)?;
        }
        let store = PopulationStore::new(self.config.clone(), self.domain_text, self.template)?;
        // Surface a bad template before any generator spend.
        build_prompt(&store, &[])?;
        let mut run = Run {
            spec: self,
            generator,
            executor,
            store,
            best: None,
            next_id: 0,
            tally: Tally::new(generator),
            records: Vec::new(),
            started: Instant::now(),
            seeds: seeds.len(),
        };

        for seed in seeds {
            if run.store.is_finished() {
                break;
            }
            let (candidate, _) = run.score(seed.clone())?;
            run.add(candidate)?;
        }

        let budget = self.config.offspring_per_generation + self.config.retry_cap;
        while !run.store.is_finished() {
            if run.tally.calls >= budget {
                if run.tally.accepted == 0 {
                    run.close_generation();
                    return Err(EvolutionError::GeneratorExhausted {
                        ledger: Box::new(run.ledger()),
                    });
                }
                log::warn!(
                    "generation {} hit its call budget with {} accepted; closing it early",
                    run.store.generation_no(),
                    run.tally.accepted
                );
                run.store.end_generation();
                run.close_generation();
                continue;
            }
            let parents = if run.store.planners().is_empty() {
                Vec::new()
            } else {
                select_parents(&run.store, self.config.parents_per_prompt, rng)?
            };
            let request = GeneratorRequest {
                prompt: build_prompt(&run.store, &parents)?,
                samples: self.config.samples_per_prompt,
                model: self.config.model.clone(),
                max_output_tokens: self.config.max_output_tokens,
                sampling_temperature: self.config.sampling_temperature,
            };
            run.tally.calls += 1;
            let samples = match generator.draw_samples(&request) {
                Ok(s) => s,
                Err(e) => {
                    log::warn!("generator call failed: {e}");
                    continue;
                }
            };
            for code in samples {
                if run.store.is_finished() {
                    break;
                }
                let (candidate, rejected) = run.score(code)?;
                if rejected {
                    log::debug!(
                        "discarding candidate {}: {}",
                        candidate.id,
                        candidate.error.as_deref().unwrap_or("")
                    );
                    run.tally.rejected += 1;
                    continue;
                }
                run.tally.accepted += 1;
                run.add(candidate)?;
            }
        }

        let ledger = run.ledger();
        let best = run.best.ok_or_else(|| EvolutionError::GeneratorExhausted {
            ledger: Box::new(ledger.clone()),
        })?;
        Ok(SynthesisResult { best, ledger })
    }
}
