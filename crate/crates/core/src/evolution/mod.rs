//! The evolutionary loop: candidates, fitness, softmax parent selection with
//! a hyperbolic temperature schedule, prompt assembly, feedback, and μ+λ
//! elitist replacement.

mod fitness;
mod prompt;
mod selection;
mod store;
mod synthesis;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::sandbox::SandboxError;

pub use fitness::{evaluate_fitness, FitnessConfig, FitnessReport, TrainTask};
pub use prompt::{add_feedback, build_prompt, feedback_message, DEFAULT_TEMPLATE};
pub use selection::{get_temperature, score_probabilities, select_parents, TemperatureSchedule};
pub use store::{AddOutcome, PopulationStore};
pub use synthesis::{check_failure_value, GenerationRecord, RunLedger, Synthesis, SynthesisResult};

#[derive(Debug, thiserror::Error)]
pub enum EvolutionError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("numeric error: {0}")]
    NumericError(String),
    #[error("population is empty")]
    EmptyPopulation,
    #[error("prompt template lacks the {0} placeholder")]
    MissingPlaceholder(&'static str),
    #[error("candidate {0} has no score")]
    UnscoredCandidate(u64),
    #[error("candidate {0} has no feedback message")]
    MissingFeedback(u64),
    #[error("generator produced no loadable candidate in generation {}", .ledger.generations.len())]
    GeneratorExhausted { ledger: Box<RunLedger> },
    #[error(transparent)]
    Sandbox(#[from] SandboxError),
}

/// One generalized-planner program and what is known about it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub id: u64,
    pub code: String,
    /// Mean of `scores`.
    pub score: Option<f64>,
    pub scores: Option<BTreeMap<String, f64>>,
    /// Load or validation failure, or an executor-level failure.
    pub error: Option<String>,
    /// First validator or runtime failure over the training tasks.
    pub plan_failure_error: Option<String>,
    pub feedback_message: Option<String>,
}

impl Candidate {
    pub fn new(id: u64, code: impl Into<String>) -> Self {
        Self {
            id,
            code: code.into(),
            score: None,
            scores: None,
            error: None,
            plan_failure_error: None,
            feedback_message: None,
        }
    }

    /// Store per-task scores and their mean.
    pub fn set_scores(&mut self, scores: BTreeMap<String, f64>) {
        let mean = if scores.is_empty() {
            0.0
        } else {
            scores.values().sum::<f64>() / scores.len() as f64
        };
        self.score = Some(mean);
        self.scores = Some(scores);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EvolutionConfig {
    /// μ: survivors kept at each rollover.
    pub population_size: usize,
    /// λ_max: accepted candidates per generation.
    pub offspring_per_generation: usize,
    /// G
    pub max_generations: usize,
    /// k
    pub parents_per_prompt: usize,
    pub samples_per_prompt: usize,
    pub t_max: f64,
    pub t_min: f64,
    pub typing_flag: bool,
    /// When false every candidate gets the same constant score and
    /// selection degenerates to uniform.
    pub evaluator_enabled: bool,
    /// Generator calls allowed per generation beyond λ_max.
    pub retry_cap: usize,
    /// Empty means the generator's own default.
    pub model: String,
    pub max_output_tokens: u32,
    pub sampling_temperature: f64,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        Self {
            population_size: 10,
            offspring_per_generation: 10,
            max_generations: 10,
            parents_per_prompt: 2,
            samples_per_prompt: 1,
            t_max: 50.0,
            t_min: 10.0,
            typing_flag: true,
            evaluator_enabled: true,
            retry_cap: 25,
            model: String::new(),
            max_output_tokens: 4096,
            sampling_temperature: 1.0,
        }
    }
}

impl EvolutionConfig {
    pub fn check(&self) -> Result<(), EvolutionError> {
        let bad = |m: &str| Err(EvolutionError::InvalidConfig(m.to_string()));
        if self.population_size < 1 {
            return bad("population_size must be at least 1");
        }
        if self.offspring_per_generation < 1 {
            return bad("offspring_per_generation must be at least 1");
        }
        if self.max_generations < 1 {
            return bad("max_generations must be at least 1");
        }
        if self.parents_per_prompt < 1 {
            return bad("parents_per_prompt must be at least 1");
        }
        if self.samples_per_prompt < 1 {
            return bad("samples_per_prompt must be at least 1");
        }
        if !(self.t_min > 0.0 && self.t_max >= self.t_min && self.t_max.is_finite()) {
            return bad("temperatures must satisfy t_max >= t_min > 0");
        }
        Ok(())
    }

    /// μ + λ_max, the largest the population can get.
    pub fn max_size(&self) -> usize {
        self.population_size + self.offspring_per_generation
    }
}
