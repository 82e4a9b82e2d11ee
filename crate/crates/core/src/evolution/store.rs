use super::{Candidate, EvolutionConfig, EvolutionError};

/// What happened when a candidate was added.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct AddOutcome {
    pub improved: bool,
    /// λ_max candidates have now been added this generation.
    pub generation_ended: bool,
    pub rolled_over: bool,
}

/// The population of scored candidates plus the store-local incumbent.
///
/// A generation ends once λ_max candidates have been added since the last
/// rollover (seeds count in the first generation). Then the generation
/// counter increments and, while it is below G, the population is cut back
/// to the μ best.
#[derive(Debug, Clone)]
pub struct PopulationStore {
    planners: Vec<Candidate>,
    /// Insertion sequence numbers, parallel to `planners`; survivors keep
    /// theirs across rollovers so ties always favour the older candidate.
    seqs: Vec<u64>,
    next_seq: u64,
    added_this_generation: usize,
    generation_no: usize,
    best_score: f64,
    best_planner: Option<Candidate>,
    config: EvolutionConfig,
    domain_text: String,
    prompt_template: String,
}

impl PopulationStore {
    pub fn new(config: EvolutionConfig, domain_text: impl Into<String>, prompt_template: impl Into<String>) -> Result<Self, EvolutionError> {
        config.check()?;
        Ok(Self {
            planners: Vec::new(),
            seqs: Vec::new(),
            next_seq: 0,
            added_this_generation: 0,
            generation_no: 0,
            best_score: f64::INFINITY,
            best_planner: None,
            config,
            domain_text: domain_text.into(),
            prompt_template: prompt_template.into(),
        })
    }

    pub fn planners(&self) -> &[Candidate] {
        &self.planners
    }

    pub fn generation_no(&self) -> usize {
        self.generation_no
    }

    pub fn best_score(&self) -> f64 {
        self.best_score
    }

    pub fn best_planner(&self) -> Option<&Candidate> {
        self.best_planner.as_ref()
    }

    pub fn config(&self) -> &EvolutionConfig {
        &self.config
    }

    pub fn domain_text(&self) -> &str {
        &self.domain_text
    }

    pub fn prompt_template(&self) -> &str {
        &self.prompt_template
    }

    pub fn is_finished(&self) -> bool {
        self.generation_no >= self.config.max_generations
    }

    fn push(&mut self, candidate: Candidate, seq: u64) -> Result<bool, EvolutionError> {
        let score = candidate.score.ok_or(EvolutionError::UnscoredCandidate(candidate.id))?;
        let improved = score < self.best_score;
        if improved {
            self.best_score = score;
            self.best_planner = Some(candidate.clone());
        }
        self.planners.push(candidate);
        self.seqs.push(seq);
        Ok(improved)
    }

    pub fn add_candidate(&mut self, candidate: Candidate) -> Result<AddOutcome, EvolutionError> {
        let seq = self.next_seq;
        let improved = self.push(candidate, seq)?;
        self.next_seq += 1;
        self.added_this_generation += 1;
        let mut outcome = AddOutcome {
            improved,
            ..AddOutcome::default()
        };
        if self.added_this_generation >= self.config.offspring_per_generation {
            outcome.generation_ended = true;
            outcome.rolled_over = self.end_generation();
        }
        Ok(outcome)
    }

    /// Close the current generation early (or on schedule). Returns whether
    /// a rollover ran.
    pub fn end_generation(&mut self) -> bool {
        self.added_this_generation = 0;
        self.generation_no += 1;
        if self.generation_no < self.config.max_generations {
            self.rollover();
            true
        } else {
            false
        }
    }

    /// Keep the μ lowest-scoring candidates (older first on ties) and rebuild
    /// the incumbent from them.
    pub fn rollover(&mut self) {
        let mut members: Vec<(Candidate, u64)> = self.planners.drain(..).zip(self.seqs.drain(..)).collect();
        members.sort_by(|(a, sa), (b, sb)| {
            let (x, y) = (a.score.unwrap_or(f64::INFINITY), b.score.unwrap_or(f64::INFINITY));
            x.total_cmp(&y).then(sa.cmp(sb))
        });
        members.truncate(self.config.population_size);
        self.best_score = f64::INFINITY;
        self.best_planner = None;
        for (c, seq) in members {
            // Members were scored when first added.
            self.push(c, seq).expect("survivors are scored");
        }
    }
}
