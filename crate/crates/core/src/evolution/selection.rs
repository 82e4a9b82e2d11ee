use rand::Rng;

use super::{Candidate, EvolutionError, PopulationStore};

/// T(n) = a/n + b, with T(1) = t_max and T(max_size) = t_min.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TemperatureSchedule {
    pub a: f64,
    pub b: f64,
    pub max_size: usize,
}

impl TemperatureSchedule {
    pub fn new(t_min: f64, t_max: f64, max_size: usize) -> Result<Self, EvolutionError> {
        if max_size < 2 {
            return Err(EvolutionError::InvalidConfig(format!("max_size must be at least 2, got {max_size}")));
        }
        if t_max.is_nan() || t_min.is_nan() || t_max < t_min {
            return Err(EvolutionError::InvalidConfig(format!("t_max {t_max} below t_min {t_min}")));
        }
        let m = max_size as f64;
        let b = (t_min * m - t_max) / (m - 1.0);
        Ok(Self {
            a: t_max - b,
            b,
            max_size,
        })
    }

    pub fn at(&self, num_scores: usize) -> f64 {
        self.a / num_scores as f64 + self.b
    }
}

pub fn get_temperature(num_scores: usize, t_min: f64, t_max: f64, max_size: usize) -> Result<f64, EvolutionError> {
    if num_scores < 1 {
        return Err(EvolutionError::InvalidConfig("num_scores must be at least 1".into()));
    }
    Ok(TemperatureSchedule::new(t_min, t_max, max_size)?.at(num_scores))
}

/// Boltzmann weights exp(-score/T), normalized. Lower scores are likelier.
pub fn score_probabilities(scores: &[f64], temperature: f64) -> Result<Vec<f64>, EvolutionError> {
    if scores.is_empty() {
        return Err(EvolutionError::EmptyPopulation);
    }
    if !(temperature > 0.0 && temperature.is_finite()) {
        return Err(EvolutionError::NumericError(format!("temperature {temperature}")));
    }
    if let Some(bad) = scores.iter().find(|s| !s.is_finite()) {
        return Err(EvolutionError::NumericError(format!("non-finite score {bad}")));
    }
    let best = scores.iter().copied().fold(f64::INFINITY, f64::min);
    let weights: Vec<f64> = scores.iter().map(|s| (-(s - best) / temperature).exp()).collect();
    let total: f64 = weights.iter().sum();
    Ok(weights.into_iter().map(|w| w / total).collect())
}

/// Index drawn from `probs` with one uniform variate.
fn draw(probs: &[f64], rng: &mut impl Rng) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    // Rounding can leave acc a hair under 1.
    probs.iter().rposition(|p| *p > 0.0).unwrap_or(probs.len() - 1)
}

/// Draw min(k, |planners|) distinct parents, renormalizing after each draw.
pub fn select_parents(store: &PopulationStore, k: usize, rng: &mut impl Rng) -> Result<Vec<Candidate>, EvolutionError> {
    let planners = store.planners();
    if planners.is_empty() {
        return Err(EvolutionError::EmptyPopulation);
    }
    let config = store.config();
    let t = get_temperature(planners.len(), config.t_min, config.t_max, config.max_size())?;
    let scores: Vec<f64> = planners
        .iter()
        .map(|c| c.score.ok_or(EvolutionError::UnscoredCandidate(c.id)))
        .collect::<Result<_, _>>()?;
    let mut probs = score_probabilities(&scores, t)?;
    let mut chosen = Vec::new();
    for _ in 0..k.min(planners.len()) {
        let i = draw(&probs, rng);
        chosen.push(planners[i].clone());
        probs[i] = 0.0;
        let rest: f64 = probs.iter().sum();
        if rest > 0.0 {
            probs.iter_mut().for_each(|p| *p /= rest);
        } else {
            // Remaining mass underflowed; fall back to uniform over the unchosen.
            let left = planners.len() - chosen.len();
            for (j, p) in probs.iter_mut().enumerate() {
                *p = if chosen.iter().any(|c| c.id == planners[j].id) {
                    0.0
                } else {
                    1.0 / left as f64
                };
            }
        }
    }
    Ok(chosen)
}
