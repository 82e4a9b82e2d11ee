use std::sync::Mutex;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{GatewayError, Generator, GeneratorRequest, Rates, UsageLedger};

/// A textual edit: replace one occurrence of `find` with `replace`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MutationRule {
    pub find: String,
    pub replace: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum MockMode {
    /// Cycle through the pool in order.
    Replay,
    /// Draw uniformly from the pool.
    Sample,
    /// Pick a parent quoted in the prompt and apply one applicable rule.
    Mutate(Vec<MutationRule>),
}

struct MockState {
    calls: u64,
    cursor: usize,
    emitted: Vec<String>,
    ledger: UsageLedger,
}

/// Offline generator. Output depends only on the seed, the pool, the mode and
/// the sequence of requests.
pub struct MockGenerator {
    pool: Vec<String>,
    seed: u64,
    mode: MockMode,
    state: Mutex<MockState>,
}

/// Rough token estimate: four bytes per token.
fn approx_tokens(text: &str) -> u64 {
    text.len().div_ceil(4) as u64
}

impl MockGenerator {
    pub fn new(pool: Vec<String>, seed: u64, mode: MockMode) -> Self {
        Self {
            pool,
            seed,
            mode,
            state: Mutex::new(MockState {
                calls: 0,
                cursor: 0,
                emitted: Vec::new(),
                ledger: UsageLedger::new(Rates::LARGE_MODEL),
            }),
        }
    }

    pub fn with_rates(self, rates: Rates) -> Self {
        self.state.lock().expect("mock state").ledger.rates = rates;
        self
    }

    fn mutate(&self, rules: &[MutationRule], prompt: &str, state: &MockState, rng: &mut ChaCha8Rng) -> String {
        // Parents are any pool entry or earlier output quoted verbatim in the prompt.
        let mut parents: Vec<(usize, &String)> = self
            .pool
            .iter()
            .chain(&state.emitted)
            .filter_map(|src| prompt.find(src.as_str()).map(|at| (at, src)))
            .collect();
        parents.sort_by_key(|(at, _)| *at);
        parents.dedup_by(|a, b| a.1 == b.1);
        let parent = if parents.is_empty() {
            &self.pool[rng.random_range(0..self.pool.len())]
        } else {
            parents[rng.random_range(0..parents.len())].1
        };
        let usable: Vec<&MutationRule> = rules.iter().filter(|r| parent.contains(&r.find)).collect();
        if usable.is_empty() {
            return parent.clone();
        }
        let rule = usable[rng.random_range(0..usable.len())];
        let hits: Vec<usize> = parent.match_indices(&rule.find).map(|(i, _)| i).collect();
        let at = hits[rng.random_range(0..hits.len())];
        let mut out = String::with_capacity(parent.len());
        out.push_str(&parent[..at]);
        out.push_str(&rule.replace);
        out.push_str(&parent[at + rule.find.len()..]);
        out
    }
}

impl Generator for MockGenerator {
    fn draw_samples(&self, request: &GeneratorRequest) -> Result<Vec<String>, GatewayError> {
        if request.samples == 0 {
            return Err(GatewayError::InvalidRequest("samples must be at least 1".into()));
        }
        if self.pool.is_empty() {
            return Err(GatewayError::EmptyCompletion);
        }
        let mut state = self.state.lock().expect("mock state");
        let call = state.calls;
        state.calls += 1;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ call.wrapping_mul(0x9E37_79B9_7F4A_7C15));

        let mut out = Vec::with_capacity(request.samples);
        for _ in 0..request.samples {
            let sample = match &self.mode {
                MockMode::Replay => {
                    let s = self.pool[state.cursor % self.pool.len()].clone();
                    state.cursor += 1;
                    s
                }
                MockMode::Sample => self.pool[rng.random_range(0..self.pool.len())].clone(),
                MockMode::Mutate(rules) => self.mutate(rules, &request.prompt, &state, &mut rng),
            };
            out.push(sample);
        }
        let tokens_out: u64 = out.iter().map(|s| approx_tokens(s)).sum();
        state.ledger.record(approx_tokens(&request.prompt), tokens_out);
        state.emitted.extend(out.iter().cloned());
        Ok(out)
    }

    fn usage(&self) -> UsageLedger {
        self.state.lock().expect("mock state").ledger
    }
}
