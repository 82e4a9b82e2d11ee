use serde::{Deserialize, Serialize};

/// Dollar prices per million tokens.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rates {
    pub input_per_million: f64,
    pub output_per_million: f64,
}

impl Rates {
    /// GPT-4o list price: $2.50/M input, $10/M output.
    pub const LARGE_MODEL: Rates = Rates {
        input_per_million: 2.5,
        output_per_million: 10.0,
    };
    /// GPT-4o mini list price: $0.15/M input, $0.60/M output.
    pub const SMALL_MODEL: Rates = Rates {
        input_per_million: 0.15,
        output_per_million: 0.6,
    };
}

impl Default for Rates {
    fn default() -> Self {
        Rates::LARGE_MODEL
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct UsageLedger {
    pub tokens_in: u64,
    pub tokens_out: u64,
    pub rates: Rates,
}

impl UsageLedger {
    pub fn new(rates: Rates) -> Self {
        Self {
            tokens_in: 0,
            tokens_out: 0,
            rates,
        }
    }

    pub fn record(&mut self, tokens_in: u64, tokens_out: u64) {
        self.tokens_in += tokens_in;
        self.tokens_out += tokens_out;
    }

    pub fn dollar_cost(&self) -> f64 {
        (self.tokens_in as f64 * self.rates.input_per_million + self.tokens_out as f64 * self.rates.output_per_million)
            / 1e6
    }

    /// Usage accrued since `earlier`, priced at the same rates.
    pub fn since(&self, earlier: &UsageLedger) -> UsageLedger {
        UsageLedger {
            tokens_in: self.tokens_in - earlier.tokens_in,
            tokens_out: self.tokens_out - earlier.tokens_out,
            rates: self.rates,
        }
    }
}

pub fn cost_report(ledger: &UsageLedger) -> f64 {
    ledger.dollar_cost()
}
