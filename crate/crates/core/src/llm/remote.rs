use std::sync::Mutex;
use std::thread;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{extract_code, GatewayError, Generator, GeneratorRequest, Rates, UsageLedger};

/// Environment variable holding the bearer token for the completion endpoint.
pub const API_KEY_ENV: &str = "GENEPLAN_API_KEY";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RemoteConfig {
    pub endpoint: String,
    pub model: String,
    pub rates: Rates,
    /// Upper bound on in-flight requests.
    pub concurrency: usize,
    pub max_attempts: u32,
    pub initial_backoff_ms: u64,
    pub request_timeout_secs: u64,
}

impl Default for RemoteConfig {
    fn default() -> Self {
        Self {
            endpoint: "https://api.openai.com/v1/chat/completions".into(),
            model: "gpt-4o".into(),
            rates: Rates::LARGE_MODEL,
            concurrency: 4,
            max_attempts: 5,
            initial_backoff_ms: 500,
            request_timeout_secs: 300,
        }
    }
}

/// Chat-completion client: one user message per request, one completion per
/// sample.
pub struct RemoteGenerator {
    config: RemoteConfig,
    api_key: String,
    client: reqwest::blocking::Client,
    ledger: Mutex<UsageLedger>,
}

#[derive(Deserialize)]
struct CompletionResponse {
    choices: Vec<Choice>,
    #[serde(default)]
    usage: Option<Usage>,
}

#[derive(Deserialize)]
struct Choice {
    message: Message,
}

#[derive(Deserialize)]
struct Message {
    #[serde(default)]
    content: Option<String>,
}

#[derive(Deserialize)]
struct Usage {
    prompt_tokens: u64,
    completion_tokens: u64,
}

impl RemoteGenerator {
    pub fn new(config: RemoteConfig, api_key: impl Into<String>) -> Result<Self, GatewayError> {
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(config.request_timeout_secs))
            .build()
            .map_err(|e| GatewayError::Transport(e.to_string()))?;
        let ledger = Mutex::new(UsageLedger::new(config.rates));
        Ok(Self {
            config,
            api_key: api_key.into(),
            client,
            ledger,
        })
    }

    /// Build a client reading the key from [`API_KEY_ENV`].
    pub fn from_env(config: RemoteConfig) -> Result<Self, GatewayError> {
        let key = std::env::var(API_KEY_ENV).map_err(|_| GatewayError::MissingCredentials(API_KEY_ENV))?;
        Self::new(config, key)
    }

    fn attempt(&self, body: &serde_json::Value) -> Result<String, GatewayError> {
        let resp = self
            .client
            .post(&self.config.endpoint)
            .bearer_auth(&self.api_key)
            .json(body)
            .send()
            .map_err(|e| GatewayError::Transport(e.to_string()))?;
        let status = resp.status();
        if status.as_u16() == 429 {
            return Err(GatewayError::RateLimited);
        }
        let text = resp.text().map_err(|e| GatewayError::Transport(e.to_string()))?;
        if !status.is_success() {
            return Err(GatewayError::Api {
                status: status.as_u16(),
                body: text,
            });
        }
        let parsed: CompletionResponse = serde_json::from_str(&text).map_err(|e| GatewayError::Decode(e.to_string()))?;
        if let Some(u) = &parsed.usage {
            self.ledger
                .lock()
                .expect("usage ledger")
                .record(u.prompt_tokens, u.completion_tokens);
        }
        let content = parsed
            .choices
            .into_iter()
            .next()
            .and_then(|c| c.message.content)
            .unwrap_or_default();
        if content.trim().is_empty() {
            return Err(GatewayError::EmptyCompletion);
        }
        Ok(content)
    }

    fn complete_one(&self, request: &GeneratorRequest) -> Result<String, GatewayError> {
        let model = if request.model.is_empty() {
            &self.config.model
        } else {
            &request.model
        };
        let body = json!({
            "model": model,
            "messages": [{"role": "user", "content": request.prompt}],
            "max_tokens": request.max_output_tokens,
            "temperature": request.sampling_temperature,
        });
        let attempts = self.config.max_attempts.max(1);
        let mut delay = Duration::from_millis(self.config.initial_backoff_ms);
        let mut last = GatewayError::Transport("no attempt made".into());
        for attempt in 1..=attempts {
            match self.attempt(&body) {
                Ok(content) => return Ok(extract_code(&content)),
                Err(e) => {
                    let retryable = match &e {
                        GatewayError::Transport(_) | GatewayError::RateLimited => true,
                        GatewayError::Api { status, .. } => *status >= 500,
                        _ => false,
                    };
                    if !retryable {
                        return Err(e);
                    }
                    log::warn!("completion attempt {attempt}/{attempts} failed: {e}");
                    last = e;
                    if attempt < attempts {
                        thread::sleep(delay);
                        delay *= 2;
                    }
                }
            }
        }
        Err(last)
    }
}

impl Generator for RemoteGenerator {
    fn draw_samples(&self, request: &GeneratorRequest) -> Result<Vec<String>, GatewayError> {
        if request.samples == 0 {
            return Err(GatewayError::InvalidRequest("samples must be at least 1".into()));
        }
        let cap = self.config.concurrency.max(1);
        let mut out = Vec::with_capacity(request.samples);
        let mut remaining = request.samples;
        while remaining > 0 {
            let batch = remaining.min(cap);
            let results: Vec<Result<String, GatewayError>> = thread::scope(|s| {
                let handles: Vec<_> = (0..batch).map(|_| s.spawn(|| self.complete_one(request))).collect();
                handles
                    .into_iter()
                    .map(|h| h.join().unwrap_or_else(|_| Err(GatewayError::Transport("worker panicked".into()))))
                    .collect()
            });
            for r in results {
                out.push(r?);
            }
            remaining -= batch;
        }
        Ok(out)
    }

    fn usage(&self) -> UsageLedger {
        *self.ledger.lock().expect("usage ledger")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::{BufRead, BufReader, Read, Write};
    use std::net::TcpListener;

    /// Serve canned HTTP responses in order, one per connection.
    fn serve(responses: Vec<(u16, String)>) -> String {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let addr = listener.local_addr().unwrap();
        thread::spawn(move || {
            for (status, body) in responses {
                let (stream, _) = listener.accept().unwrap();
                let mut reader = BufReader::new(stream);
                let mut len = 0usize;
                loop {
                    let mut line = String::new();
                    reader.read_line(&mut line).unwrap();
                    if line == "\r\n" || line.is_empty() {
                        break;
                    }
                    let lower = line.to_ascii_lowercase();
                    if let Some(v) = lower.strip_prefix("content-length:") {
                        len = v.trim().parse().unwrap();
                    }
                }
                let mut buf = vec![0; len];
                reader.read_exact(&mut buf).unwrap();
                let mut stream = reader.into_inner();
                let reply = format!(
                    "HTTP/1.1 {status} X\r\ncontent-type: application/json\r\ncontent-length: {}\r\nconnection: close\r\n\r\n{body}",
                    body.len()
                );
                stream.write_all(reply.as_bytes()).unwrap();
            }
        });
        format!("http://{addr}/v1/chat/completions")
    }

    fn completion(content: &str) -> String {
        json!({
            "choices": [{"message": {"role": "assistant", "content": content}}],
            "usage": {"prompt_tokens": 100, "completion_tokens": 20}
        })
        .to_string()
    }

    fn generator(endpoint: String) -> RemoteGenerator {
        let config = RemoteConfig {
            endpoint,
            concurrency: 1,
            initial_backoff_ms: 1,
            request_timeout_secs: 10,
            ..RemoteConfig::default()
        };
        RemoteGenerator::new(config, "test-key").unwrap()
    }

    fn req(samples: usize) -> GeneratorRequest {
        GeneratorRequest {
            prompt: "write code".into(),
            samples,
            model: String::new(),
            max_output_tokens: 100,
            sampling_temperature: 1.0,
        }
    }

    #[test]
    fn extracts_code_and_records_usage() {
        let endpoint = serve(vec![(200, completion("Here:\n```python\nx = 1\n```\n"))]);
        let g = generator(endpoint);
        assert_eq!(g.draw_samples(&req(1)).unwrap(), vec!["x = 1"]);
        let u = g.usage();
        assert_eq!((u.tokens_in, u.tokens_out), (100, 20));
    }

    #[test]
    fn retries_rate_limits() {
        let endpoint = serve(vec![(429, "{}".into()), (503, "busy".into()), (200, completion("y = 2"))]);
        let g = generator(endpoint);
        assert_eq!(g.draw_samples(&req(1)).unwrap(), vec!["y = 2"]);
    }

    #[test]
    fn client_errors_are_not_retried() {
        let endpoint = serve(vec![(400, "bad".into())]);
        let g = generator(endpoint);
        assert!(matches!(
            g.draw_samples(&req(1)),
            Err(GatewayError::Api { status: 400, .. })
        ));
    }

    #[test]
    fn empty_completion_is_an_error() {
        let endpoint = serve(vec![(200, completion("   "))]);
        let g = generator(endpoint);
        assert_eq!(g.draw_samples(&req(1)), Err(GatewayError::EmptyCompletion));
    }
}
