use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use geneplan_core::evolution::{EvolutionConfig, FitnessConfig};
use geneplan_core::llm::{MockGenerator, MockMode, MutationRule, RemoteConfig};
use geneplan_core::sandbox::{Executor, NoopExecutor, SandboxPolicy, SubprocessExecutor};
use serde::Deserialize;

/// Contents of the `--config` TOML file. Every section is optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub llm: RemoteConfig,
    pub sandbox: SandboxConfig,
    pub mock: MockConfig,
    pub evolution: GenerationSettings,
    pub fitness: FitnessConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExecutorKind {
    #[default]
    Subprocess,
    Noop,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SandboxConfig {
    pub executor: ExecutorKind,
    /// Runner launch command, e.g. `["python3", "runner.py"]`.
    pub runner: Vec<String>,
    pub policy: SandboxPolicy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MockKind {
    Replay,
    #[default]
    Sample,
    Mutate,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MockConfig {
    pub pool_dir: Option<PathBuf>,
    pub mode: MockKind,
    pub seed: u64,
    pub rules: Vec<MutationRule>,
}

/// Generator request settings that are not exposed as flags.
#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenerationSettings {
    pub samples_per_prompt: usize,
    pub typing_flag: bool,
    pub retry_cap: usize,
    pub max_output_tokens: u32,
    pub sampling_temperature: f64,
}

impl Default for GenerationSettings {
    fn default() -> Self {
        let d = EvolutionConfig::default();
        Self {
            samples_per_prompt: d.samples_per_prompt,
            typing_flag: d.typing_flag,
            retry_cap: d.retry_cap,
            max_output_tokens: d.max_output_tokens,
            sampling_temperature: d.sampling_temperature,
        }
    }
}

impl Config {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        let mut config: Config = toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?;
        // Relative paths in the file are relative to the file.
        let base = path.parent().unwrap_or(Path::new("."));
        if let Some(dir) = &config.mock.pool_dir {
            config.mock.pool_dir = Some(base.join(dir));
        }
        Ok(config)
    }

    pub fn executor(&self) -> Result<Box<dyn Executor>> {
        match self.sandbox.executor {
            ExecutorKind::Noop => Ok(Box::new(NoopExecutor::default())),
            ExecutorKind::Subprocess => {
                if self.sandbox.runner.is_empty() {
                    bail!("sandbox.runner must name the runner command when sandbox.executor is \"subprocess\"");
                }
                let exec = SubprocessExecutor::new(&self.sandbox.runner, self.sandbox.policy.clone())
                    .context("configuring the subprocess executor")?;
                Ok(Box::new(exec))
            }
        }
    }

    pub fn mock_generator(&self, pool_dir: Option<&Path>) -> Result<MockGenerator> {
        let dir = pool_dir
            .or(self.mock.pool_dir.as_deref())
            .context("the mock generator needs --pool-dir or mock.pool_dir")?;
        let pool = read_sources(dir)?;
        if pool.is_empty() {
            bail!("mock pool {} contains no .py files", dir.display());
        }
        let mode = match self.mock.mode {
            MockKind::Replay => MockMode::Replay,
            MockKind::Sample => MockMode::Sample,
            MockKind::Mutate => MockMode::Mutate(self.mock.rules.clone()),
        };
        Ok(MockGenerator::new(pool, self.mock.seed, mode).with_rates(self.llm.rates))
    }
}

/// Every `.py` file in `dir`, in file-name order.
pub fn read_sources(dir: &Path) -> Result<Vec<String>> {
    let mut paths = list_files(dir, "py")?;
    paths.sort();
    paths
        .iter()
        .map(|p| std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display())))
        .collect()
}

pub fn list_files(dir: &Path, extension: &str) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for entry in std::fs::read_dir(dir).with_context(|| format!("listing {}", dir.display()))? {
        let path = entry?.path();
        if path.is_file() && path.extension().is_some_and(|e| e == extension) {
            out.push(path);
        }
    }
    out.sort();
    Ok(out)
}
