//! Validation and execution of untrusted candidate source.
//!
//! The orchestrator owns the policy, the wire protocol and the timeouts; the
//! actual syntax-tree screening and `get_plan` calls happen behind an
//! [`Executor`]. Three executors ship here:
//!
//! * [`SubprocessExecutor`] speaks newline-delimited JSON to an external
//!   runner process (one process per candidate session).
//! * [`NativeExecutor`] maps marked sources to registered Rust strategies,
//!   for offline tests that must not depend on a runner.
//! * [`NoopExecutor`] accepts everything and returns empty plans.
//!
//! Every executor is driven through a [`Session`], which refuses to run a
//! candidate that has not passed validation in the same session.

mod native;
mod noop;
mod policy;
mod protocol;
mod subprocess;

use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::pddl::Problem;

pub use native::{NativeExecutor, NativeStrategy, NATIVE_MARKER};
pub use noop::NoopExecutor;
pub use policy::{lexical_scan, SandboxPolicy};
pub use protocol::{Reply, Request, TaskPayload};
pub use subprocess::{SubprocessExecutor, POLICY_ENV};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "detail", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ExecutionOutcome {
    /// IPC plan text, one action per line.
    Plan(String),
    ValidationRejected(String),
    RuntimeError(String),
    Timeout,
    ProtocolError(String),
}

impl ExecutionOutcome {
    pub fn is_plan(&self) -> bool {
        matches!(self, ExecutionOutcome::Plan(_))
    }
}

impl std::fmt::Display for ExecutionOutcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ExecutionOutcome::Plan(_) => write!(f, "plan"),
            ExecutionOutcome::ValidationRejected(r) => write!(f, "validation rejected: {r}"),
            ExecutionOutcome::RuntimeError(m) => write!(f, "runtime error: {m}"),
            ExecutionOutcome::Timeout => write!(f, "timeout"),
            ExecutionOutcome::ProtocolError(m) => write!(f, "protocol error: {m}"),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SandboxError {
    #[error("invalid sandbox policy: {0}")]
    InvalidPolicy(String),
    #[error("could not start runner: {0}")]
    Spawn(#[from] std::io::Error),
    #[error("candidate run requested before a successful validation")]
    NotValidated,
}

/// One side of a candidate session. Implementations do not need to track
/// ordering; [`Session`] does that.
pub trait Backend: Send {
    fn validate(&mut self, source: &str, timeout: Duration) -> Result<(), ExecutionOutcome>;
    fn plan(&mut self, task: &TaskPayload, timeout: Duration) -> ExecutionOutcome;

    /// OS process id, for backends that run one.
    fn pid(&self) -> Option<u32> {
        None
    }
}

pub trait Executor: Send + Sync {
    fn policy(&self) -> &SandboxPolicy;
    fn start(&self) -> Result<Box<dyn Backend>, SandboxError>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Phase {
    Fresh,
    Validated,
    Rejected,
    /// The backend timed out or broke the protocol; nothing more can run.
    Dead,
}

/// Validate-then-run state machine around one backend.
pub struct Session {
    backend: Box<dyn Backend>,
    source: String,
    phase: Phase,
    timeout: Duration,
}

impl Session {
    pub fn open(executor: &dyn Executor, source: &str) -> Result<Self, SandboxError> {
        executor.policy().check()?;
        Ok(Self {
            backend: executor.start()?,
            source: source.to_string(),
            phase: Phase::Fresh,
            timeout: Duration::from_secs_f64(executor.policy().wall_clock_timeout_secs),
        })
    }

    pub fn validate(&mut self) -> Result<(), ExecutionOutcome> {
        match self.phase {
            Phase::Validated => return Ok(()),
            Phase::Rejected | Phase::Dead => {
                return Err(ExecutionOutcome::ProtocolError("session already failed".into()));
            }
            Phase::Fresh => {}
        }
        let result = self.backend.validate(&self.source, self.timeout);
        self.phase = match &result {
            Ok(()) => Phase::Validated,
            Err(ExecutionOutcome::ValidationRejected(_)) => Phase::Rejected,
            Err(_) => Phase::Dead,
        };
        result
    }

    /// Run `get_plan` on one task with the given wall-clock limit.
    pub fn run(&mut self, task: &TaskPayload, timeout: Duration) -> Result<ExecutionOutcome, SandboxError> {
        match self.phase {
            Phase::Validated => {}
            Phase::Dead => return Ok(ExecutionOutcome::ProtocolError("session is dead".into())),
            Phase::Fresh | Phase::Rejected => return Err(SandboxError::NotValidated),
        }
        let outcome = self.backend.plan(task, timeout);
        if matches!(outcome, ExecutionOutcome::Timeout | ExecutionOutcome::ProtocolError(_)) {
            self.phase = Phase::Dead;
        }
        Ok(outcome)
    }

    pub fn pid(&self) -> Option<u32> {
        self.backend.pid()
    }

    pub fn is_validated(&self) -> bool {
        self.phase == Phase::Validated
    }
}

/// Open a session and validate `source` in it.
pub fn validate_candidate(executor: &dyn Executor, source: &str) -> Result<Result<(), ExecutionOutcome>, SandboxError> {
    let mut session = Session::open(executor, source)?;
    Ok(session.validate())
}

/// Validate and run `source` on a single problem in a fresh session.
pub fn run_candidate(
    executor: &dyn Executor,
    source: &str,
    problem: &Problem,
    typing: bool,
) -> Result<ExecutionOutcome, SandboxError> {
    let mut session = Session::open(executor, source)?;
    if let Err(outcome) = session.validate() {
        return Ok(outcome);
    }
    let timeout = Duration::from_secs_f64(executor.policy().wall_clock_timeout_secs);
    session.run(&TaskPayload::from_problem(problem, typing), timeout)
}
