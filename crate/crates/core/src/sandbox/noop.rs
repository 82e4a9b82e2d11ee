use std::time::Duration;

use super::{Backend, ExecutionOutcome, Executor, SandboxError, SandboxPolicy, TaskPayload};

/// Accepts every source and answers every task with the empty plan.
#[derive(Debug, Clone, Default)]
pub struct NoopExecutor {
    policy: SandboxPolicy,
}

struct NoopBackend;

impl Backend for NoopBackend {
    fn validate(&mut self, _source: &str, _timeout: Duration) -> Result<(), ExecutionOutcome> {
        Ok(())
    }

    fn plan(&mut self, _task: &TaskPayload, _timeout: Duration) -> ExecutionOutcome {
        ExecutionOutcome::Plan(String::new())
    }
}

impl Executor for NoopExecutor {
    fn policy(&self) -> &SandboxPolicy {
        &self.policy
    }

    fn start(&self) -> Result<Box<dyn Backend>, SandboxError> {
        Ok(Box::new(NoopBackend))
    }
}
