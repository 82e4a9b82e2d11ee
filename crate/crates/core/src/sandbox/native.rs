use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Duration;

use super::protocol::plan_text;
use super::{lexical_scan, Backend, ExecutionOutcome, Executor, SandboxError, SandboxPolicy, TaskPayload};

/// Comment marker naming the registered strategy a source stands for, e.g.
/// `# native-strategy: greedy`.
pub const NATIVE_MARKER: &str = "# native-strategy:";

/// A Rust stand-in for a candidate's `get_plan`: action strings or an error
/// message.
pub type NativeStrategy = Arc<dyn Fn(&TaskPayload) -> Result<Vec<String>, String> + Send + Sync>;

/// Executes candidate sources by dispatching on their marker comment to a
/// registered Rust strategy. Sources are still screened with
/// [`lexical_scan`]. There is no wall-clock enforcement: strategies are
/// trusted code.
#[derive(Clone, Default)]
pub struct NativeExecutor {
    policy: SandboxPolicy,
    strategies: BTreeMap<String, NativeStrategy>,
}

impl NativeExecutor {
    pub fn new(policy: SandboxPolicy) -> Self {
        Self {
            policy,
            strategies: BTreeMap::new(),
        }
    }

    pub fn register(
        mut self,
        name: &str,
        f: impl Fn(&TaskPayload) -> Result<Vec<String>, String> + Send + Sync + 'static,
    ) -> Self {
        self.strategies.insert(name.to_string(), Arc::new(f));
        self
    }
}

fn marker(source: &str) -> Option<&str> {
    source
        .lines()
        .find_map(|l| l.trim().strip_prefix(NATIVE_MARKER))
        .map(str::trim)
}

struct NativeBackend {
    policy: SandboxPolicy,
    strategies: BTreeMap<String, NativeStrategy>,
    loaded: Option<NativeStrategy>,
}

impl Backend for NativeBackend {
    fn validate(&mut self, source: &str, _timeout: Duration) -> Result<(), ExecutionOutcome> {
        lexical_scan(source, &self.policy).map_err(ExecutionOutcome::ValidationRejected)?;
        let name = marker(source).ok_or_else(|| ExecutionOutcome::ValidationRejected("no native strategy marker".into()))?;
        let strategy = self
            .strategies
            .get(name)
            .ok_or_else(|| ExecutionOutcome::ValidationRejected(format!("unknown native strategy '{name}'")))?;
        self.loaded = Some(Arc::clone(strategy));
        Ok(())
    }

    fn plan(&mut self, task: &TaskPayload, _timeout: Duration) -> ExecutionOutcome {
        let Some(f) = &self.loaded else {
            return ExecutionOutcome::ProtocolError("no candidate loaded".into());
        };
        match f(task) {
            Ok(steps) => ExecutionOutcome::Plan(plan_text(&steps)),
            Err(message) => ExecutionOutcome::RuntimeError(message),
        }
    }
}

impl Executor for NativeExecutor {
    fn policy(&self) -> &SandboxPolicy {
        &self.policy
    }

    fn start(&self) -> Result<Box<dyn Backend>, SandboxError> {
        Ok(Box::new(NativeBackend {
            policy: self.policy.clone(),
            strategies: self.strategies.clone(),
            loaded: None,
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sandbox::Session;

    fn exec() -> NativeExecutor {
        NativeExecutor::new(SandboxPolicy::default())
            .register("one", |_| Ok(vec!["noop a".into()]))
            .register("boom", |_| Err("KeyError: 'x'".into()))
    }

    fn src(name: &str) -> String {
        format!("{NATIVE_MARKER} {name}\ndef get_plan(objects, init, goal):\n    return []\n")
    }

    fn task() -> TaskPayload {
        TaskPayload {
            objects: serde_json::json!([]),
            init: vec![],
            goal: vec![],
            typing: true,
        }
    }

    #[test]
    fn dispatches_on_marker() {
        let e = exec();
        let mut s = Session::open(&e, &src("one")).unwrap();
        s.validate().unwrap();
        assert_eq!(
            s.run(&task(), Duration::from_secs(1)).unwrap(),
            ExecutionOutcome::Plan("(noop a)\n".into())
        );
        let mut s = Session::open(&e, &src("boom")).unwrap();
        s.validate().unwrap();
        assert_eq!(
            s.run(&task(), Duration::from_secs(1)).unwrap(),
            ExecutionOutcome::RuntimeError("KeyError: 'x'".into())
        );
    }

    #[test]
    fn unknown_or_unmarked_sources_are_rejected() {
        let e = exec();
        let mut s = Session::open(&e, &src("missing")).unwrap();
        assert!(matches!(s.validate(), Err(ExecutionOutcome::ValidationRejected(r)) if r.contains("missing")));
        let mut s = Session::open(&e, "def get_plan(a, b, c):\n    return []\n").unwrap();
        assert!(s.validate().is_err());
        let mut s = Session::open(&e, &format!("import os\n{}", src("one"))).unwrap();
        assert!(matches!(s.validate(), Err(ExecutionOutcome::ValidationRejected(r)) if r.contains("'os'")));
    }
}
