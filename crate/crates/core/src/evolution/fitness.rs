use std::collections::BTreeMap;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::{Candidate, EvolutionConfig};
use crate::par;
use crate::pddl::{parse_plan, validate_plan, Domain, Problem};
use crate::sandbox::{ExecutionOutcome, Executor, SandboxError, Session, TaskPayload};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FitnessConfig {
    /// F: score for a task the candidate does not solve.
    pub failure_value: f64,
    pub per_task_timeout_secs: f64,
}

impl Default for FitnessConfig {
    fn default() -> Self {
        Self {
            failure_value: 10_000.0,
            per_task_timeout_secs: 10.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct TrainTask {
    pub id: String,
    pub problem: Problem,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct FitnessReport {
    /// The source failed validation or could not be loaded.
    pub rejected: bool,
    pub tasks_solved: usize,
}

/// Score `candidate` on every task: plan length when the plan validates,
/// F otherwise. Runs share one sandbox session; parsing and validation of
/// the returned plans fan out over tasks.
pub fn evaluate_fitness(
    candidate: &mut Candidate,
    domain: &Domain,
    tasks: &[TrainTask],
    fitness: &FitnessConfig,
    evolution: &EvolutionConfig,
    executor: &dyn Executor,
) -> Result<FitnessReport, SandboxError> {
    let fail = fitness.failure_value;
    let all = |v: f64| tasks.iter().map(|t| (t.id.clone(), v)).collect::<BTreeMap<_, _>>();
    candidate.error = None;
    candidate.plan_failure_error = None;

    let mut session = Session::open(executor, &candidate.code)?;
    if let Err(outcome) = session.validate() {
        candidate.error = Some(match outcome {
            ExecutionOutcome::ValidationRejected(reason) => reason,
            other => other.to_string(),
        });
        candidate.set_scores(all(fail));
        return Ok(FitnessReport {
            rejected: true,
            tasks_solved: 0,
        });
    }
    if !evolution.evaluator_enabled {
        candidate.set_scores(all(0.0));
        return Ok(FitnessReport::default());
    }

    let timeout = Duration::from_secs_f64(fitness.per_task_timeout_secs);
    let mut outcomes: Vec<(&TrainTask, Option<ExecutionOutcome>)> = Vec::with_capacity(tasks.len());
    for task in tasks {
        if candidate.error.is_some() {
            outcomes.push((task, None));
            continue;
        }
        let payload = TaskPayload::from_problem(&task.problem, evolution.typing_flag);
        match session.run(&payload, timeout)? {
            o @ (ExecutionOutcome::Timeout | ExecutionOutcome::ProtocolError(_)) => {
                candidate.error = Some(format!("{o} on task {}", task.id));
                outcomes.push((task, None));
            }
            o => outcomes.push((task, Some(o))),
        }
    }
    drop(session);

    let judged: Vec<Result<f64, Option<String>>> = par::map(&outcomes, |(task, outcome)| match outcome {
        Some(ExecutionOutcome::Plan(text)) => {
            let plan = parse_plan(text, &task.problem, domain).map_err(|e| Some(format!("task {}: {e}", task.id)))?;
            let verdict = validate_plan(&task.problem, &plan, domain);
            if verdict.is_valid() {
                Ok(plan.len() as f64)
            } else {
                Err(Some(format!("task {}: {}", task.id, verdict.reason)))
            }
        }
        Some(other) => Err(Some(format!("task {}: {other}", task.id))),
        None => Err(None),
    });

    let mut scores = BTreeMap::new();
    let mut solved = 0;
    for ((task, _), verdict) in outcomes.iter().zip(judged) {
        let score = match verdict {
            Ok(len) => {
                solved += 1;
                len
            }
            Err(reason) => {
                if candidate.plan_failure_error.is_none() {
                    candidate.plan_failure_error = reason;
                }
                fail
            }
        };
        scores.insert(task.id.clone(), score);
    }
    candidate.set_scores(scores);
    Ok(FitnessReport {
        rejected: false,
        tasks_solved: solved,
    })
}
