mod common;

use std::path::Path;
use std::time::{Duration, Instant};

use geneplan_core::pddl::{parse_plan, validate_plan, GroundAtom};
use geneplan_core::sandbox::{
    run_candidate, validate_candidate, ExecutionOutcome, SandboxError, SandboxPolicy, Session, TaskPayload,
};

use common::*;

macro_rules! require_python {
    () => {
        if !python_available() {
            eprintln!("python3 not found; skipping");
            return;
        }
    };
}

fn rejection(source: &str) -> String {
    let exec = runner_executor(SandboxPolicy::default());
    match validate_candidate(&exec, source).unwrap() {
        Err(ExecutionOutcome::ValidationRejected(reason)) => reason,
        other => panic!("expected a rejection, got {other:?}"),
    }
}

#[test]
fn runner_rejects_policy_violations() {
    require_python!();
    assert!(rejection(&strategy("probe_filesystem")).contains("'os'"));
    assert!(rejection(&strategy("probe_eval")).contains("'eval'"));
    assert!(rejection(&strategy("probe_dunder")).contains("dunder"));
    assert!(rejection(&strategy("no_entry")).contains("missing get_plan"));
}

#[test]
fn empty_plan_on_goal_satisfied_task_is_valid() {
    require_python!();
    let domain = delivery_domain();
    let tasks = delivery_train(&domain);
    let mut problem = tasks[0].problem.clone();
    problem.goal_pos = problem.init.iter().filter(|a| a.predicate == "at").cloned().collect();
    let exec = runner_executor(SandboxPolicy::default());
    let outcome = run_candidate(&exec, &strategy("empty_plan"), &problem, true).unwrap();
    assert_eq!(outcome, ExecutionOutcome::Plan(String::new()));
    let plan = parse_plan("", &problem, &domain).unwrap();
    assert!(validate_plan(&problem, &plan, &domain).is_valid());
}

#[test]
fn runtime_errors_carry_the_message() {
    require_python!();
    let domain = delivery_domain();
    let tasks = delivery_train(&domain);
    let exec = runner_executor(SandboxPolicy::default());
    let outcome = run_candidate(&exec, &strategy("crashes"), &tasks[0].problem, true).unwrap();
    assert_eq!(outcome, ExecutionOutcome::RuntimeError("KeyError: 'robot-at'".into()));
    let outcome = run_candidate(&exec, &strategy("returns_number"), &tasks[0].problem, true).unwrap();
    assert_eq!(outcome, ExecutionOutcome::RuntimeError("invalid return type".into()));
}

#[test]
fn unbounded_loop_is_killed_on_time() {
    require_python!();
    let exec = runner_executor(SandboxPolicy::default());
    let domain = delivery_domain();
    let tasks = delivery_train(&domain);
    let mut session = Session::open(&exec, &strategy("spins")).unwrap();
    session.validate().unwrap();
    let pid = session.pid().expect("subprocess sessions have a pid");
    let payload = TaskPayload::from_problem(&tasks[0].problem, true);
    let start = Instant::now();
    let outcome = session.run(&payload, Duration::from_secs(2)).unwrap();
    let waited = start.elapsed();
    assert_eq!(outcome, ExecutionOutcome::Timeout);
    assert!(waited < Duration::from_millis(2500), "took {waited:?}");
    assert!(!Path::new(&format!("/proc/{pid}")).exists(), "runner {pid} still present");
    // The session is unusable after a timeout.
    assert!(matches!(
        session.run(&payload, Duration::from_secs(1)).unwrap(),
        ExecutionOutcome::ProtocolError(_)
    ));
}

#[test]
fn sessions_enforce_validation_first() {
    require_python!();
    let exec = runner_executor(SandboxPolicy::default());
    let domain = delivery_domain();
    let tasks = delivery_train(&domain);
    let payload = TaskPayload::from_problem(&tasks[0].problem, true);
    let mut session = Session::open(&exec, &strategy("optimal")).unwrap();
    assert!(matches!(
        session.run(&payload, Duration::from_secs(5)),
        Err(SandboxError::NotValidated)
    ));
    let mut rejected = Session::open(&exec, &strategy("probe_eval")).unwrap();
    assert!(rejected.validate().is_err());
    assert!(matches!(
        rejected.run(&payload, Duration::from_secs(5)),
        Err(SandboxError::NotValidated)
    ));
}

#[test]
fn payload_round_trips_through_the_runner() {
    require_python!();
    let mut policy = SandboxPolicy::default();
    policy.allowed_imports.insert("json".into());
    let exec = runner_executor(policy);
    let domain = delivery_domain();
    let mut problem = delivery_train(&domain)[1].problem.clone();
    problem.goal_neg.insert(GroundAtom::new("carry", ["b1", "left"]));
    for typing in [true, false] {
        let ExecutionOutcome::Plan(text) = run_candidate(&exec, &strategy("echo"), &problem, typing).unwrap() else {
            panic!("echo candidate failed")
        };
        let body = text.trim().strip_prefix("(echo ").and_then(|s| s.strip_suffix(')')).unwrap();
        let echoed: serde_json::Value = serde_json::from_str(body).unwrap();
        let sent = TaskPayload::from_problem(&problem, typing);
        assert_eq!(echoed[0], sent.objects);
        assert_eq!(echoed[1], serde_json::to_value(&sent.init).unwrap());
        assert_eq!(echoed[2], serde_json::to_value(&sent.goal).unwrap());
    }
}

#[test]
fn python_and_native_strategies_agree() {
    require_python!();
    let domain = delivery_domain();
    let tasks = delivery_train(&domain);
    let python = runner_executor(SandboxPolicy::default());
    let native = native_executor();
    for name in ["optimal", "one_gripper", "forgets_last", "crashes"] {
        let src = strategy(name);
        for task in &tasks {
            let a = run_candidate(&python, &src, &task.problem, true).unwrap();
            let b = run_candidate(&native, &src, &task.problem, true).unwrap();
            assert_eq!(a, b, "{name} on {}", task.id);
        }
    }
}

#[test]
fn optimal_strategy_matches_breadth_first_search() {
    require_python!();
    let domain = delivery_domain();
    let tasks = delivery_train(&domain);
    let exec = runner_executor(SandboxPolicy::default());
    let problems: Vec<_> = tasks.iter().map(|t| &t.problem).collect();
    let best = optimal_lengths(&domain, &problems);
    for (task, len) in tasks.iter().zip(best) {
        let ExecutionOutcome::Plan(text) = run_candidate(&exec, &strategy("optimal"), &task.problem, true).unwrap() else {
            panic!("optimal strategy failed on {}", task.id)
        };
        let plan = parse_plan(&text, &task.problem, &domain).unwrap();
        assert!(validate_plan(&task.problem, &plan, &domain).is_valid());
        assert_eq!(plan.len(), len, "task {}", task.id);
    }
}
