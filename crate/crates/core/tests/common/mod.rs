#![allow(dead_code)]

pub mod oracle;

use std::collections::BTreeMap;
use std::path::PathBuf;

use geneplan_core::evolution::TrainTask;
use geneplan_core::pddl::{parse_domain, parse_problem, Domain, Problem};
use geneplan_core::sandbox::{NativeExecutor, SandboxPolicy, SubprocessExecutor, TaskPayload};
use geneplan_core::search::{solve_optimal, SearchBudget};

pub fn fixture(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(rel)
}

pub fn read(rel: &str) -> String {
    std::fs::read_to_string(fixture(rel)).unwrap_or_else(|e| panic!("{rel}: {e}"))
}

pub fn delivery_domain_text() -> String {
    read("delivery/domain.pddl")
}

pub fn delivery_domain() -> Domain {
    parse_domain(&delivery_domain_text()).unwrap()
}

pub fn delivery_train(domain: &Domain) -> Vec<TrainTask> {
    (1..=5)
        .map(|i| {
            let id = format!("p{i:02}");
            let problem = parse_problem(&read(&format!("delivery/train/{id}.pddl")), domain).unwrap();
            TrainTask { id, problem }
        })
        .collect()
}

pub fn optimal_lengths(domain: &Domain, problems: &[&Problem]) -> Vec<usize> {
    problems
        .iter()
        .map(|p| {
            solve_optimal(p, domain, SearchBudget::default())
                .unwrap()
                .plan()
                .expect("fixture tasks are solvable")
                .len()
        })
        .collect()
}

pub fn strategy(name: &str) -> String {
    read(&format!("strategies/{name}.py"))
}

/// The optimal strategy plus three flawed variants.
pub fn delivery_pool() -> Vec<String> {
    ["optimal", "one_gripper", "forgets_last", "crashes"]
        .into_iter()
        .map(strategy)
        .collect()
}

/// Rust port of the delivery strategies in `fixtures/strategies`.
fn deliver(task: &TaskPayload, max_grippers: usize, drop_last: bool) -> Result<Vec<String>, String> {
    let objects = task.objects.as_array().ok_or("objects must be typed pairs")?;
    let mut grippers: Vec<String> = objects
        .iter()
        .filter_map(|o| {
            let pair = o.as_array()?;
            (pair.get(1)?.as_str()? == "gripper").then(|| pair[0].as_str().unwrap().to_string())
        })
        .collect();
    grippers.sort();
    grippers.truncate(max_grippers);
    let mut robby = String::new();
    let mut ball_at: BTreeMap<String, String> = BTreeMap::new();
    let mut carry: BTreeMap<String, String> = BTreeMap::new();
    for atom in &task.init {
        match atom[0].as_str() {
            "at-robby" => robby = atom[1].clone(),
            "at" => {
                ball_at.insert(atom[1].clone(), atom[2].clone());
            }
            "carry" => {
                carry.insert(atom[2].clone(), atom[1].clone());
            }
            _ => {}
        }
    }
    let target: BTreeMap<String, String> = task
        .goal
        .iter()
        .filter(|a| a[0] == "at")
        .map(|a| (a[1].clone(), a[2].clone()))
        .collect();

    let mut plan = Vec::new();
    loop {
        for g in &grippers {
            if let Some(b) = carry.get(g).cloned() {
                if target.get(&b).unwrap_or(&robby) == &robby {
                    plan.push(format!("(drop {b} {robby} {g})"));
                    ball_at.insert(b, robby.clone());
                    carry.remove(g);
                }
            }
        }
        for g in &grippers {
            if carry.contains_key(g) {
                continue;
            }
            let waiting = ball_at
                .iter()
                .find(|(b, r)| **r == robby && target.get(*b).unwrap_or(r) != *r)
                .map(|(b, _)| b.clone());
            let Some(b) = waiting else { break };
            plan.push(format!("(pick {b} {robby} {g})"));
            ball_at.remove(&b);
            carry.insert(g.clone(), b);
        }
        let dest = if let Some((_, b)) = carry.iter().next() {
            target[b].clone()
        } else {
            match ball_at.iter().find(|(b, r)| target.get(*b).unwrap_or(r) != *r) {
                Some((_, r)) => r.clone(),
                None => {
                    if drop_last {
                        plan.pop();
                    }
                    return Ok(plan);
                }
            }
        };
        plan.push(format!("(move {robby} {dest})"));
        robby = dest;
    }
}

pub fn native_executor() -> NativeExecutor {
    NativeExecutor::new(SandboxPolicy::default())
        .register("delivery-optimal", |t| deliver(t, usize::MAX, false))
        .register("delivery-one-gripper", |t| deliver(t, 1, false))
        .register("delivery-forgets-last", |t| deliver(t, usize::MAX, true))
        .register("delivery-crashes", |_| Err("KeyError: 'robot-at'".into()))
}

pub fn python_available() -> bool {
    std::process::Command::new("python3")
        .arg("--version")
        .output()
        .map(|o| o.status.success())
        .unwrap_or(false)
}

pub fn runner_command() -> Vec<String> {
    vec!["python3".into(), fixture("runner.py").display().to_string()]
}

pub fn runner_executor(policy: SandboxPolicy) -> SubprocessExecutor {
    SubprocessExecutor::new(&runner_command(), policy).unwrap()
}
