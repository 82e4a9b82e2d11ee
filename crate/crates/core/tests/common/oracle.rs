//! Straight-line reimplementations of grounding, stepping and plan search,
//! used as references for the library versions. Deliberately naive.

use std::collections::{HashMap, HashSet};

use geneplan_core::pddl::{Domain, GroundAction, GroundAtom, Problem, SchemaAtom};

pub type Facts = HashSet<(String, Vec<String>)>;

fn ancestors(domain: &Domain, t: &str) -> Vec<String> {
    let mut out = vec![t.to_string()];
    let mut cur = t.to_string();
    while let Some(parent) = domain.types.get(&cur) {
        out.push(parent.clone());
        cur = parent.clone();
    }
    out.push("object".into());
    out
}

fn objects_of(domain: &Domain, problem: &Problem, t: &str) -> Vec<String> {
    problem
        .objects
        .iter()
        .filter(|(_, ty)| ancestors(domain, ty).iter().any(|a| a == t))
        .map(|(n, _)| n.clone())
        .collect()
}

/// Every typed binding of every schema, by recursion.
pub fn ground_all(domain: &Domain, problem: &Problem) -> Vec<GroundAction> {
    fn extend(
        domain: &Domain,
        problem: &Problem,
        name: &str,
        types: &[String],
        prefix: &mut Vec<String>,
        out: &mut Vec<GroundAction>,
    ) {
        if prefix.len() == types.len() {
            out.push(GroundAction::new(name, prefix.clone()));
            return;
        }
        for o in objects_of(domain, problem, &types[prefix.len()]) {
            prefix.push(o);
            extend(domain, problem, name, types, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    for a in &domain.actions {
        let types: Vec<String> = a.params.iter().map(|p| p.type_name.clone()).collect();
        extend(domain, problem, &a.name, &types, &mut Vec::new(), &mut out);
    }
    out
}

pub fn facts_of(atoms: impl IntoIterator<Item = GroundAtom>) -> Facts {
    atoms.into_iter().map(|a| (a.predicate, a.args)).collect()
}

fn bind(atom: &SchemaAtom, args: &[String]) -> (String, Vec<String>) {
    (atom.predicate.clone(), atom.params.iter().map(|&i| args[i].clone()).collect())
}

/// Successor of `facts` under `action`, or None if it is not applicable.
pub fn step(domain: &Domain, facts: &Facts, action: &GroundAction) -> Option<Facts> {
    let schema = domain.actions.iter().find(|a| a.name == action.name)?;
    if schema.params.len() != action.args.len() {
        return None;
    }
    if !schema.pre_pos.iter().all(|p| facts.contains(&bind(p, &action.args))) {
        return None;
    }
    if schema.pre_neg.iter().any(|p| facts.contains(&bind(p, &action.args))) {
        return None;
    }
    let mut next = facts.clone();
    for d in &schema.eff_del {
        next.remove(&bind(d, &action.args));
    }
    for a in &schema.eff_add {
        next.insert(bind(a, &action.args));
    }
    Some(next)
}

pub fn goal_holds(problem: &Problem, facts: &Facts) -> bool {
    problem.goal_pos.iter().all(|g| facts.contains(&(g.predicate.clone(), g.args.clone())))
        && !problem.goal_neg.iter().any(|g| facts.contains(&(g.predicate.clone(), g.args.clone())))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Valid,
    Inapplicable(usize),
    GoalNotReached,
}

pub fn simulate(domain: &Domain, problem: &Problem, actions: &[GroundAction]) -> Verdict {
    let mut facts = facts_of(problem.init.iter().cloned());
    for (i, a) in actions.iter().enumerate() {
        match step(domain, &facts, a) {
            Some(next) => facts = next,
            None => return Verdict::Inapplicable(i),
        }
    }
    if goal_holds(problem, &facts) {
        Verdict::Valid
    } else {
        Verdict::GoalNotReached
    }
}

fn key(facts: &Facts) -> Vec<(String, Vec<String>)> {
    let mut v: Vec<_> = facts.iter().cloned().collect();
    v.sort();
    v
}

/// Length of the shortest plan with at most `max_depth` steps, by iterative
/// deepening over all action sequences. A state already reached with at
/// least as much remaining depth is not re-expanded.
pub fn shortest_plan_len(domain: &Domain, problem: &Problem, max_depth: usize) -> Option<usize> {
    fn dfs(
        domain: &Domain,
        problem: &Problem,
        actions: &[GroundAction],
        facts: &Facts,
        left: usize,
        seen: &mut HashMap<Vec<(String, Vec<String>)>, usize>,
    ) -> bool {
        if goal_holds(problem, facts) {
            return true;
        }
        if left == 0 {
            return false;
        }
        let k = key(facts);
        if seen.get(&k).is_some_and(|&l| l >= left) {
            return false;
        }
        seen.insert(k, left);
        actions.iter().any(|a| {
            step(domain, facts, a).is_some_and(|next| dfs(domain, problem, actions, &next, left - 1, seen))
        })
    }
    let actions = ground_all(domain, problem);
    let init = facts_of(problem.init.iter().cloned());
    (0..=max_depth).find(|&d| dfs(domain, problem, &actions, &init, d, &mut HashMap::new()))
}
