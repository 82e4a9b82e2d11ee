//! Built-in reference planners: an optimal breadth-first search and a greedy
//! best-first search on the goal-count heuristic.
//!
//! Both searches run on a grounded, interned copy of the task. Atoms are
//! numbered in sorted order and a state is the bitset of its true atoms, which
//! gives every state one canonical key for duplicate detection. Successors are
//! generated in lexicographic order of the ground actions, so results are
//! deterministic.

use std::cmp::Reverse;
use std::collections::hash_map::Entry;
use std::collections::{BTreeSet, BinaryHeap, HashMap, VecDeque};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::pddl::{ground_actions, Domain, GroundAction, GroundAtom, Plan, Problem};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchBudget {
    pub max_expansions: u64,
    pub max_seconds: f64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self {
            max_expansions: 1_000_000,
            max_seconds: 60.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SearchOutcome {
    Solved(Plan),
    Unsolvable,
    BudgetExhausted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub outcome: SearchOutcome,
    pub expansions: u64,
    /// Wall-clock seconds.
    pub elapsed: f64,
}

impl SearchResult {
    pub fn plan(&self) -> Option<&Plan> {
        match &self.outcome {
            SearchOutcome::Solved(p) => Some(p),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SearchError {
    #[error("optimal search requires unit action costs (action {0} has a different cost)")]
    NonUnitCost(String),
    #[error("search budget must be positive")]
    InvalidBudget,
}

type Bits = Box<[u64]>;

struct Op {
    pre_pos: Vec<u32>,
    pre_neg: Vec<u32>,
    add: Vec<u32>,
    del: Vec<u32>,
}

fn has(bits: &[u64], i: u32) -> bool {
    bits[(i / 64) as usize] & (1u64 << (i % 64)) != 0
}

fn set(bits: &mut [u64], i: u32, on: bool) {
    let (w, m) = ((i / 64) as usize, 1u64 << (i % 64));
    if on {
        bits[w] |= m;
    } else {
        bits[w] &= !m;
    }
}

impl Op {
    fn applicable(&self, s: &[u64]) -> bool {
        self.pre_pos.iter().all(|&a| has(s, a)) && !self.pre_neg.iter().any(|&a| has(s, a))
    }

    fn apply(&self, s: &[u64]) -> Bits {
        let mut next: Bits = s.into();
        for &a in &self.del {
            set(&mut next, a, false);
        }
        for &a in &self.add {
            set(&mut next, a, true);
        }
        next
    }
}

/// A task compiled to integer atoms and bitset states.
struct GroundTask {
    actions: Vec<GroundAction>,
    ops: Vec<Op>,
    init: Bits,
    goal_pos: Vec<u32>,
    goal_neg: Vec<u32>,
}

impl GroundTask {
    fn build(domain: &Domain, problem: &Problem) -> Self {
        let actions = ground_actions(domain, problem);
        let insts: Vec<_> = actions
            .iter()
            .map(|a| domain.instantiate(a).expect("grounded actions come from the domain"))
            .collect();

        let mut universe: BTreeSet<&GroundAtom> = BTreeSet::new();
        universe.extend(&problem.init);
        universe.extend(&problem.goal_pos);
        universe.extend(&problem.goal_neg);
        for i in &insts {
            universe.extend(i.pre_pos.iter().chain(&i.pre_neg).chain(&i.add).chain(&i.del));
        }
        let index: HashMap<&GroundAtom, u32> = universe.iter().enumerate().map(|(i, a)| (*a, i as u32)).collect();
        let ids = |atoms: &[GroundAtom]| atoms.iter().map(|a| index[a]).collect::<Vec<_>>();
        let words = universe.len().div_ceil(64).max(1);

        let ops = insts
            .iter()
            .map(|i| Op {
                pre_pos: ids(&i.pre_pos),
                pre_neg: ids(&i.pre_neg),
                add: ids(&i.add),
                del: ids(&i.del),
            })
            .collect();
        let mut init = vec![0u64; words].into_boxed_slice();
        for a in &problem.init {
            set(&mut init, index[a], true);
        }
        Self {
            actions,
            ops,
            init,
            goal_pos: problem.goal_pos.iter().map(|a| index[a]).collect(),
            goal_neg: problem.goal_neg.iter().map(|a| index[a]).collect(),
        }
    }

    fn unsatisfied_goals(&self, s: &[u64]) -> usize {
        self.goal_pos.iter().filter(|&&a| !has(s, a)).count() + self.goal_neg.iter().filter(|&&a| has(s, a)).count()
    }
}

/// Parent links for plan reconstruction. Index 0 is the root.
struct Tree {
    parent: Vec<(u32, u32)>,
}

impl Tree {
    fn plan(&self, task: &GroundTask, mut node: u32) -> Plan {
        let mut actions = Vec::new();
        while node != 0 {
            let (p, op) = self.parent[node as usize];
            actions.push(task.actions[op as usize].clone());
            node = p;
        }
        actions.reverse();
        Plan::new(actions)
    }
}

fn check_budget(budget: &SearchBudget) -> Result<(), SearchError> {
    if budget.max_expansions == 0 || budget.max_seconds.is_nan() || budget.max_seconds <= 0.0 {
        return Err(SearchError::InvalidBudget);
    }
    Ok(())
}

struct Clock {
    start: Instant,
    budget: SearchBudget,
}

impl Clock {
    fn exhausted(&self, expansions: u64) -> bool {
        expansions >= self.budget.max_expansions
            || (expansions.is_multiple_of(256) && self.start.elapsed().as_secs_f64() > self.budget.max_seconds)
    }

    fn finish(&self, outcome: SearchOutcome, expansions: u64) -> SearchResult {
        SearchResult {
            outcome,
            expansions,
            elapsed: self.start.elapsed().as_secs_f64(),
        }
    }
}

/// Breadth-first search with duplicate detection. Returns a shortest plan.
pub fn solve_optimal(problem: &Problem, domain: &Domain, budget: SearchBudget) -> Result<SearchResult, SearchError> {
    check_budget(&budget)?;
    if let Some(a) = domain.actions.iter().find(|a| a.cost != 1.0) {
        return Err(SearchError::NonUnitCost(a.name.clone()));
    }
    let clock = Clock {
        start: Instant::now(),
        budget,
    };
    let task = GroundTask::build(domain, problem);
    if task.unsatisfied_goals(&task.init) == 0 {
        return Ok(clock.finish(SearchOutcome::Solved(Plan::default()), 0));
    }

    let mut tree = Tree { parent: vec![(0, 0)] };
    let mut states: Vec<Bits> = vec![task.init.clone()];
    let mut seen: HashMap<Bits, u32> = HashMap::from([(task.init.clone(), 0)]);
    let mut queue = VecDeque::from([0u32]);
    let mut expansions = 0u64;

    while let Some(node) = queue.pop_front() {
        if clock.exhausted(expansions) {
            return Ok(clock.finish(SearchOutcome::BudgetExhausted, expansions));
        }
        expansions += 1;
        let state = states[node as usize].clone();
        for (i, op) in task.ops.iter().enumerate() {
            if !op.applicable(&state) {
                continue;
            }
            let next = op.apply(&state);
            let Entry::Vacant(slot) = seen.entry(next) else {
                continue;
            };
            let id = states.len() as u32;
            states.push(slot.key().clone());
            slot.insert(id);
            tree.parent.push((node, i as u32));
            if task.unsatisfied_goals(&states[id as usize]) == 0 {
                return Ok(clock.finish(SearchOutcome::Solved(tree.plan(&task, id)), expansions));
            }
            queue.push_back(id);
        }
    }
    Ok(clock.finish(SearchOutcome::Unsolvable, expansions))
}

/// Greedy best-first search ordered by the number of unsatisfied goal
/// literals, ties broken first-in-first-out. Plans are valid but not
/// necessarily shortest.
pub fn solve_satisficing(problem: &Problem, domain: &Domain, budget: SearchBudget) -> Result<SearchResult, SearchError> {
    check_budget(&budget)?;
    let clock = Clock {
        start: Instant::now(),
        budget,
    };
    let task = GroundTask::build(domain, problem);
    let h0 = task.unsatisfied_goals(&task.init);
    if h0 == 0 {
        return Ok(clock.finish(SearchOutcome::Solved(Plan::default()), 0));
    }

    let mut tree = Tree { parent: vec![(0, 0)] };
    let mut states: Vec<Bits> = vec![task.init.clone()];
    let mut seen: HashMap<Bits, u32> = HashMap::from([(task.init.clone(), 0)]);
    let mut open = BinaryHeap::from([Reverse((h0, 0u64, 0u32))]);
    let mut counter = 1u64;
    let mut expansions = 0u64;

    while let Some(Reverse((_, _, node))) = open.pop() {
        if clock.exhausted(expansions) {
            return Ok(clock.finish(SearchOutcome::BudgetExhausted, expansions));
        }
        expansions += 1;
        let state = states[node as usize].clone();
        for (i, op) in task.ops.iter().enumerate() {
            if !op.applicable(&state) {
                continue;
            }
            let next = op.apply(&state);
            let Entry::Vacant(slot) = seen.entry(next) else {
                continue;
            };
            let id = states.len() as u32;
            states.push(slot.key().clone());
            slot.insert(id);
            tree.parent.push((node, i as u32));
            let h = task.unsatisfied_goals(&states[id as usize]);
            if h == 0 {
                return Ok(clock.finish(SearchOutcome::Solved(tree.plan(&task, id)), expansions));
            }
            open.push(Reverse((h, counter, id)));
            counter += 1;
        }
    }
    Ok(clock.finish(SearchOutcome::Unsolvable, expansions))
}
