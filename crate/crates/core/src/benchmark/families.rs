//! Seeded generators for small benchmark families. These are reconstructions
//! at desk scale, not copies of any published instance distribution.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::BenchError;
use crate::pddl::{parse_domain, parse_problem, Domain};
use crate::search::{solve_satisficing, SearchBudget};

pub const DELIVERY_DOMAIN: &str = "(define (domain delivery)
  (:requirements :strips :typing)
  (:types room ball gripper)
  (:predicates (at-robby ?r - room) (at ?b - ball ?r - room)
               (free ?g - gripper) (carry ?b - ball ?g - gripper))
  (:action move
    :parameters (?from ?to - room)
    :precondition (at-robby ?from)
    :effect (and (at-robby ?to) (not (at-robby ?from))))
  (:action pick
    :parameters (?b - ball ?r - room ?g - gripper)
    :precondition (and (at ?b ?r) (at-robby ?r) (free ?g))
    :effect (and (carry ?b ?g) (not (at ?b ?r)) (not (free ?g))))
  (:action drop
    :parameters (?b - ball ?r - room ?g - gripper)
    :precondition (and (carry ?b ?g) (at-robby ?r))
    :effect (and (at ?b ?r) (free ?g) (not (carry ?b ?g)))))
";

pub const FERRY_DOMAIN: &str = "(define (domain ferry)
  (:requirements :strips :typing)
  (:types car location)
  (:predicates (at-ferry ?l - location) (at ?c - car ?l - location)
               (empty-ferry) (on ?c - car))
  (:action sail
    :parameters (?from ?to - location)
    :precondition (at-ferry ?from)
    :effect (and (at-ferry ?to) (not (at-ferry ?from))))
  (:action board
    :parameters (?c - car ?l - location)
    :precondition (and (at ?c ?l) (at-ferry ?l) (empty-ferry))
    :effect (and (on ?c) (not (at ?c ?l)) (not (empty-ferry))))
  (:action debark
    :parameters (?c - car ?l - location)
    :precondition (and (on ?c) (at-ferry ?l))
    :effect (and (at ?c ?l) (empty-ferry) (not (on ?c)))))
";

pub const STACKING_DOMAIN: &str = "(define (domain stacking)
  (:requirements :strips :typing)
  (:types item)
  (:predicates (heavier ?a - item ?b - item) (packed ?a - item)
               (unpacked ?a - item) (nothing-above ?a - item) (box-empty))
  (:action pack-first
    :parameters (?a - item)
    :precondition (and (box-empty) (unpacked ?a))
    :effect (and (packed ?a) (nothing-above ?a) (not (box-empty)) (not (unpacked ?a))))
  (:action stack
    :parameters (?a - item ?b - item)
    :precondition (and (packed ?b) (nothing-above ?b) (unpacked ?a) (heavier ?b ?a))
    :effect (and (packed ?a) (nothing-above ?a) (not (nothing-above ?b)) (not (unpacked ?a)))))
";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// Two rooms, two grippers, balls to carry between rooms.
    Delivery,
    /// One-car ferry between three ports.
    Ferry,
    /// Pack items into a box, each on top of a heavier one.
    Stacking,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::Delivery, Family::Ferry, Family::Stacking];

    pub fn name(self) -> &'static str {
        match self {
            Family::Delivery => "delivery",
            Family::Ferry => "ferry",
            Family::Stacking => "stacking",
        }
    }

    pub fn domain_text(self) -> &'static str {
        match self {
            Family::Delivery => DELIVERY_DOMAIN,
            Family::Ferry => FERRY_DOMAIN,
            Family::Stacking => STACKING_DOMAIN,
        }
    }

    pub fn domain(self) -> Domain {
        parse_domain(self.domain_text()).expect("shipped domains parse")
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| BenchError::UnknownFamily(s.to_string()))
    }
}

/// A generated problem file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub name: String,
    pub text: String,
}

/// Random init/goal in sorted atom-string form, used for dedup.
struct Draft {
    objects: String,
    init: Vec<String>,
    goal: Vec<String>,
}

fn names(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

fn draft_delivery(size: usize, rng: &mut ChaCha8Rng) -> Draft {
    let rooms = ["ra", "rb"];
    let balls = names("b", size);
    let mut init = vec![format!("(at-robby {})", rooms[rng.random_range(0..2)])];
    init.extend(["(free left)".to_string(), "(free right)".to_string()]);
    let mut goal = Vec::new();
    for b in &balls {
        let from = rng.random_range(0..2);
        let to = if rng.random_bool(0.75) { 1 - from } else { from };
        init.push(format!("(at {b} {})", rooms[from]));
        goal.push(format!("(at {b} {})", rooms[to]));
    }
    Draft {
        objects: format!("ra rb - room {} - ball left right - gripper", balls.join(" ")),
        init,
        goal,
    }
}

fn draft_ferry(size: usize, rng: &mut ChaCha8Rng) -> Draft {
    let ports = names("l", 3);
    let cars = names("c", size);
    let mut init = vec![
        format!("(at-ferry {})", ports[rng.random_range(0..3)]),
        "(empty-ferry)".to_string(),
    ];
    let mut goal = Vec::new();
    for c in &cars {
        let from = rng.random_range(0..3);
        let to = (from + rng.random_range(1..3)) % 3;
        init.push(format!("(at {c} {})", ports[from]));
        goal.push(format!("(at {c} {})", ports[to]));
    }
    Draft {
        objects: format!("{} - location {} - car", ports.join(" "), cars.join(" ")),
        init,
        goal,
    }
}

fn draft_stacking(size: usize, rng: &mut ChaCha8Rng) -> Draft {
    let mut items = names("i", size);
    items.shuffle(rng);
    // items[0] is the heaviest.
    let mut init = vec!["(box-empty)".to_string()];
    for (i, a) in items.iter().enumerate() {
        init.push(format!("(unpacked {a})"));
        for b in &items[i + 1..] {
            init.push(format!("(heavier {a} {b})"));
        }
    }
    items.sort();
    Draft {
        objects: format!("{} - item", items.join(" ")),
        goal: items.iter().map(|a| format!("(packed {a})")).collect(),
        init,
    }
}

fn render(family: Family, name: &str, d: &Draft) -> String {
    format!(
        "(define (problem {name})\n  (:domain {})\n  (:objects {})\n  (:init\n    {})\n  (:goal (and\n    {})))\n",
        family.name(),
        d.objects,
        d.init.join("\n    "),
        d.goal.join("\n    ")
    )
}

const ATTEMPTS_PER_INSTANCE: usize = 50;

/// `count` distinct solvable problems of the given size. Output depends only
/// on the arguments.
pub fn generate_instances(family: Family, size: usize, count: usize, seed: u64) -> Result<Vec<Instance>, BenchError> {
    if size == 0 {
        return Err(BenchError::InvalidSize(size));
    }
    let domain = family.domain();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen: BTreeSet<(Vec<String>, Vec<String>)> = BTreeSet::new();
    let budget = SearchBudget {
        max_expansions: 500_000,
        max_seconds: 20.0,
    };
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let name = format!("{family}-s{size}-{seed}-{:03}", i + 1);
        let mut accepted = None;
        for _ in 0..ATTEMPTS_PER_INSTANCE {
            let mut d = match family {
                Family::Delivery => draft_delivery(size, &mut rng),
                Family::Ferry => draft_ferry(size, &mut rng),
                Family::Stacking => draft_stacking(size, &mut rng),
            };
            d.init.sort();
            let key = (d.init.clone(), d.goal.clone());
            let trivial = d.goal.iter().all(|g| d.init.contains(g));
            if trivial || seen.contains(&key) {
                continue;
            }
            let text = render(family, &name, &d);
            let problem = parse_problem(&text, &domain).expect("generated problems parse");
            let solved = solve_satisficing(&problem, &domain, budget)
                .map(|r| r.plan().is_some())
                .unwrap_or(false);
            if solved {
                seen.insert(key);
                accepted = Some(text);
                break;
            }
        }
        let text = accepted.ok_or(BenchError::UnsolvableGenerated {
            family: family.name().into(),
            attempts: ATTEMPTS_PER_INSTANCE,
        })?;
        out.push(Instance { name, text });
    }
    Ok(out)
}
