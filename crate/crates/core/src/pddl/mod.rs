//! Typed-STRIPS PDDL: parsing, grounding, transition semantics and plan
//! validation.
//!
//! The supported subset is `:strips`, `:typing` and `:negative-preconditions`,
//! plus `:action-costs` restricted to a constant `(increase (total-cost) N)`
//! per action schema. All identifiers are lower-cased at parse time.

mod parser;
mod plan;
pub(crate) mod sexpr;
mod semantics;
mod validate;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

pub use parser::{parse_domain, parse_problem};
pub use plan::{parse_plan, plan_cost, serialize_plan, Plan, PlanParseError};
pub use semantics::{applicable, apply, ground_actions, goal_satisfied, Instantiated};
pub use validate::{validate_plan, ValidationResult, ValidationStatus};

/// Name of the implicit root type.
pub const ROOT_TYPE: &str = "object";

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum PddlError {
    #[error("syntax error at {line}:{col}: {message}")]
    Syntax {
        line: usize,
        col: usize,
        message: String,
    },
    #[error("unsupported requirement {0}")]
    UnsupportedRequirement(String),
    #[error("unsupported construct `{feature}` at {line}:{col}")]
    Unsupported {
        feature: String,
        line: usize,
        col: usize,
    },
    #[error("unknown type {0}")]
    UnknownType(String),
    #[error("unknown predicate {0}")]
    UnknownPredicate(String),
    #[error("unknown object {0}")]
    UnknownObject(String),
    #[error("unknown action {0}")]
    UnknownAction(String),
    #[error("variable {variable} is not a parameter of {action}")]
    UnboundVariable { action: String, variable: String },
    #[error("duplicate {kind} {name}")]
    Duplicate { kind: &'static str, name: String },
    #[error("problem is for domain {found}, expected {expected}")]
    DomainMismatch { expected: String, found: String },
    #[error("{name} expects {expected} arguments, got {found}")]
    Arity {
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("object {object} of type {found} cannot be used where {expected} is required")]
    TypeMismatch {
        object: String,
        expected: String,
        found: String,
    },
    #[error("type hierarchy has a cycle through {0}")]
    TypeCycle(String),
    #[error("action {0} is not applicable")]
    InapplicableAction(String),
}

/// A predicate applied to concrete objects.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroundAtom {
    pub predicate: String,
    pub args: Vec<String>,
}

impl GroundAtom {
    pub fn new<S: Into<String>>(predicate: impl Into<String>, args: impl IntoIterator<Item = S>) -> Self {
        Self {
            predicate: predicate.into(),
            args: args.into_iter().map(Into::into).collect(),
        }
    }
}

impl fmt::Display for GroundAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.predicate)?;
        for a in &self.args {
            write!(f, " {a}")?;
        }
        write!(f, ")")
    }
}

/// Closed-world state: atoms not present are false.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct State {
    pub atoms: BTreeSet<GroundAtom>,
}

impl State {
    pub fn new(atoms: impl IntoIterator<Item = GroundAtom>) -> Self {
        Self {
            atoms: atoms.into_iter().collect(),
        }
    }

    pub fn contains(&self, atom: &GroundAtom) -> bool {
        self.atoms.contains(atom)
    }
}

/// An action schema instantiated with concrete objects.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroundAction {
    pub name: String,
    pub args: Vec<String>,
}

impl GroundAction {
    pub fn new<S: Into<String>>(name: impl Into<String>, args: impl IntoIterator<Item = S>) -> Self {
        Self {
            name: name.into(),
            args: args.into_iter().map(Into::into).collect(),
        }
    }
}

impl fmt::Display for GroundAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.name)?;
        for a in &self.args {
            write!(f, " {a}")?;
        }
        write!(f, ")")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypedVar {
    pub name: String,
    pub type_name: String,
}

/// An atom inside an action schema; arguments are parameter indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemaAtom {
    pub predicate: String,
    pub params: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredicateSchema {
    pub name: String,
    pub arg_types: Vec<String>,
}

impl PredicateSchema {
    pub fn arity(&self) -> usize {
        self.arg_types.len()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActionSchema {
    pub name: String,
    pub params: Vec<TypedVar>,
    pub pre_pos: Vec<SchemaAtom>,
    pub pre_neg: Vec<SchemaAtom>,
    pub eff_add: Vec<SchemaAtom>,
    pub eff_del: Vec<SchemaAtom>,
    pub cost: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    pub name: String,
    /// Declared types mapped to their parent; the root `object` is implicit.
    pub types: BTreeMap<String, String>,
    pub predicates: Vec<PredicateSchema>,
    pub actions: Vec<ActionSchema>,
}

impl Domain {
    pub fn type_exists(&self, t: &str) -> bool {
        t == ROOT_TYPE || self.types.contains_key(t)
    }

    /// True when `sub` equals `sup` or inherits from it.
    pub fn is_subtype(&self, sub: &str, sup: &str) -> bool {
        let mut cur = sub;
        loop {
            if cur == sup {
                return true;
            }
            match self.types.get(cur) {
                Some(parent) => cur = parent,
                None => return false,
            }
        }
    }

    pub fn predicate(&self, name: &str) -> Option<&PredicateSchema> {
        self.predicates.iter().find(|p| p.name == name)
    }

    pub fn action(&self, name: &str) -> Option<&ActionSchema> {
        self.actions.iter().find(|a| a.name == name)
    }

    pub fn has_unit_costs(&self) -> bool {
        self.actions.iter().all(|a| a.cost == 1.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Problem {
    pub name: String,
    pub domain_name: String,
    /// Objects in declaration order with their type.
    pub objects: Vec<(String, String)>,
    pub init: BTreeSet<GroundAtom>,
    pub goal_pos: BTreeSet<GroundAtom>,
    pub goal_neg: BTreeSet<GroundAtom>,
}

impl Problem {
    pub fn object_type(&self, name: &str) -> Option<&str> {
        self.objects
            .iter()
            .find(|(o, _)| o == name)
            .map(|(_, t)| t.as_str())
    }

    pub fn initial_state(&self) -> State {
        State {
            atoms: self.init.clone(),
        }
    }

    /// Objects usable where `type_name` is required, in declaration order.
    pub fn objects_of_type<'a>(&'a self, domain: &'a Domain, type_name: &'a str) -> impl Iterator<Item = &'a str> + 'a {
        self.objects
            .iter()
            .filter(move |(_, t)| domain.is_subtype(t, type_name))
            .map(|(o, _)| o.as_str())
    }
}
