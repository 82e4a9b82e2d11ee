use serde::{Deserialize, Serialize};

use super::{Domain, GroundAction, Problem};

/// An ordered sequence of ground actions.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Plan {
    pub actions: Vec<GroundAction>,
}

impl Plan {
    pub fn new(actions: Vec<GroundAction>) -> Self {
        Self { actions }
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PlanParseError {
    #[error("line {line}: malformed action: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: unknown action {name}")]
    UnknownAction { line: usize, name: String },
    #[error("line {line}: unknown object {name}")]
    UnknownObject { line: usize, name: String },
    #[error("line {line}: {name} expects {expected} arguments, got {found}")]
    Arity {
        line: usize,
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: object {object} is not a {expected}")]
    TypeMismatch {
        line: usize,
        object: String,
        expected: String,
    },
}

/// Parse an IPC-format plan: one `(name arg ...)` per line. Blank lines and
/// `;` comments are skipped; names are matched case-insensitively.
pub fn parse_plan(text: &str, problem: &Problem, domain: &Domain) -> Result<Plan, PlanParseError> {
    let mut actions = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = match raw.find(';') {
            Some(idx) => &raw[..idx],
            None => raw,
        }
        .trim();
        if body.is_empty() {
            continue;
        }
        let inner = body
            .strip_prefix('(')
            .and_then(|s| s.strip_suffix(')'))
            .ok_or_else(|| PlanParseError::Malformed {
                line,
                message: format!("expected `(name args...)`, got `{body}`"),
            })?;
        if inner.contains(['(', ')']) {
            return Err(PlanParseError::Malformed {
                line,
                message: "nested parentheses".into(),
            });
        }
        let mut toks = inner.split_whitespace().map(str::to_lowercase);
        let name = toks.next().ok_or_else(|| PlanParseError::Malformed {
            line,
            message: "empty action".into(),
        })?;
        let args: Vec<String> = toks.collect();
        let schema = domain
            .action(&name)
            .ok_or_else(|| PlanParseError::UnknownAction {
                line,
                name: name.clone(),
            })?;
        if schema.params.len() != args.len() {
            return Err(PlanParseError::Arity {
                line,
                name,
                expected: schema.params.len(),
                found: args.len(),
            });
        }
        for (arg, param) in args.iter().zip(&schema.params) {
            let t = problem
                .object_type(arg)
                .ok_or_else(|| PlanParseError::UnknownObject {
                    line,
                    name: arg.clone(),
                })?;
            if !domain.is_subtype(t, &param.type_name) {
                return Err(PlanParseError::TypeMismatch {
                    line,
                    object: arg.clone(),
                    expected: param.type_name.clone(),
                });
            }
        }
        actions.push(GroundAction { name, args });
    }
    Ok(Plan { actions })
}

pub fn serialize_plan(plan: &Plan) -> String {
    let mut out = String::new();
    for a in &plan.actions {
        out.push_str(&a.to_string());
        out.push('\n');
    }
    out
}

/// Sum of action costs; actions unknown to the domain count as 1.
pub fn plan_cost(plan: &Plan, domain: &Domain) -> f64 {
    plan.actions
        .iter()
        .map(|a| domain.action(&a.name).map_or(1.0, |s| s.cost))
        .sum()
}
