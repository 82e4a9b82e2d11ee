//! Wire format spoken with the runner: one JSON object per line in each
//! direction, strictly request/response.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::pddl::{GroundAtom, Problem};

/// A task as the candidate sees it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskPayload {
    /// `[[name, type], ...]` when typing is on, `[name, ...]` otherwise.
    pub objects: Value,
    pub init: Vec<Vec<String>>,
    /// Negative goal literals are encoded as `["not", predicate, args...]`.
    pub goal: Vec<Vec<String>>,
    pub typing: bool,
}

fn atom_tuple(atom: &GroundAtom) -> Vec<String> {
    std::iter::once(atom.predicate.clone()).chain(atom.args.iter().cloned()).collect()
}

impl TaskPayload {
    pub fn from_problem(problem: &Problem, typing: bool) -> Self {
        let objects = if typing {
            Value::Array(problem.objects.iter().map(|(n, t)| json!([n, t])).collect())
        } else {
            Value::Array(problem.objects.iter().map(|(n, _)| json!(n)).collect())
        };
        let mut goal: Vec<Vec<String>> = problem.goal_pos.iter().map(atom_tuple).collect();
        goal.extend(problem.goal_neg.iter().map(|a| {
            let mut t = vec!["not".to_string()];
            t.extend(atom_tuple(a));
            t
        }));
        Self {
            objects,
            init: problem.init.iter().map(atom_tuple).collect(),
            goal,
            typing,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "lowercase")]
pub enum Request {
    Validate {
        source: String,
    },
    Plan {
        objects: Value,
        init: Vec<Vec<String>>,
        goal: Vec<Vec<String>>,
        typing: bool,
    },
}

impl Request {
    pub fn plan(task: &TaskPayload) -> Self {
        Request::Plan {
            objects: task.objects.clone(),
            init: task.init.clone(),
            goal: task.goal.clone(),
            typing: task.typing,
        }
    }

    pub fn to_line(&self) -> String {
        let mut s = serde_json::to_string(self).expect("requests always serialize");
        s.push('\n');
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Reply {
    Ok,
    Reject(String),
    Plan(Vec<String>),
    Error { kind: String, message: String },
}

impl Reply {
    pub fn parse(line: &str) -> Result<Self, String> {
        let v: Value = serde_json::from_str(line.trim()).map_err(|e| format!("malformed reply: {e}"))?;
        let obj = v.as_object().ok_or("reply is not a JSON object")?;
        if obj.get("ok") == Some(&Value::Bool(true)) {
            return Ok(Reply::Ok);
        }
        if obj.get("reject") == Some(&Value::Bool(true)) {
            let reason = obj.get("reason").and_then(Value::as_str).unwrap_or("rejected");
            return Ok(Reply::Reject(reason.to_string()));
        }
        if let Some(plan) = obj.get("plan") {
            let steps = plan.as_array().ok_or("plan is not an array")?;
            return steps
                .iter()
                .map(|s| s.as_str().map(str::to_string).ok_or_else(|| "plan step is not a string".to_string()))
                .collect::<Result<Vec<_>, _>>()
                .map(Reply::Plan);
        }
        if let Some(kind) = obj.get("error") {
            return Ok(Reply::Error {
                kind: kind.as_str().unwrap_or("error").to_string(),
                message: obj.get("message").and_then(Value::as_str).unwrap_or("").to_string(),
            });
        }
        Err(format!("unrecognized reply: {line}"))
    }
}

/// Join returned action strings into IPC plan text.
pub(crate) fn plan_text(steps: &[String]) -> String {
    let mut out = String::new();
    for s in steps {
        let s = s.trim();
        if s.is_empty() {
            continue;
        }
        if s.starts_with('(') {
            out.push_str(s);
        } else {
            out.push('(');
            out.push_str(s);
            out.push(')');
        }
        out.push('\n');
    }
    out
}
