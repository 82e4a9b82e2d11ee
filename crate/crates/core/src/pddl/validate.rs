use serde::{Deserialize, Serialize};

use super::{goal_satisfied, Domain, Plan, Problem};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "index", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ValidationStatus {
    Valid,
    InapplicableAction(usize),
    GoalNotReached,
    UnknownAction(usize),
    Malformed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationResult {
    pub status: ValidationStatus,
    /// Empty exactly when the plan is valid.
    pub reason: String,
}

impl ValidationResult {
    fn valid() -> Self {
        Self {
            status: ValidationStatus::Valid,
            reason: String::new(),
        }
    }

    fn fail(status: ValidationStatus, reason: String) -> Self {
        debug_assert!(!reason.is_empty());
        Self { status, reason }
    }

    pub fn is_valid(&self) -> bool {
        self.status == ValidationStatus::Valid
    }
}

/// Simulate `plan` from the initial state and check the goal. The first
/// failure is reported with the index of the offending action.
pub fn validate_plan(problem: &Problem, plan: &Plan, domain: &Domain) -> ValidationResult {
    let mut state = problem.initial_state();
    for (i, action) in plan.actions.iter().enumerate() {
        let Some(schema) = domain.action(&action.name) else {
            return ValidationResult::fail(
                ValidationStatus::UnknownAction(i),
                format!("action {i} {action}: unknown action {}", action.name),
            );
        };
        if schema.params.len() != action.args.len() {
            return ValidationResult::fail(
                ValidationStatus::Malformed,
                format!(
                    "action {i} {action}: expected {} arguments, got {}",
                    schema.params.len(),
                    action.args.len()
                ),
            );
        }
        for (arg, param) in action.args.iter().zip(&schema.params) {
            match problem.object_type(arg) {
                None => {
                    return ValidationResult::fail(
                        ValidationStatus::Malformed,
                        format!("action {i} {action}: unknown object {arg}"),
                    )
                }
                Some(t) if !domain.is_subtype(t, &param.type_name) => {
                    return ValidationResult::fail(
                        ValidationStatus::Malformed,
                        format!("action {i} {action}: {arg} is not a {}", param.type_name),
                    )
                }
                Some(_) => {}
            }
        }
        let inst = match domain.instantiate(action) {
            Ok(inst) => inst,
            Err(e) => return ValidationResult::fail(ValidationStatus::Malformed, format!("action {i} {action}: {e}")),
        };
        if !inst.applicable_in(&state) {
            let missing: Vec<String> = inst
                .pre_pos
                .iter()
                .filter(|a| !state.contains(a))
                .map(|a| a.to_string())
                .chain(inst.pre_neg.iter().filter(|a| state.contains(a)).map(|a| format!("(not {a})")))
                .collect();
            return ValidationResult::fail(
                ValidationStatus::InapplicableAction(i),
                format!("action {i} {action} is not applicable: unsatisfied {}", missing.join(" ")),
            );
        }
        state = inst.successor(&state);
    }
    if goal_satisfied(problem, &state) {
        ValidationResult::valid()
    } else {
        let unmet: Vec<String> = problem
            .goal_pos
            .iter()
            .filter(|a| !state.contains(a))
            .map(|a| a.to_string())
            .chain(problem.goal_neg.iter().filter(|a| state.contains(a)).map(|a| format!("(not {a})")))
            .collect();
        ValidationResult::fail(
            ValidationStatus::GoalNotReached,
            format!("goal not reached: unsatisfied {}", unmet.join(" ")),
        )
    }
}
