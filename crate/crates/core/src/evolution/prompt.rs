use super::{Candidate, EvolutionError, PopulationStore};

/// Shipped prompt template. Any replacement must contain all three markers.
pub const DEFAULT_TEMPLATE: &str = include_str!("../../assets/prompt_template.txt");

const DOMAIN: &str = "@@domain@@";
const EXAMPLES: &str = "@@examples@@";
const TYPING: &str = "@@typing@@";

const TYPED_OBJECTS: &str = "set of (object name, type name) tuples";
const UNTYPED_OBJECTS: &str = "set of object names";

/// Fill the store's template with its domain text and the parents' code and
/// feedback. An empty parent list yields a bootstrap prompt with no examples.
pub fn build_prompt(store: &PopulationStore, parents: &[Candidate]) -> Result<String, EvolutionError> {
    let template = store.prompt_template();
    for marker in [DOMAIN, EXAMPLES, TYPING] {
        if !template.contains(marker) {
            return Err(EvolutionError::MissingPlaceholder(marker));
        }
    }
    let mut examples = String::new();
    for (i, parent) in parents.iter().enumerate() {
        let feedback = parent
            .feedback_message
            .as_deref()
            .ok_or(EvolutionError::MissingFeedback(parent.id))?;
        examples.push_str(&format!("Example {}\n{}\n{}\n", i + 1, parent.code, feedback));
    }
    let typing = if store.config().typing_flag {
        TYPED_OBJECTS
    } else {
        UNTYPED_OBJECTS
    };
    // Examples go in last so candidate code cannot inject markers.
    Ok(template
        .replace(DOMAIN, store.domain_text())
        .replace(TYPING, typing)
        .replace(EXAMPLES, &examples))
}

fn fmt_score(score: Option<f64>) -> String {
    match score {
        Some(s) => format!("{s:?}"),
        None => "unknown".into(),
    }
}

pub fn feedback_message(candidate: &Candidate) -> String {
    if let Some(error) = &candidate.error {
        format!("System: The code did not work. Error: {error}. Can you fix this?")
    } else if let Some(failure) = &candidate.plan_failure_error {
        format!(
            "System: The code failed to solve some problems. Error: {failure}. Score {}. Can you fix this?",
            fmt_score(candidate.score)
        )
    } else {
        format!("System: The code worked. Score: {}.", fmt_score(candidate.score))
    }
}

pub fn add_feedback(mut candidate: Candidate) -> Candidate {
    candidate.feedback_message = Some(feedback_message(&candidate));
    candidate
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolution::EvolutionConfig;

    fn parent(id: u64, code: &str) -> Candidate {
        let mut c = Candidate::new(id, code);
        c.score = Some(6.0);
        add_feedback(c)
    }

    fn store(typing: bool, template: &str) -> PopulationStore {
        let config = EvolutionConfig {
            typing_flag: typing,
            ..EvolutionConfig::default()
        };
        PopulationStore::new(config, "(define (domain d))", template).unwrap()
    }

    #[test]
    fn feedback_templates() {
        let mut c = Candidate::new(0, "x");
        c.score = Some(6.0);
        assert_eq!(feedback_message(&c), "System: The code worked. Score: 6.0.");
        c.plan_failure_error = Some("goal not reached: unsatisfied (at b1 rb)".into());
        c.score = Some(3337.5);
        assert_eq!(
            feedback_message(&c),
            "System: The code failed to solve some problems. Error: goal not reached: unsatisfied (at b1 rb). Score 3337.5. Can you fix this?"
        );
        c.error = Some("missing get_plan".into());
        assert_eq!(
            feedback_message(&c),
            "System: The code did not work. Error: missing get_plan. Can you fix this?"
        );
    }

    #[test]
    fn examples_are_numbered_in_parent_order() {
        let s = store(true, DEFAULT_TEMPLATE);
        let p = build_prompt(&s, &[parent(0, "AAA"), parent(1, "BBB")]).unwrap();
        let one = p.find("Example 1\nAAA\n").unwrap();
        let two = p.find("Example 2\nBBB\n").unwrap();
        assert!(one < two);
        assert!(p.contains(TYPED_OBJECTS));
        assert!(p.contains("(define (domain d))"));
        assert!(!p.contains("@@"));
        let p = build_prompt(&s, &[parent(0, "AAA")]).unwrap();
        assert_eq!(p.matches("Example ").count(), 1);
    }

    #[test]
    fn untyped_phrase() {
        let s = store(false, DEFAULT_TEMPLATE);
        let p = build_prompt(&s, &[parent(0, "AAA")]).unwrap();
        assert!(p.contains(UNTYPED_OBJECTS));
        assert!(!p.contains(TYPED_OBJECTS));
    }

    #[test]
    fn missing_marker_and_feedback() {
        let s = store(true, "@@domain@@ @@typing@@");
        assert!(matches!(
            build_prompt(&s, &[parent(0, "A")]),
            Err(EvolutionError::MissingPlaceholder("@@examples@@"))
        ));
        let s = store(true, DEFAULT_TEMPLATE);
        assert!(matches!(
            build_prompt(&s, &[Candidate::new(4, "A")]),
            Err(EvolutionError::MissingFeedback(4))
        ));
    }
}
