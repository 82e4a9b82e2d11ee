use super::{ActionSchema, Domain, GroundAction, GroundAtom, PddlError, Problem, SchemaAtom, State};

/// Ground preconditions and effects of one action instance.
#[derive(Debug, Clone, PartialEq)]
pub struct Instantiated {
    pub pre_pos: Vec<GroundAtom>,
    pub pre_neg: Vec<GroundAtom>,
    pub add: Vec<GroundAtom>,
    pub del: Vec<GroundAtom>,
    pub cost: f64,
}

fn bind(atoms: &[SchemaAtom], args: &[String]) -> Vec<GroundAtom> {
    atoms
        .iter()
        .map(|a| GroundAtom {
            predicate: a.predicate.clone(),
            args: a.params.iter().map(|&i| args[i].clone()).collect(),
        })
        .collect()
}

impl Instantiated {
    pub fn of(schema: &ActionSchema, args: &[String]) -> Result<Self, PddlError> {
        if schema.params.len() != args.len() {
            return Err(PddlError::Arity {
                name: schema.name.clone(),
                expected: schema.params.len(),
                found: args.len(),
            });
        }
        Ok(Self {
            pre_pos: bind(&schema.pre_pos, args),
            pre_neg: bind(&schema.pre_neg, args),
            add: bind(&schema.eff_add, args),
            del: bind(&schema.eff_del, args),
            cost: schema.cost,
        })
    }

    pub fn applicable_in(&self, state: &State) -> bool {
        self.pre_pos.iter().all(|a| state.contains(a)) && !self.pre_neg.iter().any(|a| state.contains(a))
    }

    /// `(state \ del) ∪ add`.
    pub fn successor(&self, state: &State) -> State {
        let mut next = state.clone();
        for a in &self.del {
            next.atoms.remove(a);
        }
        for a in &self.add {
            next.atoms.insert(a.clone());
        }
        next
    }
}

impl Domain {
    pub fn instantiate(&self, action: &GroundAction) -> Result<Instantiated, PddlError> {
        let schema = self
            .action(&action.name)
            .ok_or_else(|| PddlError::UnknownAction(action.name.clone()))?;
        Instantiated::of(schema, &action.args)
    }
}

pub fn applicable(state: &State, action: &GroundAction, domain: &Domain) -> Result<bool, PddlError> {
    Ok(domain.instantiate(action)?.applicable_in(state))
}

pub fn apply(state: &State, action: &GroundAction, domain: &Domain) -> Result<State, PddlError> {
    let inst = domain.instantiate(action)?;
    if !inst.applicable_in(state) {
        return Err(PddlError::InapplicableAction(action.to_string()));
    }
    Ok(inst.successor(state))
}

pub fn goal_satisfied(problem: &Problem, state: &State) -> bool {
    problem.goal_pos.iter().all(|a| state.contains(a)) && !problem.goal_neg.iter().any(|a| state.contains(a))
}

/// Every well-typed binding of every schema, sorted lexicographically by
/// action name and then argument list.
pub fn ground_actions(domain: &Domain, problem: &Problem) -> Vec<GroundAction> {
    let mut out = Vec::new();
    for schema in &domain.actions {
        let candidates: Vec<Vec<&str>> = schema
            .params
            .iter()
            .map(|p| problem.objects_of_type(domain, &p.type_name).collect())
            .collect();
        if candidates.iter().any(Vec::is_empty) {
            continue;
        }
        // Odometer over the per-parameter candidate lists.
        let mut idx = vec![0usize; candidates.len()];
        'bindings: loop {
            out.push(GroundAction {
                name: schema.name.clone(),
                args: idx.iter().zip(&candidates).map(|(&i, c)| c[i].to_string()).collect(),
            });
            for k in (0..idx.len()).rev() {
                idx[k] += 1;
                if idx[k] < candidates[k].len() {
                    continue 'bindings;
                }
                idx[k] = 0;
            }
            break;
        }
    }
    out.sort();
    out
}
