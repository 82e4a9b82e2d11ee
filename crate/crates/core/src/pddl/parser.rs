use std::collections::{BTreeMap, BTreeSet};

use super::sexpr::{parse_one, syntax, Pos, SExpr};
use super::{
    ActionSchema, Domain, GroundAtom, PddlError, PredicateSchema, Problem, SchemaAtom, TypedVar,
    ROOT_TYPE,
};

const ACCEPTED_REQUIREMENTS: &[&str] = &[
    ":strips",
    ":typing",
    ":negative-preconditions",
    ":action-costs",
];

const UNSUPPORTED_CONDITIONS: &[&str] = &[
    "or", "imply", "exists", "forall", "when", "=", "<", ">", "<=", ">=", "preference",
];

fn unsupported(feature: impl Into<String>, pos: Pos) -> PddlError {
    PddlError::Unsupported {
        feature: feature.into(),
        line: pos.line,
        col: pos.col,
    }
}

/// Split `(define (<kind> NAME) sections...)` into its name and sections.
fn define_block<'a>(root: &'a SExpr, kind: &str) -> Result<(String, &'a [SExpr]), PddlError> {
    let items = root.expect_list("(define ...)")?;
    match items.first().and_then(SExpr::as_atom) {
        Some("define") => {}
        _ => return Err(syntax(root.pos(), "expected (define ...)")),
    }
    let header = items
        .get(1)
        .ok_or_else(|| syntax(root.pos(), format!("missing ({kind} NAME)")))?;
    let h = header.expect_list(&format!("({kind} NAME)"))?;
    match (h.first().and_then(SExpr::as_atom), h.get(1).and_then(SExpr::as_atom), h.len()) {
        (Some(k), Some(name), 2) if k == kind => Ok((name.to_string(), &items[2..])),
        _ => Err(syntax(header.pos(), format!("expected ({kind} NAME)"))),
    }
}

/// Parse `a b - t c` style lists. Names without a trailing type get `object`.
fn typed_list(items: &[SExpr]) -> Result<Vec<(String, String, Pos)>, PddlError> {
    let mut out = Vec::new();
    let mut pending: Vec<(String, Pos)> = Vec::new();
    let mut i = 0;
    while i < items.len() {
        let item = &items[i];
        let tok = item.expect_atom("name")?;
        if tok == "-" {
            let ty = items
                .get(i + 1)
                .ok_or_else(|| syntax(item.pos(), "missing type after '-'"))?;
            if ty.head() == Some("either") {
                return Err(unsupported("either", ty.pos()));
            }
            let ty = ty.expect_atom("type name")?;
            if pending.is_empty() {
                return Err(syntax(item.pos(), "type annotation without names"));
            }
            out.extend(pending.drain(..).map(|(n, p)| (n, ty.to_string(), p)));
            i += 2;
        } else {
            pending.push((tok.to_string(), item.pos()));
            i += 1;
        }
    }
    out.extend(pending.into_iter().map(|(n, p)| (n, ROOT_TYPE.to_string(), p)));
    Ok(out)
}

fn check_requirements(items: &[SExpr]) -> Result<(), PddlError> {
    for r in items {
        let r = r.expect_atom("requirement")?;
        if !ACCEPTED_REQUIREMENTS.contains(&r) {
            return Err(PddlError::UnsupportedRequirement(r.to_string()));
        }
    }
    Ok(())
}

pub fn parse_domain(text: &str) -> Result<Domain, PddlError> {
    let root = parse_one(text)?;
    let (name, sections) = define_block(&root, "domain")?;

    let mut types: BTreeMap<String, String> = BTreeMap::new();
    let mut predicates: Vec<PredicateSchema> = Vec::new();
    let mut action_exprs: Vec<&SExpr> = Vec::new();

    for section in sections {
        let items = section.expect_list("domain section")?;
        let key = items
            .first()
            .and_then(SExpr::as_atom)
            .ok_or_else(|| syntax(section.pos(), "expected section keyword"))?;
        match key {
            ":requirements" => check_requirements(&items[1..])?,
            ":types" => {
                for (t, parent, _) in typed_list(&items[1..])? {
                    if t == ROOT_TYPE {
                        continue;
                    }
                    if let Some(prev) = types.insert(t.clone(), parent.clone()) {
                        if prev != parent {
                            return Err(PddlError::Duplicate { kind: "type", name: t });
                        }
                    }
                }
            }
            ":predicates" => {
                for p in &items[1..] {
                    let l = p.expect_list("predicate declaration")?;
                    let pname = l
                        .first()
                        .and_then(SExpr::as_atom)
                        .ok_or_else(|| syntax(p.pos(), "expected predicate name"))?;
                    let args = typed_list(&l[1..])?;
                    if predicates.iter().any(|q| q.name == pname) {
                        return Err(PddlError::Duplicate {
                            kind: "predicate",
                            name: pname.to_string(),
                        });
                    }
                    predicates.push(PredicateSchema {
                        name: pname.to_string(),
                        arg_types: args.into_iter().map(|(_, t, _)| t).collect(),
                    });
                }
            }
            ":functions" => {
                // Only the `total-cost` fluent of :action-costs is understood.
                let fs = typed_list_of_lists(&items[1..])?;
                for (f, pos) in fs {
                    if f != "total-cost" {
                        return Err(unsupported(format!("function {f}"), pos));
                    }
                }
            }
            ":action" => action_exprs.push(section),
            other => return Err(unsupported(other, section.pos())),
        }
    }

    for (t, parent) in &types {
        if parent != ROOT_TYPE && !types.contains_key(parent) {
            return Err(PddlError::UnknownType(parent.clone()));
        }
        // Single-parent chains must terminate at the root.
        let mut seen = BTreeSet::new();
        let mut cur = t.as_str();
        while let Some(p) = types.get(cur) {
            if !seen.insert(cur) {
                return Err(PddlError::TypeCycle(t.clone()));
            }
            cur = p;
        }
    }

    let mut domain = Domain {
        name,
        types,
        predicates,
        actions: Vec::new(),
    };
    for p in &domain.predicates {
        for t in &p.arg_types {
            if !domain.type_exists(t) {
                return Err(PddlError::UnknownType(t.clone()));
            }
        }
    }
    for expr in action_exprs {
        let action = parse_action(expr, &domain)?;
        if domain.action(&action.name).is_some() {
            return Err(PddlError::Duplicate {
                kind: "action",
                name: action.name,
            });
        }
        domain.actions.push(action);
    }
    Ok(domain)
}

/// `(:functions (total-cost) - number)` style declarations.
fn typed_list_of_lists(items: &[SExpr]) -> Result<Vec<(String, Pos)>, PddlError> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < items.len() {
        match &items[i] {
            SExpr::Atom(a, _) if a == "-" => i += 2,
            SExpr::List(l, pos) => {
                let name = l
                    .first()
                    .and_then(SExpr::as_atom)
                    .ok_or_else(|| syntax(*pos, "expected function name"))?;
                out.push((name.to_string(), *pos));
                i += 1;
            }
            other => return Err(syntax(other.pos(), "expected function declaration")),
        }
    }
    Ok(out)
}

fn parse_action(expr: &SExpr, domain: &Domain) -> Result<ActionSchema, PddlError> {
    let items = expr.expect_list("action")?;
    let name = items
        .get(1)
        .ok_or_else(|| syntax(expr.pos(), "missing action name"))?
        .expect_atom("action name")?
        .to_string();

    let mut params: Vec<TypedVar> = Vec::new();
    let mut precondition: Option<&SExpr> = None;
    let mut effect: Option<&SExpr> = None;
    let mut rest = items[2..].iter();
    while let Some(key) = rest.next() {
        let k = key.expect_atom("action keyword")?;
        let value = rest
            .next()
            .ok_or_else(|| syntax(key.pos(), format!("missing value for {k}")))?;
        match k {
            ":parameters" => {
                for (v, t, pos) in typed_list(value.expect_list("parameter list")?)? {
                    if !v.starts_with('?') {
                        return Err(syntax(pos, format!("parameter {v} must start with '?'")));
                    }
                    if !domain.type_exists(&t) {
                        return Err(PddlError::UnknownType(t));
                    }
                    if params.iter().any(|p| p.name == v) {
                        return Err(PddlError::Duplicate {
                            kind: "parameter",
                            name: v,
                        });
                    }
                    params.push(TypedVar { name: v, type_name: t });
                }
            }
            ":precondition" => precondition = Some(value),
            ":effect" => effect = Some(value),
            other => return Err(unsupported(other, key.pos())),
        }
    }

    let mut action = ActionSchema {
        name,
        params,
        pre_pos: Vec::new(),
        pre_neg: Vec::new(),
        eff_add: Vec::new(),
        eff_del: Vec::new(),
        cost: 1.0,
    };
    if let Some(pre) = precondition {
        let (mut pos, mut neg) = (Vec::new(), Vec::new());
        collect_condition(pre, &mut |positive, atom| {
            let a = schema_atom(atom, &action, domain)?;
            if positive {
                pos.push(a)
            } else {
                neg.push(a)
            }
            Ok(())
        })?;
        action.pre_pos = pos;
        action.pre_neg = neg;
    }
    if let Some(eff) = effect {
        let mut cost: Option<f64> = None;
        let (mut add, mut del) = (Vec::new(), Vec::new());
        collect_effect(eff, &action, domain, &mut add, &mut del, &mut cost)?;
        action.eff_add = add;
        action.eff_del = del;
        if let Some(c) = cost {
            action.cost = c;
        }
    }
    Ok(action)
}

/// Walk a conjunction of literals, calling `sink(positive, atom_expr)` per literal.
fn collect_condition(
    expr: &SExpr,
    sink: &mut dyn FnMut(bool, &SExpr) -> Result<(), PddlError>,
) -> Result<(), PddlError> {
    let items = expr.expect_list("condition")?;
    match expr.head() {
        None if items.is_empty() => Ok(()),
        Some("and") => {
            for c in &items[1..] {
                collect_condition(c, sink)?;
            }
            Ok(())
        }
        Some("not") => {
            let inner = match items {
                [_, inner] => inner,
                _ => return Err(syntax(expr.pos(), "(not ...) takes one argument")),
            };
            match inner.head() {
                Some(h) if h == "and" || h == "not" || UNSUPPORTED_CONDITIONS.contains(&h) => {
                    Err(unsupported(format!("not {h}"), inner.pos()))
                }
                _ => sink(false, inner),
            }
        }
        Some(h) if UNSUPPORTED_CONDITIONS.contains(&h) => Err(unsupported(h, expr.pos())),
        Some(_) => sink(true, expr),
        None => Err(syntax(expr.pos(), "expected literal")),
    }
}

fn collect_effect(
    expr: &SExpr,
    action: &ActionSchema,
    domain: &Domain,
    add: &mut Vec<SchemaAtom>,
    del: &mut Vec<SchemaAtom>,
    cost: &mut Option<f64>,
) -> Result<(), PddlError> {
    let items = expr.expect_list("effect")?;
    match expr.head() {
        None if items.is_empty() => Ok(()),
        Some("and") => {
            for e in &items[1..] {
                collect_effect(e, action, domain, add, del, cost)?;
            }
            Ok(())
        }
        Some("not") => match items {
            [_, inner] if inner.head().is_some_and(|h| h != "and" && h != "not") => {
                del.push(schema_atom(inner, action, domain)?);
                Ok(())
            }
            _ => Err(syntax(expr.pos(), "(not ...) must wrap a single atom")),
        },
        Some("increase") => {
            let value = match items {
                [_, f, v] if f.head() == Some("total-cost") && f.as_list().map(<[_]>::len) == Some(1) => v,
                _ => return Err(unsupported("increase on a fluent other than total-cost", expr.pos())),
            };
            let n: f64 = value
                .as_atom()
                .and_then(|s| s.parse().ok())
                .filter(|n: &f64| n.is_finite() && *n >= 0.0)
                .ok_or_else(|| unsupported("non-constant action cost", value.pos()))?;
            if cost.replace(n).is_some() {
                return Err(unsupported("multiple cost increases", expr.pos()));
            }
            Ok(())
        }
        Some(h) if matches!(h, "when" | "forall" | "decrease" | "assign" | "scale-up" | "scale-down") => {
            Err(unsupported(h, expr.pos()))
        }
        Some(_) => {
            add.push(schema_atom(expr, action, domain)?);
            Ok(())
        }
        None => Err(syntax(expr.pos(), "expected effect")),
    }
}

fn schema_atom(expr: &SExpr, action: &ActionSchema, domain: &Domain) -> Result<SchemaAtom, PddlError> {
    let items = expr.expect_list("atom")?;
    let pred = items
        .first()
        .ok_or_else(|| syntax(expr.pos(), "empty atom"))?
        .expect_atom("predicate name")?;
    let schema = domain
        .predicate(pred)
        .ok_or_else(|| PddlError::UnknownPredicate(pred.to_string()))?;
    if schema.arity() != items.len() - 1 {
        return Err(PddlError::Arity {
            name: pred.to_string(),
            expected: schema.arity(),
            found: items.len() - 1,
        });
    }
    let mut params = Vec::with_capacity(schema.arity());
    for arg in &items[1..] {
        let a = arg.expect_atom("argument")?;
        if !a.starts_with('?') {
            return Err(unsupported(format!("constant {a} in action schema"), arg.pos()));
        }
        let idx = action
            .params
            .iter()
            .position(|p| p.name == a)
            .ok_or_else(|| PddlError::UnboundVariable {
                action: action.name.clone(),
                variable: a.to_string(),
            })?;
        params.push(idx);
    }
    Ok(SchemaAtom {
        predicate: pred.to_string(),
        params,
    })
}

pub fn parse_problem(text: &str, domain: &Domain) -> Result<Problem, PddlError> {
    let root = parse_one(text)?;
    let (name, sections) = define_block(&root, "problem")?;

    let mut problem = Problem {
        name,
        domain_name: String::new(),
        objects: Vec::new(),
        init: BTreeSet::new(),
        goal_pos: BTreeSet::new(),
        goal_neg: BTreeSet::new(),
    };
    let mut init_expr: Option<&[SExpr]> = None;
    let mut goal_expr: Option<&SExpr> = None;

    for section in sections {
        let items = section.expect_list("problem section")?;
        let key = items
            .first()
            .and_then(SExpr::as_atom)
            .ok_or_else(|| syntax(section.pos(), "expected section keyword"))?;
        match key {
            ":domain" => {
                let d = items
                    .get(1)
                    .ok_or_else(|| syntax(section.pos(), "missing domain name"))?
                    .expect_atom("domain name")?;
                if d != domain.name {
                    return Err(PddlError::DomainMismatch {
                        expected: domain.name.clone(),
                        found: d.to_string(),
                    });
                }
                problem.domain_name = d.to_string();
            }
            ":requirements" => check_requirements(&items[1..])?,
            ":objects" => {
                for (o, t, _) in typed_list(&items[1..])? {
                    if !domain.type_exists(&t) {
                        return Err(PddlError::UnknownType(t));
                    }
                    if problem.object_type(&o).is_some() {
                        return Err(PddlError::Duplicate { kind: "object", name: o });
                    }
                    problem.objects.push((o, t));
                }
            }
            ":init" => init_expr = Some(&items[1..]),
            ":goal" => {
                goal_expr = Some(
                    items
                        .get(1)
                        .ok_or_else(|| syntax(section.pos(), "missing goal"))?,
                )
            }
            // Plan length is the only metric; declarations are accepted and ignored.
            ":metric" => {}
            other => return Err(unsupported(other, section.pos())),
        }
    }
    if problem.domain_name.is_empty() {
        return Err(syntax(root.pos(), "missing (:domain NAME)"));
    }

    for fact in init_expr.unwrap_or(&[]) {
        match fact.head() {
            // `(= (total-cost) 0)` initialisation under :action-costs.
            Some("=") => {
                let ok = fact
                    .as_list()
                    .and_then(|l| l.get(1))
                    .is_some_and(|f| f.head() == Some("total-cost"));
                if !ok {
                    return Err(unsupported("numeric fluent", fact.pos()));
                }
            }
            Some("not") => return Err(unsupported("negative initial fact", fact.pos())),
            _ => {
                let atom = ground_atom(fact, domain, &problem)?;
                problem.init.insert(atom);
            }
        }
    }
    if let Some(goal) = goal_expr {
        let (mut pos, mut neg) = (BTreeSet::new(), BTreeSet::new());
        collect_condition(goal, &mut |positive, atom| {
            let a = ground_atom(atom, domain, &problem)?;
            if positive {
                pos.insert(a);
            } else {
                neg.insert(a);
            }
            Ok(())
        })?;
        problem.goal_pos = pos;
        problem.goal_neg = neg;
    }
    Ok(problem)
}

fn ground_atom(expr: &SExpr, domain: &Domain, problem: &Problem) -> Result<GroundAtom, PddlError> {
    let items = expr.expect_list("ground atom")?;
    let pred = items
        .first()
        .ok_or_else(|| syntax(expr.pos(), "empty atom"))?
        .expect_atom("predicate name")?;
    let schema = domain
        .predicate(pred)
        .ok_or_else(|| PddlError::UnknownPredicate(pred.to_string()))?;
    if schema.arity() != items.len() - 1 {
        return Err(PddlError::Arity {
            name: pred.to_string(),
            expected: schema.arity(),
            found: items.len() - 1,
        });
    }
    let mut args = Vec::with_capacity(schema.arity());
    for (arg, expected) in items[1..].iter().zip(&schema.arg_types) {
        let o = arg.expect_atom("object name")?;
        let t = problem
            .object_type(o)
            .ok_or_else(|| PddlError::UnknownObject(o.to_string()))?;
        if !domain.is_subtype(t, expected) {
            return Err(PddlError::TypeMismatch {
                object: o.to_string(),
                expected: expected.clone(),
                found: t.to_string(),
            });
        }
        args.push(o.to_string());
    }
    Ok(GroundAtom {
        predicate: pred.to_string(),
        args,
    })
}
