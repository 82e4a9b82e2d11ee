use std::collections::BTreeSet;

use geneplan_core::benchmark::{
    evaluate_methods, generate_instances, BenchError, Family, MethodRun, StoredPlanner, TaskRecord,
};
use geneplan_core::pddl::parse_problem;
use geneplan_core::search::{solve_optimal, SearchBudget};

#[test]
fn generation_is_deterministic_distinct_and_solvable() {
    for family in Family::ALL {
        let a = generate_instances(family, 3, 6, 11).unwrap();
        let b = generate_instances(family, 3, 6, 11).unwrap();
        assert_eq!(a, b);
        let texts: BTreeSet<_> = a.iter().map(|i| &i.text).collect();
        assert_eq!(texts.len(), 6, "{family}");
        let domain = family.domain();
        for inst in &a {
            let problem = parse_problem(&inst.text, &domain).unwrap();
            assert!(solve_optimal(&problem, &domain, SearchBudget::default()).unwrap().plan().is_some());
        }
        assert_ne!(a, generate_instances(family, 3, 6, 12).unwrap());
    }
}

#[test]
fn family_names_round_trip() {
    for family in Family::ALL {
        assert_eq!(family.to_string().parse::<Family>().unwrap(), family);
    }
    assert!(matches!("gripper".parse::<Family>(), Err(BenchError::UnknownFamily(_))));
    assert!(matches!(generate_instances(Family::Ferry, 0, 1, 0), Err(BenchError::InvalidSize(0))));
}

fn run(method: &str, costs: &[(&str, &str, Option<f64>)]) -> MethodRun {
    MethodRun {
        method: method.into(),
        tasks: costs
            .iter()
            .map(|(d, t, c)| TaskRecord {
                domain: d.to_string(),
                task: t.to_string(),
                cost: *c,
                runtime_seconds: 0.5,
            })
            .collect(),
        gen_time_seconds: None,
        dollar_cost: 0.0,
    }
}

#[test]
fn table_covers_each_domain_and_method() {
    let runs = [
        run("search", &[("ferry", "p1", Some(8.0)), ("ferry", "p2", Some(10.0)), ("stack", "p1", None)]),
        run("evo", &[("ferry", "p1", Some(8.0)), ("ferry", "p2", Some(12.0)), ("stack", "p1", Some(6.0))]),
    ];
    let table = evaluate_methods(&runs).unwrap();
    assert_eq!(table.rows.len(), 4);
    let evo = table.row("evo", "ferry").unwrap();
    assert!((evo.mean_sat - (1.0 + 10.0 / 12.0) / 2.0).abs() < 1e-12);
    assert_eq!(table.row("search", "stack").unwrap().percent_solved, 0.0);
    let text = table.render_text();
    assert!(text.contains("evo") && text.contains("stack"));
    let json = serde_json::to_string(&table).unwrap();
    assert_eq!(serde_json::from_str::<geneplan_core::benchmark::SatTable>(&json).unwrap(), table);
}

#[test]
fn mismatched_task_sets_are_refused() {
    let runs = [
        run("a", &[("d", "p1", Some(1.0))]),
        run("b", &[("d", "p2", Some(1.0))]),
    ];
    assert!(matches!(evaluate_methods(&runs), Err(BenchError::TaskSetMismatch(_))));
}

#[test]
fn stored_planner_round_trips() {
    let dir = std::env::temp_dir().join(format!("geneplan-artifact-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("planner.json");
    let planner = StoredPlanner {
        source: "def get_plan(objects, init, goal):\n    return []\n".into(),
        domain_name: "ferry".into(),
        config_echo: serde_json::json!({"population_size": 10}),
        fitness: Some(7.5),
        created_at: "2026-01-01T00:00:00Z".into(),
    };
    planner.save(&path).unwrap();
    assert_eq!(StoredPlanner::load(&path).unwrap(), planner);
    assert!(matches!(StoredPlanner::load(&dir.join("missing.json")), Err(BenchError::Io(_))));
    std::fs::remove_dir_all(&dir).unwrap();
}
