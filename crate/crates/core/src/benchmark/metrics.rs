use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::BenchError;

/// c*/c_m, with an unsolved task scoring 0 and an empty optimal plan
/// matched by an empty plan scoring 1.
pub fn sat_score(best_cost: f64, method_cost: Option<f64>) -> f64 {
    match method_cost {
        None => 0.0,
        Some(c) if c == 0.0 && best_cost == 0.0 => 1.0,
        Some(c) if c <= 0.0 => 0.0,
        Some(c) => (best_cost / c).clamp(0.0, 1.0),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Breakeven {
    Instances(f64),
    NotApplicable,
}

/// Number of instances after which a one-off synthesis cost is repaid by
/// faster per-instance solving.
pub fn breakeven_instances(gen_time: f64, t_fd: f64, t_evo: f64) -> Breakeven {
    if t_fd > t_evo {
        Breakeven::Instances(gen_time / (t_fd - t_evo))
    } else {
        Breakeven::NotApplicable
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskRecord {
    pub domain: String,
    pub task: String,
    /// None when the method did not produce a valid plan.
    pub cost: Option<f64>,
    pub runtime_seconds: f64,
}

/// One method's results over a task set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodRun {
    pub method: String,
    pub tasks: Vec<TaskRecord>,
    /// Synthesis time, for methods that have one.
    #[serde(default)]
    pub gen_time_seconds: Option<f64>,
    #[serde(default)]
    pub dollar_cost: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SatRow {
    pub method: String,
    pub domain: String,
    pub tasks: usize,
    pub mean_sat: f64,
    /// Sample standard deviation over √n.
    pub stderr: f64,
    pub percent_solved: f64,
    pub mean_runtime_seconds: f64,
    pub gen_time_seconds: Option<f64>,
    pub dollar_cost: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SatTable {
    /// Sorted by domain, then method.
    pub rows: Vec<SatRow>,
    /// Per-task SAT values keyed by (method, domain, task).
    pub per_task: BTreeMap<String, BTreeMap<String, BTreeMap<String, f64>>>,
}

impl SatTable {
    pub fn row(&self, method: &str, domain: &str) -> Option<&SatRow> {
        self.rows.iter().find(|r| r.method == method && r.domain == domain)
    }

    pub fn render_text(&self) -> String {
        let header = ["domain", "method", "tasks", "SAT", "stderr", "%solved", "runtime(s)"];
        let body: Vec<[String; 7]> = self
            .rows
            .iter()
            .map(|r| {
                [
                    r.domain.clone(),
                    r.method.clone(),
                    r.tasks.to_string(),
                    format!("{:.3}", r.mean_sat),
                    format!("{:.3}", r.stderr),
                    format!("{:.1}", r.percent_solved),
                    format!("{:.3}", r.mean_runtime_seconds),
                ]
            })
            .collect();
        let mut widths = header.map(str::len);
        for row in &body {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.len());
            }
        }
        let mut out = String::new();
        let line = |out: &mut String, cells: &[String]| {
            let parts: Vec<String> = cells
                .iter()
                .zip(widths)
                .enumerate()
                .map(|(i, (c, w))| if i < 2 { format!("{c:<w$}") } else { format!("{c:>w$}") })
                .collect();
            let _ = writeln!(out, "{}", parts.join("  ").trim_end());
        };
        line(&mut out, &header.map(String::from));
        for row in &body {
            line(&mut out, row);
        }
        out
    }
}

fn mean_and_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (0.0, 0.0);
    }
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt() / n.sqrt())
}

fn task_keys(run: &MethodRun) -> BTreeSet<(String, String)> {
    run.tasks.iter().map(|t| (t.domain.clone(), t.task.clone())).collect()
}

/// SAT table over methods that all cover the same tasks. The reference
/// cost of a task is the cheapest plan any method found for it.
pub fn evaluate_methods(runs: &[MethodRun]) -> Result<SatTable, BenchError> {
    let Some(first) = runs.first() else {
        return Ok(SatTable {
            rows: Vec::new(),
            per_task: BTreeMap::new(),
        });
    };
    let keys = task_keys(first);
    for run in runs {
        if run.tasks.len() != keys.len() || task_keys(run) != keys {
            return Err(BenchError::TaskSetMismatch(format!(
                "method '{}' does not cover the same tasks as '{}'",
                run.method, first.method
            )));
        }
    }

    let mut best: BTreeMap<(&str, &str), f64> = BTreeMap::new();
    for run in runs {
        for t in &run.tasks {
            if let Some(c) = t.cost {
                let slot = best.entry((&t.domain, &t.task)).or_insert(f64::INFINITY);
                *slot = slot.min(c);
            }
        }
    }

    let mut rows = Vec::new();
    let mut per_task: BTreeMap<String, BTreeMap<String, BTreeMap<String, f64>>> = BTreeMap::new();
    for run in runs {
        let mut by_domain: BTreeMap<&str, Vec<&TaskRecord>> = BTreeMap::new();
        for t in &run.tasks {
            by_domain.entry(&t.domain).or_default().push(t);
        }
        for (domain, tasks) in by_domain {
            let sats: Vec<f64> = tasks
                .iter()
                .map(|t| {
                    let c_star = best.get(&(t.domain.as_str(), t.task.as_str())).copied().unwrap_or(f64::INFINITY);
                    sat_score(c_star, t.cost)
                })
                .collect();
            let cell = per_task
                .entry(run.method.clone())
                .or_default()
                .entry(domain.to_string())
                .or_default();
            for (t, s) in tasks.iter().zip(&sats) {
                cell.insert(t.task.clone(), *s);
            }
            let (mean_sat, stderr) = mean_and_stderr(&sats);
            let solved = tasks.iter().filter(|t| t.cost.is_some()).count();
            rows.push(SatRow {
                method: run.method.clone(),
                domain: domain.to_string(),
                tasks: tasks.len(),
                mean_sat,
                stderr,
                percent_solved: 100.0 * solved as f64 / tasks.len() as f64,
                mean_runtime_seconds: tasks.iter().map(|t| t.runtime_seconds).sum::<f64>() / tasks.len() as f64,
                gen_time_seconds: run.gen_time_seconds,
                dollar_cost: run.dollar_cost,
            });
        }
    }
    rows.sort_by(|a, b| (&a.domain, &a.method).cmp(&(&b.domain, &b.method)));
    Ok(SatTable { rows, per_task })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(method: &str, costs: &[Option<f64>]) -> MethodRun {
        MethodRun {
            method: method.into(),
            tasks: costs
                .iter()
                .enumerate()
                .map(|(i, c)| TaskRecord {
                    domain: "d".into(),
                    task: format!("t{i}"),
                    cost: *c,
                    runtime_seconds: 1.0,
                })
                .collect(),
            gen_time_seconds: None,
            dollar_cost: 0.0,
        }
    }

    #[test]
    fn sat_examples() {
        assert_eq!(sat_score(10.0, Some(20.0)), 0.5);
        assert_eq!(sat_score(10.0, None), 0.0);
        assert_eq!(sat_score(7.0, Some(7.0)), 1.0);
        assert_eq!(sat_score(0.0, Some(0.0)), 1.0);
    }

    #[test]
    fn breakeven_examples() {
        let Breakeven::Instances(k) = breakeven_instances(653.72, 394.48, 0.15) else {
            panic!("expected a count")
        };
        assert!((k - 1.66).abs() < 0.01);
        assert_eq!(breakeven_instances(10.0, 1.0, 1.0), Breakeven::NotApplicable);
        assert_eq!(breakeven_instances(10.0, 1.0, 2.0), Breakeven::NotApplicable);
    }

    #[test]
    fn single_method_scores_one() {
        let t = evaluate_methods(&[run("a", &[Some(3.0), Some(4.0)])]).unwrap();
        let r = t.row("a", "d").unwrap();
        assert_eq!((r.mean_sat, r.stderr, r.percent_solved), (1.0, 0.0, 100.0));
    }

    #[test]
    fn two_methods_one_task() {
        let t = evaluate_methods(&[run("a", &[Some(10.0)]), run("b", &[Some(20.0)])]).unwrap();
        assert_eq!(t.row("a", "d").unwrap().mean_sat, 1.0);
        assert_eq!(t.row("b", "d").unwrap().mean_sat, 0.5);
    }

    #[test]
    fn mismatched_task_sets() {
        let err = evaluate_methods(&[run("a", &[Some(1.0)]), run("b", &[Some(1.0), None])]).unwrap_err();
        assert!(matches!(err, BenchError::TaskSetMismatch(_)));
    }

    #[test]
    fn text_report_has_one_line_per_row() {
        let t = evaluate_methods(&[run("a", &[Some(10.0)]), run("bb", &[None])]).unwrap();
        let text = t.render_text();
        assert_eq!(text.lines().count(), 3);
        assert!(text.lines().nth(2).unwrap().contains("0.000"));
    }
}
