use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use geneplan_core::benchmark::{
    breakeven_instances, evaluate_methods, generate_instances, Breakeven, Family, MethodRun, SatTable, StoredPlanner,
};
use geneplan_core::evolution::{EvolutionConfig, EvolutionError, FitnessConfig, RunLedger, Synthesis, TrainTask, DEFAULT_TEMPLATE};
use geneplan_core::llm::{Generator, RemoteGenerator};
use geneplan_core::pddl::{parse_domain, parse_plan, parse_problem, plan_cost, serialize_plan, validate_plan, Domain, Problem};
use geneplan_core::sandbox::{run_candidate, ExecutionOutcome};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::{list_files, Config};

/// How a command finished when it did not hit an I/O or config error.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success,
    ValidationFailed,
    SynthesisExhausted,
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn load_domain(path: &Path) -> Result<(Domain, String)> {
    let text = read(path)?;
    let domain = parse_domain(&text).with_context(|| format!("parsing domain {}", path.display()))?;
    Ok((domain, text))
}

fn load_problem(path: &Path, domain: &Domain) -> Result<Problem> {
    parse_problem(&read(path)?, domain).with_context(|| format!("parsing problem {}", path.display()))
}

#[derive(Debug, Clone, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GeneratorKind {
    Remote,
    Mock,
}

#[derive(Debug, Clone)]
pub struct SynthesizeArgs {
    pub domain: PathBuf,
    pub train_dir: PathBuf,
    pub out: PathBuf,
    pub generator: GeneratorKind,
    pub pool_dir: Option<PathBuf>,
    pub seed_planners: Vec<PathBuf>,
    pub evolution: EvolutionConfig,
    pub failure_score: Option<f64>,
    pub rng_seed: u64,
}

/// Ledger path written next to the planner artifact.
pub fn ledger_path(out: &Path) -> PathBuf {
    out.with_extension("ledger.json")
}

pub fn synthesize(args: &SynthesizeArgs, config: &Config) -> Result<Outcome> {
    let (domain, domain_text) = load_domain(&args.domain)?;
    let mut tasks = Vec::new();
    for path in list_files(&args.train_dir, "pddl")? {
        let id = path.file_stem().unwrap_or_default().to_string_lossy().into_owned();
        tasks.push(TrainTask {
            id,
            problem: load_problem(&path, &domain)?,
        });
    }
    if tasks.is_empty() {
        bail!("no .pddl training tasks in {}", args.train_dir.display());
    }
    let seeds = args.seed_planners.iter().map(|p| read(p)).collect::<Result<Vec<_>>>()?;
    let fitness = FitnessConfig {
        failure_value: args.failure_score.unwrap_or(config.fitness.failure_value),
        ..config.fitness.clone()
    };
    let generator: Box<dyn Generator> = match args.generator {
        GeneratorKind::Mock => Box::new(config.mock_generator(args.pool_dir.as_deref())?),
        GeneratorKind::Remote => Box::new(RemoteGenerator::from_env(config.llm.clone())?),
    };
    let executor = config.executor()?;
    let synthesis = Synthesis {
        config: args.evolution.clone(),
        fitness: fitness.clone(),
        domain: &domain,
        domain_text: &domain_text,
        tasks: &tasks,
        template: DEFAULT_TEMPLATE,
    };
    log::info!("synthesizing for domain {} from {} training tasks", domain.name, tasks.len());
    let mut rng = ChaCha8Rng::seed_from_u64(args.rng_seed);
    let ledger_out = ledger_path(&args.out);
    let result = match synthesis.run(generator.as_ref(), executor.as_ref(), &seeds, &mut rng) {
        Ok(r) => r,
        Err(EvolutionError::GeneratorExhausted { ledger }) => {
            write_ledger(&ledger_out, &ledger)?;
            eprintln!("generator exhausted; ledger written to {}", ledger_out.display());
            return Ok(Outcome::SynthesisExhausted);
        }
        Err(e) => return Err(e).context("synthesis failed"),
    };
    write_ledger(&ledger_out, &result.ledger)?;
    let planner = StoredPlanner {
        source: result.best.code.clone(),
        domain_name: domain.name.clone(),
        config_echo: serde_json::json!({
            "evolution": args.evolution,
            "fitness": fitness,
            "generator": args.generator,
            "rng_seed": args.rng_seed,
        }),
        fitness: result.best.score,
        created_at: chrono::Utc::now().to_rfc3339(),
    };
    planner.save(&args.out)?;
    println!(
        "best fitness {} after {} generations (${:.4}); planner written to {}",
        result.best.score.map_or("n/a".into(), |s| s.to_string()),
        result.ledger.generations.len(),
        result.ledger.dollar_cost,
        args.out.display()
    );
    Ok(Outcome::Success)
}

fn write_ledger(path: &Path, ledger: &RunLedger) -> Result<()> {
    write(path, &serde_json::to_string_pretty(ledger)?)
}

pub fn solve(planner: &Path, domain: &Path, problem: &Path, out_plan: Option<&Path>, config: &Config) -> Result<Outcome> {
    let stored = StoredPlanner::load(planner)?;
    let (domain, _) = load_domain(domain)?;
    if stored.domain_name != domain.name {
        log::warn!("planner was synthesized for domain {}, solving {}", stored.domain_name, domain.name);
    }
    let problem = load_problem(problem, &domain)?;
    let executor = config.executor()?;
    let text = match run_candidate(executor.as_ref(), &stored.source, &problem, config.evolution.typing_flag)? {
        ExecutionOutcome::Plan(text) => text,
        other => {
            eprintln!("planner failed: {other}");
            return Ok(Outcome::ValidationFailed);
        }
    };
    let plan = match parse_plan(&text, &problem, &domain) {
        Ok(plan) => plan,
        Err(e) => {
            eprintln!("planner returned a malformed plan: {e}");
            return Ok(Outcome::ValidationFailed);
        }
    };
    let verdict = validate_plan(&problem, &plan, &domain);
    let serialized = serialize_plan(&plan);
    match out_plan {
        Some(path) => write(path, &serialized)?,
        None => print!("{serialized}"),
    }
    if !verdict.is_valid() {
        eprintln!("plan is invalid: {}", verdict.reason);
        return Ok(Outcome::ValidationFailed);
    }
    eprintln!("valid plan, cost {}", plan_cost(&plan, &domain));
    Ok(Outcome::Success)
}

pub fn validate(domain: &Path, problem: &Path, plan: &Path) -> Result<Outcome> {
    let (domain, _) = load_domain(domain)?;
    let problem = load_problem(problem, &domain)?;
    let plan = match parse_plan(&read(plan)?, &problem, &domain) {
        Ok(plan) => plan,
        Err(e) => {
            println!("INVALID: {e}");
            return Ok(Outcome::ValidationFailed);
        }
    };
    let verdict = validate_plan(&problem, &plan, &domain);
    if verdict.is_valid() {
        println!("VALID: cost {}", plan_cost(&plan, &domain));
        Ok(Outcome::Success)
    } else {
        println!("INVALID: {}", verdict.reason);
        Ok(Outcome::ValidationFailed)
    }
}

pub fn gen_instances(family: Family, size: usize, count: usize, seed: u64, out_dir: &Path) -> Result<Outcome> {
    let instances = generate_instances(family, size, count, seed)?;
    write(&out_dir.join("domain.pddl"), family.domain_text())?;
    for inst in &instances {
        write(&out_dir.join(format!("{}.pddl", inst.name)), &inst.text)?;
    }
    println!("wrote {} {family} instances to {}", instances.len(), out_dir.display());
    Ok(Outcome::Success)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BreakevenRow {
    pub method: String,
    pub baseline: String,
    pub domain: String,
    pub instances: Breakeven,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub table: SatTable,
    pub breakeven: Vec<BreakevenRow>,
}

/// Breakeven of every method with a generation time against `baseline`,
/// per domain, from mean runtimes.
pub fn breakeven_rows(table: &SatTable, runs: &[MethodRun], baseline: &str) -> Vec<BreakevenRow> {
    let mut out = Vec::new();
    for run in runs.iter().filter(|r| r.method != baseline) {
        let Some(gen_time) = run.gen_time_seconds else { continue };
        for row in table.rows.iter().filter(|r| r.method == run.method) {
            let Some(base) = table.row(baseline, &row.domain) else { continue };
            out.push(BreakevenRow {
                method: run.method.clone(),
                baseline: baseline.into(),
                domain: row.domain.clone(),
                instances: breakeven_instances(gen_time, base.mean_runtime_seconds, row.mean_runtime_seconds),
            });
        }
    }
    out
}

pub fn render_breakeven(rows: &[BreakevenRow]) -> String {
    let mut out = String::new();
    for r in rows {
        let k = match r.instances {
            Breakeven::Instances(k) => format!("{k:.2}"),
            Breakeven::NotApplicable => "n/a".into(),
        };
        out.push_str(&format!("{} vs {} on {}: k = {k}\n", r.method, r.baseline, r.domain));
    }
    out
}

pub fn evaluate(runs_dir: &Path, report: &Path, baseline: Option<&str>) -> Result<Outcome> {
    let mut runs = Vec::new();
    for path in list_files(runs_dir, "json")? {
        let run: MethodRun =
            serde_json::from_str(&read(&path)?).with_context(|| format!("parsing method run {}", path.display()))?;
        runs.push(run);
    }
    if runs.is_empty() {
        bail!("no method runs in {}", runs_dir.display());
    }
    let methods: BTreeMap<&str, usize> = runs.iter().map(|r| (r.method.as_str(), 0)).collect();
    if methods.len() != runs.len() {
        bail!("duplicate method names in {}", runs_dir.display());
    }
    let table = evaluate_methods(&runs)?;
    let breakeven = match baseline {
        Some(b) if !methods.contains_key(b) => bail!("baseline method '{b}' has no run file"),
        Some(b) => breakeven_rows(&table, &runs, b),
        None => Vec::new(),
    };
    let mut text = table.render_text();
    if !breakeven.is_empty() {
        text.push('\n');
        text.push_str(&render_breakeven(&breakeven));
    }
    let report_doc = Report { table, breakeven };
    write(report, &serde_json::to_string_pretty(&report_doc)?)?;
    write(&report.with_extension("txt"), &text)?;
    print!("{text}");
    Ok(Outcome::Success)
}
