mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};
use geneplan_core::benchmark::Family;
use geneplan_core::evolution::EvolutionConfig;

use commands::{GeneratorKind, Outcome, SynthesizeArgs};
use config::Config;

const EXIT_VALIDATION: u8 = 2;
const EXIT_EXHAUSTED: u8 = 3;
const EXIT_IO: u8 = 4;

#[derive(Parser)]
#[command(name = "geneplan", version, about = "Evolve and evaluate generalized planners for PDDL domains")]
struct Cli {
    /// TOML file with [llm], [sandbox], [mock], [evolution] and [fitness] sections.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve a planner for a domain from a directory of training problems.
    Synthesize {
        #[arg(long)]
        domain: PathBuf,
        #[arg(long)]
        train_dir: PathBuf,
        /// Planner artifact to write; the run ledger goes next to it.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "remote")]
        generator: GeneratorKind,
        /// Candidate pool for the mock generator (overrides mock.pool_dir).
        #[arg(long)]
        pool_dir: Option<PathBuf>,
        /// Planner source added to the initial population; repeatable.
        #[arg(long = "seed-planner")]
        seed_planners: Vec<PathBuf>,
        #[arg(long, default_value_t = 10)]
        generations: usize,
        #[arg(long, default_value_t = 10)]
        population: usize,
        #[arg(long, default_value_t = 10)]
        offspring: usize,
        #[arg(long, default_value_t = 2)]
        parents: usize,
        #[arg(long, default_value_t = 50.0)]
        tmax: f64,
        #[arg(long, default_value_t = 10.0)]
        tmin: f64,
        /// Score for a training task the candidate does not solve.
        #[arg(long)]
        failure_score: Option<f64>,
        /// Give every candidate the same score.
        #[arg(long)]
        no_evaluator: bool,
        #[arg(long, default_value_t = 0)]
        rng_seed: u64,
    },
    /// Run a stored planner on one problem.
    Solve {
        #[arg(long)]
        planner: PathBuf,
        #[arg(long)]
        domain: PathBuf,
        #[arg(long)]
        problem: PathBuf,
        /// Defaults to standard output.
        #[arg(long)]
        out_plan: Option<PathBuf>,
    },
    /// Check a plan file against a problem.
    Validate {
        #[arg(long)]
        domain: PathBuf,
        #[arg(long)]
        problem: PathBuf,
        #[arg(long)]
        plan: PathBuf,
    },
    /// Write seeded benchmark problems plus their domain file.
    GenInstances {
        #[arg(long)]
        family: Family,
        #[arg(long, default_value_t = 3)]
        size: usize,
        #[arg(long)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Compute SAT scores from one MethodRun JSON file per method.
    Evaluate {
        #[arg(long)]
        runs_dir: PathBuf,
        /// JSON report path; an aligned-text copy is written with a .txt extension.
        #[arg(long)]
        report: PathBuf,
        /// Method to measure breakeven counts against.
        #[arg(long)]
        baseline: Option<String>,
    },
}

fn run(cli: Cli) -> Result<Outcome> {
    let config = Config::load(cli.config.as_deref())?;
    match cli.command {
        Command::Synthesize {
            domain,
            train_dir,
            out,
            generator,
            pool_dir,
            seed_planners,
            generations,
            population,
            offspring,
            parents,
            tmax,
            tmin,
            failure_score,
            no_evaluator,
            rng_seed,
        } => {
            let settings = &config.evolution;
            let evolution = EvolutionConfig {
                population_size: population,
                offspring_per_generation: offspring,
                max_generations: generations,
                parents_per_prompt: parents,
                samples_per_prompt: settings.samples_per_prompt,
                t_max: tmax,
                t_min: tmin,
                typing_flag: settings.typing_flag,
                evaluator_enabled: !no_evaluator,
                retry_cap: settings.retry_cap,
                model: config.llm.model.clone(),
                max_output_tokens: settings.max_output_tokens,
                sampling_temperature: settings.sampling_temperature,
            };
            let args = SynthesizeArgs {
                domain,
                train_dir,
                out,
                generator,
                pool_dir,
                seed_planners,
                evolution,
                failure_score,
                rng_seed,
            };
            commands::synthesize(&args, &config)
        }
        Command::Solve {
            planner,
            domain,
            problem,
            out_plan,
        } => commands::solve(&planner, &domain, &problem, out_plan.as_deref(), &config),
        Command::Validate { domain, problem, plan } => commands::validate(&domain, &problem, &plan),
        Command::GenInstances {
            family,
            size,
            count,
            seed,
            out_dir,
        } => commands::gen_instances(family, size, count, seed, &out_dir),
        Command::Evaluate {
            runs_dir,
            report,
            baseline,
        } => commands::evaluate(&runs_dir, &report, baseline.as_deref()),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            let _ = e.print();
            return ExitCode::from(EXIT_IO);
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };
    match run(cli) {
        Ok(Outcome::Success) => ExitCode::SUCCESS,
        Ok(Outcome::ValidationFailed) => ExitCode::from(EXIT_VALIDATION),
        Ok(Outcome::SynthesisExhausted) => ExitCode::from(EXIT_EXHAUSTED),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_IO)
        }
    }
}
