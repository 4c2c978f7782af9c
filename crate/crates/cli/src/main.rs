use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use alhome::assets::asset_root;
use alhome::config::{OutputFormat, RunConfig, RunConfigPatch};
use alhome::executor::{run, Outcome, RunInputs};
use alhome::fixed::Fixed;
use alhome::pddl::{ground, parse_domain, parse_problem, serialize_domain, GroundTask};
use alhome::perception::{evaluate_sensor, load_confusion, ConfusionMatrix};
use alhome::planner::{self, parse_plan, render_json, render_text, validate_plan, PlanError, PlannerConfig, Rendering};
use alhome::taxonomy::{augment_types, integrate_types, load_taxonomy};
use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "alhome", version, about = "Temporal planning and execution monitoring for an assistive home robot")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// TOML file with run settings; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Monitor step in seconds.
    #[arg(long, global = true)]
    stepsize: Option<Fixed>,
    /// Separation between dependent time points in seconds.
    #[arg(long, global = true)]
    epsilon: Option<Fixed>,
    /// Look for new objects at every monitor step.
    #[arg(long, global = true)]
    proactive: bool,
    /// Use the domain with a time window for every comfort goal.
    #[arg(long, global = true)]
    windows: bool,
    #[arg(long, global = true, value_enum)]
    output: Option<Format>,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Find a plan for a domain and problem.
    Plan {
        domain: PathBuf,
        problem: PathBuf,
        /// Print start times relative to the plan origin.
        #[arg(long)]
        relative: bool,
    },
    /// Check a plan file against a domain and problem.
    Validate { domain: PathBuf, problem: PathBuf, plan: PathBuf },
    /// Execute a scenario with monitoring and repair.
    Run { scenario: PathBuf },
    /// Sample a confusion matrix and compare frequencies with its rows.
    SensorsEval {
        matrix: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
        /// Evaluate the identity matrix over the same labels instead.
        #[arg(long)]
        identity: bool,
    },
    /// Add taxonomy subtypes of the domain's types to the domain.
    Augment { domain: PathBuf, taxonomy: PathBuf },
}

/// Falls back to the asset directory for paths that do not exist.
fn resolve(path: &Path) -> PathBuf {
    if path.exists() {
        return path.to_path_buf();
    }
    let alt = asset_root().join(path);
    if alt.exists() {
        alt
    } else {
        path.to_path_buf()
    }
}

fn read(path: &Path) -> Result<String> {
    let p = resolve(path);
    std::fs::read_to_string(&p).with_context(|| format!("reading {}", p.display()))
}

impl Common {
    fn patch(&self) -> RunConfigPatch {
        RunConfigPatch {
            seed: self.seed,
            stepsize: self.stepsize,
            epsilon: self.epsilon,
            proactive: self.proactive.then_some(true),
            windows: self.windows.then_some(true),
            output: self.output.map(|f| match f {
                Format::Text => OutputFormat::Text,
                Format::Json => OutputFormat::Json,
            }),
            ..RunConfigPatch::default()
        }
    }

    fn file_patch(&self) -> Result<RunConfigPatch> {
        match &self.config {
            Some(p) => toml::from_str(&read(p)?).with_context(|| format!("parsing {}", p.display())),
            None => Ok(RunConfigPatch::default()),
        }
    }

    /// Defaults, then the config file, then `extra`, then flags.
    fn config(&self, extra: &RunConfigPatch) -> Result<RunConfig> {
        let cfg = RunConfig::default().patched(&self.file_patch()?).patched(extra).patched(&self.patch());
        cfg.validate()?;
        Ok(cfg)
    }
}

fn load_task(domain: &Path, problem: &Path) -> Result<GroundTask> {
    let d = parse_domain(&read(domain)?).with_context(|| format!("parsing {}", domain.display()))?;
    let p = parse_problem(&read(problem)?, &d).with_context(|| format!("parsing {}", problem.display()))?;
    Ok(ground(Arc::new(d), Arc::new(p))?)
}

fn planner_config(cfg: &RunConfig) -> PlannerConfig {
    PlannerConfig { epsilon: cfg.epsilon, node_budget: cfg.node_budget as usize, ..PlannerConfig::default() }
}

fn json(v: &impl serde::Serialize) -> String {
    serde_json::to_string_pretty(v).expect("serializable")
}

fn cmd_plan(cfg: &RunConfig, domain: &Path, problem: &Path, relative: bool) -> Result<u8> {
    let task = load_task(domain, problem)?;
    match planner::plan(&task, &planner_config(cfg)) {
        Ok(plan) => {
            match cfg.output {
                OutputFormat::Text => {
                    let r = if relative { Rendering::Relative } else { Rendering::Absolute };
                    print!("{}", render_text(&plan, r));
                }
                OutputFormat::Json => println!("{}", json(&render_json(&plan))),
            }
            Ok(0)
        }
        Err(e @ (PlanError::Unsolvable { .. } | PlanError::BudgetExhausted { .. })) => {
            eprintln!("no plan: {e}");
            Ok(2)
        }
        Err(e) => Err(e.into()),
    }
}

fn cmd_validate(cfg: &RunConfig, domain: &Path, problem: &Path, plan: &Path) -> Result<u8> {
    let task = load_task(domain, problem)?;
    let plan = parse_plan(&read(plan)?, &task).with_context(|| format!("parsing {}", plan.display()))?;
    let report = validate_plan(&task, &plan, &planner_config(cfg));
    match cfg.output {
        OutputFormat::Json => println!("{}", json(&report)),
        OutputFormat::Text => match &report.violation {
            None => println!(
                "valid: {} steps, makespan {}, cost {}, metric {}",
                plan.len(),
                report.makespan.to_millis_string(),
                report.cost,
                report.metric
            ),
            Some(v) => println!("invalid: {v}"),
        },
    }
    Ok(if report.valid { 0 } else { 2 })
}

fn cmd_run(common: &Common, scenario: &Path) -> Result<u8> {
    let path = resolve(scenario);
    let windows_flag = common.windows;
    let probe = RunInputs::load(&path, false)?;
    let cfg = common.config(&probe.scenario.config)?;
    let inputs = if cfg.windows || windows_flag { RunInputs::load(&path, true)? } else { probe };
    let log = run(&inputs, &cfg)?;
    match cfg.output {
        OutputFormat::Text => print!("{}", log.to_text()),
        OutputFormat::Json => print!("{}", log.to_json_lines()),
    }
    Ok(match log.outcome() {
        Some(Outcome::GoalAchieved | Outcome::NoGoal) => 0,
        Some(Outcome::Unsolvable) => 2,
        Some(Outcome::GoalExpired) => 3,
        None => 1,
    })
}

fn cmd_sensors_eval(cfg: &RunConfig, matrix: &Path, samples: u64, identity: bool) -> Result<u8> {
    let mut cm = load_confusion(&read(matrix)?).with_context(|| format!("parsing {}", matrix.display()))?;
    if identity {
        cm = ConfusionMatrix::identity(cm.labels().to_vec());
    }
    if samples == 0 {
        return Err(anyhow!("--samples must be positive"));
    }
    let eval = evaluate_sensor(&cm, samples, cfg.seed);
    match cfg.output {
        OutputFormat::Json => println!("{}", json(&eval)),
        OutputFormat::Text => {
            println!("samples per label: {}, seed: {}", eval.samples, eval.seed);
            for r in &eval.rows {
                let obs: Vec<String> = r.observed.iter().map(|v| format!("{v:.4}")).collect();
                println!("{:<16} deviation {:.4}  [{}]", r.label, r.deviation, obs.join(" "));
            }
            println!("max deviation: {:.4}", eval.max_deviation);
        }
    }
    Ok(0)
}

fn cmd_augment(domain: &Path, taxonomy: &Path) -> Result<u8> {
    let d = parse_domain(&read(domain)?).with_context(|| format!("parsing {}", domain.display()))?;
    let tax = load_taxonomy(&read(taxonomy)?).with_context(|| format!("parsing {}", taxonomy.display()))?;
    let aug = augment_types(&d.types, &tax);
    let out = integrate_types(&d, &aug)?;
    for (ty, parent) in &aug.additions {
        eprintln!("added {ty} - {parent}");
    }
    print!("{}", serialize_domain(&out));
    Ok(0)
}

fn dispatch(cli: &Cli) -> Result<u8> {
    let c = &cli.common;
    match &cli.command {
        Command::Plan { domain, problem, relative } => cmd_plan(&c.config(&Default::default())?, domain, problem, *relative),
        Command::Validate { domain, problem, plan } => cmd_validate(&c.config(&Default::default())?, domain, problem, plan),
        Command::Run { scenario } => cmd_run(c, scenario),
        Command::SensorsEval { matrix, samples, identity } => {
            cmd_sensors_eval(&c.config(&Default::default())?, matrix, *samples, *identity)
        }
        Command::Augment { domain, taxonomy } => cmd_augment(domain, taxonomy),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
