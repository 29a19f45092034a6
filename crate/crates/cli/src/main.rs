use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use fabula::dsl::{parse_domain, parse_heuristic_rules, parse_problem, parse_templates};
use fabula::export::{plan_from_json_str, plan_to_dot, plan_to_json_string};
use fabula::heuristics::{HeuristicKind, RuleSet};
use fabula::narrate::render;
use fabula::pocl::{Algorithm, FlawStrategy};
use fabula::quest::{emit_questionnaire, plan_to_quest, questionnaire_csv, questionnaire_text};
use fabula::search::oracle::oracle_solve;
use fabula::search::validate::validate;
use fabula::search::{plan_search, SearchConfig};
use fabula::{DomainTheory, Plan, Problem};

/// Intent-driven story planning.
#[derive(Parser)]
#[command(name = "fabula", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Search for a plan.
    Plan(PlanArgs),
    /// Check a plan JSON file.
    Validate(PlanFileArgs),
    /// Render a plan as story text.
    Narrate(NarrateArgs),
    /// Build the QUEST graph and questionnaire for a plan.
    Quest(QuestArgs),
    /// Enumerate every solution up to --max-depth actions by forward search.
    Oracle(OracleArgs),
}

#[derive(Args)]
struct Inputs {
    #[arg(long)]
    domain: PathBuf,
    #[arg(long)]
    problem: PathBuf,
    #[arg(long, value_enum, default_value_t = AlgorithmArg::Ipocl)]
    algorithm: AlgorithmArg,
}

#[derive(Args)]
struct PlanArgs {
    #[command(flatten)]
    inputs: Inputs,
    #[arg(long)]
    rules: Option<PathBuf>,
    /// classical, ipocl-di, rules or combined.
    #[arg(long)]
    heuristic: Option<HeuristicKind>,
    /// default or oc-fifo.
    #[arg(long, default_value = "default")]
    strategy: FlawStrategy,
    #[arg(long, default_value_t = 5_000_000)]
    max_nodes: u64,
    #[arg(long, default_value_t = 500)]
    max_depth: u32,
    #[arg(long)]
    trace: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    dot: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct PlanFileArgs {
    /// Plan JSON file.
    plan: PathBuf,
    #[command(flatten)]
    inputs: Inputs,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct NarrateArgs {
    plan: PathBuf,
    #[command(flatten)]
    inputs: Inputs,
    #[arg(long)]
    templates: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct QuestArgs {
    plan: PathBuf,
    #[command(flatten)]
    inputs: Inputs,
    #[arg(long)]
    templates: Option<PathBuf>,
    /// Graph JSON destination.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Questionnaire destination; CSV when the name ends in .csv.
    #[arg(long)]
    questionnaire: Option<PathBuf>,
    /// json prints the graph, text prints the questionnaire.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    domain: PathBuf,
    #[arg(long)]
    problem: PathBuf,
    #[arg(long, default_value_t = 4)]
    max_depth: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgorithmArg {
    Pocl,
    Ipocl,
}

impl From<AlgorithmArg> for Algorithm {
    fn from(a: AlgorithmArg) -> Self {
        match a {
            AlgorithmArg::Pocl => Algorithm::Pocl,
            AlgorithmArg::Ipocl => Algorithm::Ipocl,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

/// Failure categories with stable exit codes.
#[derive(Clone, Copy, Debug)]
enum Category {
    Parse,
    NoSolution,
    Limit,
    Validation,
}

impl Category {
    fn code(self) -> u8 {
        match self {
            Category::Parse => 2,
            Category::NoSolution => 3,
            Category::Limit => 4,
            Category::Validation => 5,
        }
    }
}

struct Failed(Category, anyhow::Error);

trait Categorize<T> {
    fn category(self, c: Category) -> Result<T, Failed>;
}

impl<T, E: Into<anyhow::Error>> Categorize<T> for Result<T, E> {
    fn category(self, c: Category) -> Result<T, Failed> {
        self.map_err(|e| Failed(c, e.into()))
    }
}

impl From<anyhow::Error> for Failed {
    fn from(e: anyhow::Error) -> Self {
        Failed(Category::Parse, e)
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load(inputs: &Inputs) -> Result<(DomainTheory, Problem), Failed> {
    let domain = parse_domain(&read(&inputs.domain)?)
        .with_context(|| format!("parsing {}", inputs.domain.display()))
        .category(Category::Parse)?;
    let problem = parse_problem(&read(&inputs.problem)?)
        .with_context(|| format!("parsing {}", inputs.problem.display()))
        .category(Category::Parse)?;
    Ok((domain, problem))
}

fn load_plan(path: &Path, domain: &DomainTheory, problem: &Problem) -> Result<Plan, Failed> {
    plan_from_json_str(&read(path)?, domain, problem)
        .with_context(|| format!("loading {}", path.display()))
        .category(Category::Parse)
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => match io::stdout().lock().write_all(text.as_bytes()) {
            Err(e) if e.kind() == io::ErrorKind::BrokenPipe => Ok(()),
            r => r.context("writing to stdout"),
        },
    }
}

fn plan_text(plan: &Plan) -> String {
    let b = plan.bindings();
    let ids: Vec<_> = plan.ordinary_steps().map(|s| s.id).collect();
    let mut out = String::new();
    for id in plan.ordering().topological(&ids) {
        out.push_str(&format!("{id}. {}\n", plan.step(id).rebound(b)));
    }
    for f in plan.frames() {
        let members: Vec<String> = f.interval.iter().map(ToString::to_string).collect();
        out.push_str(&format!(
            "frame {}: {} intends {} [{}]\n",
            f.id,
            f.character,
            b.substitute(&f.goal),
            members.join(" ")
        ));
    }
    out
}

fn cmd_plan(a: &PlanArgs) -> Result<(), Failed> {
    let (domain, problem) = load(&a.inputs)?;
    let algorithm: Algorithm = a.inputs.algorithm.into();
    let mut config = SearchConfig::new(algorithm);
    if let Some(path) = &a.rules {
        config.rules = parse_heuristic_rules(&read(path)?)
            .with_context(|| format!("parsing {}", path.display()))
            .category(Category::Parse)?;
    } else {
        config.rules = RuleSet::default();
    }
    if let Some(h) = a.heuristic {
        config.heuristic = h;
    }
    config.strategy = a.strategy;
    config.max_nodes = a.max_nodes;
    config.max_depth = a.max_depth;
    let result = plan_search(&domain, &problem, &config);
    if let Some(path) = &a.trace {
        emit(Some(path), &result.trace)?;
    }
    let s = &result.stats;
    eprintln!(
        "nodes generated {}, visited {}, max frontier {}, mean branching {:.2}",
        s.nodes_generated, s.nodes_visited, s.max_frontier, s.mean_branching
    );
    let plan = match result.outcome {
        Ok(plan) => plan,
        Err(f) => {
            let c = if f.is_limit() { Category::Limit } else { Category::NoSolution };
            return Err(Failed(c, anyhow::anyhow!("no plan found: {f}")));
        }
    };
    eprintln!("solution depth {}, {} steps", s.solution_depth.unwrap_or(0), plan.ordinary_count());
    if let Some(path) = &a.dot {
        emit(Some(path), &plan_to_dot(&plan))?;
    }
    let text = match a.format {
        Format::Json => plan_to_json_string(&plan, &domain, &problem),
        Format::Text => plan_text(&plan),
    };
    emit(a.out.as_deref(), &text)?;
    Ok(())
}

fn cmd_validate(a: &PlanFileArgs) -> Result<(), Failed> {
    let (domain, problem) = load(&a.inputs)?;
    let plan = load_plan(&a.plan, &domain, &problem)?;
    let report = validate(&plan, &problem, a.inputs.algorithm.into());
    let text = match a.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&report).context("serializing report")?;
            s.push('\n');
            s
        }
        Format::Text => {
            let mut s = String::new();
            for v in &report.violations {
                s.push_str(&format!("{}\n", v.message));
            }
            s.push_str(&format!(
                "{} linearizations checked{}\n{}\n",
                report.linearizations,
                if report.exhaustive { "" } else { " (sampled)" },
                if report.is_valid() { "valid" } else { "invalid" }
            ));
            s
        }
    };
    emit(a.out.as_deref(), &text)?;
    if report.is_valid() {
        Ok(())
    } else {
        let first = report.violations[0].message.clone();
        Err(Failed(Category::Validation, anyhow::anyhow!("plan is invalid: {first}")))
    }
}

fn cmd_narrate(a: &NarrateArgs) -> Result<(), Failed> {
    let (domain, problem) = load(&a.inputs)?;
    let plan = load_plan(&a.plan, &domain, &problem)?;
    let templates = parse_templates(&read(&a.templates)?)
        .with_context(|| format!("parsing {}", a.templates.display()))
        .category(Category::Parse)?;
    let story = render(&plan, &templates, &problem).category(Category::Validation)?;
    let text = match a.format {
        Format::Text => story.text(),
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&story).context("serializing narrative")?;
            s.push('\n');
            s
        }
    };
    emit(a.out.as_deref(), &text)?;
    Ok(())
}

fn cmd_quest(a: &QuestArgs) -> Result<(), Failed> {
    let (domain, problem) = load(&a.inputs)?;
    let plan = load_plan(&a.plan, &domain, &problem)?;
    let templates = match &a.templates {
        Some(p) => Some(
            parse_templates(&read(p)?).with_context(|| format!("parsing {}", p.display())).category(Category::Parse)?,
        ),
        None => None,
    };
    let graph = plan_to_quest(&plan, a.inputs.algorithm.into()).category(Category::Validation)?;
    let pairs = emit_questionnaire(&graph, templates.as_ref());
    if let Some(path) = &a.questionnaire {
        let body = if path.extension().is_some_and(|e| e == "csv") {
            questionnaire_csv(&pairs).map_err(anyhow::Error::from)?
        } else {
            questionnaire_text(&pairs)
        };
        emit(Some(path), &body)?;
    }
    match a.format {
        Format::Json => emit(a.out.as_deref(), &graph.to_json())?,
        Format::Text => {
            if let Some(path) = &a.out {
                emit(Some(path), &graph.to_json())?;
            }
            emit(None, &questionnaire_text(&pairs))?;
        }
    }
    Ok(())
}

fn cmd_oracle(a: &OracleArgs) -> Result<(), Failed> {
    let domain = parse_domain(&read(&a.domain)?).category(Category::Parse)?;
    let problem = parse_problem(&read(&a.problem)?).category(Category::Parse)?;
    let sequences = oracle_solve(&domain, &problem, a.max_depth);
    let text = match a.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&sequences).context("serializing sequences")?;
            s.push('\n');
            s
        }
        Format::Text => sequences.iter().map(|seq| format!("{}\n", seq.join("; "))).collect(),
    };
    emit(a.out.as_deref(), &text)?;
    if sequences.is_empty() {
        return Err(Failed(Category::NoSolution, anyhow::anyhow!("no solution within {} actions", a.max_depth)));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Plan(a) => cmd_plan(a),
        Command::Validate(a) => cmd_validate(a),
        Command::Narrate(a) => cmd_narrate(a),
        Command::Quest(a) => cmd_quest(a),
        Command::Oracle(a) => cmd_oracle(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failed(c, e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(c.code())
        }
    }
}
