//! Command-line front end for the counterfactual engine.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use counterfact::catalog;
use counterfact::error::{Caps, Error};
use counterfact::files::{load_model, load_scm};
use counterfact::model::check_markov;
use counterfact::query::{
    compare_semantics, evaluate, parse_query, QueryClass, QueryTarget, SemanticsTag,
};
use counterfact::scm::Scm;
use counterfact::selfcheck::{run_all, SelfCheckConfig};
use counterfact::CausalModel;

#[derive(Parser)]
#[command(
    name = "counterfact",
    about = "Exact probabilities of counterfactuals in discrete causal models",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a query under one semantics.
    Eval(EvalArgs),
    /// Evaluate min/max bounds over all canonical structural models
    /// (shorthand for `eval --semantics BOUNDS`).
    Bounds(QueryArgs),
    /// Evaluate a query under every applicable semantics and report which
    /// of them agree.
    Compare(QueryArgs),
    /// Check the Markov condition of a model's joint distribution.
    Markov(InputArgs),
    /// List or run the prebuilt example fixtures.
    Examples {
        #[command(subcommand)]
        action: ExamplesAction,
    },
    /// Run the randomized cross-route equivalence suites.
    Selfcheck(SelfcheckArgs),
}

#[derive(Args)]
struct InputArgs {
    /// Path to a causal-model file.
    #[arg(long)]
    model: Option<PathBuf>,
    /// Path to a structural-model file.
    #[arg(long)]
    scm: Option<PathBuf>,
    /// Cap on materialized state spaces.
    #[arg(long)]
    max_states: Option<u128>,
}

#[derive(Args)]
struct QueryArgs {
    #[command(flatten)]
    input: InputArgs,
    /// The query, e.g. "P((Y=0)[X=0] | X=1, Y=1)".
    #[arg(long)]
    query: String,
}

#[derive(Args)]
struct EvalArgs {
    #[command(flatten)]
    query: QueryArgs,
    /// One of B, N, GH, IC, SCM, BOUNDS.
    #[arg(long, default_value = "N")]
    semantics: String,
}

#[derive(Subcommand)]
enum ExamplesAction {
    /// List the available fixtures.
    List,
    /// Run one fixture and compare against its expected values.
    Run { name: String },
    /// Run every fixture.
    RunAll,
}

#[derive(Args)]
struct SelfcheckArgs {
    /// Seed for the random model population.
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Number of models per suite.
    #[arg(long, default_value_t = 50)]
    models: usize,
    /// Cap on materialized state spaces.
    #[arg(long)]
    max_states: Option<u128>,
}

enum Input {
    Model(CausalModel),
    Scm(Scm),
}

impl InputArgs {
    fn caps(&self) -> Caps {
        match self.max_states {
            Some(n) => Caps::with_max_states(n),
            None => Caps::default(),
        }
    }

    fn load(&self) -> Result<Input, Error> {
        match (&self.model, &self.scm) {
            (Some(path), None) => Ok(Input::Model(load_model(path)?)),
            (None, Some(path)) => Ok(Input::Scm(load_scm(path)?)),
            _ => Err(Error::Unsupported(
                "exactly one of --model and --scm is required".into(),
            )),
        }
    }
}

impl Input {
    fn target(&self) -> QueryTarget<'_> {
        match self {
            Input::Model(m) => QueryTarget::Model(m),
            Input::Scm(s) => QueryTarget::Scm(s),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e);
            ExitCode::from(exit_code(&e))
        }
    }
}

/// Parse and input-shape problems exit with 2, semantic problems (zero
/// probability evidence, caps, unsupported combinations) with 3.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Syntax { .. }
        | Error::UnknownVariable(_)
        | Error::OutOfRange { .. }
        | Error::InvalidSignature(_)
        | Error::InvalidDag(_)
        | Error::InvalidModel(_)
        | Error::InvalidProbability(_) => 2,
        Error::UndefinedConditional
        | Error::ZeroProbabilityWorld
        | Error::ModelTooLarge { .. }
        | Error::VertexCapExceeded { .. }
        | Error::ResponseConstraintViolated { .. }
        | Error::Unsupported(_) => 3,
    }
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Eval(args) => {
            let semantics: SemanticsTag = args.semantics.parse()?;
            eval_and_print(&args.query, semantics)
        }
        Command::Bounds(args) => eval_and_print(&args, SemanticsTag::Bounds),
        Command::Compare(args) => {
            let caps = args.input.caps();
            let input = args.input.load()?;
            let query = parse_query(&args.query)?;
            let cmp = compare_semantics(input.target(), &query, &caps)?;
            println!("query: {}", query);
            println!("class: {}", class_name(cmp.class));
            for (tag, outcome) in &cmp.cells {
                match outcome {
                    Ok(v) => println!("{:>6}  {}", tag.to_string(), v),
                    Err(e) => println!("{:>6}  error: {}", tag.to_string(), e),
                }
            }
            println!(
                "outcome family (N, GH, IC) agrees: {}",
                if cmp.family_agrees { "yes" } else { "no" }
            );
            println!(
                "refinement (B) agrees: {} (expected: {})",
                if cmp.refinement_agrees { "yes" } else { "no" },
                if cmp.class.refinement_expected_to_agree() {
                    "yes"
                } else {
                    "not necessarily"
                },
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Markov(args) => {
            let caps = args.caps();
            let input = args.load()?;
            let model = match &input {
                Input::Model(m) => m.clone(),
                Input::Scm(s) => s.induced_model()?,
            };
            let joint = model.joint_with(&caps)?;
            let report = check_markov(model.signature(), model.dag(), &joint)?;
            print_markov(&report);
            Ok(ExitCode::SUCCESS)
        }
        Command::Examples { action } => match action {
            ExamplesAction::List => {
                for fixture in catalog::catalog() {
                    println!("{:<10}  {}", fixture.name, fixture.summary);
                }
                Ok(ExitCode::SUCCESS)
            }
            ExamplesAction::Run { name } => run_fixtures(&[name.as_str()]),
            ExamplesAction::RunAll => {
                let names: Vec<&str> = catalog::catalog().iter().map(|f| f.name).collect();
                run_fixtures(&names)
            }
        },
        Command::Selfcheck(args) => {
            let caps = match args.max_states {
                Some(n) => Caps::with_max_states(n),
                None => Caps::default(),
            };
            let cfg = SelfCheckConfig {
                seed: args.seed,
                models: args.models,
                caps,
            };
            let reports = run_all(&cfg)?;
            let mut failed = false;
            for report in &reports {
                if report.passed() {
                    println!("{:<26} PASS ({} cases)", report.name, report.cases);
                } else {
                    failed = true;
                    println!(
                        "{:<26} FAIL ({}/{} cases): {}",
                        report.name,
                        report.failures.len(),
                        report.cases,
                        report.failures[0]
                    );
                }
            }
            Ok(if failed {
                ExitCode::FAILURE
            } else {
                ExitCode::SUCCESS
            })
        }
    }
}

fn eval_and_print(args: &QueryArgs, semantics: SemanticsTag) -> Result<ExitCode, Error> {
    let caps = args.input.caps();
    let input = args.input.load()?;
    let query = parse_query(&args.query)?;
    let result = evaluate(input.target(), &query, semantics, &caps)?;
    println!("{}", result);
    Ok(ExitCode::SUCCESS)
}

fn class_name(class: QueryClass) -> &'static str {
    match class {
        QueryClass::Observational => "observational",
        QueryClass::BasicWithWorld => "basic counterfactual with a full world",
        QueryClass::SingleAtom => "single counterfactual atom",
        QueryClass::GeneralComplex => "general conjunction",
    }
}

fn print_markov(report: &counterfact::model::MarkovReport) {
    if report.holds {
        println!("Markov condition: holds");
        return;
    }
    println!(
        "Markov condition: violated ({} witnesses)",
        report.violations.len()
    );
    for violation in report.violations.iter().take(10) {
        println!("  {}", violation);
    }
    if report.violations.len() > 10 {
        println!("  ... and {} more", report.violations.len() - 10);
    }
}

fn run_fixtures(names: &[&str]) -> Result<ExitCode, Error> {
    let mut failed = false;
    for name in names {
        let outcomes = catalog::run(name)?;
        println!("{}", name);
        for check in &outcomes {
            let status = if check.passed() { "PASS" } else { "FAIL" };
            println!(
                "  {:<52} expected {:<34} actual {:<34} {}",
                check.label, check.expected, check.actual, status
            );
            if !check.passed() {
                failed = true;
            }
        }
    }
    Ok(if failed {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    })
}
