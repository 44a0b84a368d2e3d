use std::process::ExitCode;

use cascade_cli::corpus::run_corpus;
use cascade_cli::{infer_vars, run, Options, ProblemSpec, Workflow};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "cascade", version, about = "Laplace cascades and Dini transformations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Operator text, e.g. "Dx*Dy - 2/(x+y)^2".
    operator: String,
    /// Independent variables, comma separated.
    #[arg(long, value_delimiter = ',')]
    vars: Option<Vec<String>>,
    #[arg(long, default_value_t = 10)]
    max_steps: usize,
    #[arg(long, default_value_t = 2)]
    degree_bound: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Print the JSON certificate.
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Laplace invariants h and k.
    Invariants(Common),
    /// Laplace chain in both directions.
    Chain(Common),
    /// Factor the principal symbol.
    Factor(Common),
    /// Closed-form general solution with verification.
    Solve(Common),
    /// Dini chain and solution in three variables.
    Dini(Common),
    /// Substitute a candidate solution.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        solution: String,
    },
    /// Compose with a right operand.
    Compose {
        #[command(flatten)]
        common: Common,
        #[arg(long = "with")]
        right: String,
    },
    /// Run a regression corpus.
    Corpus {
        path: String,
        #[arg(long)]
        json: bool,
    },
}

fn spec(c: &Common, workflow: Workflow) -> ProblemSpec {
    let mut s = ProblemSpec::new(
        c.vars.clone().unwrap_or_else(|| infer_vars(&c.operator)),
        &c.operator,
        workflow,
    );
    s.options = Options {
        max_steps: c.max_steps,
        degree_bound: c.degree_bound,
        seed: c.seed,
    };
    s
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (spec, json) = match cli.command {
        Command::Corpus { path, json } => return corpus(&path, json),
        Command::Invariants(c) => (spec(&c, Workflow::Invariants), c.json),
        Command::Chain(c) => (spec(&c, Workflow::Chain), c.json),
        Command::Factor(c) => (spec(&c, Workflow::Factor), c.json),
        Command::Solve(c) => (spec(&c, Workflow::Solve), c.json),
        Command::Dini(c) => (spec(&c, Workflow::Dini), c.json),
        Command::Verify { common, solution } => {
            let mut s = spec(&common, Workflow::Verify);
            s.solution = Some(solution);
            (s, common.json)
        }
        Command::Compose { common, right } => {
            let mut s = spec(&common, Workflow::Compose);
            s.right = Some(right);
            (s, common.json)
        }
    };
    match run(&spec) {
        Ok(cert) => {
            if json {
                println!("{}", cert.to_json());
            } else {
                print!("{}", cert.to_text());
            }
            ExitCode::from(cert.status.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn corpus(path: &str, json: bool) -> ExitCode {
    match run_corpus(path) {
        Ok(summary) => {
            if json {
                println!("{}", serde_json::to_string_pretty(&summary).expect("summary serializes"));
            } else {
                print!("{}", summary.to_text());
            }
            if summary.all_passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
