use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use liesym::dsl::{load_problem, DslError};
use liesym::nonclassical::Mode;
use liesym::report::{run, Command, Config, RunError};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Cmd {
    Symmetries,
    Algebra,
    Adjoint,
    Optimal,
    Flows,
    Reduce,
    Invariants,
    Nonclassical,
    Conslaws,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::Symmetries => Command::Symmetries,
            Cmd::Algebra => Command::Algebra,
            Cmd::Adjoint => Command::Adjoint,
            Cmd::Optimal => Command::Optimal,
            Cmd::Flows => Command::Flows,
            Cmd::Reduce => Command::Reduce,
            Cmd::Invariants => Command::Invariants,
            Cmd::Nonclassical => Command::Nonclassical,
            Cmd::Conslaws => Command::Conslaws,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Tau0,
    Tau1,
}

/// Lie symmetry analysis of polynomial PDEs in two independent variables.
#[derive(Parser, Debug)]
#[command(name = "liesym", version)]
struct Args {
    command: Cmd,
    /// Problem file (.pde)
    problem: PathBuf,
    /// Degree of the polynomial ansatz for infinitesimals
    #[arg(long, default_value_t = 2)]
    degree: u32,
    /// Highest derivative order in the multiplier ansatz
    #[arg(long, default_value_t = 2)]
    jet_order: u32,
    /// Degree in (x, t) of the multiplier ansatz
    #[arg(long, default_value_t = 1)]
    xt_degree: u32,
    /// Prolongation order for differential invariants
    #[arg(long, default_value_t = 3)]
    order: u32,
    /// Nonclassical normalization
    #[arg(long, value_enum, default_value_t = ModeArg::Tau1)]
    mode: ModeArg,
    /// Seed for the random-point oracle
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Generator as a combination of basis names, e.g. "v1 + a*v3" (repeatable)
    #[arg(long = "generator")]
    generators: Vec<String>,
    /// Invariant candidate, or "xi, eta, phi, psi" for nonclassical (repeatable)
    #[arg(long = "candidate")]
    candidates: Vec<String>,
    /// Coefficient vector for optimal, e.g. "1, 0, 0, 2" (repeatable)
    #[arg(long = "vector")]
    vectors: Vec<String>,
    /// Explicit solution to transport under each flow
    #[arg(long)]
    solution: Option<String>,
    /// Chart "y, w" to check against the first generator
    #[arg(long)]
    chart: Option<String>,
    /// Emit JSON instead of text
    #[arg(long)]
    json: bool,
    /// Write the report here instead of standard output
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let problem = match load_problem(&args.problem) {
        Ok(p) => p,
        Err(e @ DslError::Io(..)) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let cfg = Config {
        degree: args.degree,
        jet_order: args.jet_order,
        xt_degree: args.xt_degree,
        order: args.order,
        mode: match args.mode {
            ModeArg::Tau0 => Mode::Tau0,
            ModeArg::Tau1 => Mode::Tau1,
        },
        seed: args.seed,
        generators: args.generators,
        candidates: args.candidates,
        vectors: args.vectors,
        solution: args.solution,
        chart: args.chart,
    };
    let report = match run(args.command.into(), &problem, &cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(match e {
                RunError::Invalid(_) => 2,
                RunError::Failed(_) => 1,
            });
        }
    };
    let text = if args.json { report.to_json() + "\n" } else { report.to_text() };
    match &args.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &text) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(1);
            }
        }
        None => print!("{text}"),
    }
    if report.verified {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(3)
    }
}
