//! `otx`: entropic optimal transport from the command line.
//!
//! Exit codes: 0 on success, 1 on usage or input errors, 2 when a solve
//! exhausts its iteration budget.

mod barycenter;
mod bench;
mod solve;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "otx", version, about = "Entropic optimal transport by accelerated primal-dual coordinate descent")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Approximate the transport cost between two histograms.
    Solve(solve::SolveArgs),
    /// Sweep algorithms and parameters over benchmark image pairs.
    #[command(subcommand)]
    Bench(bench::BenchCommand),
    /// Decentralized barycenter of per-agent histograms over a graph.
    Barycenter(barycenter::BarycenterArgs),
}

/// How a successful run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Done,
    BudgetExhausted,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Solve(args) => solve::run(&args),
        Command::Bench(cmd) => bench::run(&cmd),
        Command::Barycenter(args) => barycenter::run(&args),
    };
    match result {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::BudgetExhausted) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
