use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Args;
use otx_core::io::{format_real, read_cost, read_histogram, write_matrix};
use otx_core::pipeline::{ot_objective, solve_regularized};
use otx_core::solver::default_max_iters;
use otx_core::{
    approximate_ot, round_to_polytope, Algorithm, ApproxConfig, Error, RegularizedProblem, SolveReport, TracePoint,
};

use crate::Outcome;

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("accuracy").required(true).args(["eps", "eta"])))]
pub struct SolveArgs {
    /// Cost matrix, one comma-separated row per line.
    #[arg(long)]
    cost: PathBuf,
    /// Source histogram, one weight per line.
    #[arg(long)]
    r: PathBuf,
    /// Target histogram, one weight per line.
    #[arg(long)]
    l: PathBuf,
    /// Target accuracy; picks η and the tolerance automatically.
    #[arg(long, conflicts_with_all = ["eta", "eps_prime"])]
    eps: Option<f64>,
    /// Fixed regularization (requires --eps-prime).
    #[arg(long, requires = "eps_prime")]
    eta: Option<f64>,
    /// Marginal tolerance used with --eta.
    #[arg(long, requires = "eta")]
    eps_prime: Option<f64>,
    #[arg(long, default_value = "apdgcd")]
    algo: Algorithm,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Defaults to four times the theoretical iteration bound.
    #[arg(long)]
    max_iters: Option<u64>,
    #[arg(long, default_value_t = 100)]
    trace_every: u64,
    /// Where to write the rounded plan.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Where to write the trace CSV.
    #[arg(long)]
    log: Option<PathBuf>,
}

fn render_trace(trace: &[TracePoint]) -> String {
    let mut s = String::from("iteration,violation,dual_value,ot_value\n");
    for p in trace {
        let _ = writeln!(
            s,
            "{},{},{},{}",
            p.iteration,
            format_real(p.violation),
            format_real(p.dual_value),
            format_real(p.ot_value)
        );
    }
    s
}

fn write_trace(args: &SolveArgs, report: &SolveReport) -> Result<()> {
    if let Some(path) = &args.log {
        fs::write(path, render_trace(&report.trace)).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

pub fn run(args: &SolveArgs) -> Result<Outcome> {
    let cost = read_cost(&args.cost).with_context(|| format!("reading cost {}", args.cost.display()))?;
    let r = read_histogram(&args.r).with_context(|| format!("reading --r {}", args.r.display()))?;
    let l = read_histogram(&args.l).with_context(|| format!("reading --l {}", args.l.display()))?;

    let solved = match (args.eps, args.eta, args.eps_prime) {
        (Some(eps), _, _) => {
            let cfg = ApproxConfig {
                seed: args.seed,
                max_iters: args.max_iters,
                trace_every: args.trace_every,
                ..ApproxConfig::new(eps, args.algo)
            };
            approximate_ot(&cost, &r, &l, &cfg).map(|out| (out.plan, out.ot_value, out.report))
        }
        (None, Some(eta), Some(eps_prime)) => {
            let prob = RegularizedProblem::new(cost.clone(), r.clone(), l.clone(), eta)?;
            let max_iters = args.max_iters.unwrap_or_else(|| default_max_iters(&prob, eps_prime));
            solve_regularized(&prob, args.algo, args.seed, eps_prime, max_iters, args.trace_every).and_then(|report| {
                let plan = round_to_polytope(&report.plan, &r, &l)?;
                let value = ot_objective(&cost, &plan)?;
                Ok((plan, value, report))
            })
        }
        _ => unreachable!("clap enforces --eps or --eta with --eps-prime"),
    };

    let (plan, ot_value, report) = match solved {
        Ok(v) => v,
        Err(Error::MaxItersExceeded(report)) => {
            write_trace(args, &report)?;
            eprintln!(
                "iteration budget exhausted after {} iterations (violation {})",
                report.iterations,
                format_real(report.final_violation)
            );
            return Ok(Outcome::BudgetExhausted);
        }
        Err(e) => return Err(e.into()),
    };
    write_trace(args, &report)?;
    if let Some(path) = &args.out {
        write_matrix(path, plan.entries()).with_context(|| format!("writing {}", path.display()))?;
    }
    println!(
        "ot_value={} iterations={} violation={}",
        format_real(ot_value),
        report.iterations,
        format_real(report.final_violation)
    );
    Ok(Outcome::Done)
}
