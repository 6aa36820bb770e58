use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use clap::Args;
use otx_core::barycenter::{grid_cost, BarycenterSolver};
use otx_core::io::{format_real, read_cost, read_histogram, write_histogram};
use otx_core::{BarycenterProblem, CoordinateRule, NetworkGraph};

use crate::Outcome;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Lipschitz {
    Auto,
    Value(f64),
}

impl FromStr for Lipschitz {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if s == "auto" {
            return Ok(Self::Auto);
        }
        s.parse::<f64>()
            .map(Self::Value)
            .map_err(|e| format!("expected `auto` or a number: {e}"))
    }
}

#[derive(Debug, Args)]
pub struct BarycenterArgs {
    /// `path`, `star`, `cycle`, or an edge-list file.
    #[arg(long)]
    graph: String,
    /// Agent count; required for the built-in graphs.
    #[arg(long)]
    m: Option<usize>,
    /// Directory holding `agent_<k>.csv` histograms.
    #[arg(long)]
    inputs: PathBuf,
    /// Shared cost matrix; defaults to the squared distance on a uniform grid over [0, 1].
    #[arg(long)]
    cost: Option<PathBuf>,
    #[arg(long)]
    eps: f64,
    /// Number of rounds.
    #[arg(long)]
    iters: u64,
    #[arg(long, default_value = "gcd")]
    algo: CoordinateRule,
    #[arg(long = "L", default_value = "auto")]
    lipschitz: Lipschitz,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory for `barycenter_<k>.csv` and `trace.csv`.
    #[arg(long)]
    out: PathBuf,
}

fn load_graph(args: &BarycenterArgs) -> Result<NetworkGraph> {
    let builtin = |ctor: fn(usize) -> otx_core::Result<NetworkGraph>| -> Result<NetworkGraph> {
        let Some(m) = args.m else {
            bail!("--m is required with --graph {}", args.graph);
        };
        Ok(ctor(m)?)
    };
    match args.graph.as_str() {
        "path" => builtin(NetworkGraph::path),
        "star" => builtin(NetworkGraph::star),
        "cycle" => builtin(NetworkGraph::cycle),
        file => {
            let text = fs::read_to_string(file).with_context(|| format!("reading graph {file}"))?;
            Ok(NetworkGraph::parse_edge_list(&text, args.m).with_context(|| format!("graph {file}"))?)
        }
    }
}

pub fn run(args: &BarycenterArgs) -> Result<Outcome> {
    if args.iters == 0 {
        bail!("--iters must be at least 1");
    }
    let graph = load_graph(args)?;
    let measures = (0..graph.node_count())
        .map(|k| {
            let path = args.inputs.join(format!("agent_{k}.csv"));
            read_histogram(&path).with_context(|| format!("reading {}", path.display()))
        })
        .collect::<Result<Vec<_>>>()?;
    let cost = match &args.cost {
        Some(path) => read_cost(path).with_context(|| format!("reading cost {}", path.display()))?,
        None => grid_cost(measures[0].len())?,
    };
    let mut prob = BarycenterProblem::new(measures, vec![cost], graph, args.eps)?;
    if let Lipschitz::Value(l) = args.lipschitz {
        prob = prob.with_lipschitz(l)?;
    }

    let mut solver = BarycenterSolver::new(&prob, args.algo, args.seed);
    let mut trace = String::from("t,consensus_residual,objective\n");
    for _ in 0..args.iters {
        let p = solver.round()?;
        let _ = writeln!(
            trace,
            "{},{},{}",
            p.round,
            format_real(p.consensus_residual),
            format_real(p.total_objective())
        );
    }
    let barycenters = solver.barycenters()?;

    fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    for (k, h) in barycenters.iter().enumerate() {
        write_histogram(args.out.join(format!("barycenter_{k}.csv")), h)?;
    }
    fs::write(args.out.join("trace.csv"), trace)?;
    println!("agents={} rounds={}", barycenters.len(), args.iters);
    Ok(Outcome::Done)
}
