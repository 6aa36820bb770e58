use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Subcommand};
use otx_bench::records::{write_records, write_summary};
use otx_bench::{
    pixel_grid_cost, run_experiment, synthetic_instances, threads_from_env, ExperimentConfig, GroundMetric,
    IdxImages, Instance, ParamMode, SyntheticImageSpec,
};
use otx_core::rng::{derive_seed, uniform_index};
use otx_core::Algorithm;

use crate::Outcome;

/// Seed domain for choosing IDX image pairs.
const SEED_DOMAIN_IDX: u64 = 3;

#[derive(Debug, Subcommand)]
pub enum BenchCommand {
    /// Random foreground squares on a pixel grid.
    Synthetic(SyntheticArgs),
    /// Image pairs drawn from an IDX image file.
    Idx(IdxArgs),
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("param").required(true).args(["eta", "eps"])))]
pub struct SweepArgs {
    /// Number of image pairs.
    #[arg(long, default_value_t = 10)]
    pairs: usize,
    /// Fixed regularization values, comma separated.
    #[arg(long, value_delimiter = ',')]
    eta: Vec<f64>,
    /// Target accuracies for the full pipeline, comma separated.
    #[arg(long, value_delimiter = ',')]
    eps: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "apdrcd,apdgcd,sinkhorn")]
    algos: Vec<Algorithm>,
    /// Iterations per cell.
    #[arg(long, default_value_t = 1000)]
    budget: u64,
    #[arg(long, default_value_t = 10)]
    trace_every: u64,
    #[arg(long, default_value = "sql2")]
    metric: GroundMetric,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Record wall-clock milliseconds (otherwise written as 0).
    #[arg(long)]
    timing: bool,
    /// Per-checkpoint records.
    #[arg(long)]
    out: PathBuf,
    /// Competitive-ratio summary; defaults to `<out>` with a `.summary.csv` suffix.
    #[arg(long)]
    summary: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SyntheticArgs {
    /// Image side length in pixels.
    #[arg(long, default_value_t = 20)]
    n: usize,
    /// Foreground area fraction.
    #[arg(long, default_value_t = 0.1)]
    fg: f64,
    #[command(flatten)]
    sweep: SweepArgs,
}

#[derive(Debug, Args)]
pub struct IdxArgs {
    #[arg(long)]
    images: PathBuf,
    /// Resample every image to SIDE × SIDE before use.
    #[arg(long)]
    resize: Option<usize>,
    #[command(flatten)]
    sweep: SweepArgs,
}

fn summary_path(sweep: &SweepArgs) -> PathBuf {
    sweep.summary.clone().unwrap_or_else(|| {
        let stem = sweep.out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        sweep.out.with_file_name(format!("{stem}.summary.csv"))
    })
}

fn idx_instances(args: &IdxArgs) -> Result<Vec<Instance>> {
    let bytes = fs::read(&args.images).with_context(|| format!("reading {}", args.images.display()))?;
    let images = IdxImages::parse(&bytes)?;
    if images.count < 2 {
        bail!("{} holds {} image(s); need at least two", args.images.display(), images.count);
    }
    let (rows, cols) = match args.resize {
        Some(side) => (side, side),
        None => (images.rows, images.cols),
    };
    let cost = pixel_grid_cost(rows, cols, args.sweep.metric)?;
    let pick_seed = derive_seed(args.sweep.seed, SEED_DOMAIN_IDX, 0);
    (0..args.sweep.pairs)
        .map(|p| {
            let a = uniform_index(pick_seed, 2 * p as u64, images.count);
            let mut b = uniform_index(pick_seed, 2 * p as u64 + 1, images.count);
            if b == a {
                b = (a + 1) % images.count;
            }
            Ok(Instance {
                r: images.histogram(a, args.resize)?,
                l: images.histogram(b, args.resize)?,
                cost: cost.clone(),
            })
        })
        .collect()
}

fn sweep(instances: &[Instance], sweep: &SweepArgs) -> Result<Outcome> {
    let (mode, params) = if sweep.eta.is_empty() {
        (ParamMode::Epsilon, sweep.eps.clone())
    } else {
        (ParamMode::Eta, sweep.eta.clone())
    };
    let cfg = ExperimentConfig {
        trace_every: sweep.trace_every,
        seed: sweep.seed,
        threads: threads_from_env()?,
        timing: sweep.timing,
        ..ExperimentConfig::new(sweep.algos.clone(), mode, params, sweep.budget)
    };
    let out = run_experiment(instances, &cfg)?;
    if !out.errors.is_empty() {
        for e in &out.errors {
            eprintln!("cell failed: {e}");
        }
        bail!("{} benchmark cell(s) failed; no output written", out.errors.len());
    }
    write_csv(&sweep.out, |w| write_records(w, &out.records))?;
    write_csv(&summary_path(sweep), |w| write_summary(w, &out.summary))?;
    println!("records={} summary_rows={}", out.records.len(), out.summary.len());
    Ok(Outcome::Done)
}

fn write_csv(path: &Path, f: impl FnOnce(&mut Vec<u8>) -> otx_bench::Result<()>) -> Result<()> {
    let mut buf = Vec::new();
    f(&mut buf)?;
    fs::write(path, buf).with_context(|| format!("writing {}", path.display()))
}

pub fn run(cmd: &BenchCommand) -> Result<Outcome> {
    match cmd {
        BenchCommand::Synthetic(args) => {
            let spec = SyntheticImageSpec {
                side: args.n,
                fg_fraction: args.fg,
                metric: args.sweep.metric,
                ..Default::default()
            };
            let instances = synthetic_instances(&spec, args.sweep.pairs, args.sweep.seed)?;
            sweep(&instances, &args.sweep)
        }
        BenchCommand::Idx(args) => sweep(&idx_instances(args)?, &args.sweep),
    }
}
