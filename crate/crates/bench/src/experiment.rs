use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use otx_core::pipeline::{ot_objective, regularization_for, smooth_marginals, tolerance_for, AnySolver};
use otx_core::rng::derive_seed;
use otx_core::{
    marginal_violation, round_to_polytope, Algorithm, CostMatrix, Histogram, IterativeSolver,
    RegularizedProblem,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{BenchError, Result};
use crate::metrics::{competitive_ratio, spread};
use crate::synthetic::{generate_synthetic_pair, SyntheticImageSpec};

/// Domain tags for [`derive_seed`].
const SEED_DOMAIN_PAIR: u64 = 1;
const SEED_DOMAIN_CELL: u64 = 2;

/// Environment variable capping parallel benchmark cells.
pub const THREADS_ENV: &str = "OTX_THREADS";

/// One benchmark input: two histograms and their ground cost.
#[derive(Debug, Clone)]
pub struct Instance {
    pub r: Histogram,
    pub l: Histogram,
    pub cost: CostMatrix,
}

/// `count` synthetic pairs; pair `p` is drawn from a seed derived from
/// `(seed, p)`, so a pair does not depend on how many others are drawn.
pub fn synthetic_instances(template: &SyntheticImageSpec, count: usize, seed: u64) -> Result<Vec<Instance>> {
    (0..count)
        .map(|p| {
            let spec = SyntheticImageSpec {
                seed: derive_seed(seed, SEED_DOMAIN_PAIR, p as u64),
                ..template.clone()
            };
            let (r, l, cost) = generate_synthetic_pair(&spec)?;
            Ok(Instance { r, l, cost })
        })
        .collect()
}

/// How the per-cell parameter is interpreted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamMode {
    /// Fixed regularization η; unregularized cost of the raw iterate.
    Eta,
    /// Target accuracy ε through the full smoothing and rounding pipeline.
    Epsilon,
}

impl fmt::Display for ParamMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ParamMode::Eta => "eta",
            ParamMode::Epsilon => "eps",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub algorithms: Vec<Algorithm>,
    pub mode: ParamMode,
    pub params: Vec<f64>,
    /// Shared iteration budget for every cell.
    pub budget: u64,
    pub trace_every: u64,
    pub seed: u64,
    pub threads: usize,
    /// Record elapsed milliseconds; otherwise `wall_ms` is 0 so output is
    /// byte-reproducible.
    pub timing: bool,
}

impl ExperimentConfig {
    pub fn new(algorithms: Vec<Algorithm>, mode: ParamMode, params: Vec<f64>, budget: u64) -> Self {
        Self {
            algorithms,
            mode,
            params,
            budget,
            trace_every: 10,
            seed: 0,
            threads: 1,
            timing: false,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.algorithms.is_empty() || self.params.is_empty() {
            return Err(BenchError::InvalidParameter(
                "need at least one algorithm and one parameter".into(),
            ));
        }
        if self.trace_every == 0 || self.budget == 0 {
            return Err(BenchError::InvalidParameter("budget and trace interval must be positive".into()));
        }
        if self.threads == 0 {
            return Err(BenchError::InvalidParameter("thread count must be positive".into()));
        }
        if let Some(p) = self.params.iter().find(|p| !(**p > 0.0 && p.is_finite())) {
            return Err(BenchError::InvalidParameter(format!("parameters must be positive, got {p}")));
        }
        Ok(())
    }
}

/// Reads `OTX_THREADS`, defaulting to 1.
pub fn threads_from_env() -> Result<usize> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(1),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(BenchError::InvalidParameter(format!("{THREADS_ENV} must be a positive integer, got {v:?}"))),
        },
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub pair_id: usize,
    #[serde(with = "algorithm_name")]
    pub algorithm: Algorithm,
    pub param: f64,
    pub iteration: u64,
    pub d_x: f64,
    pub ot_value: f64,
    pub dual_value: f64,
    pub wall_ms: f64,
}

mod algorithm_name {
    use otx_core::Algorithm;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(a: &Algorithm, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(a.name())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Algorithm, D::Error> {
        String::deserialize(d)?.parse().map_err(D::Error::custom)
    }
}

/// Competitive ratios `ln(d_a/d_b)` across pairs at one checkpoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioSummary {
    #[serde(with = "algorithm_name")]
    pub algorithm_a: Algorithm,
    #[serde(with = "algorithm_name")]
    pub algorithm_b: Algorithm,
    pub param: f64,
    pub iteration: u64,
    pub max: f64,
    pub median: f64,
    pub min: f64,
    /// Pairs where both distances were positive.
    pub pairs: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellError {
    pub pair_id: usize,
    pub algorithm: Algorithm,
    pub param: f64,
    pub message: String,
}

impl fmt::Display for CellError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "pair {} {} param {}: {}",
            self.pair_id, self.algorithm, self.param, self.message
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutput {
    pub records: Vec<ExperimentRecord>,
    pub summary: Vec<RatioSummary>,
    pub errors: Vec<CellError>,
}

#[derive(Debug, Clone, Copy)]
struct Cell {
    pair_id: usize,
    algo_idx: usize,
    param_idx: usize,
}

/// Runs every `(pair, algorithm, parameter)` cell for the shared budget,
/// recording at each multiple of `trace_every`. Failing cells are reported
/// in `errors` and the sweep continues.
pub fn run_experiment(instances: &[Instance], cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    cfg.validate()?;
    if instances.is_empty() {
        return Err(BenchError::InvalidParameter("need at least one instance".into()));
    }
    let cells: Vec<Cell> = (0..instances.len())
        .flat_map(|pair_id| {
            (0..cfg.algorithms.len()).flat_map(move |algo_idx| {
                (0..cfg.params.len()).map(move |param_idx| Cell {
                    pair_id,
                    algo_idx,
                    param_idx,
                })
            })
        })
        .collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| BenchError::InvalidParameter(e.to_string()))?;
    let results: Vec<(Cell, otx_core::Result<Vec<ExperimentRecord>>)> = pool.install(|| {
        cells
            .par_iter()
            .map(|&cell| (cell, run_cell(&instances[cell.pair_id], cell, cfg)))
            .collect()
    });

    let mut records = Vec::new();
    let mut errors = Vec::new();
    let mut by_cell = vec![None; cells.len()];
    for (idx, (cell, res)) in results.into_iter().enumerate() {
        match res {
            Ok(recs) => {
                by_cell[idx] = Some(recs.clone());
                records.extend(recs);
            }
            Err(e) => errors.push(CellError {
                pair_id: cell.pair_id,
                algorithm: cfg.algorithms[cell.algo_idx],
                param: cfg.params[cell.param_idx],
                message: e.to_string(),
            }),
        }
    }
    let summary = summarize(&by_cell, instances.len(), cfg);
    Ok(ExperimentOutput {
        records,
        summary,
        errors,
    })
}

fn run_cell(inst: &Instance, cell: Cell, cfg: &ExperimentConfig) -> otx_core::Result<Vec<ExperimentRecord>> {
    let algorithm = cfg.algorithms[cell.algo_idx];
    let param = cfg.params[cell.param_idx];
    // Independent of the algorithm, so a repeated algorithm reproduces itself.
    let seed = derive_seed(
        cfg.seed,
        SEED_DOMAIN_CELL,
        (cell.pair_id * cfg.params.len() + cell.param_idx) as u64,
    );
    let prob = match cfg.mode {
        ParamMode::Eta => RegularizedProblem::new(inst.cost.clone(), inst.r.clone(), inst.l.clone(), param)?,
        ParamMode::Epsilon => {
            let eta = regularization_for(param, inst.cost.dim());
            let eps_prime = tolerance_for(param, inst.cost.max_abs());
            let (r, l) = smooth_marginals(&inst.r, &inst.l, eps_prime)?;
            RegularizedProblem::new(inst.cost.clone(), r, l, eta)?
        }
    };

    let start = Instant::now();
    let mut solver = AnySolver::new(&prob, algorithm, seed)?;
    let mut out = Vec::with_capacity((cfg.budget / cfg.trace_every) as usize);
    for k in 1..=cfg.budget {
        solver.advance(&prob)?;
        if k % cfg.trace_every != 0 {
            continue;
        }
        let wall_ms = if cfg.timing {
            start.elapsed().as_secs_f64() * 1e3
        } else {
            0.0
        };
        let plan = solver.plan();
        let ot_value = match cfg.mode {
            ParamMode::Eta => ot_objective(&inst.cost, &plan)?,
            ParamMode::Epsilon => ot_objective(&inst.cost, &round_to_polytope(&plan, &inst.r, &inst.l)?)?,
        };
        out.push(ExperimentRecord {
            pair_id: cell.pair_id,
            algorithm,
            param,
            iteration: k,
            d_x: marginal_violation(&plan, prob.r(), prob.l())?,
            ot_value,
            dual_value: prob.dual_value(&solver.dual_point())?,
            wall_ms,
        });
    }
    Ok(out)
}

fn summarize(
    by_cell: &[Option<Vec<ExperimentRecord>>],
    pairs: usize,
    cfg: &ExperimentConfig,
) -> Vec<RatioSummary> {
    let algos = cfg.algorithms.len();
    let params = cfg.params.len();
    let cell_index = |pair: usize, a: usize, p: usize| (pair * algos + a) * params + p;
    let checkpoints = (cfg.budget / cfg.trace_every) as usize;
    let mut out = Vec::new();
    for a in 0..algos {
        for b in a + 1..algos {
            for p in 0..params {
                for c in 0..checkpoints {
                    let ratios: Vec<f64> = (0..pairs)
                        .filter_map(|pair| {
                            let ra = by_cell[cell_index(pair, a, p)].as_ref()?;
                            let rb = by_cell[cell_index(pair, b, p)].as_ref()?;
                            competitive_ratio(ra[c].d_x, rb[c].d_x).ok()
                        })
                        .collect();
                    if let Some(s) = spread(&ratios) {
                        out.push(RatioSummary {
                            algorithm_a: cfg.algorithms[a],
                            algorithm_b: cfg.algorithms[b],
                            param: cfg.params[p],
                            iteration: (c as u64 + 1) * cfg.trace_every,
                            max: s.max,
                            median: s.median,
                            min: s.min,
                            pairs: ratios.len(),
                        });
                    }
                }
            }
        }
    }
    out
}

impl FromStr for ParamMode {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "eta" => Ok(Self::Eta),
            "eps" | "epsilon" => Ok(Self::Epsilon),
            other => Err(BenchError::InvalidParameter(format!("unknown parameter mode {other:?}"))),
        }
    }
}
