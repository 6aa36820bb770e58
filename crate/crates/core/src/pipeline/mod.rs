//! End-to-end ε-approximation of the unregularized transport cost.
//!
//! Given a target accuracy ε the pipeline picks `η = ε/(4 ln n)` and
//! `ε′ = ε/(8‖C‖∞)`, pulls the marginals slightly toward uniform, solves the
//! regularized dual to `ε′/2`, and rounds the averaged plan back onto the
//! polytope of the original marginals.

mod oracle;
mod sinkhorn;

use std::fmt;
use std::str::FromStr;

pub use oracle::{line_cost, monotone_coupling_oracle};
pub use sinkhorn::SinkhornState;

use crate::dual::RegularizedProblem;
use crate::error::{Error, Result};
use crate::rounding::round_to_polytope;
use crate::solver::{
    default_max_iters, run_to_tolerance, CoordinateRule, IterativeSolver, SolveReport, SolveStatus,
    SolverState,
};
use crate::types::{CostMatrix, Histogram, TransportPlan};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Apdrcd,
    Apdgcd,
    Sinkhorn,
}

impl Algorithm {
    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::Apdrcd => "apdrcd",
            Algorithm::Apdgcd => "apdgcd",
            Algorithm::Sinkhorn => "sinkhorn",
        }
    }

    pub fn coordinate_rule(&self) -> Option<CoordinateRule> {
        match self {
            Algorithm::Apdrcd => Some(CoordinateRule::Randomized),
            Algorithm::Apdgcd => Some(CoordinateRule::Greedy),
            Algorithm::Sinkhorn => None,
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "apdrcd" => Ok(Self::Apdrcd),
            "apdgcd" => Ok(Self::Apdgcd),
            "sinkhorn" => Ok(Self::Sinkhorn),
            other => Err(Error::InvalidParameter(format!(
                "unknown algorithm {other:?} (expected apdrcd, apdgcd or sinkhorn)"
            ))),
        }
    }
}

/// Either solver behind one type, for callers that pick the algorithm at runtime.
#[derive(Debug, Clone)]
pub enum AnySolver {
    Coordinate(SolverState),
    Sinkhorn(SinkhornState),
}

impl AnySolver {
    pub fn new(prob: &RegularizedProblem, algorithm: Algorithm, seed: u64) -> Result<Self> {
        Ok(match algorithm.coordinate_rule() {
            Some(rule) => Self::Coordinate(SolverState::new(prob, rule, seed)?),
            None => Self::Sinkhorn(SinkhornState::new(prob)?),
        })
    }
}

impl IterativeSolver for AnySolver {
    fn iterations(&self) -> u64 {
        match self {
            Self::Coordinate(s) => s.iterations(),
            Self::Sinkhorn(s) => s.iterations(),
        }
    }

    fn violation(&self) -> f64 {
        match self {
            Self::Coordinate(s) => s.violation(),
            Self::Sinkhorn(s) => s.violation(),
        }
    }

    fn advance(&mut self, prob: &RegularizedProblem) -> Result<()> {
        match self {
            Self::Coordinate(s) => s.advance(prob),
            Self::Sinkhorn(s) => s.advance(prob),
        }
    }

    fn plan(&self) -> TransportPlan {
        match self {
            Self::Coordinate(s) => s.plan(),
            Self::Sinkhorn(s) => s.plan(),
        }
    }

    fn dual_point(&self) -> crate::dual::DualPoint {
        match self {
            Self::Coordinate(s) => s.dual_point(),
            Self::Sinkhorn(s) => s.dual_point(),
        }
    }
}

/// Solves a fixed regularized problem to `eps_prime` with the chosen algorithm.
pub fn solve_regularized(
    prob: &RegularizedProblem,
    algorithm: Algorithm,
    seed: u64,
    eps_prime: f64,
    max_iters: u64,
    trace_every: u64,
) -> Result<SolveReport> {
    let solver = AnySolver::new(prob, algorithm, seed)?;
    run_to_tolerance(prob, solver, eps_prime, max_iters, trace_every)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ApproxConfig {
    /// Target accuracy ε in cost units.
    pub epsilon: f64,
    pub algorithm: Algorithm,
    pub seed: u64,
    /// `None` selects four times the theoretical iteration bound.
    pub max_iters: Option<u64>,
    pub trace_every: u64,
}

impl ApproxConfig {
    pub fn new(epsilon: f64, algorithm: Algorithm) -> Self {
        Self {
            epsilon,
            algorithm,
            seed: 0,
            max_iters: None,
            trace_every: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ApproxResult {
    /// Rounded plan, feasible for the original marginals.
    pub plan: TransportPlan,
    pub ot_value: f64,
    pub eta: f64,
    pub eps_prime: f64,
    pub report: SolveReport,
}

/// `η = ε/(4 ln n)`.
pub fn regularization_for(epsilon: f64, n: usize) -> f64 {
    epsilon / (4.0 * (n as f64).ln())
}

/// `ε′ = ε/(8‖C‖∞)`.
pub fn tolerance_for(epsilon: f64, cost_max: f64) -> f64 {
    epsilon / (8.0 * cost_max)
}

/// `(1 − ε′/8)·h + ε′/(8n)`, applied to both marginals.
pub fn smooth_marginals(r: &Histogram, l: &Histogram, eps_prime: f64) -> Result<(Histogram, Histogram)> {
    if !(eps_prime > 0.0 && eps_prime <= 8.0) {
        return Err(Error::EpsPrimeOutOfRange(eps_prime));
    }
    let smooth = |h: &Histogram| {
        let n = h.len() as f64;
        let shift = eps_prime / (8.0 * n);
        Histogram::new(h.weights().mapv(|w| (1.0 - eps_prime / 8.0) * w + shift))
    };
    Ok((smooth(r)?, smooth(l)?))
}

/// `⟨C, X⟩`.
pub fn ot_objective(cost: &CostMatrix, plan: &TransportPlan) -> Result<f64> {
    if cost.dim() != plan.dim() {
        return Err(Error::DimensionMismatch {
            expected: cost.dim(),
            found: plan.dim(),
        });
    }
    Ok(cost
        .entries()
        .iter()
        .zip(plan.entries().iter())
        .map(|(c, x)| c * x)
        .sum())
}

/// ε-approximate transport plan between `r` and `l` under cost `C`.
///
/// A zero cost matrix makes every feasible plan optimal; the independent
/// coupling `r lᵀ` is returned without running a solver.
pub fn approximate_ot(
    cost: &CostMatrix,
    r: &Histogram,
    l: &Histogram,
    cfg: &ApproxConfig,
) -> Result<ApproxResult> {
    let n = cost.dim();
    if n < 2 {
        return Err(Error::InvalidParameter(format!("need n >= 2, got {n}")));
    }
    if !(cfg.epsilon > 0.0 && cfg.epsilon.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "epsilon must be positive, got {}",
            cfg.epsilon
        )));
    }
    for h in [r, l] {
        if h.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: h.len(),
            });
        }
    }
    let eta = regularization_for(cfg.epsilon, n);
    if cost.max_abs() == 0.0 {
        let plan = TransportPlan::product(r, l);
        return Ok(ApproxResult {
            report: SolveReport {
                plan: plan.clone(),
                iterations: 0,
                final_violation: 0.0,
                trace: Vec::new(),
                status: SolveStatus::Converged,
            },
            plan,
            ot_value: 0.0,
            eta,
            eps_prime: f64::INFINITY,
        });
    }

    let eps_prime = tolerance_for(cfg.epsilon, cost.max_abs());
    let (r_smooth, l_smooth) = smooth_marginals(r, l, eps_prime)?;
    let prob = RegularizedProblem::new(cost.clone(), r_smooth, l_smooth, eta)?;
    let tol = eps_prime / 2.0;
    let max_iters = cfg.max_iters.unwrap_or_else(|| default_max_iters(&prob, tol));
    let report = solve_regularized(&prob, cfg.algorithm, cfg.seed, tol, max_iters, cfg.trace_every)?;
    let plan = round_to_polytope(&report.plan, r, l)?;
    let ot_value = ot_objective(cost, &plan)?;
    Ok(ApproxResult {
        plan,
        ot_value,
        eta,
        eps_prime,
        report,
    })
}
