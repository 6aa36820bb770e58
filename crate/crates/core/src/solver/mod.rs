//! Accelerated primal-dual coordinate descent on the regularized dual.
//!
//! Both variants share one loop ([`SolverState`]); they differ only in how
//! the coordinate is chosen ([`CoordinateRule`]). The loop runs until the
//! averaged primal iterate satisfies `‖A vec(x^k) − b‖₁ ≤ ε′`.

mod apdcd;
mod schedule;

use std::fmt;
use std::str::FromStr;

pub use apdcd::{SolverState, StepInfo};
pub use schedule::ThetaSchedule;

use crate::dual::{DualPoint, RegularizedProblem};
use crate::error::{Error, Result};
use crate::pipeline::ot_objective;
use crate::types::TransportPlan;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CoordinateRule {
    /// Uniform draw from `0..2n`, keyed by `(seed, iteration)`.
    Randomized,
    /// `argmax_i |∇_i φ(y^k)|`, lowest index on ties.
    Greedy,
}

impl fmt::Display for CoordinateRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CoordinateRule::Randomized => "randomized",
            CoordinateRule::Greedy => "greedy",
        })
    }
}

impl FromStr for CoordinateRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "randomized" | "random" | "rcd" | "apdrcd" => Ok(Self::Randomized),
            "greedy" | "gcd" | "apdgcd" => Ok(Self::Greedy),
            other => Err(Error::InvalidParameter(format!("unknown coordinate rule {other:?}"))),
        }
    }
}

/// Common driver surface for the dual solvers.
pub trait IterativeSolver {
    fn iterations(&self) -> u64;
    /// `‖A vec(x^k) − b‖₁` of the current primal output.
    fn violation(&self) -> f64;
    fn advance(&mut self, prob: &RegularizedProblem) -> Result<()>;
    /// The current primal output `x^k`.
    fn plan(&self) -> TransportPlan;
    /// The dual iterate whose objective is reported in traces.
    fn dual_point(&self) -> DualPoint;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Converged,
    MaxItersExceeded,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TracePoint {
    pub iteration: u64,
    pub violation: f64,
    pub dual_value: f64,
    pub ot_value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub plan: TransportPlan,
    pub iterations: u64,
    pub final_violation: f64,
    pub trace: Vec<TracePoint>,
    pub status: SolveStatus,
}

/// Runs APDRCD (`Randomized`) or APDGCD (`Greedy`) to tolerance `eps_prime`.
pub fn solve(
    prob: &RegularizedProblem,
    rule: CoordinateRule,
    seed: u64,
    eps_prime: f64,
    max_iters: u64,
    trace_every: u64,
) -> Result<SolveReport> {
    let state = SolverState::new(prob, rule, seed)?;
    run_to_tolerance(prob, state, eps_prime, max_iters, trace_every)
}

/// Advances `solver` until its violation is at most `eps_prime`, checking
/// after every iteration and sampling the trace every `trace_every`
/// iterations (plus the last one).
pub fn run_to_tolerance<S: IterativeSolver>(
    prob: &RegularizedProblem,
    mut solver: S,
    eps_prime: f64,
    max_iters: u64,
    trace_every: u64,
) -> Result<SolveReport> {
    if !(eps_prime > 0.0) {
        return Err(Error::InvalidParameter(format!("eps' must be positive, got {eps_prime}")));
    }
    if max_iters == 0 {
        return Err(Error::InvalidParameter("max_iters must be at least 1".into()));
    }
    let trace_every = trace_every.max(1);
    let mut trace = Vec::new();
    let status = loop {
        let k = solver.iterations();
        let converged = solver.violation() <= eps_prime;
        let exhausted = k >= max_iters;
        if k % trace_every == 0 || converged || exhausted {
            trace.push(trace_point(prob, &solver)?);
        }
        if converged {
            break SolveStatus::Converged;
        }
        if exhausted {
            break SolveStatus::MaxItersExceeded;
        }
        solver.advance(prob)?;
    };
    let report = SolveReport {
        plan: solver.plan(),
        iterations: solver.iterations(),
        final_violation: solver.violation(),
        trace,
        status,
    };
    match status {
        SolveStatus::Converged => Ok(report),
        SolveStatus::MaxItersExceeded => Err(Error::MaxItersExceeded(Box::new(report))),
    }
}

pub fn trace_point<S: IterativeSolver>(prob: &RegularizedProblem, solver: &S) -> Result<TracePoint> {
    let plan = solver.plan();
    Ok(TracePoint {
        iteration: solver.iterations(),
        violation: solver.violation(),
        dual_value: prob.dual_value(&solver.dual_point())?,
        ot_value: ot_objective(prob.cost(), &plan)?,
    })
}

/// `R = ‖C‖∞/η + ln n − 2 ln(min_i{r_i, l_i})`.
pub fn bound_radius(prob: &RegularizedProblem) -> f64 {
    let n = prob.dim() as f64;
    let min_mass = prob.r().min().min(prob.l().min());
    prob.cost().max_abs() / prob.eta() + n.ln() - 2.0 * min_mass.ln()
}

/// `12 n^{3/2} √((R + 1/2)/ε′) + 1`.
pub fn iteration_bound(prob: &RegularizedProblem, eps_prime: f64) -> f64 {
    let n = prob.dim() as f64;
    12.0 * n.powf(1.5) * ((bound_radius(prob) + 0.5) / eps_prime).sqrt() + 1.0
}

/// Four times [`iteration_bound`], rounded up.
pub fn default_max_iters(prob: &RegularizedProblem, eps_prime: f64) -> u64 {
    let b = 4.0 * iteration_bound(prob, eps_prime);
    if b.is_finite() {
        b.ceil() as u64
    } else {
        u64::MAX
    }
}
