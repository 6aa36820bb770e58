//! Decentralized Wasserstein barycenter by accelerated primal-dual
//! coordinate descent over an agent graph.
//!
//! Each agent `k` holds a measure `r_k` and a cost `C_k`. Agents keep dual
//! variables `λ_k, ξ_k, η_k` and a running primal estimate `q̂_k`. A round
//! has two phases: every agent posts `∇W*_k(λ_k)`, then every agent reads
//! its own and its neighbors' posts and updates one coordinate. The second
//! phase touches only round-local data, so the agent order is irrelevant.

mod conjugate;
mod exchange;
mod graph;

pub use conjugate::{conjugate_gradient, conjugate_value};
pub use exchange::GradientBoard;
pub use graph::{consensus_residual, laplacian, NetworkGraph};

use ndarray::Array1;

use crate::error::{Error, Result};
use crate::rng::uniform_index;
use crate::solver::CoordinateRule;
use crate::types::{CostMatrix, Histogram};

/// `α_{t+1} = (1 + √(1 + 8 L A_t)) / (4L)`, `A_{t+1} = A_t + α_{t+1}`,
/// so that `A_{t+1} = 2 L α_{t+1}²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaSchedule {
    lipschitz: f64,
    alpha: f64,
    a: f64,
    t: u64,
}

impl AlphaSchedule {
    pub fn new(lipschitz: f64) -> Result<Self> {
        if !(lipschitz > 0.0 && lipschitz.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "Lipschitz constant must be positive, got {lipschitz}"
            )));
        }
        Ok(Self {
            lipschitz,
            alpha: 0.0,
            a: 0.0,
            t: 0,
        })
    }

    pub fn advance(&mut self) {
        let l = self.lipschitz;
        self.alpha = (1.0 + (1.0 + 8.0 * l * self.a).sqrt()) / (4.0 * l);
        self.a += self.alpha;
        self.t += 1;
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `A_t`.
    pub fn total(&self) -> f64 {
        self.a
    }

    pub fn round(&self) -> u64 {
        self.t
    }

    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    /// `|A_t − 2 L α_t²|`.
    pub fn residual(&self) -> f64 {
        (self.a - 2.0 * self.lipschitz * self.alpha * self.alpha).abs()
    }
}

/// Validated barycenter instance with smoothed measures and per-agent
/// regularization.
#[derive(Debug, Clone)]
pub struct BarycenterProblem {
    graph: NetworkGraph,
    measures: Vec<Histogram>,
    costs: Vec<CostMatrix>,
    weights: Vec<f64>,
    gammas: Vec<f64>,
    epsilon: f64,
    lipschitz: f64,
}

impl BarycenterProblem {
    /// `costs` holds one matrix per agent, or a single matrix shared by all.
    /// Agent weights default to uniform and `L` to the spectral estimate.
    pub fn new(
        measures: Vec<Histogram>,
        costs: Vec<CostMatrix>,
        graph: NetworkGraph,
        epsilon: f64,
    ) -> Result<Self> {
        let m = graph.node_count();
        if measures.len() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: measures.len(),
            });
        }
        let costs = match costs.len() {
            1 => vec![costs[0].clone(); m],
            len if len == m => costs,
            len => {
                return Err(Error::DimensionMismatch {
                    expected: m,
                    found: len,
                })
            }
        };
        let n = measures[0].len();
        for h in &measures {
            if h.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: h.len(),
                });
            }
        }
        for c in &costs {
            if c.dim() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: c.dim(),
                });
            }
        }
        if n < 2 {
            return Err(Error::InvalidParameter("barycenter support needs at least two points".into()));
        }
        if !(epsilon > 0.0 && epsilon < 8.0) {
            return Err(Error::InvalidParameter(format!("epsilon must lie in (0, 8), got {epsilon}")));
        }
        let shift = epsilon / (n as f64 * (8.0 - epsilon));
        let measures = measures
            .iter()
            .map(|h| Histogram::new(h.weights().mapv(|v| (1.0 - epsilon / 8.0) * (v + shift))))
            .collect::<Result<Vec<_>>>()?;

        let mut prob = Self {
            graph,
            measures,
            costs,
            weights: vec![1.0 / m as f64; m],
            gammas: Vec::new(),
            epsilon,
            lipschitz: 0.0,
        };
        prob.refresh_derived();
        Ok(prob)
    }

    /// Positive agent weights, normalized to sum to one.
    pub fn with_weights(mut self, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != self.agents() {
            return Err(Error::DimensionMismatch {
                expected: self.agents(),
                found: weights.len(),
            });
        }
        if weights.iter().any(|w| !(*w > 0.0 && w.is_finite())) {
            return Err(Error::InvalidParameter("agent weights must be positive".into()));
        }
        let total: f64 = weights.iter().sum();
        self.weights = weights.into_iter().map(|w| w / total).collect();
        self.refresh_derived();
        Ok(self)
    }

    pub fn with_lipschitz(mut self, lipschitz: f64) -> Result<Self> {
        AlphaSchedule::new(lipschitz)?;
        self.lipschitz = lipschitz;
        Ok(self)
    }

    fn refresh_derived(&mut self) {
        let m = self.agents() as f64;
        let ln_n = (self.dim() as f64).ln();
        self.gammas = self
            .weights
            .iter()
            .map(|w| self.epsilon / (4.0 * m * w * ln_n))
            .collect();
        let spectral = self.graph.spectral_radius_estimate();
        self.lipschitz = self.gammas.iter().map(|g| m / g).sum::<f64>() * spectral;
    }

    pub fn agents(&self) -> usize {
        self.graph.node_count()
    }

    pub fn dim(&self) -> usize {
        self.measures[0].len()
    }

    pub fn graph(&self) -> &NetworkGraph {
        &self.graph
    }

    /// Smoothed input measures.
    pub fn measures(&self) -> &[Histogram] {
        &self.measures
    }

    pub fn costs(&self) -> &[CostMatrix] {
        &self.costs
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn gammas(&self) -> &[f64] {
        &self.gammas
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    pub fn agent_gradient(&self, k: usize, lambda: &[f64]) -> Array1<f64> {
        conjugate_gradient(lambda, &self.costs[k], &self.measures[k], self.gammas[k])
    }

    pub fn agent_objective(&self, k: usize, lambda: &[f64]) -> f64 {
        conjugate_value(lambda, &self.costs[k], &self.measures[k], self.gammas[k])
    }
}

/// Local state of one agent.
#[derive(Debug, Clone, PartialEq)]
pub struct AgentState {
    pub lambda: Array1<f64>,
    pub xi: Array1<f64>,
    /// Averaged dual iterate (unrelated to the OT regularizer).
    pub eta: Array1<f64>,
    pub q_hat: Array1<f64>,
}

impl AgentState {
    fn zeros(n: usize) -> Self {
        Self {
            lambda: Array1::zeros(n),
            xi: Array1::zeros(n),
            eta: Array1::zeros(n),
            q_hat: Array1::zeros(n),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BarycenterTracePoint {
    pub round: u64,
    pub consensus_residual: f64,
    /// `W*_k(λ_k)` per agent at the round's mixed point.
    pub objectives: Vec<f64>,
}

impl BarycenterTracePoint {
    pub fn total_objective(&self) -> f64 {
        self.objectives.iter().sum()
    }
}

#[derive(Debug, Clone)]
pub struct BarycenterSolver<'p> {
    prob: &'p BarycenterProblem,
    rule: CoordinateRule,
    seed: u64,
    schedule: AlphaSchedule,
    agents: Vec<AgentState>,
    audit: bool,
    access_log: Vec<(usize, usize)>,
}

impl<'p> BarycenterSolver<'p> {
    pub fn new(prob: &'p BarycenterProblem, rule: CoordinateRule, seed: u64) -> Self {
        Self {
            prob,
            rule,
            seed,
            schedule: AlphaSchedule::new(prob.lipschitz()).expect("validated by the problem"),
            agents: vec![AgentState::zeros(prob.dim()); prob.agents()],
            audit: false,
            access_log: Vec::new(),
        }
    }

    /// Keep a log of every gradient read as `(reader, source)`.
    pub fn with_audit(mut self) -> Self {
        self.audit = true;
        self
    }

    pub fn schedule(&self) -> &AlphaSchedule {
        &self.schedule
    }

    pub fn agents(&self) -> &[AgentState] {
        &self.agents
    }

    pub fn access_log(&self) -> &[(usize, usize)] {
        &self.access_log
    }

    pub fn round(&mut self) -> Result<BarycenterTracePoint> {
        let order: Vec<usize> = (0..self.prob.agents()).collect();
        self.round_in_order(&order)
    }

    /// One round with the local updates applied in `order`, which must be a
    /// permutation of the agents.
    pub fn round_in_order(&mut self, order: &[usize]) -> Result<BarycenterTracePoint> {
        let prob = self.prob;
        let m = prob.agents();
        let mut seen = vec![false; m];
        for &k in order {
            if k >= m || std::mem::replace(&mut seen[k], true) {
                return Err(Error::InvalidParameter("update order must be a permutation of the agents".into()));
            }
        }
        if order.len() != m {
            return Err(Error::InvalidParameter("update order must be a permutation of the agents".into()));
        }

        let a_prev = self.schedule.total();
        self.schedule.advance();
        let alpha = self.schedule.alpha();
        let a_next = self.schedule.total();
        let t = self.schedule.round() - 1;

        let mut board = if self.audit {
            GradientBoard::audited(prob.graph())
        } else {
            GradientBoard::new(prob.graph())
        };
        let mut objectives = vec![0.0; m];
        for (k, agent) in self.agents.iter_mut().enumerate() {
            agent.lambda = (&agent.xi * alpha + &agent.eta * a_prev) / a_next;
            let lambda = agent.lambda.as_slice().expect("contiguous");
            objectives[k] = prob.agent_objective(k, lambda);
            board.post(k, prob.agent_gradient(k, lambda));
        }

        let laplacian = prob.graph().laplacian();
        for &k in order {
            let own = board.read(k, k)?;
            let mut direction = own * laplacian[[k, k]];
            for &j in prob.graph().neighbors(k) {
                direction.scaled_add(laplacian[[k, j]], board.read(k, j)?);
            }
            let s = match self.rule {
                CoordinateRule::Randomized => uniform_index(self.seed, t * m as u64 + k as u64, prob.dim()),
                CoordinateRule::Greedy => {
                    let mut best = 0;
                    for (i, d) in direction.iter().enumerate() {
                        if d.abs() > direction[best].abs() {
                            best = i;
                        }
                    }
                    best
                }
            };
            let agent = &mut self.agents[k];
            agent.xi[s] -= alpha * direction[s];
            agent.eta[s] = (alpha * agent.xi[s] + a_prev * agent.eta[s]) / a_next;
            agent.q_hat = (own * alpha + &agent.q_hat * a_prev) / a_next;
        }
        self.access_log.extend(board.take_log());

        let q: Vec<&[f64]> = self
            .agents
            .iter()
            .map(|a| a.q_hat.as_slice().expect("contiguous"))
            .collect();
        Ok(BarycenterTracePoint {
            round: t + 1,
            consensus_residual: consensus_residual(&q, prob.graph())?,
            objectives,
        })
    }

    /// Current per-agent barycenter estimates `q̂_k`, renormalized.
    pub fn barycenters(&self) -> Result<Vec<Histogram>> {
        self.agents
            .iter()
            .map(|a| Histogram::new(a.q_hat.mapv(|v| v.max(0.0))))
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct BarycenterResult {
    pub barycenters: Vec<Histogram>,
    pub trace: Vec<BarycenterTracePoint>,
}

/// Runs `rounds` rounds and returns each agent's estimate with the trace.
pub fn barycenter_solve(
    prob: &BarycenterProblem,
    rule: CoordinateRule,
    rounds: u64,
    seed: u64,
) -> Result<BarycenterResult> {
    if rounds == 0 {
        return Err(Error::InvalidParameter("at least one round is required".into()));
    }
    let mut solver = BarycenterSolver::new(prob, rule, seed);
    let trace = (0..rounds).map(|_| solver.round()).collect::<Result<Vec<_>>>()?;
    Ok(BarycenterResult {
        barycenters: solver.barycenters()?,
        trace,
    })
}

/// `C_ij = ((i − j)/(n − 1))²` on a uniform grid over `[0, 1]`.
pub fn grid_cost(n: usize) -> Result<CostMatrix> {
    if n < 2 {
        return Err(Error::InvalidParameter("grid needs at least two points".into()));
    }
    let h = 1.0 / (n - 1) as f64;
    CostMatrix::new(ndarray::Array2::from_shape_fn((n, n), |(i, j)| {
        let d = (i as f64 - j as f64) * h;
        d * d
    }))
}
