use ndarray::Array2;

use super::{CoordinateRule, IterativeSolver, ThetaSchedule};
use crate::dual::{DualPoint, RegularizedProblem};
use crate::error::{Error, Result};
use crate::rng::uniform_index;
use crate::types::TransportPlan;

/// What a single coordinate step did.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepInfo {
    pub coordinate: usize,
    /// `∇_{i_k} φ(y^k)`.
    pub gradient: f64,
    /// `θ_k` used by the step.
    pub theta: f64,
}

/// Iterate of the accelerated primal-dual coordinate descent loop.
///
/// Between steps the state holds the mixed point `y^k`, the plan `x(y^k)`
/// and its gradient, and the weighted primal sum `Σ_{j≤k} x(y^j)/θ_j`.
#[derive(Debug, Clone)]
pub struct SolverState {
    lambda: DualPoint,
    z: DualPoint,
    y: DualPoint,
    schedule: ThetaSchedule,
    rule: CoordinateRule,
    rng_seed: u64,
    n: usize,
    // x(y^k), row-major.
    current: Vec<f64>,
    // ∇φ(y^k) = (x(y^k)1 − r; x(y^k)ᵀ1 − l).
    gradient: Vec<f64>,
    primal_sum: Vec<f64>,
    primal_row: Vec<f64>,
    primal_col: Vec<f64>,
    violation: f64,
}

impl SolverState {
    /// `λ⁰ = z⁰ = 0`, `θ_0 = 1`, `C_0 = 1`, with `x(y⁰)` already accumulated.
    pub fn new(prob: &RegularizedProblem, rule: CoordinateRule, rng_seed: u64) -> Result<Self> {
        let n = prob.dim();
        let mut state = Self {
            lambda: DualPoint::zeros(n),
            z: DualPoint::zeros(n),
            y: DualPoint::zeros(n),
            schedule: ThetaSchedule::new(),
            rule,
            rng_seed,
            n,
            current: vec![0.0; n * n],
            gradient: vec![0.0; 2 * n],
            primal_sum: vec![0.0; n * n],
            primal_row: vec![0.0; n],
            primal_col: vec![0.0; n],
            violation: f64::INFINITY,
        };
        state.absorb_mixed_point(prob)?;
        Ok(state)
    }

    pub fn lambda(&self) -> &DualPoint {
        &self.lambda
    }

    pub fn z(&self) -> &DualPoint {
        &self.z
    }

    pub fn y(&self) -> &DualPoint {
        &self.y
    }

    pub fn schedule(&self) -> &ThetaSchedule {
        &self.schedule
    }

    pub fn rule(&self) -> CoordinateRule {
        self.rule
    }

    pub fn rng_seed(&self) -> u64 {
        self.rng_seed
    }

    /// `∇φ(y^k)` as maintained by the loop.
    pub fn gradient_at_y(&self) -> &[f64] {
        &self.gradient
    }

    pub fn primal_sum(&self) -> Array2<f64> {
        Array2::from_shape_vec((self.n, self.n), self.primal_sum.clone()).expect("n×n buffer")
    }

    /// The averaged primal iterate `x^k = primal_sum / C_k`.
    pub fn averaged_plan(&self) -> TransportPlan {
        let c = self.schedule.weight_sum();
        let entries: Vec<f64> = self.primal_sum.iter().map(|v| v / c).collect();
        TransportPlan::from_trusted(
            Array2::from_shape_vec((self.n, self.n), entries).expect("n×n buffer"),
        )
    }

    /// The coordinate the configured rule picks at the current iterate.
    pub fn select_coordinate(&self) -> usize {
        match self.rule {
            CoordinateRule::Randomized => {
                uniform_index(self.rng_seed, self.schedule.k(), 2 * self.n)
            }
            CoordinateRule::Greedy => {
                let mut best = 0;
                let mut best_abs = -1.0;
                for (i, g) in self.gradient.iter().enumerate() {
                    if g.abs() > best_abs {
                        best = i;
                        best_abs = g.abs();
                    }
                }
                best
            }
        }
    }

    /// One iteration with the configured rule.
    pub fn step(&mut self, prob: &RegularizedProblem) -> Result<StepInfo> {
        let i = self.select_coordinate();
        self.step_coordinate(prob, i)
    }

    /// One iteration along coordinate `i`:
    /// `λ^{k+1} = y^k − (1/L) ∇_iφ(y^k) e_i`,
    /// `z^{k+1}_i = z^k_i − ∇_iφ(y^k)/(2nLθ_k)`, then advance θ, re-mix `y`
    /// and fold `x(y^{k+1})/θ_{k+1}` into the primal sum.
    pub fn step_coordinate(&mut self, prob: &RegularizedProblem, i: usize) -> Result<StepInfo> {
        let n = self.n;
        if i >= 2 * n {
            return Err(Error::IndexOutOfRange { index: i, len: 2 * n });
        }
        let g = self.gradient[i];
        let theta = self.schedule.theta();
        let lipschitz = prob.lipschitz();

        self.lambda.clone_from(&self.y);
        self.lambda.set(i, self.y.get(i) - g / lipschitz);
        let zi = self.z.get(i);
        self.z.set(i, zi - g / (2.0 * n as f64 * lipschitz * theta));

        self.schedule.advance();
        self.absorb_mixed_point(prob)?;
        Ok(StepInfo {
            coordinate: i,
            gradient: g,
            theta,
        })
    }

    // Mixes y^k from (λ^k, z^k), evaluates x(y^k) and its gradient and adds
    // x(y^k)/θ_k to the running primal sum.
    fn absorb_mixed_point(&mut self, prob: &RegularizedProblem) -> Result<()> {
        let n = self.n;
        let theta = self.schedule.theta();
        let (lambda, z) = (&self.lambda, &self.z);
        self.y.assign_mix(lambda, z, theta);
        prob.fill_plan(&self.y, &mut self.current)?;

        let weight = 1.0 / theta;
        let (row_grad, col_grad) = self.gradient.split_at_mut(n);
        col_grad.iter_mut().for_each(|c| *c = 0.0);
        for i in 0..n {
            let src = &self.current[i * n..(i + 1) * n];
            let dst = &mut self.primal_sum[i * n..(i + 1) * n];
            let mut row = 0.0;
            for ((d, &x), c) in dst.iter_mut().zip(src).zip(col_grad.iter_mut()) {
                *d += x * weight;
                *c += x;
                row += x;
            }
            row_grad[i] = row;
        }

        let r = prob.r().as_slice();
        let l = prob.l().as_slice();
        let c_k = self.schedule.weight_sum();
        let mut violation = 0.0;
        for i in 0..n {
            self.primal_row[i] += row_grad[i] * weight;
            self.primal_col[i] += col_grad[i] * weight;
            violation += (self.primal_row[i] / c_k - r[i]).abs();
            violation += (self.primal_col[i] / c_k - l[i]).abs();
            row_grad[i] -= r[i];
            col_grad[i] -= l[i];
        }
        self.violation = violation;
        Ok(())
    }
}

impl IterativeSolver for SolverState {
    fn iterations(&self) -> u64 {
        self.schedule.k()
    }

    fn violation(&self) -> f64 {
        self.violation
    }

    fn advance(&mut self, prob: &RegularizedProblem) -> Result<()> {
        self.step(prob).map(|_| ())
    }

    fn plan(&self) -> TransportPlan {
        self.averaged_plan()
    }

    fn dual_point(&self) -> DualPoint {
        self.lambda.clone()
    }
}
