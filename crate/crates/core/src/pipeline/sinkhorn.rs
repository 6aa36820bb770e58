use ndarray::Array2;

use crate::dual::{DualPoint, RegularizedProblem};
use crate::error::{Error, Result};
use crate::solver::IterativeSolver;
use crate::types::TransportPlan;

/// Alternating marginal scaling, kept in dual coordinates so that the plan
/// is always `X(α, β)` from the shared primal map. One iteration is a row
/// rescale followed by a column rescale.
#[derive(Debug, Clone)]
pub struct SinkhornState {
    point: DualPoint,
    n: usize,
    plan: Vec<f64>,
    row: Vec<f64>,
    col: Vec<f64>,
    iterations: u64,
    violation: f64,
}

impl SinkhornState {
    pub fn new(prob: &RegularizedProblem) -> Result<Self> {
        let n = prob.dim();
        let mut state = Self {
            point: DualPoint::zeros(n),
            n,
            plan: vec![0.0; n * n],
            row: vec![0.0; n],
            col: vec![0.0; n],
            iterations: 0,
            violation: f64::INFINITY,
        };
        state.refresh(prob)?;
        Ok(state)
    }

    fn refresh(&mut self, prob: &RegularizedProblem) -> Result<()> {
        let n = self.n;
        prob.fill_plan(&self.point, &mut self.plan)?;
        self.col.iter_mut().for_each(|c| *c = 0.0);
        for i in 0..n {
            let src = &self.plan[i * n..(i + 1) * n];
            self.row[i] = src.iter().sum();
            for (c, x) in self.col.iter_mut().zip(src) {
                *c += x;
            }
        }
        let r = prob.r().as_slice();
        let l = prob.l().as_slice();
        self.violation = (0..n)
            .map(|i| (self.row[i] - r[i]).abs() + (self.col[i] - l[i]).abs())
            .sum();
        Ok(())
    }

    fn rescale(target: &[f64], current: &[f64], duals: &mut ndarray::Array1<f64>, eta: f64) -> Result<()> {
        for ((d, &t), &c) in duals.iter_mut().zip(target).zip(current) {
            if !(c > 0.0) {
                return Err(Error::InvalidParameter(
                    "kernel underflow: a marginal of the scaled plan vanished".into(),
                ));
            }
            if t > 0.0 {
                *d += eta * (t.ln() - c.ln());
            }
        }
        Ok(())
    }
}

impl IterativeSolver for SinkhornState {
    fn iterations(&self) -> u64 {
        self.iterations
    }

    fn violation(&self) -> f64 {
        self.violation
    }

    fn advance(&mut self, prob: &RegularizedProblem) -> Result<()> {
        let eta = prob.eta();
        Self::rescale(prob.r().as_slice(), &self.row, &mut self.point.alpha, eta)?;
        self.refresh(prob)?;
        Self::rescale(prob.l().as_slice(), &self.col, &mut self.point.beta, eta)?;
        self.refresh(prob)?;
        self.iterations += 1;
        Ok(())
    }

    fn plan(&self) -> TransportPlan {
        TransportPlan::from_trusted(
            Array2::from_shape_vec((self.n, self.n), self.plan.clone()).expect("n×n buffer"),
        )
    }

    fn dual_point(&self) -> DualPoint {
        self.point.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{CostMatrix, Histogram};
    use ndarray::array;

    #[test]
    fn columns_are_exact_after_each_iteration() {
        let p = RegularizedProblem::new(
            CostMatrix::new(array![[0.0, 1.0, 4.0], [1.0, 0.0, 1.0], [4.0, 1.0, 0.0]]).unwrap(),
            Histogram::new(array![0.2, 0.5, 0.3]).unwrap(),
            Histogram::new(array![0.6, 0.1, 0.3]).unwrap(),
            0.5,
        )
        .unwrap();
        let mut s = SinkhornState::new(&p).unwrap();
        let mut last = s.violation();
        for _ in 0..300 {
            s.advance(&p).unwrap();
            let m = s.plan().marginals();
            for (c, want) in m.col.iter().zip(p.l().as_slice()) {
                assert!((c - want).abs() < 1e-12);
            }
            assert!(s.violation() <= last + 1e-15);
            last = s.violation();
        }
        assert!(last < 1e-6, "{last}");
    }
}
