//! Fenchel conjugate of the regularized transport cost with a fixed first
//! marginal `p`:
//! `W*(λ) = γ Σ_j p_j log Σ_i exp((λ_i − C_ij)/γ)`,
//! whose gradient is the `p`-weighted mixture of column softmaxes.

use ndarray::Array1;

use crate::types::{CostMatrix, Histogram};

fn column_logits(lambda: &[f64], cost: &CostMatrix, j: usize, gamma: f64, out: &mut [f64]) -> f64 {
    let c = cost.entries();
    let mut max = f64::NEG_INFINITY;
    for (i, o) in out.iter_mut().enumerate() {
        *o = (lambda[i] - c[[i, j]]) / gamma;
        max = max.max(*o);
    }
    max
}

/// `W*_{γ,p}(λ)`.
pub fn conjugate_value(lambda: &[f64], cost: &CostMatrix, p: &Histogram, gamma: f64) -> f64 {
    let n = lambda.len();
    let mut logits = vec![0.0; n];
    let mut total = 0.0;
    for (j, &pj) in p.as_slice().iter().enumerate() {
        let max = column_logits(lambda, cost, j, gamma, &mut logits);
        let lse = max + logits.iter().map(|z| (z - max).exp()).sum::<f64>().ln();
        total += pj * lse;
    }
    gamma * total
}

/// `[∇W*(λ)]_i = Σ_j p_j softmax_i((λ − C_{·j})/γ)`, max-shifted per column.
pub fn conjugate_gradient(lambda: &[f64], cost: &CostMatrix, p: &Histogram, gamma: f64) -> Array1<f64> {
    let n = lambda.len();
    let mut logits = vec![0.0; n];
    let mut out = Array1::zeros(n);
    for (j, &pj) in p.as_slice().iter().enumerate() {
        if pj == 0.0 {
            continue;
        }
        let max = column_logits(lambda, cost, j, gamma, &mut logits);
        let mut sum = 0.0;
        for z in logits.iter_mut() {
            *z = (*z - max).exp();
            sum += *z;
        }
        let scale = pj / sum;
        for (o, z) in out.iter_mut().zip(&logits) {
            *o += scale * z;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{array, Array2};

    #[test]
    fn uniform_at_origin_with_zero_cost() {
        let c = CostMatrix::new(Array2::zeros((4, 4))).unwrap();
        let p = Histogram::new(array![0.1, 0.2, 0.3, 0.4]).unwrap();
        let g = conjugate_gradient(&[0.0; 4], &c, &p, 0.7);
        assert!(g.iter().all(|v| (v - 0.25).abs() < 1e-15));
    }

    #[test]
    fn single_point() {
        let c = CostMatrix::new(array![[3.0]]).unwrap();
        let p = Histogram::new(array![1.0]).unwrap();
        assert_eq!(conjugate_gradient(&[-40.0], &c, &p, 0.01)[0], 1.0);
    }

    #[test]
    fn extreme_duals_stay_finite() {
        let c = CostMatrix::new(array![[0.0, 1.0], [1.0, 0.0]]).unwrap();
        let p = Histogram::uniform(2).unwrap();
        let g = conjugate_gradient(&[1e4, -1e4], &c, &p, 1e-3);
        assert!((g[0] - 1.0).abs() < 1e-15 && g[1] >= 0.0);
        assert!(conjugate_value(&[1e4, -1e4], &c, &p, 1e-3).is_finite());
    }
}
