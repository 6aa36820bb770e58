//! Rounding an approximately feasible plan onto the transportation polytope.
//!
//! Scale rows down to at most `r`, scale columns down to at most `l`, then
//! add the rank-one patch `err_r err_lᵀ / ‖err_r‖₁` carrying the missing mass.
//! The result has marginals exactly `(r, l)` up to floating point and moves at
//! most `2 d(X)` mass in `ℓ₁`.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::types::{Histogram, TransportPlan};

fn scale_factor(target: f64, current: f64) -> f64 {
    if current > 0.0 {
        (target / current).min(1.0)
    } else {
        1.0
    }
}

pub fn round_to_polytope(plan: &TransportPlan, r: &Histogram, l: &Histogram) -> Result<TransportPlan> {
    let n = plan.dim();
    for h in [r, l] {
        if h.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: h.len(),
            });
        }
    }
    let mut x: Array2<f64> = plan.entries().to_owned();
    if let Some(((row, col), _)) = x.indexed_iter().find(|(_, v)| !v.is_finite() || **v < 0.0) {
        return Err(Error::NegativeInput { row, col });
    }
    let r = r.as_slice();
    let l = l.as_slice();

    for (i, mut row) in x.rows_mut().into_iter().enumerate() {
        let s = scale_factor(r[i], row.sum());
        if s < 1.0 {
            row.mapv_inplace(|v| v * s);
        }
    }
    for (j, mut col) in x.columns_mut().into_iter().enumerate() {
        let s = scale_factor(l[j], col.sum());
        if s < 1.0 {
            col.mapv_inplace(|v| v * s);
        }
    }

    // Scaling only removes mass, so both residuals are nonnegative (clamp
    // away round-off) and carry the same total.
    let err_r: Vec<f64> = x
        .rows()
        .into_iter()
        .zip(r)
        .map(|(row, &ri)| (ri - row.sum()).max(0.0))
        .collect();
    let err_l: Vec<f64> = x
        .columns()
        .into_iter()
        .zip(l)
        .map(|(col, &lj)| (lj - col.sum()).max(0.0))
        .collect();
    let total: f64 = err_r.iter().sum();
    if total > 0.0 {
        for (i, mut row) in x.rows_mut().into_iter().enumerate() {
            let a = err_r[i] / total;
            if a == 0.0 {
                continue;
            }
            for (v, &b) in row.iter_mut().zip(&err_l) {
                *v += a * b;
            }
        }
    }
    Ok(TransportPlan::from_trusted(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::marginal_violation;
    use ndarray::array;

    #[test]
    fn feasible_plan_is_fixed_point() {
        let r = Histogram::new(array![0.2, 0.3, 0.5]).unwrap();
        let x = TransportPlan::new(Array2::from_diag(&r.weights())).unwrap();
        let y = round_to_polytope(&x, &r, &r).unwrap();
        for (a, b) in x.entries().iter().zip(y.entries().iter()) {
            assert!((a - b).abs() <= 1e-15);
        }
    }

    #[test]
    fn overfull_diagonal_is_scaled() {
        let half = Histogram::uniform(2).unwrap();
        let x = TransportPlan::new(array![[0.6, 0.0], [0.0, 0.6]]).unwrap();
        let y = round_to_polytope(&x, &half, &half).unwrap();
        let want = array![[0.5, 0.0], [0.0, 0.5]];
        for (a, b) in y.entries().iter().zip(want.iter()) {
            assert!((a - b).abs() <= 1e-15);
        }
    }

    #[test]
    fn empty_rows_receive_patch() {
        let r = Histogram::new(array![0.5, 0.5]).unwrap();
        let l = Histogram::new(array![0.25, 0.75]).unwrap();
        let x = TransportPlan::new(Array2::zeros((2, 2))).unwrap();
        let y = round_to_polytope(&x, &r, &l).unwrap();
        assert!(marginal_violation(&y, &r, &l).unwrap() <= 1e-15);
        assert!((y.entries()[[0, 1]] - 0.375).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_input() {
        let half = Histogram::uniform(2).unwrap();
        let x = TransportPlan::new(array![[0.5, 0.0], [0.0, 0.5]]).unwrap();
        let three = Histogram::uniform(3).unwrap();
        assert!(matches!(
            round_to_polytope(&x, &three, &half),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
