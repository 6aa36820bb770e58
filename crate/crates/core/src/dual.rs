//! Dual of the entropic-regularized transport problem.
//!
//! For duals `λ = (α; β) ∈ ℝ²ⁿ` the primal map is
//! `X_ij(λ) = exp((−C_ij + α_i + β_j)/η − 1)` and the dual objective is
//! `φ(λ) = η Σ_ij X_ij(λ) − ⟨α, r⟩ − ⟨β, l⟩`, whose gradient is the stacked
//! marginal residual `(X1 − r; Xᵀ1 − l)`.

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};
use crate::types::{CostMatrix, Histogram, TransportPlan};

/// Exponents above this are rejected instead of silently saturating.
pub const MAX_EXPONENT: f64 = 700.0;

// Bounds under which the factored kernel evaluation cannot overflow or
// lose the kernel to underflow.
const FACTORED_KERNEL_LIMIT: f64 = 690.0;
const FACTORED_SCALE_LIMIT: f64 = 300.0;

/// Stacked dual variables `λ = (α; β)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DualPoint {
    pub alpha: Array1<f64>,
    pub beta: Array1<f64>,
}

impl DualPoint {
    pub fn zeros(n: usize) -> Self {
        Self {
            alpha: Array1::zeros(n),
            beta: Array1::zeros(n),
        }
    }

    /// Splits a length-`2n` vector into `(α; β)`.
    pub fn from_stacked(v: &[f64]) -> Result<Self> {
        if v.len() % 2 != 0 || v.is_empty() {
            return Err(Error::InvalidParameter(format!(
                "stacked dual vector needs even nonzero length, got {}",
                v.len()
            )));
        }
        let n = v.len() / 2;
        if let Some(index) = v.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFiniteEntry { index });
        }
        Ok(Self {
            alpha: Array1::from(v[..n].to_vec()),
            beta: Array1::from(v[n..].to_vec()),
        })
    }

    pub fn dim(&self) -> usize {
        self.alpha.len()
    }

    pub fn get(&self, i: usize) -> f64 {
        let n = self.dim();
        if i < n {
            self.alpha[i]
        } else {
            self.beta[i - n]
        }
    }

    pub fn set(&mut self, i: usize, value: f64) {
        let n = self.dim();
        if i < n {
            self.alpha[i] = value;
        } else {
            self.beta[i - n] = value;
        }
    }

    pub fn to_stacked(&self) -> Vec<f64> {
        self.alpha.iter().chain(self.beta.iter()).copied().collect()
    }

    /// `(1 − t)·a + t·b`, written into `self`.
    pub fn assign_mix(&mut self, a: &DualPoint, b: &DualPoint, t: f64) {
        ndarray::Zip::from(&mut self.alpha)
            .and(&a.alpha)
            .and(&b.alpha)
            .for_each(|o, &x, &y| *o = (1.0 - t) * x + t * y);
        ndarray::Zip::from(&mut self.beta)
            .and(&a.beta)
            .and(&b.beta)
            .for_each(|o, &x, &y| *o = (1.0 - t) * x + t * y);
    }
}

/// `(C, r, l, η)` together with `L = 4/η`.
#[derive(Debug, Clone)]
pub struct RegularizedProblem {
    cost: CostMatrix,
    r: Histogram,
    l: Histogram,
    eta: f64,
    lipschitz: f64,
    // exp(−C/η − 1), present when it cannot underflow to zero.
    kernel: Option<Array2<f64>>,
}

impl RegularizedProblem {
    pub fn new(cost: CostMatrix, r: Histogram, l: Histogram, eta: f64) -> Result<Self> {
        if !(eta > 0.0 && eta.is_finite()) {
            return Err(Error::InvalidParameter(format!("eta must be positive, got {eta}")));
        }
        let n = cost.dim();
        for h in [&r, &l] {
            if h.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: h.len(),
                });
            }
        }
        let kernel = (cost.max_abs() / eta + 1.0 <= FACTORED_KERNEL_LIMIT)
            .then(|| cost.entries().mapv(|c| (-c / eta - 1.0).exp()));
        Ok(Self {
            cost,
            r,
            l,
            eta,
            lipschitz: 4.0 / eta,
            kernel,
        })
    }

    pub fn dim(&self) -> usize {
        self.cost.dim()
    }

    pub fn cost(&self) -> &CostMatrix {
        &self.cost
    }

    pub fn r(&self) -> &Histogram {
        &self.r
    }

    pub fn l(&self) -> &Histogram {
        &self.l
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    fn check_point(&self, point: &DualPoint) -> Result<()> {
        if point.dim() != self.dim() || point.beta.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: point.dim(),
            });
        }
        let stacked = point.alpha.iter().chain(point.beta.iter());
        if let Some(index) = stacked.into_iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFiniteEntry { index });
        }
        Ok(())
    }

    #[inline]
    fn exponent(&self, i: usize, j: usize, point: &DualPoint) -> f64 {
        let c = self.cost.as_slice()[i * self.dim() + j];
        (-c + point.alpha[i] + point.beta[j]) / self.eta - 1.0
    }

    #[inline]
    fn entry(&self, i: usize, j: usize, point: &DualPoint) -> Result<f64> {
        let e = self.exponent(i, j, point);
        if e > MAX_EXPONENT {
            return Err(Error::ExponentOverflow {
                row: i,
                col: j,
                exponent: e,
            });
        }
        Ok(e.exp())
    }

    /// `X(λ)` evaluated entry by entry.
    pub fn primal_map(&self, point: &DualPoint) -> Result<TransportPlan> {
        self.check_point(point)?;
        let n = self.dim();
        let mut out = Array2::zeros((n, n));
        for i in 0..n {
            for j in 0..n {
                out[[i, j]] = self.entry(i, j, point)?;
            }
        }
        Ok(TransportPlan::from_trusted(out))
    }

    /// `φ(λ) = η Σ X_ij(λ) − ⟨α, r⟩ − ⟨β, l⟩`.
    pub fn dual_value(&self, point: &DualPoint) -> Result<f64> {
        let plan = self.primal_map(point)?;
        let linear = point.alpha.dot(&self.r.weights()) + point.beta.dot(&self.l.weights());
        Ok(self.eta * plan.total_mass() - linear)
    }

    /// `∂φ/∂λ_i`, evaluating a single row (`i < n`) or column of `X(λ)`.
    pub fn coordinate_gradient(&self, point: &DualPoint, i: usize) -> Result<f64> {
        let n = self.dim();
        if i >= 2 * n {
            return Err(Error::IndexOutOfRange { index: i, len: 2 * n });
        }
        self.check_point(point)?;
        let mut sum = 0.0;
        if i < n {
            for j in 0..n {
                sum += self.entry(i, j, point)?;
            }
            Ok(sum - self.r.weights()[i])
        } else {
            let j = i - n;
            for row in 0..n {
                sum += self.entry(row, j, point)?;
            }
            Ok(sum - self.l.weights()[j])
        }
    }

    /// `∇φ(λ) = A vec(X(λ)) − b` in one pass over the plan.
    pub fn full_gradient(&self, point: &DualPoint) -> Result<Array1<f64>> {
        let m = self.primal_map(point)?.marginals();
        let n = self.dim();
        let mut g = Array1::zeros(2 * n);
        for i in 0..n {
            g[i] = m.row[i] - self.r.weights()[i];
            g[n + i] = m.col[i] - self.l.weights()[i];
        }
        Ok(g)
    }

    /// Writes `X(λ)` into `out` (row-major `n×n`), factoring the kernel as
    /// `exp(−C/η − 1)·exp(α_i/η)·exp(β_j/η)` when that is safe and falling
    /// back to direct evaluation otherwise.
    pub(crate) fn fill_plan(&self, point: &DualPoint, out: &mut [f64]) -> Result<()> {
        let n = self.dim();
        debug_assert_eq!(out.len(), n * n);
        let max_scale = point
            .alpha
            .iter()
            .chain(point.beta.iter())
            .fold(0.0_f64, |m, x| m.max((x / self.eta).abs()));
        match &self.kernel {
            Some(kernel) if max_scale <= FACTORED_SCALE_LIMIT => {
                let k = kernel.as_slice().expect("standard layout");
                let u: Vec<f64> = point.alpha.iter().map(|a| (a / self.eta).exp()).collect();
                let v: Vec<f64> = point.beta.iter().map(|b| (b / self.eta).exp()).collect();
                for i in 0..n {
                    let row = &k[i * n..(i + 1) * n];
                    let dst = &mut out[i * n..(i + 1) * n];
                    let ui = u[i];
                    for ((d, &kij), &vj) in dst.iter_mut().zip(row).zip(&v) {
                        *d = kij * ui * vj;
                    }
                }
            }
            _ => {
                for i in 0..n {
                    for j in 0..n {
                        out[i * n + j] = self.entry(i, j, point)?;
                    }
                }
            }
        }
        Ok(())
    }
}
