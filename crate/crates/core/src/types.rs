//! Validated domain types: histograms, cost matrices and transport plans.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};

use crate::error::{Error, Result};

/// Absolute tolerance for "sums to one" checks on the simplex.
pub const SIMPLEX_TOL: f64 = 1e-9;

impl AsRef<[f64]> for Histogram {
    fn as_ref(&self) -> &[f64] {
        self.as_slice()
    }
}

/// A probability vector on the simplex.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    weights: Array1<f64>,
}

impl Histogram {
    /// Normalizes nonnegative finite weights by their sum.
    pub fn new(weights: impl Into<Array1<f64>>) -> Result<Self> {
        let weights = weights.into();
        if weights.is_empty() {
            return Err(Error::EmptyVector);
        }
        for (index, &w) in weights.iter().enumerate() {
            if !w.is_finite() {
                return Err(Error::NonFiniteEntry { index });
            }
            if w < 0.0 {
                return Err(Error::NegativeEntry { index, value: w });
            }
        }
        let total: f64 = weights.sum();
        if total <= 0.0 {
            return Err(Error::ZeroMass);
        }
        Ok(Self {
            weights: weights / total,
        })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        Self::new(Array1::from_elem(n, 1.0))
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> ArrayView1<'_, f64> {
        self.weights.view()
    }

    pub fn as_slice(&self) -> &[f64] {
        self.weights.as_slice().expect("histogram storage is contiguous")
    }

    pub fn min(&self) -> f64 {
        self.weights.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Dense nonnegative square cost matrix with its cached largest entry.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix {
    entries: Array2<f64>,
    max_abs: f64,
}

impl CostMatrix {
    pub fn new(entries: Array2<f64>) -> Result<Self> {
        let (rows, cols) = entries.dim();
        if rows != cols {
            return Err(Error::NotSquare { rows, cols });
        }
        if rows == 0 {
            return Err(Error::EmptyVector);
        }
        let mut max_abs = 0.0_f64;
        for (index, &c) in entries.iter().enumerate() {
            if !c.is_finite() {
                return Err(Error::NonFiniteEntry { index });
            }
            if c < 0.0 {
                return Err(Error::NegativeEntry { index, value: c });
            }
            max_abs = max_abs.max(c);
        }
        let entries = entries.as_standard_layout().into_owned();
        Ok(Self { entries, max_abs })
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> ArrayView2<'_, f64> {
        self.entries.view()
    }

    /// `‖C‖∞`, the largest entry.
    pub fn max_abs(&self) -> f64 {
        self.max_abs
    }

    pub(crate) fn as_slice(&self) -> &[f64] {
        self.entries.as_slice().expect("standard layout")
    }
}

/// Dense nonnegative square transport plan.
///
/// Solver iterates are not required to be exactly stochastic; only
/// nonnegativity and finiteness are enforced here.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportPlan {
    entries: Array2<f64>,
}

impl TransportPlan {
    pub fn new(entries: Array2<f64>) -> Result<Self> {
        let (rows, cols) = entries.dim();
        if rows != cols {
            return Err(Error::NotSquare { rows, cols });
        }
        for ((row, col), &x) in entries.indexed_iter() {
            if !x.is_finite() || x < 0.0 {
                return Err(Error::NegativeInput { row, col });
            }
        }
        Ok(Self {
            entries: entries.as_standard_layout().into_owned(),
        })
    }

    /// Caller guarantees entries are finite and nonnegative.
    pub(crate) fn from_trusted(entries: Array2<f64>) -> Self {
        debug_assert!(entries.iter().all(|x| x.is_finite() && *x >= 0.0));
        Self { entries }
    }

    /// The independent coupling `r lᵀ`.
    pub fn product(r: &Histogram, l: &Histogram) -> Self {
        let n = r.len();
        let m = l.len();
        let entries = Array2::from_shape_fn((n, m), |(i, j)| r.weights[i] * l.weights[j]);
        Self { entries }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> ArrayView2<'_, f64> {
        self.entries.view()
    }

    pub fn into_inner(self) -> Array2<f64> {
        self.entries
    }

    pub fn total_mass(&self) -> f64 {
        self.entries.sum()
    }

    pub fn marginals(&self) -> Marginals {
        marginals(self)
    }
}

/// Row and column sums of a plan: `(X1, Xᵀ1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Marginals {
    pub row: Array1<f64>,
    pub col: Array1<f64>,
}

pub fn marginals(plan: &TransportPlan) -> Marginals {
    Marginals {
        row: plan.entries.sum_axis(Axis(1)),
        col: plan.entries.sum_axis(Axis(0)),
    }
}

/// `d(X) = ‖X1 − r‖₁ + ‖Xᵀ1 − l‖₁`.
pub fn marginal_violation(plan: &TransportPlan, r: &Histogram, l: &Histogram) -> Result<f64> {
    let n = plan.dim();
    for h in [r, l] {
        if h.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: h.len(),
            });
        }
    }
    let m = marginals(plan);
    Ok(l1_distance(m.row.view(), r.weights()) + l1_distance(m.col.view(), l.weights()))
}

pub(crate) fn l1_distance(a: ArrayView1<'_, f64>, b: ArrayView1<'_, f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).abs()).sum()
}
