//! Entropic optimal transport by accelerated primal-dual coordinate descent.
//!
//! The crate covers the dual oracle of the regularized problem, the
//! randomized and greedy coordinate solvers, rounding onto the transport
//! polytope, the end-to-end ε-approximation pipeline, and a decentralized
//! barycenter solver over an agent graph.
//!
//! ```
//! use ndarray::array;
//! use otx_core::{approximate_ot, line_cost, Algorithm, ApproxConfig, Histogram};
//!
//! let cost = line_cost(&[0.0, 1.0, 2.0], 1.0).unwrap();
//! let r = Histogram::new(array![0.2, 0.3, 0.5]).unwrap();
//! let l = Histogram::new(array![0.5, 0.3, 0.2]).unwrap();
//! let out = approximate_ot(&cost, &r, &l, &ApproxConfig::new(0.5, Algorithm::Apdgcd)).unwrap();
//! assert!((out.ot_value - 0.6).abs() <= 0.5);
//! ```

pub mod barycenter;
pub mod dual;
pub mod error;
pub mod io;
pub mod pipeline;
pub mod rng;
pub mod rounding;
pub mod solver;
pub mod types;

pub use barycenter::{barycenter_solve, BarycenterProblem, BarycenterResult, NetworkGraph};
pub use dual::{DualPoint, RegularizedProblem};
pub use error::{Error, Result};
pub use pipeline::{
    approximate_ot, line_cost, monotone_coupling_oracle, Algorithm, ApproxConfig, ApproxResult,
};
pub use rounding::round_to_polytope;
pub use solver::{solve, CoordinateRule, IterativeSolver, SolveReport, SolveStatus, TracePoint};
pub use types::{marginal_violation, marginals, CostMatrix, Histogram, Marginals, TransportPlan};
