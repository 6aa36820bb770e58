//! Checks against independently computed references.

use ndarray::{Array1, Array2};
use otx_core::barycenter::{self, conjugate_gradient, conjugate_value, consensus_residual, grid_cost};
use otx_core::solver::SolverState;
use otx_core::{
    approximate_ot, line_cost, monotone_coupling_oracle, Algorithm, ApproxConfig, BarycenterProblem,
    CoordinateRule, CostMatrix, DualPoint, Histogram, NetworkGraph, RegularizedProblem,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_histogram(rng: &mut ChaCha8Rng, n: usize) -> Histogram {
    Histogram::new(Array1::from_shape_fn(n, |_| rng.gen_range(0.05..1.0))).unwrap()
}

fn random_problem(rng: &mut ChaCha8Rng, n: usize, eta: f64) -> RegularizedProblem {
    let cost = CostMatrix::new(Array2::from_shape_fn((n, n), |_| rng.gen_range(0.0..1.0))).unwrap();
    let r = random_histogram(rng, n);
    let l = random_histogram(rng, n);
    RegularizedProblem::new(cost, r, l, eta).unwrap()
}

/// `Σ_j |F_r(j) − F_l(j)|·(s_{j+1} − s_j)`: the 1-D W1 distance from CDFs.
fn cdf_w1(support: &[f64], r: &Histogram, l: &Histogram) -> f64 {
    let (mut fr, mut fl, mut total) = (0.0, 0.0, 0.0);
    for j in 0..support.len() - 1 {
        fr += r.as_slice()[j];
        fl += l.as_slice()[j];
        total += (fr - fl).abs() * (support[j + 1] - support[j]);
    }
    total
}

#[test]
fn gradient_matches_central_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for &n in &[3, 5] {
        for &eta in &[0.1, 1.0] {
            let prob = random_problem(&mut rng, n, eta);
            let lam: Vec<f64> = (0..2 * n).map(|_| rng.gen_range(-0.5..0.5)).collect();
            let point = DualPoint::from_stacked(&lam).unwrap();
            let grad = prob.full_gradient(&point).unwrap();
            for i in 0..2 * n {
                let h = 1e-6 * eta;
                let mut plus = point.clone();
                plus.set(i, point.get(i) + h);
                let mut minus = point.clone();
                minus.set(i, point.get(i) - h);
                let fd = (prob.dual_value(&plus).unwrap() - prob.dual_value(&minus).unwrap()) / (2.0 * h);
                assert!((fd - grad[i]).abs() <= 1e-5 * grad[i].abs().max(1e-3), "{fd} vs {}", grad[i]);
            }
        }
    }
}

#[test]
fn smoothness_holds_when_marginal_mass_is_bounded() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..200 {
        let n = rng.gen_range(2..6);
        let eta = [0.5, 1.0, 2.0][rng.gen_range(0..3)];
        let prob = random_problem(&mut rng, n, eta);
        let mut pts: Vec<DualPoint> = (0..2)
            .map(|_| {
                let v: Vec<f64> = (0..2 * n).map(|_| rng.gen_range(-5.0..5.0)).collect();
                DualPoint::from_stacked(&v).unwrap()
            })
            .collect();
        // Shift both α's down by the same amount so all row and column sums
        // are at most 2; the difference λ₁ − λ₂ is unchanged.
        let peak = pts
            .iter()
            .map(|p| {
                let m = prob.primal_map(p).unwrap().marginals();
                m.row.iter().chain(m.col.iter()).copied().fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if peak > 2.0 {
            let shift = eta * (peak / 2.0).ln();
            for p in &mut pts {
                p.alpha.mapv_inplace(|a| a - shift);
            }
        }
        let (a, b) = (&pts[0], &pts[1]);
        let grad = prob.full_gradient(b).unwrap();
        let diff: Vec<f64> = a.to_stacked().iter().zip(b.to_stacked()).map(|(x, y)| x - y).collect();
        let inner: f64 = grad.iter().zip(&diff).map(|(g, d)| g * d).sum();
        let norm2: f64 = diff.iter().map(|d| d * d).sum();
        let gap = prob.dual_value(a).unwrap() - prob.dual_value(b).unwrap() - inner;
        assert!(gap >= -1e-9, "convexity {gap}");
        assert!(gap <= 2.0 / eta * norm2 + 1e-9, "gap {gap} bound {}", 2.0 / eta * norm2);
    }
}

#[test]
fn smoothness_constant_fails_for_unbounded_mass() {
    // φ is built from plain exponentials, so no global constant exists:
    // moving every dual variable from 0 to 5 with C = 0 and η = 1 already
    // exceeds (2/η)‖Δ‖².
    let n = 2;
    let prob = RegularizedProblem::new(
        CostMatrix::new(Array2::zeros((n, n))).unwrap(),
        Histogram::uniform(n).unwrap(),
        Histogram::uniform(n).unwrap(),
        1.0,
    )
    .unwrap();
    let a = DualPoint::from_stacked(&[5.0; 4]).unwrap();
    let b = DualPoint::zeros(n);
    let grad = prob.full_gradient(&b).unwrap();
    let inner: f64 = grad.iter().map(|g| g * 5.0).sum();
    let gap = prob.dual_value(&a).unwrap() - prob.dual_value(&b).unwrap() - inner;
    assert!(gap > 2.0 * 100.0, "{gap}");
}

#[test]
fn descent_per_iteration() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for rule in [CoordinateRule::Randomized, CoordinateRule::Greedy] {
        for run in 0..3 {
            let prob = random_problem(&mut rng, 10, 1.0);
            let mut s = SolverState::new(&prob, rule, run).unwrap();
            for _ in 0..200 {
                let y = s.y().clone();
                let fy = prob.dual_value(&y).unwrap();
                let info = s.step(&prob).unwrap();
                let next = prob.dual_value(s.lambda()).unwrap();
                let bound = -info.gradient * info.gradient / (2.0 * prob.lipschitz());
                assert!(next - fy <= bound + 1e-10, "{} > {}", next - fy, bound);
            }
        }
    }
}

#[test]
fn monotone_oracle_agrees_with_cdf_formula() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..50 {
        let n = rng.gen_range(2..12);
        let mut support: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..10.0)).collect();
        support.sort_by(f64::total_cmp);
        support.dedup();
        let n = support.len();
        let r = random_histogram(&mut rng, n);
        let l = random_histogram(&mut rng, n);
        let (plan, cost) = monotone_coupling_oracle(&support, &r, &l, 1.0).unwrap();
        assert!((cost - cdf_w1(&support, &r, &l)).abs() < 1e-10);
        assert!(otx_core::marginal_violation(&plan, &r, &l).unwrap() < 1e-12);
    }
}

#[test]
fn pipeline_is_within_epsilon_of_exact_value() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let support: Vec<f64> = (0..8).map(|i| i as f64 / 7.0).collect();
    let cost = line_cost(&support, 1.0).unwrap();
    for _ in 0..3 {
        let r = random_histogram(&mut rng, 8);
        let l = random_histogram(&mut rng, 8);
        let exact = cdf_w1(&support, &r, &l);
        for alg in [Algorithm::Apdrcd, Algorithm::Apdgcd, Algorithm::Sinkhorn] {
            let out = approximate_ot(&cost, &r, &l, &ApproxConfig::new(0.5, alg)).unwrap();
            assert!(out.ot_value <= exact + 0.5, "{alg}: {} vs {exact}", out.ot_value);
            assert!(otx_core::marginal_violation(&out.plan, &r, &l).unwrap() < 1e-10);
        }
    }
}

#[test]
fn consensus_residual_matches_kronecker_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for graph in [
        NetworkGraph::path(4).unwrap(),
        NetworkGraph::star(5).unwrap(),
        NetworkGraph::cycle(6).unwrap(),
    ] {
        let m = graph.node_count();
        let n = 3;
        let q: Vec<Vec<f64>> = (0..m).map(|_| (0..n).map(|_| rng.gen_range(0.0..1.0)).collect()).collect();
        // Dense W̄ ⊗ I_n.
        let lap = graph.laplacian();
        let w = Array2::from_shape_fn((m * n, m * n), |(a, b)| {
            if a % n == b % n {
                lap[[a / n, b / n]]
            } else {
                0.0
            }
        });
        let stacked = Array1::from_iter(q.iter().flatten().copied());
        let dense = stacked.dot(&w.dot(&stacked)).sqrt();
        let blockwise = consensus_residual(&q, &graph).unwrap();
        assert!((dense - blockwise).abs() < 1e-12, "{dense} vs {blockwise}");
    }
}

#[test]
fn conjugate_gradient_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..10 {
        let n = 4;
        let cost = CostMatrix::new(Array2::from_shape_fn((n, n), |_| rng.gen_range(0.0..1.0))).unwrap();
        let p = random_histogram(&mut rng, n);
        let gamma = rng.gen_range(0.1..1.0);
        let lam: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let g = conjugate_gradient(&lam, &cost, &p, gamma);
        assert!((g.sum() - 1.0).abs() < 1e-12);
        for i in 0..n {
            let h = 1e-6;
            let mut plus = lam.clone();
            plus[i] += h;
            let mut minus = lam.clone();
            minus[i] -= h;
            let fd = (conjugate_value(&plus, &cost, &p, gamma) - conjugate_value(&minus, &cost, &p, gamma)) / (2.0 * h);
            assert!((fd - g[i]).abs() <= 1e-5 * g[i].abs().max(1e-3), "{fd} vs {}", g[i]);
        }
    }
}

#[test]
fn duplicate_agents_agree() {
    let n = 10;
    let h = Histogram::new(Array1::from_shape_fn(n, |i| 1.0 + i as f64)).unwrap();
    let prob = BarycenterProblem::new(vec![h.clone(), h], vec![grid_cost(n).unwrap()], NetworkGraph::path(2).unwrap(), 0.5)
        .unwrap();
    for rule in [CoordinateRule::Randomized, CoordinateRule::Greedy] {
        let out = barycenter::barycenter_solve(&prob, rule, 1000, 9).unwrap();
        let d: f64 = out.barycenters[0]
            .as_slice()
            .iter()
            .zip(out.barycenters[1].as_slice())
            .map(|(a, b)| (a - b).abs())
            .sum();
        assert!(d <= 1e-3, "{d}");
    }
}
