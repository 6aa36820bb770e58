use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use otx_bench::{generate_synthetic_pair, SyntheticImageSpec};
use otx_core::barycenter::{barycenter_solve, grid_cost};
use otx_core::pipeline::AnySolver;
use otx_core::{
    round_to_polytope, Algorithm, BarycenterProblem, CoordinateRule, Histogram, IterativeSolver, NetworkGraph,
    RegularizedProblem,
};
use std::hint::black_box;

fn problem(side: usize, eta: f64) -> RegularizedProblem {
    let (r, l, c) = generate_synthetic_pair(&SyntheticImageSpec {
        side,
        seed: 1,
        ..Default::default()
    })
    .unwrap();
    RegularizedProblem::new(c, r, l, eta).unwrap()
}

fn iterations(c: &mut Criterion) {
    let mut group = c.benchmark_group("100 iterations");
    for side in [5, 10] {
        let prob = problem(side, 5.0);
        for alg in [Algorithm::Apdrcd, Algorithm::Apdgcd, Algorithm::Sinkhorn] {
            group.bench_with_input(BenchmarkId::new(alg.name(), side * side), &prob, |b, prob| {
                b.iter(|| {
                    let mut s = AnySolver::new(prob, alg, 0).unwrap();
                    for _ in 0..100 {
                        s.advance(prob).unwrap();
                    }
                    black_box(s.violation())
                })
            });
        }
    }
    group.finish();
}

fn rounding(c: &mut Criterion) {
    let prob = problem(10, 1.0);
    let plan = prob.primal_map(&otx_core::DualPoint::zeros(100)).unwrap();
    c.bench_function("round 100x100", |b| {
        b.iter(|| round_to_polytope(black_box(&plan), prob.r(), prob.l()).unwrap())
    });
}

fn barycenter(c: &mut Criterion) {
    let n = 20;
    let measures: Vec<Histogram> = (0..4)
        .map(|k| Histogram::new(ndarray::Array1::from_shape_fn(n, |i| 1.0 + ((i + 5 * k) % n) as f64)).unwrap())
        .collect();
    let prob = BarycenterProblem::new(measures, vec![grid_cost(n).unwrap()], NetworkGraph::cycle(4).unwrap(), 0.5)
        .unwrap();
    c.bench_function("barycenter 50 rounds", |b| {
        b.iter(|| barycenter_solve(&prob, CoordinateRule::Greedy, 50, 0).unwrap())
    });
}

criterion_group!(benches, iterations, rounding, barycenter);
criterion_main!(benches);
