//! End-to-end benchmarks for the direction solve and the descent loops.

use std::sync::Arc;

use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use hessbar::{
    alpha_opt, hba_solve, local_geometry, make_kernel, solve_direction, ConstraintSet,
    KernelKind, Matrix, Objective, Problem, Smoothness, SolverConfig, StepContext, Vector,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_simplex_problem(n: usize, seed: u64) -> Problem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let target = Vector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0));
    let objective: Objective = Arc::new(move |x: &Vector| {
        let d = x - &target;
        (0.5 * d.norm_squared(), d)
    });
    Problem {
        dim: n,
        objective,
        cons: Arc::new(
            ConstraintSet::new(Matrix::from_element(1, n, 1.0), Vector::from_element(1, 1.0))
                .unwrap(),
        ),
        kernel: make_kernel(KernelKind::Burg, n).unwrap(),
        smoothness_hint: Some(1.0),
        f_lower_bound: 0.0,
        x_start: Vector::from_element(n, 1.0 / n as f64),
    }
}

fn bench_direction_solve(c: &mut Criterion) {
    let mut group = c.benchmark_group("direction");
    for n in [16usize, 128] {
        let problem = random_simplex_problem(n, 3);
        let kernel = &problem.kernel;
        let params = kernel.params();
        let x = problem.x_start.clone();
        let geom = local_geometry(kernel, &x).unwrap();
        let (_, grad) = problem.eval(&x);
        group.bench_function(BenchmarkId::new("simplex_schur", n), |b| {
            b.iter(|| {
                black_box(
                    solve_direction(&geom, &problem.cons, black_box(&grad), &params).unwrap(),
                )
            })
        });
    }
    group.finish();
}

fn bench_step_rule(c: &mut Criterion) {
    let mut group = c.benchmark_group("step_rule");
    for nu in [2.6, 3.0, 3.5, 4.0] {
        let ctx = StepContext {
            nu,
            m: 2.0,
            l_plus_mu: 10.0,
            delta: 3.0,
            lambda: 1.0,
            sigma_h: 0.5,
            tau_h: 2.0,
        };
        group.bench_with_input(BenchmarkId::new("alpha_opt", nu), &ctx, |b, ctx| {
            b.iter(|| black_box(alpha_opt(black_box(ctx))))
        });
    }
    group.finish();
}

fn bench_descent_loop(c: &mut Criterion) {
    let mut group = c.benchmark_group("descent");
    group.sample_size(20);
    for n in [16usize, 64] {
        let problem = random_simplex_problem(n, 5);
        let cfg = SolverConfig {
            mu: 1e-2,
            smoothness: Smoothness::Fixed(1.0),
            epsilon: 1e-6,
            max_iters: 2000,
            ..SolverConfig::default()
        };
        group.bench_function(BenchmarkId::new("simplex_quadratic", n), |b| {
            b.iter(|| black_box(hba_solve(&problem, &cfg).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(
    benches,
    bench_direction_solve,
    bench_step_rule,
    bench_descent_loop
);
criterion_main!(benches);
