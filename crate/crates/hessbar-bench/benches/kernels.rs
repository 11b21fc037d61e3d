//! Microbenchmarks for kernel evaluation and the local-metric primitives.

use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use hessbar::{local_geometry, make_kernel, KernelKind, Vector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn interior_point(n: usize, seed: u64) -> Vector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Vector::from_fn(n, |_, _| rng.gen_range(0.2..2.0))
}

fn bench_kernel_evaluations(c: &mut Criterion) {
    let mut group = c.benchmark_group("kernel_eval");
    for n in [16usize, 128] {
        let x = interior_point(n, 7);
        for (label, kind) in [
            ("burg", KernelKind::Burg),
            ("entropy_barrier", KernelKind::EntropyBarrier),
            ("power_k1", KernelKind::Power { kappa: 1.0 }),
        ] {
            let kernel = make_kernel(kind, n).unwrap();
            group.bench_with_input(BenchmarkId::new(label, n), &x, |b, x| {
                b.iter(|| {
                    let v = kernel.value(black_box(x)).unwrap();
                    let g = kernel.gradient(black_box(x)).unwrap();
                    black_box((v, g))
                })
            });
        }
    }
    group.finish();
}

fn bench_local_geometry(c: &mut Criterion) {
    let mut group = c.benchmark_group("local_geometry");
    for n in [16usize, 128] {
        let x = interior_point(n, 11);
        let diag = make_kernel(KernelKind::Burg, n).unwrap();
        group.bench_with_input(BenchmarkId::new("diagonal", n), &x, |b, x| {
            b.iter(|| black_box(local_geometry(&diag, black_box(x)).unwrap()))
        });
        let dense = make_kernel(KernelKind::SecondOrderCone, n).unwrap();
        let mut xc = x.clone();
        xc[0] = 2.0 * x.norm();
        group.bench_with_input(BenchmarkId::new("dense_cone", n), &xc, |b, xc| {
            b.iter(|| black_box(local_geometry(&dense, black_box(xc)).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, bench_kernel_evaluations, bench_local_geometry);
criterion_main!(benches);
