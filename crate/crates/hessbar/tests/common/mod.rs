//! Shared fixtures for the property suites: the kernel catalog with
//! interior-point samplers, and small random-instance builders.
//!
//! Each integration test binary compiles its own copy, so not every helper
//! is used by every binary.
#![allow(dead_code)]

use std::sync::Arc;

use hessbar::{make_kernel, ConstraintSet, KernelHandle, KernelKind, Matrix, Vector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// A catalog kernel plus a sampler producing well-interior points (far
/// enough from the boundary for finite-difference probes).
pub struct CatalogEntry {
    pub name: &'static str,
    pub kernel: KernelHandle,
    pub sample: Box<dyn Fn(&mut ChaCha8Rng) -> Vector>,
}

fn positive(dim: usize) -> Box<dyn Fn(&mut ChaCha8Rng) -> Vector> {
    Box::new(move |rng| Vector::from_fn(dim, |_, _| rng.gen_range(0.15..2.5)))
}

fn below(dim: usize, cap: f64) -> Box<dyn Fn(&mut ChaCha8Rng) -> Vector> {
    Box::new(move |rng| Vector::from_fn(dim, |_, _| rng.gen_range(-2.0..cap - 0.2)))
}

pub fn catalog() -> Vec<CatalogEntry> {
    let mut entries = vec![
        CatalogEntry {
            name: "burg",
            kernel: make_kernel(KernelKind::Burg, 6).unwrap(),
            sample: positive(6),
        },
        CatalogEntry {
            name: "entropy-barrier",
            kernel: make_kernel(KernelKind::EntropyBarrier, 5).unwrap(),
            sample: positive(5),
        },
        CatalogEntry {
            name: "neg-entropy",
            kernel: make_kernel(KernelKind::NegEntropy, 1).unwrap(),
            sample: positive(1),
        },
        CatalogEntry {
            name: "power-k1",
            kernel: make_kernel(KernelKind::Power { kappa: 1.0 }, 4).unwrap(),
            sample: below(4, 1.0),
        },
        CatalogEntry {
            name: "power-k4over3",
            kernel: make_kernel(KernelKind::Power { kappa: 4.0 / 3.0 }, 4).unwrap(),
            sample: below(4, 4.0 / 3.0),
        },
        CatalogEntry {
            name: "inverse-sqrt",
            kernel: make_kernel(KernelKind::InverseSqrt, 3).unwrap(),
            sample: Box::new(|rng| Vector::from_fn(3, |_, _| rng.gen_range(-0.8..0.8))),
        },
        CatalogEntry {
            name: "regularized-burg",
            kernel: make_kernel(KernelKind::RegularizedBurg { reg: 2.0 }, 4).unwrap(),
            sample: positive(4),
        },
        CatalogEntry {
            name: "root-quadratic",
            kernel: make_kernel(KernelKind::RootQuadratic { s: 2.0 / 3.0 }, 1).unwrap(),
            sample: positive(1),
        },
        CatalogEntry {
            name: "second-order-cone",
            kernel: make_kernel(KernelKind::SecondOrderCone, 3).unwrap(),
            sample: Box::new(|rng| {
                let w0: f64 = rng.gen_range(-1.0..1.0);
                let w1: f64 = rng.gen_range(-1.0..1.0);
                let gap: f64 = rng.gen_range(0.3..1.5);
                let norm = (w0 * w0 + w1 * w1).sqrt();
                Vector::from_vec(vec![norm + gap, w0, w1])
            }),
        },
    ];
    // Unit box via the general polyhedral barrier.
    let b = Matrix::from_row_slice(4, 2, &[1.0, 0.0, 0.0, 1.0, -1.0, 0.0, 0.0, -1.0]);
    let d = Vector::from_vec(vec![1.0, 1.0, 0.0, 0.0]);
    let witness = Vector::from_element(2, 0.5);
    entries.push(CatalogEntry {
        name: "polyhedral-box",
        kernel: Arc::new(hessbar::kernels::Polyhedral::new(b, d, &witness).unwrap()),
        sample: Box::new(|rng| Vector::from_fn(2, |_, _| rng.gen_range(0.1..0.9))),
    });
    entries
}

/// Random direction with entries in (-1, 1).
pub fn random_direction(rng: &mut ChaCha8Rng, dim: usize) -> Vector {
    Vector::from_fn(dim, |_, _| rng.gen_range(-1.0..1.0))
}

/// Random full-rank constraint set with `rows` rows satisfied by `x`.
pub fn random_constraints(rng: &mut ChaCha8Rng, x: &Vector, rows: usize) -> Arc<ConstraintSet> {
    if rows == 0 {
        return Arc::new(ConstraintSet::none(x.len()));
    }
    loop {
        let a = Matrix::from_fn(rows, x.len(), |_, _| rng.gen_range(-1.0..1.0));
        let b = &a * x;
        if let Ok(cons) = ConstraintSet::new(a, b) {
            return Arc::new(cons);
        }
    }
}
