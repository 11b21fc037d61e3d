//! Catalog-wide kernel checks: derivative consistency, the defining
//! curvature inequality, Bregman growth bounds, barrier divergence, and
//! barrier-parameter bounds.

mod common;

use common::{catalog, random_direction};
use hessbar::geometry::boundary_values;
use hessbar::kernels::with_params;
use hessbar::{
    bregman, gsc_distance, gsc_line_check, local_geometry, omega_nu, KernelParams, Vector,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn gradients_match_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for entry in catalog() {
        for _ in 0..50 {
            let x = (entry.sample)(&mut rng);
            let grad = entry.kernel.gradient(&x).unwrap();
            for i in 0..x.len() {
                let h = 1e-6 * (1.0 + x[i].abs());
                let mut xp = x.clone();
                let mut xm = x.clone();
                xp[i] += h;
                xm[i] -= h;
                let fd = (entry.kernel.value(&xp).unwrap() - entry.kernel.value(&xm).unwrap())
                    / (2.0 * h);
                let err = (fd - grad[i]).abs();
                assert!(
                    err <= 1e-5 * grad[i].abs().max(1.0),
                    "{}: gradient[{i}] fd {fd} vs {g} at {x:?}",
                    entry.name,
                    g = grad[i],
                );
            }
        }
    }
}

#[test]
fn hessians_match_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    for entry in catalog() {
        for _ in 0..20 {
            let x = (entry.sample)(&mut rng);
            let hess = entry.kernel.hessian(&x).unwrap().to_dense();
            for i in 0..x.len() {
                let h = 1e-6 * (1.0 + x[i].abs());
                let mut xp = x.clone();
                let mut xm = x.clone();
                xp[i] += h;
                xm[i] -= h;
                let col = (entry.kernel.gradient(&xp).unwrap()
                    - entry.kernel.gradient(&xm).unwrap())
                    / (2.0 * h);
                for j in 0..x.len() {
                    let err = (col[j] - hess[(j, i)]).abs();
                    assert!(
                        err <= 1e-4 * hess[(j, i)].abs().max(1.0),
                        "{}: hessian[{j},{i}] fd {c} vs {v}",
                        entry.name,
                        c = col[j],
                        v = hess[(j, i)],
                    );
                }
            }
        }
    }
}

#[test]
fn curvature_inequality_holds_on_catalog() {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    for entry in catalog() {
        for _ in 0..50 {
            let x = (entry.sample)(&mut rng);
            let u = random_direction(&mut rng, x.len());
            let v = random_direction(&mut rng, x.len());
            assert!(
                gsc_line_check(entry.kernel.as_ref(), &x, &u, &v).unwrap(),
                "{}: curvature bound failed at {x:?}",
                entry.name
            );
        }
    }
}

#[test]
fn curvature_inequality_fails_with_shrunk_scale() {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    for entry in catalog() {
        let p = entry.kernel.params();
        let corrupted = with_params(
            &entry.kernel,
            KernelParams::new(p.m / 10.0, p.nu, p.theta),
        );
        let mut failures = 0;
        for _ in 0..50 {
            let x = (entry.sample)(&mut rng);
            let u = random_direction(&mut rng, x.len());
            let v = random_direction(&mut rng, x.len());
            if !gsc_line_check(corrupted.as_ref(), &x, &u, &v).unwrap() {
                failures += 1;
            }
        }
        assert!(
            failures > 0,
            "{}: shrinking M tenfold should break the bound somewhere",
            entry.name
        );
    }
}

#[test]
fn bregman_growth_stays_inside_omega_envelope() {
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    for entry in catalog() {
        let p = entry.kernel.params();
        let mut tested = 0;
        'pairs: while tested < 200 {
            let x = (entry.sample)(&mut rng);
            let dir = random_direction(&mut rng, x.len());
            let mut scale = 1.0;
            for _ in 0..60 {
                let y = &x + &dir * scale;
                if entry.kernel.contains(&y) {
                    let d = gsc_distance(entry.kernel.as_ref(), &x, &y).unwrap();
                    if d < 0.9 {
                        let geom = local_geometry(&entry.kernel, &x).unwrap();
                        let step = &y - &x;
                        let n2 = geom.local_norm(&step).powi(2);
                        let div = bregman(entry.kernel.as_ref(), &x, &y).unwrap();
                        let lower = omega_nu(p.nu, -d).unwrap() * n2;
                        let upper = omega_nu(p.nu, d).unwrap() * n2;
                        let slack = 1e-8 * (1.0 + n2 + div.abs());
                        assert!(
                            div >= lower - slack && div <= upper + slack,
                            "{}: D = {div} outside [{lower}, {upper}] at distance {d}",
                            entry.name
                        );
                        tested += 1;
                        continue 'pairs;
                    }
                }
                scale *= 0.5;
            }
            panic!("{}: could not shrink into the Dikin ball", entry.name);
        }
    }
}

#[test]
fn barrier_values_diverge_toward_the_boundary() {
    // Log-type kernels grow like k ln 2 after k halvings of the boundary
    // distance, so the value gain over 60 halvings is about 40; the gradient
    // is what explodes geometrically.
    let cases: Vec<(&str, hessbar::KernelHandle, Vector, Vector)> = {
        let catalog = catalog();
        let burg = catalog.iter().find(|e| e.name == "burg").unwrap();
        let entropy = catalog.iter().find(|e| e.name == "entropy-barrier").unwrap();
        let poly = catalog.iter().find(|e| e.name == "polyhedral-box").unwrap();
        vec![
            (
                "burg",
                burg.kernel.clone(),
                Vector::from_element(6, 1.0),
                {
                    let mut b = Vector::from_element(6, 1.0);
                    b[0] = 0.0;
                    b
                },
            ),
            (
                "entropy-barrier",
                entropy.kernel.clone(),
                Vector::from_element(5, 0.5),
                {
                    let mut b = Vector::from_element(5, 0.5);
                    b[0] = 0.0;
                    b
                },
            ),
            (
                "polyhedral-box",
                poly.kernel.clone(),
                Vector::from_element(2, 0.5),
                Vector::from_vec(vec![0.0, 0.5]),
            ),
        ]
    };
    for (name, kernel, x, x_boundary) in cases {
        let values = boundary_values(kernel.as_ref(), &x, &x_boundary, 60);
        assert_eq!(values.len(), 60, "{name}: sequence stayed interior");
        for pair in values.windows(2) {
            assert!(
                pair[1] > pair[0] - 1e-12,
                "{name}: barrier value dipped near the boundary"
            );
        }
        let gain = values[values.len() - 1] - values[0];
        assert!(
            gain >= 30.0,
            "{name}: value gained only {gain} over 60 halvings"
        );
        // Steepness: the gradient norm blows up geometrically.
        let near = &x_boundary + (&x - &x_boundary) * 2.0_f64.powi(-60);
        let grad = kernel.gradient(&near).unwrap();
        assert!(
            grad.norm() >= 1e6,
            "{name}: gradient norm {g} near the boundary",
            g = grad.norm()
        );
    }
}

#[test]
fn barrier_parameter_bounds_dual_gradient_norm() {
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    for entry in catalog() {
        let Some(theta) = entry.kernel.params().theta else {
            continue;
        };
        for _ in 0..50 {
            let x = (entry.sample)(&mut rng);
            let geom = local_geometry(&entry.kernel, &x).unwrap();
            let dual = geom.dual_norm(&entry.kernel.gradient(&x).unwrap());
            assert!(
                dual <= theta.sqrt() + 1e-9,
                "{}: dual gradient norm {dual} exceeds sqrt({theta})",
                entry.name
            );
        }
    }
}

#[test]
fn rescaled_kernels_keep_the_inequality_with_unit_scale() {
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    for entry in catalog() {
        let rescaled = hessbar::rescale_to_m2(&entry.kernel);
        assert!((rescaled.params().m - 2.0).abs() < 1e-12);
        for _ in 0..20 {
            let x = (entry.sample)(&mut rng);
            let u = random_direction(&mut rng, x.len());
            let v = random_direction(&mut rng, x.len());
            assert!(
                gsc_line_check(rescaled.as_ref(), &x, &u, &v).unwrap(),
                "{}: rescaled kernel violates the bound",
                entry.name
            );
        }
    }
}

#[test]
fn domains_reject_boundary_and_outside_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    for entry in catalog() {
        let x = (entry.sample)(&mut rng);
        assert!(entry.kernel.contains(&x), "{}", entry.name);
        assert!(entry.kernel.value(&x).unwrap().is_finite());
        // Pushing the first coordinate to one of the two extremes must leave
        // every bounded-below or bounded-above domain.
        let mut lo = x.clone();
        lo[0] = -1e9;
        let mut hi = x.clone();
        hi[0] = 1e9;
        let escaped = !entry.kernel.contains(&lo) || !entry.kernel.contains(&hi);
        assert!(escaped, "{}: domain admits both extremes", entry.name);
        let probe = if entry.kernel.contains(&lo) { hi } else { lo };
        assert!(entry.kernel.value(&probe).is_err(), "{}", entry.name);
    }
}
