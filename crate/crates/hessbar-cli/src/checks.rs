//! Kernel diagnostics: finite-difference consistency, the Bregman growth
//! envelope, the curvature inequality, and gradient blow-up toward the
//! boundary, reported one line per check.

use clap::Args;
use hessbar::kernels::with_params;
use hessbar::{
    boundary_values, bregman, gsc_distance, gsc_line_check, local_geometry, omega_nu,
    KernelHandle, KernelParams, Vector,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{resolve_kernel, Failure, Family};

#[derive(Args)]
pub(crate) struct CheckArgs {
    /// Kernel kind: burg, entropy-barrier, neg-entropy, inverse-sqrt,
    /// power:<kappa>, regularized-burg:<reg>, root-quadratic:<s>,
    /// second-order-cone.
    #[arg(long)]
    kind: String,
    /// Ambient dimension [default: 5; kernels of order above 3 default to 1].
    #[arg(long)]
    dim: Option<usize>,
    /// RNG seed for the probe draws.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Divide the curvature scale M by 10 to demonstrate a failing check.
    #[arg(long)]
    corrupt_m: bool,
}

/// Samples a strictly interior point for the kernel's domain family.
fn sample(family: Family, dim: usize, rng: &mut ChaCha8Rng) -> Vector {
    match family {
        Family::LowerZero => Vector::from_fn(dim, |_, _| rng.gen_range(0.15..2.5)),
        Family::UpperKappa(kappa) => Vector::from_fn(dim, |_, _| kappa - rng.gen_range(0.2..2.0)),
        Family::Interval => Vector::from_fn(dim, |_, _| rng.gen_range(-0.8..0.8)),
        Family::Cone => {
            let mut x = Vector::from_fn(dim, |_, _| rng.gen_range(-1.0..1.0));
            let w_norm = x.rows(1, dim - 1).norm();
            x[0] = w_norm + rng.gen_range(0.3..1.5);
            x
        }
    }
}

/// A boundary point of the domain, reached from `x` along one coordinate.
fn boundary_point(family: Family, x: &Vector) -> Vector {
    let mut b = x.clone();
    match family {
        Family::LowerZero => b[0] = 0.0,
        Family::UpperKappa(kappa) => b[0] = kappa,
        Family::Interval => b[0] = 1.0,
        Family::Cone => b[0] = b.rows(1, b.len() - 1).norm(),
    }
    b
}

fn random_direction(rng: &mut ChaCha8Rng, dim: usize) -> Vector {
    Vector::from_fn(dim, |_, _| rng.gen_range(-1.0..1.0))
}

struct Report {
    failures: usize,
}

impl Report {
    fn record(&mut self, name: &str, passed: bool, detail: String) {
        if passed {
            println!("kernel-check: {name}: ok ({detail})");
        } else {
            println!("kernel-check: {name}: FAIL ({detail})");
            self.failures += 1;
        }
    }
}

fn check_gradient_fd(kernel: &KernelHandle, family: Family, rng: &mut ChaCha8Rng, report: &mut Report) {
    let dim = kernel.dim();
    let mut worst: f64 = 0.0;
    for _ in 0..25 {
        let x = sample(family, dim, rng);
        let grad = kernel.gradient(&x).expect("interior sample");
        for j in 0..dim {
            let h = 1e-6 * (1.0 + x[j].abs());
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[j] += h;
            xm[j] -= h;
            let (vp, vm) = match (kernel.value(&xp), kernel.value(&xm)) {
                (Ok(a), Ok(b)) => (a, b),
                _ => continue,
            };
            let fd = (vp - vm) / (2.0 * h);
            let err = (fd - grad[j]).abs() / (1.0 + grad[j].abs());
            worst = worst.max(err);
        }
    }
    report.record(
        "gradient-fd",
        worst <= 1e-5,
        format!("max relative error {worst:e}"),
    );
}

fn check_hessian_fd(kernel: &KernelHandle, family: Family, rng: &mut ChaCha8Rng, report: &mut Report) {
    let dim = kernel.dim();
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let x = sample(family, dim, rng);
        let hess = kernel.hessian(&x).expect("interior sample").to_dense();
        for j in 0..dim {
            let h = 1e-5 * (1.0 + x[j].abs());
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[j] += h;
            xm[j] -= h;
            let (gp, gm) = match (kernel.gradient(&xp), kernel.gradient(&xm)) {
                (Ok(a), Ok(b)) => (a, b),
                _ => continue,
            };
            let fd = (gp - gm) / (2.0 * h);
            for i in 0..dim {
                let err = (fd[i] - hess[(i, j)]).abs() / (1.0 + hess[(i, j)].abs());
                worst = worst.max(err);
            }
        }
    }
    report.record(
        "hessian-fd",
        worst <= 1e-4,
        format!("max relative error {worst:e}"),
    );
}

fn check_bregman_envelope(
    kernel: &KernelHandle,
    family: Family,
    rng: &mut ChaCha8Rng,
    report: &mut Report,
) {
    let p = kernel.params();
    let dim = kernel.dim();
    let mut tested = 0;
    let mut violations = 0;
    let mut attempts = 0;
    while tested < 100 && attempts < 10_000 {
        attempts += 1;
        let x = sample(family, dim, rng);
        let dir = random_direction(rng, dim);
        let mut scale = 1.0;
        for _ in 0..60 {
            let y = &x + &dir * scale;
            if kernel.contains(&y) {
                let d = gsc_distance(kernel.as_ref(), &x, &y).expect("both interior");
                if d < 0.9 {
                    let geom = local_geometry(kernel, &x).expect("interior sample");
                    let n2 = geom.local_norm(&(&y - &x)).powi(2);
                    let div = bregman(kernel.as_ref(), &x, &y).expect("both interior");
                    let lower = omega_nu(p.nu, -d).expect("d below one") * n2;
                    let upper = omega_nu(p.nu, d).expect("d below one") * n2;
                    let slack = 1e-8 * (1.0 + n2 + div.abs());
                    if div < lower - slack || div > upper + slack {
                        violations += 1;
                    }
                    tested += 1;
                    break;
                }
            }
            scale *= 0.5;
        }
    }
    report.record(
        "bregman-envelope",
        tested == 100 && violations == 0,
        format!("{violations} violations over {tested} pairs"),
    );
}

fn check_curvature_inequality(
    kernel: &KernelHandle,
    family: Family,
    rng: &mut ChaCha8Rng,
    report: &mut Report,
) {
    let dim = kernel.dim();
    let mut violations = 0;
    for _ in 0..50 {
        let x = sample(family, dim, rng);
        let u = random_direction(rng, dim);
        let v = random_direction(rng, dim);
        match gsc_line_check(kernel.as_ref(), &x, &u, &v) {
            Ok(true) => {}
            Ok(false) => violations += 1,
            Err(_) => violations += 1,
        }
    }
    report.record(
        "curvature-inequality",
        violations == 0,
        format!("{violations} violations over 50 draws"),
    );
}

fn check_boundary_gradient(
    kernel: &KernelHandle,
    family: Family,
    rng: &mut ChaCha8Rng,
    report: &mut Report,
) {
    let dim = kernel.dim();
    let x = sample(family, dim, rng);
    let xb = boundary_point(family, &x);
    // A boundary at zero admits approach distances down into the subnormal
    // range; a boundary at a nonzero coordinate value absorbs the increment
    // into its own ulp once t drops near 2^-52, so the ray stops above that.
    let halvings: u32 = match family {
        Family::LowerZero => 60,
        _ => 45,
    };
    let values = boundary_values(kernel.as_ref(), &x, &xb, halvings);
    let gradient_norm = |t: f64| {
        let point = &xb + (&x - &xb) * t;
        kernel.gradient(&point).map(|g| g.norm())
    };
    let (first, last) = match (gradient_norm(1.0), gradient_norm(0.5_f64.powi(halvings as i32 - 1))) {
        (Ok(a), Ok(b)) => (a, b),
        _ => {
            report.record(
                "boundary-gradient",
                false,
                "gradient evaluation failed on the approach ray".to_string(),
            );
            return;
        }
    };
    let passed = values.len() == halvings as usize && last >= first + 30.0;
    report.record(
        "boundary-gradient",
        passed,
        format!(
            "{} finite values on the ray, gradient norm {first:.3e} -> {last:.3e}",
            values.len()
        ),
    );
}

pub(crate) fn run(args: &CheckArgs) -> Result<(), Failure> {
    let (mut kernel, family, _) = resolve_kernel(&args.kind, args.dim, 5)?;
    if args.corrupt_m {
        let p = kernel.params();
        kernel = with_params(&kernel, KernelParams::new(p.m / 10.0, p.nu, p.theta));
    }
    let p = kernel.params();
    println!(
        "kernel-check: {} (dim {}, M = {}, nu = {}){}",
        args.kind,
        kernel.dim(),
        p.m,
        p.nu,
        if args.corrupt_m {
            " with corrupted curvature scale"
        } else {
            ""
        }
    );

    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let mut report = Report { failures: 0 };
    check_gradient_fd(&kernel, family, &mut rng, &mut report);
    check_hessian_fd(&kernel, family, &mut rng, &mut report);
    check_bregman_envelope(&kernel, family, &mut rng, &mut report);
    check_curvature_inequality(&kernel, family, &mut rng, &mut report);
    check_boundary_gradient(&kernel, family, &mut rng, &mut report);

    if report.failures > 0 {
        Err(Failure::check(anyhow::anyhow!(
            "{} of 5 checks failed for kernel {}",
            report.failures,
            args.kind
        )))
    } else {
        println!("kernel-check: all 5 checks passed");
        Ok(())
    }
}
