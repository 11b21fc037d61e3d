//! A seeded demo problem for the `solve` subcommand: a convex quadratic
//! centered at a random interior point, constrained to the simplex when the
//! kernel's domain is the positive orthant.

use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::sync::Arc;

use clap::Args;
use hessbar::{
    hba_solve, ConstraintSet, Matrix, Problem, Smoothness, SolverConfig, Vector,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{out_file, resolve_kernel, Failure, Family};

#[derive(Args)]
pub(crate) struct SolveArgs {
    /// Kernel kind (see kernel-check for the catalog).
    #[arg(long, default_value = "burg")]
    kernel: String,
    /// Problem dimension [default: 8; kernels of order above 3 default to 1].
    #[arg(long)]
    dim: Option<usize>,
    /// RNG seed for the quadratic's center.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Barrier weight.
    #[arg(long, default_value_t = 1e-3)]
    mu: f64,
    /// Stationarity target.
    #[arg(long, default_value_t = 1e-6)]
    epsilon: f64,
    /// Iteration cap.
    #[arg(long, default_value_t = 10_000)]
    max_iters: usize,
    /// Adapt the smoothness constant online (the default).
    #[arg(long, conflicts_with = "fixed_l")]
    adaptive: bool,
    /// Fixed smoothness constant instead of adaptation.
    #[arg(long = "fixed-L", value_name = "V")]
    fixed_l: Option<f64>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

pub(crate) fn run(args: &SolveArgs) -> Result<(), Failure> {
    let (kernel, family, dim) = resolve_kernel(&args.kernel, args.dim, 8)?;
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);

    // Center, start point, and constraints fitted to the kernel's domain.
    let (center, x_start, cons) = match family {
        Family::LowerZero if dim >= 2 => {
            let center = Vector::from_fn(dim, |_, _| rng.gen_range(-0.5..1.0));
            let start = Vector::from_element(dim, 1.0 / dim as f64);
            let cons = ConstraintSet::new(
                Matrix::from_element(1, dim, 1.0),
                Vector::from_element(1, 1.0),
            )?;
            (center, start, cons)
        }
        Family::LowerZero => {
            let center = Vector::from_fn(dim, |_, _| rng.gen_range(0.5..2.0));
            (center, Vector::from_element(dim, 1.0), ConstraintSet::none(dim))
        }
        Family::UpperKappa(kappa) => {
            let center = Vector::from_fn(dim, |_, _| kappa - rng.gen_range(0.3..1.2));
            let start = Vector::from_element(dim, kappa - 1.0);
            (center, start, ConstraintSet::none(dim))
        }
        Family::Interval => {
            let center = Vector::from_fn(dim, |_, _| rng.gen_range(-0.5..0.5));
            (center, Vector::zeros(dim), ConstraintSet::none(dim))
        }
        Family::Cone => {
            let mut center = Vector::from_fn(dim, |_, _| rng.gen_range(-0.5..0.5));
            center[0] = center.rows(1, dim - 1).norm() + rng.gen_range(0.5..1.5);
            let mut start = Vector::zeros(dim);
            start[0] = 1.0;
            (center, start, ConstraintSet::none(dim))
        }
    };

    let c = center.clone();
    let problem = Problem {
        dim,
        objective: Arc::new(move |x: &Vector| {
            let d = x - &c;
            (0.5 * d.norm_squared(), d)
        }),
        cons: Arc::new(cons),
        kernel,
        smoothness_hint: args.fixed_l,
        f_lower_bound: 0.0,
        x_start,
    };
    let cfg = SolverConfig {
        mu: args.mu,
        smoothness: match args.fixed_l {
            Some(l) => Smoothness::Fixed(l),
            None => Smoothness::Adaptive { l0: 1.0 },
        },
        epsilon: args.epsilon,
        max_iters: args.max_iters,
        f_lower_bound: 0.0,
        ..SolverConfig::default()
    };
    let result = hba_solve(&problem, &cfg)?;

    let path = out_file(&args.out, "solve_trace.csv")?;
    result.trace.write_csv(BufWriter::new(File::create(&path)?))?;

    let last = result.trace.records.last().expect("trace has rows");
    println!(
        "solve: kernel {} (dim {dim}), {:?} after {} iterations ({} evaluations)",
        args.kernel,
        result.termination,
        last.k,
        result.trace.total_evals()
    );
    println!(
        "solve: f = {}, potential = {}, lambda = {}",
        last.f, last.f_mu, last.lambda
    );
    println!("solve: wrote {}", path.display());
    Ok(())
}
