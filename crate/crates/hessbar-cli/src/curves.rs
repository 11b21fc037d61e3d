//! Step-size curves: the closed-form step rule evaluated over a grid of
//! curvature scales, one column per kernel order, ready for plotting.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::Args;
use hessbar::{alpha_opt, StepContext};

use crate::{out_file, Failure};

#[derive(Args)]
pub(crate) struct CurveArgs {
    /// The sum L + mu shared by every curve.
    #[arg(long = "l-plus-mu", value_name = "Q", default_value_t = 10.0)]
    l_plus_mu: f64,
    /// Kernel orders to plot, each in (2, 4].
    #[arg(long = "nu", value_delimiter = ',', default_value = "2.6,3,3.5,4")]
    nu: Vec<f64>,
    /// Largest curvature scale on the grid.
    #[arg(long = "t-max", default_value_t = 20.0)]
    t_max: f64,
    /// Number of grid points, endpoints included.
    #[arg(long, default_value_t = 401)]
    points: usize,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

pub(crate) fn run(args: &CurveArgs) -> Result<(), Failure> {
    if !(args.l_plus_mu > 0.0) {
        return Err(Failure::usage(format!(
            "L + mu must be positive, got {}",
            args.l_plus_mu
        )));
    }
    if !(args.t_max > 0.0) {
        return Err(Failure::usage(format!(
            "the grid end must be positive, got {}",
            args.t_max
        )));
    }
    if args.points < 2 {
        return Err(Failure::usage("need at least two grid points".to_string()));
    }
    if args.nu.is_empty() {
        return Err(Failure::usage("need at least one kernel order".to_string()));
    }
    for &nu in &args.nu {
        if !(nu > 2.0 && nu <= 4.0) {
            return Err(Failure::usage(format!(
                "kernel orders must lie in (2, 4], got {nu}"
            )));
        }
    }

    let path = out_file(&args.out, "step_curve.csv")?;
    let mut out = BufWriter::new(File::create(&path)?);
    write!(out, "t")?;
    for nu in &args.nu {
        write!(out, ",nu_{nu}")?;
    }
    writeln!(out)?;
    for i in 0..args.points {
        let t = args.t_max * i as f64 / (args.points - 1) as f64;
        write!(out, "{t}")?;
        for &nu in &args.nu {
            let ctx = StepContext {
                nu,
                m: 2.0,
                l_plus_mu: args.l_plus_mu,
                delta: t,
                lambda: 1.0,
                sigma_h: 1.0,
                tau_h: 1.0,
            };
            write!(out, ",{}", alpha_opt(&ctx))?;
        }
        writeln!(out)?;
    }
    out.flush()?;

    println!(
        "step-curve: wrote {} ({} rows, L + mu = {}, orders {:?})",
        path.display(),
        args.points,
        args.l_plus_mu,
        args.nu
    );
    Ok(())
}
