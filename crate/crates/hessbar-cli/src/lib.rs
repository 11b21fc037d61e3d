//! Command line front end for the barrier descent solver: experiment
//! drivers, step-size curves, kernel diagnostics, and CSV trace emission.

mod checks;
mod curves;
mod data;
mod demo;
pub mod lp;
pub mod scad;

use std::path::Path;
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::anyhow;
use clap::{Parser, Subcommand};
use hessbar::kernels::SecondOrderCone;
use hessbar::{make_kernel, KernelHandle, KernelKind};

/// A command failure carrying the process exit code it maps to: 1 for check
/// or solver failures, 2 for usage problems, 3 for I/O and data errors.
#[derive(Debug)]
pub struct Failure {
    code: u8,
    report: anyhow::Error,
}

impl Failure {
    pub(crate) fn check(report: anyhow::Error) -> Self {
        Self { code: 1, report }
    }

    pub(crate) fn usage(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            report: anyhow!(message.into()),
        }
    }

    pub(crate) fn io(report: anyhow::Error) -> Self {
        Self { code: 3, report }
    }

    /// The process exit code this failure maps to.
    pub fn code(&self) -> u8 {
        self.code
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:#}", self.report)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Self::io(e.into())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Self::io(e.into())
    }
}

impl From<hessbar::Error> for Failure {
    fn from(e: hessbar::Error) -> Self {
        use hessbar::Error;
        let code = match &e {
            Error::Parse { .. } => 3,
            Error::InvalidParameter(_) | Error::DimensionMismatch { .. } => 2,
            _ => 1,
        };
        Self {
            code,
            report: e.into(),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "hessbar",
    version,
    about = "Interior-point descent over barrier geometries"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the descent loop on a seeded demo problem and emit its trace.
    Solve(demo::SolveArgs),
    /// SCAD-penalized least squares on the prostate dataset.
    Scad(scad::ScadArgs),
    /// Sparse-signal recovery rates for L^p minimization.
    LpRecovery(lp::LpArgs),
    /// Step-size curves over a grid of curvature scales.
    StepCurve(curves::CurveArgs),
    /// Diagnostic property checks for one barrier kernel.
    KernelCheck(checks::CheckArgs),
}

/// Parses the CLI, dispatches, and maps failures to exit codes. Usage errors
/// caught by the parser itself exit with code 2 before reaching dispatch.
pub fn run() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Solve(args) => demo::run(&args),
        Command::Scad(args) => scad::run(&args),
        Command::LpRecovery(args) => lp::run(&args),
        Command::StepCurve(args) => curves::run(&args),
        Command::KernelCheck(args) => checks::run(&args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("hessbar: {:#}", f.report);
            ExitCode::from(f.code)
        }
    }
}

/// Domain shape of a kernel kind, used to sample interior points and build
/// demo problems.
#[derive(Clone, Copy)]
pub(crate) enum Family {
    /// Coordinates above zero (Burg, entropies, root-quadratic).
    LowerZero,
    /// Coordinates below the cap `kappa`.
    UpperKappa(f64),
    /// Coordinates inside `(-1, 1)`.
    Interval,
    /// Second-order cone, leading coordinate dominating the rest.
    Cone,
}

/// Resolves a kernel spec string like `burg`, `power:1.5`, or
/// `root-quadratic:0.667` into a kernel, its domain family, and the
/// dimension actually used: the requested one, or else `fallback`, except
/// that kernels of order above 3 exist in dimension one only and default
/// there instead.
pub(crate) fn resolve_kernel(
    spec: &str,
    dim: Option<usize>,
    fallback: usize,
) -> Result<(KernelHandle, Family, usize), Failure> {
    let (name, param) = match spec.split_once(':') {
        Some((n, p)) => (n, Some(p)),
        None => (spec, None),
    };
    let univariate = matches!(name, "neg-entropy" | "root-quadratic");
    let dim = dim.unwrap_or(if univariate { 1 } else { fallback });
    let need = |what: &str| -> Result<f64, Failure> {
        let raw = param
            .ok_or_else(|| Failure::usage(format!("kernel {name} needs a parameter: {name}:<{what}>")))?;
        raw.parse::<f64>()
            .map_err(|e| Failure::usage(format!("kernel parameter {raw}: {e}")))
    };
    let reject_param = || -> Result<(), Failure> {
        match param {
            Some(p) => Err(Failure::usage(format!("kernel {name} takes no parameter, got {p}"))),
            None => Ok(()),
        }
    };
    let (kind, family) = match name {
        "burg" => {
            reject_param()?;
            (KernelKind::Burg, Family::LowerZero)
        }
        "entropy-barrier" => {
            reject_param()?;
            (KernelKind::EntropyBarrier, Family::LowerZero)
        }
        "neg-entropy" => {
            reject_param()?;
            (KernelKind::NegEntropy, Family::LowerZero)
        }
        "inverse-sqrt" => {
            reject_param()?;
            (KernelKind::InverseSqrt, Family::Interval)
        }
        "power" => {
            let kappa = need("kappa")?;
            (KernelKind::Power { kappa }, Family::UpperKappa(kappa))
        }
        "regularized-burg" => {
            let reg = need("reg")?;
            (KernelKind::RegularizedBurg { reg }, Family::LowerZero)
        }
        "root-quadratic" => {
            let s = need("s")?;
            (KernelKind::RootQuadratic { s }, Family::LowerZero)
        }
        "second-order-cone" => {
            reject_param()?;
            let kernel: KernelHandle = Arc::new(SecondOrderCone::new(dim)?);
            return Ok((kernel, Family::Cone, dim));
        }
        other => {
            return Err(Failure::usage(format!(
                "unknown kernel kind {other}; expected one of burg, entropy-barrier, \
                 neg-entropy, inverse-sqrt, power:<kappa>, regularized-burg:<reg>, \
                 root-quadratic:<s>, second-order-cone"
            )));
        }
    };
    Ok((make_kernel(kind, dim)?, family, dim))
}

/// Creates the output directory if needed and returns the path of a file
/// inside it.
pub(crate) fn out_file(dir: &Path, name: &str) -> Result<std::path::PathBuf, Failure> {
    std::fs::create_dir_all(dir)?;
    Ok(dir.join(name))
}
