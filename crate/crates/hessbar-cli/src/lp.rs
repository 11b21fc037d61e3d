//! Sparse-signal recovery rates for L^p minimization: seeded trials over a
//! sparsity sweep, each recovering a binary signal from positive linear
//! measurements.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::Args;
use hessbar::{
    build_lp_problem, hba_solve, LpParams, Matrix, Smoothness, SolverConfig, Vector,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::{out_file, Failure};

#[derive(Args)]
pub(crate) struct LpArgs {
    /// Signal length.
    #[arg(long, default_value_t = 120)]
    n: usize,
    /// Number of measurements (rows of the sensing matrix).
    #[arg(long, default_value_t = 30)]
    m: usize,
    /// Objective exponent in (0, 1].
    #[arg(long, default_value_t = 0.5)]
    p: f64,
    /// Barrier weight.
    #[arg(long, default_value_t = 1.0)]
    mu: f64,
    /// Sparsity levels to sweep.
    #[arg(long, value_delimiter = ',', default_value = "2,5,8,10,12,15")]
    sparsity: Vec<usize>,
    /// Trials per sparsity level.
    #[arg(long, default_value_t = 50)]
    trials: usize,
    /// Base RNG seed; per-trial streams derive from it.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Stationarity target.
    #[arg(long, default_value_t = 1e-6)]
    epsilon: f64,
    /// Iteration cap per trial.
    #[arg(long, default_value_t = 20_000)]
    max_iters: usize,
    /// Adapt the smoothness constant online (the default).
    #[arg(long, conflicts_with = "fixed_l")]
    adaptive: bool,
    /// Fixed smoothness constant instead of adaptation.
    #[arg(long = "fixed-L", value_name = "V")]
    fixed_l: Option<f64>,
    /// Output directory for CSV artifacts.
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

/// Experiment configuration independent of the output plumbing.
#[derive(Clone)]
pub struct SweepConfig {
    pub n: usize,
    pub m: usize,
    pub p: f64,
    pub mu: f64,
    pub sparsity: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub epsilon: f64,
    pub max_iters: usize,
    pub smoothness: Smoothness,
}

impl SweepConfig {
    /// The experiment defaults: `n = 120`, `m = 30`, `p = 0.5`, `mu = 1`,
    /// adaptive smoothness from `L_0 = 1`.
    pub fn new(sparsity: Vec<usize>, trials: usize, seed: u64) -> Self {
        Self {
            n: 120,
            m: 30,
            p: 0.5,
            mu: 1.0,
            sparsity,
            trials,
            seed,
            epsilon: 1e-6,
            max_iters: 20_000,
            smoothness: Smoothness::Adaptive { l0: 1.0 },
        }
    }
}

/// One recovery attempt.
pub struct Trial {
    pub sparsity: usize,
    pub trial: usize,
    pub success: bool,
    /// Sup-norm error against the true signal after thresholding.
    pub inf_error: f64,
    /// Recovered and true signals, kept for the example CSV only.
    signals: Option<(Vec<f64>, Vec<f64>)>,
}

/// Per-sparsity aggregate.
pub struct RateRow {
    pub sparsity: usize,
    pub successes: usize,
    pub trials: usize,
}

impl RateRow {
    pub fn rate(&self) -> f64 {
        self.successes as f64 / self.trials as f64
    }
}

/// Entries below this are treated as exact zeros before comparing against
/// the binary ground truth.
const ZERO_THRESHOLD: f64 = 1e-3;
/// Sup-norm tolerance declaring a recovery successful.
const SUCCESS_TOLERANCE: f64 = 0.1;
/// Positive background added to the sparse signal before measuring. Exactly
/// sparse measurements through an all-positive matrix land on the boundary
/// of the measurement cone (a direction orthogonal to the support columns
/// and positive on the rest separates them), leaving no strictly positive
/// solution for the barrier to work with; the pedestal restores an interior
/// margin of exactly its own size while staying far below the success
/// tolerance.
const PEDESTAL: f64 = 2e-3;

fn stream_id(sparsity: usize, trial: usize, attempt: u32) -> u64 {
    ((attempt as u64) << 48) | ((sparsity as u64) << 24) | trial as u64
}

/// Dense positive sensing matrix with unit-norm rows. Every row is a
/// noisy multiple of the all-ones functional, so each measurement pins
/// roughly the same total mass of the signal; that shared budget is what
/// stops the barrier from inflating off-support coordinates at large `mu`.
/// Mixed-sign ensembles leave the total mass free, and the barrier then
/// parks every unconstrained coordinate at its own unconstrained optimum.
fn sensing_matrix(rng: &mut ChaCha8Rng, m: usize, n: usize) -> Matrix {
    let mut a = Matrix::zeros(m, n);
    for i in 0..m {
        for j in 0..n {
            a[(i, j)] = rng.gen_range(0.5..1.5);
        }
    }
    for i in 0..m {
        let norm = a.row(i).norm();
        for j in 0..n {
            a[(i, j)] /= norm;
        }
    }
    a
}

fn run_trial(cfg: &SweepConfig, sparsity: usize, trial: usize, keep_signals: bool) -> Result<Trial, Failure> {
    // A zero signal gives zero measurements, and with positive sensing
    // entries the only nonnegative solution is zero itself: recovered
    // exactly, with no interior to run the solver in.
    if sparsity == 0 {
        return Ok(Trial {
            sparsity,
            trial,
            success: true,
            inf_error: 0.0,
            signals: keep_signals.then(|| (vec![0.0; cfg.n], vec![0.0; cfg.n])),
        });
    }

    let mut last: Option<Failure> = None;
    for attempt in 0..10 {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(stream_id(sparsity, trial, attempt));
        let support = rand::seq::index::sample(&mut rng, cfg.n, sparsity).into_vec();
        let mut x_true = Vector::zeros(cfg.n);
        for &j in &support {
            x_true[j] = 1.0;
        }
        let a = sensing_matrix(&mut rng, cfg.m, cfg.n);
        let b = &a * &x_true.add_scalar(PEDESTAL);

        let attempt_result = (|| -> Result<Trial, Failure> {
            let params = LpParams::new(cfg.p, a, b)?;
            let problem = build_lp_problem(&params)?;
            let solve_cfg = SolverConfig {
                mu: cfg.mu,
                smoothness: cfg.smoothness,
                epsilon: cfg.epsilon,
                max_iters: cfg.max_iters,
                f_lower_bound: 0.0,
                ..SolverConfig::default()
            };
            let result = hba_solve(&problem, &solve_cfg)?;
            let recovered: Vec<f64> = result
                .x
                .iter()
                .map(|&v| if v < ZERO_THRESHOLD { 0.0 } else { v })
                .collect();
            let inf_error = recovered
                .iter()
                .zip(x_true.iter())
                .map(|(r, t)| (r - t).abs())
                .fold(0.0, f64::max);
            Ok(Trial {
                sparsity,
                trial,
                success: inf_error < SUCCESS_TOLERANCE,
                inf_error,
                signals: keep_signals
                    .then(|| (recovered, x_true.iter().copied().collect())),
            })
        })();
        match attempt_result {
            Ok(t) => return Ok(t),
            Err(e) => last = Some(e),
        }
    }
    let e = last.expect("at least one attempt ran");
    Err(Failure::check(anyhow::anyhow!(
        "sparsity {sparsity} trial {trial} failed after 10 attempts: {e}"
    )))
}

/// Runs the full sweep in parallel. Trials are independent; streams derive
/// from (sparsity, trial, attempt), so the aggregate is independent of
/// scheduling order.
pub fn sweep(cfg: &SweepConfig) -> Result<(Vec<RateRow>, Vec<Trial>), Failure> {
    if cfg.m >= cfg.n {
        return Err(Failure::usage(format!(
            "need more unknowns than measurements, got n = {}, m = {}",
            cfg.n, cfg.m
        )));
    }
    if cfg.m == 0 || cfg.trials == 0 || cfg.sparsity.is_empty() {
        return Err(Failure::usage(
            "need at least one measurement, one trial, and one sparsity level".to_string(),
        ));
    }
    if let Some(s) = cfg.sparsity.iter().find(|&&s| s > cfg.n) {
        return Err(Failure::usage(format!(
            "sparsity {s} exceeds the signal length {}",
            cfg.n
        )));
    }

    let example_s = cfg
        .sparsity
        .iter()
        .copied()
        .find(|&s| s > 0)
        .unwrap_or(cfg.sparsity[0]);
    let jobs: Vec<(usize, usize)> = cfg
        .sparsity
        .iter()
        .flat_map(|&s| (0..cfg.trials).map(move |t| (s, t)))
        .collect();
    let mut trials = jobs
        .into_par_iter()
        .map(|(s, t)| run_trial(cfg, s, t, s == example_s && t == 0))
        .collect::<Result<Vec<_>, Failure>>()?;
    trials.sort_by_key(|t| {
        let pos = cfg.sparsity.iter().position(|&s| s == t.sparsity);
        (pos, t.trial)
    });

    let rates = cfg
        .sparsity
        .iter()
        .map(|&s| RateRow {
            sparsity: s,
            successes: trials
                .iter()
                .filter(|t| t.sparsity == s && t.success)
                .count(),
            trials: cfg.trials,
        })
        .collect();
    Ok((rates, trials))
}

pub(crate) fn run(args: &LpArgs) -> Result<(), Failure> {
    let cfg = SweepConfig {
        n: args.n,
        m: args.m,
        p: args.p,
        mu: args.mu,
        sparsity: args.sparsity.clone(),
        trials: args.trials,
        seed: args.seed,
        epsilon: args.epsilon,
        max_iters: args.max_iters,
        smoothness: match args.fixed_l {
            Some(l) => Smoothness::Fixed(l),
            None => Smoothness::Adaptive { l0: 1.0 },
        },
    };
    let (rates, trials) = sweep(&cfg)?;

    let rates_path = out_file(&args.out, "lp_rates.csv")?;
    let mut out = BufWriter::new(File::create(&rates_path)?);
    writeln!(out, "sparsity,successes,trials,rate")?;
    for row in &rates {
        writeln!(
            out,
            "{},{},{},{}",
            row.sparsity,
            row.successes,
            row.trials,
            row.rate()
        )?;
    }
    out.flush()?;

    let example_path = out_file(&args.out, "lp_example.csv")?;
    if let Some((recovered, truth)) = trials.iter().find_map(|t| t.signals.as_ref()) {
        let mut out = BufWriter::new(File::create(&example_path)?);
        writeln!(out, "index,true,recovered")?;
        for (i, (t, r)) in truth.iter().zip(recovered).enumerate() {
            writeln!(out, "{i},{t},{r}")?;
        }
        out.flush()?;
    }

    for row in &rates {
        println!(
            "lp-recovery: sparsity {}: {}/{} recovered (rate {})",
            row.sparsity,
            row.successes,
            row.trials,
            row.rate()
        );
    }
    println!(
        "lp-recovery: wrote {} and {}",
        rates_path.display(),
        example_path.display()
    );
    Ok(())
}
