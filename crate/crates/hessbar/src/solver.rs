//! Potential-reduction solver: fixed-smoothness and adaptive descent loops,
//! analytic centering, per-iterate trace recording, and stopping-time
//! reports.

use std::io;
use std::sync::Arc;

use nalgebra::DVector;

use crate::directions::{criticality, solve_direction, ConstraintSet, SearchDirection};
use crate::error::{Error, Result};
use crate::geometry::{bregman, local_geometry, LocalGeometry};
use crate::kernels::{KernelHandle, KernelParams};
use crate::problems::{Objective, Problem};
use crate::stepsize::{alpha_opt, gamma_hat, omega_tilde, StepContext};

/// How the relative-smoothness constant is supplied.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Smoothness {
    /// Trust a caller-supplied constant; one oracle call per iteration.
    Fixed(f64),
    /// Backtrack on the descent inequality starting from `l0 / 2`, doubling
    /// until it holds; the accepted value seeds the next iteration.
    Adaptive {
        /// Initial guess, positive.
        l0: f64,
    },
}

/// Criterion that ends the descent loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StoppingRule {
    /// Stop when the local gradient norm satisfies `lambda_k <= epsilon`.
    LambdaThreshold,
    /// Stop when the realized potential decrease falls below
    /// `gamma_hat * epsilon^2 / (L_k + mu)`, returning the freshly stepped
    /// point.
    PotentialDecrease,
    /// Run to the iteration cap regardless of progress.
    IterationCap,
}

/// Why the solver returned.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    /// The stopping rule's stationarity test fired.
    EpsilonStationary,
    /// The near-optimality iteration budget for the `mu = 4 epsilon`
    /// coupling was exhausted, certifying the function-value gap.
    NearOptimal,
    /// The iteration cap was reached without the stopping rule firing.
    IterationCap,
    /// Floating-point trouble: the potential rose beyond round-off slack, a
    /// guarded step could not re-enter the domain, or an oracle returned a
    /// non-finite value. The trace up to the failure is preserved.
    NumericalFailure,
}

/// Solver knobs shared by both descent loops.
#[derive(Debug, Clone)]
pub struct SolverConfig {
    /// Barrier weight `mu > 0`.
    pub mu: f64,
    /// Smoothness handling.
    pub smoothness: Smoothness,
    /// Stationarity target `epsilon > 0`.
    pub epsilon: f64,
    /// Maximum number of steps.
    pub max_iters: usize,
    /// Known lower bound on `f` over the feasible set, `-inf` if none.
    pub f_lower_bound: f64,
    /// Centering quality `c` of the start (distance proxy used by the
    /// near-optimality budget); `None` skips that budget.
    pub analytic_center_c: Option<f64>,
    /// Loop-ending criterion.
    pub stopping: StoppingRule,
    /// Relative tolerance for the affine feasibility check at the start.
    pub feas_tol: f64,
    /// Tolerance handed to centering or gradient checks by callers; the
    /// descent loop itself does not consult it.
    pub grad_tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            mu: 1e-3,
            smoothness: Smoothness::Fixed(1.0),
            epsilon: 1e-6,
            max_iters: 10_000,
            f_lower_bound: f64::NEG_INFINITY,
            analytic_center_c: None,
            stopping: StoppingRule::LambdaThreshold,
            feas_tol: 1e-9,
            grad_tol: 1e-8,
        }
    }
}

impl SolverConfig {
    fn validate(&self) -> Result<()> {
        if !(self.mu > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "barrier weight must be positive, got {}",
                self.mu
            )));
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "stationarity target must be positive, got {}",
                self.epsilon
            )));
        }
        match self.smoothness {
            Smoothness::Fixed(l) if !(l >= 0.0 && l.is_finite()) => {
                return Err(Error::InvalidParameter(format!(
                    "smoothness constant must be finite and nonnegative, got {l}"
                )));
            }
            Smoothness::Adaptive { l0 } if !(l0 > 0.0 && l0.is_finite()) => {
                return Err(Error::InvalidParameter(format!(
                    "initial smoothness guess must be finite and positive, got {l0}"
                )));
            }
            _ => {}
        }
        if !(self.feas_tol > 0.0) || !(self.grad_tol > 0.0) {
            return Err(Error::InvalidParameter(
                "tolerances must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// One completed iteration of the descent loop.
#[derive(Debug, Clone)]
pub struct IterateRecord {
    /// Iteration index, starting at zero.
    pub k: usize,
    /// Potential `f + mu h` at the iterate.
    pub f_mu: f64,
    /// Objective value at the iterate.
    pub f: f64,
    /// Kernel value at the iterate.
    pub h: f64,
    /// Local norm of the search direction.
    pub lambda: f64,
    /// Euclidean norm of the search direction.
    pub beta: f64,
    /// Curvature scale entering the step-size rule.
    pub delta: f64,
    /// Accepted step size.
    pub alpha: f64,
    /// Smoothness constant in force during the step.
    pub l: f64,
    /// Criticality measure (dual local norm of the projected objective
    /// gradient).
    pub chi: f64,
    /// Realized potential decrease `F_mu(x_k) - F_mu(x_{k+1})`.
    pub decrease: f64,
    /// Objective oracle calls consumed by the step.
    pub evals: usize,
}

/// The full per-iterate history of a solve.
#[derive(Debug, Clone, Default)]
pub struct IterateTrace {
    /// Records in iteration order. A final record with `alpha = 0` marks a
    /// stationarity or cap stop evaluated before any step was taken.
    pub records: Vec<IterateRecord>,
}

impl IterateTrace {
    /// Writes the trace as CSV with a fixed header. Floats use the shortest
    /// round-trip decimal form, so equal runs produce identical bytes.
    pub fn write_csv<W: io::Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "k,F_mu,f,lambda,beta,delta,alpha,L_k,chi,Delta,evals")?;
        for r in &self.records {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{}",
                r.k, r.f_mu, r.f, r.lambda, r.beta, r.delta, r.alpha, r.l, r.chi, r.decrease,
                r.evals
            )?;
        }
        Ok(())
    }

    /// Total objective oracle calls recorded across iterations (the initial
    /// evaluation before the loop is not included).
    pub fn total_evals(&self) -> usize {
        self.records.iter().map(|r| r.evals).sum()
    }
}

/// Running bounds on the kernel geometry observed along the trajectory.
#[derive(Debug, Clone, Copy)]
pub struct Estimates {
    /// Smallest Hessian eigenvalue seen.
    pub sigma_h: f64,
    /// Largest Hessian eigenvalue seen.
    pub tau_h: f64,
    /// Largest dual local norm of the kernel gradient seen.
    pub grad_kernel_dual_max: f64,
}

impl Default for Estimates {
    fn default() -> Self {
        Self {
            sigma_h: f64::INFINITY,
            tau_h: 0.0,
            grad_kernel_dual_max: 0.0,
        }
    }
}

impl Estimates {
    fn absorb(&mut self, geom: &LocalGeometry, kernel_grad: &DVector<f64>) {
        let (lo, hi) = geom.eigenvalue_bounds();
        self.sigma_h = self.sigma_h.min(lo);
        self.tau_h = self.tau_h.max(hi);
        self.grad_kernel_dual_max = self.grad_kernel_dual_max.max(geom.dual_norm(kernel_grad));
    }
}

/// Outcome of a solve: final point, multipliers, history, and geometry
/// estimates.
#[derive(Debug, Clone)]
pub struct SolveResult {
    /// Final iterate.
    pub x: DVector<f64>,
    /// Dual multipliers from the last direction solve.
    pub y: DVector<f64>,
    /// Why the loop ended.
    pub termination: Termination,
    /// Per-iterate history.
    pub trace: IterateTrace,
    /// Observed geometry bounds.
    pub estimates: Estimates,
    /// Human-readable detail for numerical failures.
    pub diagnostic: Option<String>,
}

/// Runs the fixed-smoothness descent loop.
///
/// Preconditions: the start is strictly interior and affine-feasible, and
/// the pair `(f, h)` is `L`-smooth for the configured constant; violations
/// of the latter surface as decrease-check failures in the result.
pub fn hba_solve(problem: &Problem, cfg: &SolverConfig) -> Result<SolveResult> {
    descend(problem, cfg)
}

/// Runs the adaptive descent loop; `cfg.smoothness` must be `Adaptive`.
pub fn ahba_solve(problem: &Problem, cfg: &SolverConfig) -> Result<SolveResult> {
    match cfg.smoothness {
        Smoothness::Adaptive { .. } => descend(problem, cfg),
        Smoothness::Fixed(_) => Err(Error::InvalidParameter(
            "adaptive solve requires Smoothness::Adaptive".into(),
        )),
    }
}

/// Searches along `v` for a step that stays strictly interior, halving at
/// most `shrinks` times. Returns the point, the step actually used, and the
/// kernel value there.
fn guarded_point(
    kernel: &KernelHandle,
    x: &DVector<f64>,
    v: &DVector<f64>,
    alpha: f64,
    shrinks: u32,
) -> Option<(DVector<f64>, f64, f64)> {
    let mut a = alpha;
    for _ in 0..=shrinks {
        let z = x + v * a;
        if kernel.contains(&z) {
            if let Ok(h) = kernel.value(&z) {
                if h.is_finite() {
                    return Some((z, a, h));
                }
            }
        }
        a *= 0.5;
    }
    None
}

struct LoopState {
    x: DVector<f64>,
    f_val: f64,
    f_grad: DVector<f64>,
    l: f64,
}

fn descend(problem: &Problem, cfg: &SolverConfig) -> Result<SolveResult> {
    cfg.validate()?;
    let kernel = &problem.kernel;
    let cons = problem.cons.as_ref();
    let params = kernel.params();
    let mu = cfg.mu;

    let x0 = problem.x_start.clone();
    if x0.len() != problem.dim {
        return Err(Error::DimensionMismatch {
            expected: problem.dim,
            actual: x0.len(),
        });
    }
    if !kernel.contains(&x0) {
        return Err(Error::OutsideDomain(
            "starting point is not strictly interior".into(),
        ));
    }
    if !cons.is_feasible_with(&x0, cfg.feas_tol) {
        return Err(Error::Infeasible(format!(
            "starting point violates the affine constraints by {:.3e}",
            cons.residual(&x0).norm()
        )));
    }

    let (l_init, adaptive) = match cfg.smoothness {
        Smoothness::Fixed(l) => (l, false),
        Smoothness::Adaptive { l0 } => (l0, true),
    };

    let (f0, g0) = problem.eval(&x0);
    if !f0.is_finite() {
        return Err(Error::NumericalFailure(
            "objective is non-finite at the start".into(),
        ));
    }
    let mut state = LoopState {
        x: x0,
        f_val: f0,
        f_grad: g0,
        l: l_init,
    };

    // Near-optimality budget for the mu = 4 epsilon coupling, available only
    // with a finite objective lower bound and a centering estimate.
    let near_optimal_cap = match (cfg.stopping, cfg.analytic_center_c) {
        (StoppingRule::PotentialDecrease, Some(c))
            if !adaptive
                && cfg.f_lower_bound.is_finite()
                && (mu - 4.0 * cfg.epsilon).abs() <= 1e-12 * mu.max(1.0) =>
        {
            let gap = mu * (c - 0.25) + state.f_val - cfg.f_lower_bound;
            let denom = gamma_hat(params.nu) * cfg.epsilon * cfg.epsilon;
            let k2 = (gap.max(0.0) * (l_init + mu) / denom).ceil();
            if k2.is_finite() && k2 >= 0.0 {
                Some((k2 as usize).min(cfg.max_iters))
            } else {
                None
            }
        }
        _ => None,
    };
    let cap = near_optimal_cap.unwrap_or(cfg.max_iters);

    let mut trace = IterateTrace::default();
    let mut estimates = Estimates::default();
    let mut y_last = DVector::zeros(cons.rows());
    let mut termination = Termination::IterationCap;
    let mut diagnostic = None;

    for k in 0..=cap {
        let h_val = kernel.value(&state.x)?;
        let h_grad = kernel.gradient(&state.x)?;
        let geom = local_geometry(kernel, &state.x)?;
        estimates.absorb(&geom, &h_grad);
        let f_mu = state.f_val + mu * h_val;

        let g = &state.f_grad + &h_grad * mu;
        let sd = solve_direction(&geom, cons, &g, &params)?;
        let chi = criticality(&geom, cons, &state.f_grad, &sd.y);
        y_last = sd.y.clone();

        let mut record = IterateRecord {
            k,
            f_mu,
            f: state.f_val,
            h: h_val,
            lambda: sd.lambda,
            beta: sd.beta,
            delta: sd.delta,
            alpha: 0.0,
            l: state.l,
            chi,
            decrease: 0.0,
            evals: 0,
        };

        let lambda_stop =
            cfg.stopping == StoppingRule::LambdaThreshold && sd.lambda <= cfg.epsilon;
        if lambda_stop || k == cap {
            termination = if lambda_stop {
                Termination::EpsilonStationary
            } else if near_optimal_cap == Some(cap) && cap < cfg.max_iters {
                Termination::NearOptimal
            } else {
                Termination::IterationCap
            };
            trace.records.push(record);
            break;
        }

        let step = if adaptive {
            take_adaptive_step(problem, kernel, &params, mu, &state, &sd, f_mu)?
        } else {
            take_fixed_step(problem, kernel, &params, mu, &state, &sd, f_mu, &estimates)
        };
        let step = match step {
            StepOutcome::Accepted(s) => s,
            StepOutcome::Failed(message) => {
                termination = Termination::NumericalFailure;
                diagnostic = Some(message);
                trace.records.push(record);
                break;
            }
        };

        record.alpha = step.alpha;
        record.l = step.l_used;
        record.decrease = step.decrease;
        record.evals = step.evals;
        trace.records.push(record);

        if step.decrease < -1e-9 * (1.0 + f_mu.abs()) {
            termination = Termination::NumericalFailure;
            diagnostic = Some(format!(
                "potential increased by {:.3e} at iteration {k}; the smoothness \
                 constant is likely too small for this trajectory",
                -step.decrease
            ));
            state.x = step.x;
            break;
        }

        let decrease_stop = cfg.stopping == StoppingRule::PotentialDecrease
            && step.decrease
                < gamma_hat(params.nu) * cfg.epsilon * cfg.epsilon / (step.l_used + mu);

        state.x = step.x;
        state.f_val = step.f_val;
        state.f_grad = step.f_grad;
        state.l = step.l_next;

        if decrease_stop {
            termination = Termination::EpsilonStationary;
            break;
        }
    }

    Ok(SolveResult {
        x: state.x,
        y: y_last,
        termination,
        trace,
        estimates,
        diagnostic,
    })
}

struct AcceptedStep {
    x: DVector<f64>,
    f_val: f64,
    f_grad: DVector<f64>,
    alpha: f64,
    l_used: f64,
    l_next: f64,
    decrease: f64,
    evals: usize,
}

enum StepOutcome {
    Accepted(AcceptedStep),
    Failed(String),
}

#[allow(clippy::too_many_arguments)]
fn take_fixed_step(
    problem: &Problem,
    kernel: &KernelHandle,
    params: &KernelParams,
    mu: f64,
    state: &LoopState,
    sd: &SearchDirection,
    f_mu: f64,
    estimates: &Estimates,
) -> StepOutcome {
    let ctx = StepContext {
        nu: params.nu,
        m: params.m,
        l_plus_mu: state.l + mu,
        delta: sd.delta,
        lambda: sd.lambda,
        sigma_h: estimates.sigma_h,
        tau_h: estimates.tau_h,
    };
    let alpha = alpha_opt(&ctx);
    let Some((z, alpha_used, h_z)) = guarded_point(kernel, &state.x, &sd.v, alpha, 5) else {
        return StepOutcome::Failed(
            "step left the kernel domain and halving could not recover".into(),
        );
    };
    let (f_z, g_z) = problem.eval(&z);
    if !f_z.is_finite() {
        return StepOutcome::Failed("objective returned a non-finite value".into());
    }
    let decrease = f_mu - (f_z + mu * h_z);
    StepOutcome::Accepted(AcceptedStep {
        x: z,
        f_val: f_z,
        f_grad: g_z,
        alpha: alpha_used,
        l_used: state.l,
        l_next: state.l,
        decrease,
        evals: 1,
    })
}

fn take_adaptive_step(
    problem: &Problem,
    kernel: &KernelHandle,
    params: &KernelParams,
    mu: f64,
    state: &LoopState,
    sd: &SearchDirection,
    f_mu: f64,
) -> Result<StepOutcome> {
    let mut l_trial = state.l / 2.0;
    let mut evals = 0usize;
    for _ in 0..=80u32 {
        let ctx = StepContext {
            nu: params.nu,
            m: params.m,
            l_plus_mu: l_trial + mu,
            delta: sd.delta,
            lambda: sd.lambda,
            // The step-size rule does not consult the geometry bounds.
            sigma_h: 1.0,
            tau_h: 1.0,
        };
        let alpha = alpha_opt(&ctx);
        let trial = guarded_point(kernel, &state.x, &sd.v, alpha, 5);
        if let Some((z, alpha_used, h_z)) = trial {
            // The Bregman divergence only needs the already-computed kernel
            // values; failure here means the point is effectively on the
            // boundary, treated as a rejected trial.
            if let Ok(div) = bregman(kernel.as_ref(), &state.x, &z) {
                let (f_z, g_z) = problem.eval(&z);
                evals += 1;
                if !f_z.is_finite() {
                    return Ok(StepOutcome::Failed(
                        "objective returned a non-finite value".into(),
                    ));
                }
                let linear = state.f_val + state.f_grad.dot(&(&z - &state.x));
                let slack = 1e-12 * (1.0 + state.f_val.abs());
                if f_z <= linear + l_trial * div + slack {
                    let decrease = f_mu - (f_z + mu * h_z);
                    return Ok(StepOutcome::Accepted(AcceptedStep {
                        x: z,
                        f_val: f_z,
                        f_grad: g_z,
                        alpha: alpha_used,
                        l_used: l_trial,
                        l_next: l_trial,
                        decrease,
                        evals,
                    }));
                }
            }
        }
        l_trial *= 2.0;
    }
    Err(Error::SmoothnessViolation(80))
}

/// Computes the analytic center of the kernel domain intersected with the
/// affine set, by running the fixed-step loop on a zero objective with unit
/// barrier weight. Returns the center together with a conservative bound
/// `c` on the centering quality used by near-optimality budgets.
pub fn analytic_center(
    kernel: &KernelHandle,
    cons: &Arc<ConstraintSet>,
    x_init: &DVector<f64>,
    tol: f64,
) -> Result<(DVector<f64>, f64)> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "centering tolerance must be positive, got {tol}"
        )));
    }
    let n = x_init.len();
    let objective: Objective = Arc::new(move |x: &DVector<f64>| (0.0, DVector::zeros(x.len())));
    let problem = Problem {
        dim: n,
        objective,
        cons: Arc::clone(cons),
        kernel: Arc::clone(kernel),
        smoothness_hint: Some(0.0),
        f_lower_bound: 0.0,
        x_start: x_init.clone(),
    };
    let cfg = SolverConfig {
        mu: 1.0,
        smoothness: Smoothness::Fixed(0.0),
        epsilon: tol,
        max_iters: 1000,
        stopping: StoppingRule::LambdaThreshold,
        ..SolverConfig::default()
    };
    let result = hba_solve(&problem, &cfg)?;
    match result.termination {
        Termination::EpsilonStationary => {
            let c = tol
                * (n as f64).sqrt()
                * result.estimates.tau_h.max(0.0).sqrt()
                * (1.0 + 2.0 * result.x.norm());
            Ok((result.x, c))
        }
        Termination::IterationCap => Err(Error::UnboundedCenter),
        _ => Err(Error::NumericalFailure(
            result
                .diagnostic
                .unwrap_or_else(|| "centering failed".into()),
        )),
    }
}

/// Empirical and analytic iteration counts extracted from a finished run.
#[derive(Debug, Clone, Copy, Default)]
pub struct StoppingReport {
    /// First recorded iteration with `lambda_k < epsilon`.
    pub empirical_n: Option<usize>,
    /// First recorded iteration whose guaranteed decrease
    /// `omega_tilde(lambda_k)` falls below the potential-decrease threshold.
    pub empirical_k1: Option<usize>,
    /// A priori bound on the stationarity stopping time; needs a finite
    /// objective lower bound and a centering estimate.
    pub n_bound: Option<f64>,
    /// A priori near-optimality budget for the `mu = 4 epsilon` coupling.
    pub k2_bound: Option<f64>,
}

/// Derives stopping-time diagnostics from a trace.
pub fn stopping_times(
    trace: &IterateTrace,
    cfg: &SolverConfig,
    params: &KernelParams,
    estimates: &Estimates,
) -> StoppingReport {
    let mut report = StoppingReport::default();
    if trace.records.is_empty() {
        return report;
    }
    let l_max = trace
        .records
        .iter()
        .map(|r| r.l)
        .fold(0.0_f64, f64::max);
    let ctx_for = |lambda: f64, delta: f64| StepContext {
        nu: params.nu,
        m: params.m,
        l_plus_mu: l_max + cfg.mu,
        delta,
        lambda,
        sigma_h: estimates.sigma_h,
        tau_h: estimates.tau_h,
    };
    let threshold = gamma_hat(params.nu) * cfg.epsilon * cfg.epsilon / (l_max + cfg.mu);
    for r in &trace.records {
        if report.empirical_n.is_none() && r.lambda < cfg.epsilon {
            report.empirical_n = Some(r.k);
        }
        if report.empirical_k1.is_none() {
            let guaranteed = omega_tilde(&ctx_for(r.lambda, r.delta), r.lambda);
            if guaranteed < threshold {
                report.empirical_k1 = Some(r.k);
            }
        }
        if report.empirical_n.is_some() && report.empirical_k1.is_some() {
            break;
        }
    }
    if cfg.f_lower_bound.is_finite() {
        let f0 = trace.records[0].f;
        if let Some(c) = cfg.analytic_center_c {
            let delta_at_eps = crate::directions::curvature_scale(params, cfg.epsilon, cfg.epsilon);
            let per_step = omega_tilde(&ctx_for(cfg.epsilon, delta_at_eps), cfg.epsilon);
            if per_step > 0.0 {
                let gap = f0 - cfg.f_lower_bound + cfg.mu * c;
                report.n_bound = Some((gap.max(0.0) / per_step).ceil());
            }
            let denom = gamma_hat(params.nu) * cfg.epsilon * cfg.epsilon;
            let gap2 = cfg.mu * (c - 0.25) + f0 - cfg.f_lower_bound;
            report.k2_bound = Some((gap2.max(0.0) * (l_max + cfg.mu) / denom).ceil());
        }
    }
    report
}
