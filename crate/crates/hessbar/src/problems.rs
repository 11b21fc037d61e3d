//! Problem assembly: objective oracles paired with constraint data and a
//! kernel, plus the two experiment constructions (folded-concave penalized
//! regression and L^p signal recovery).

use std::sync::Arc;

use nalgebra::{Cholesky, DMatrix, DVector};

use crate::directions::ConstraintSet;
use crate::error::{Error, Result};
use crate::kernels::{make_kernel, KernelHandle, KernelKind};

/// Objective oracle returning value and gradient in one call.
pub type Objective = Arc<dyn Fn(&DVector<f64>) -> (f64, DVector<f64>) + Send + Sync>;

/// A minimization instance: `min f(x)` subject to `Ax = b` over the closure
/// of the kernel domain.
#[derive(Clone)]
pub struct Problem {
    /// Ambient dimension.
    pub dim: usize,
    /// Value/gradient oracle, defined on the kernel interior.
    pub objective: Objective,
    /// Equality constraints.
    pub cons: Arc<ConstraintSet>,
    /// Barrier kernel defining the geometry.
    pub kernel: KernelHandle,
    /// Smoothness constant of the pair `(f, h)` when known.
    pub smoothness_hint: Option<f64>,
    /// Lower bound on `f` over the feasible set (may be `-inf` when none is
    /// known; iteration bounds needing it are then skipped).
    pub f_lower_bound: f64,
    /// Strictly feasible starting point.
    pub x_start: DVector<f64>,
}

impl Problem {
    /// Evaluates the objective oracle.
    pub fn eval(&self, x: &DVector<f64>) -> (f64, DVector<f64>) {
        (self.objective)(x)
    }
}

/// Parameters of the folded-concave penalty: linear with slope `zeta` up to
/// `zeta`, blended quadratic up to `a * zeta`, constant beyond.
#[derive(Debug, Clone, Copy)]
pub struct ScadParams {
    /// Kink location and initial slope, `zeta > 0`.
    pub zeta: f64,
    /// Width multiplier, `a > 2`.
    pub a: f64,
}

impl ScadParams {
    /// Validates `zeta > 0` and `a > 2`.
    pub fn new(zeta: f64, a: f64) -> Result<Self> {
        if !(zeta > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "penalty kink must be positive, got {zeta}"
            )));
        }
        if !(a > 2.0) {
            return Err(Error::InvalidParameter(format!(
                "penalty width multiplier must exceed 2, got {a}"
            )));
        }
        Ok(Self { zeta, a })
    }
}

/// Folded-concave penalty value and one-sided derivative at `t >= 0`.
pub fn scad_penalty(params: &ScadParams, t: f64) -> Result<(f64, f64)> {
    if t < 0.0 {
        return Err(Error::StepDomain(format!(
            "penalty argument must be nonnegative, got {t}"
        )));
    }
    let z = params.zeta;
    let a = params.a;
    if t <= z {
        Ok((z * t, z))
    } else if t <= a * z {
        let value = (-0.5 * z * z + a * z * t - 0.5 * t * t) / (a - 1.0);
        let deriv = (a * z - t) / (a - 1.0);
        Ok((value, deriv))
    } else {
        Ok((0.5 * (a + 1.0) * z * z, 0.0))
    }
}

/// Penalized-regression instance in split variables, plus the data the
/// drivers need to interpret its solution.
pub struct ScadProblem {
    /// The assembled instance on `R^{2d}` with the regularized Burg kernel.
    pub problem: Problem,
    /// Curvature bound `rho = max(1, ||B^T W^T W B||)` absorbed into the kernel.
    pub rho: f64,
    /// Number of regression coefficients `d`.
    pub coefficients: usize,
}

/// Recovers the signed coefficients `beta = x_plus - x_minus` from a split
/// iterate (first half `x_minus`, second half `x_plus`).
pub fn split_to_beta(x: &DVector<f64>) -> DVector<f64> {
    let d = x.len() / 2;
    DVector::from_fn(d, |i, _| x[d + i] - x[i])
}

/// Largest eigenvalue of a symmetric positive semidefinite matrix by a fixed
/// 100-step power iteration. The start vector is a deterministic oscillating
/// pattern chosen to avoid structured null spaces (the split-design `Q`
/// annihilates the all-ones vector, for instance).
fn operator_norm(q: &DMatrix<f64>) -> f64 {
    let n = q.nrows();
    if n == 0 {
        return 0.0;
    }
    let mut v = DVector::from_fn(n, |i, _| (0.5 + i as f64).sin());
    let start_norm = v.norm();
    v /= start_norm;
    let mut eig = 0.0;
    for _ in 0..100 {
        let w = q * &v;
        let norm = w.norm();
        if norm == 0.0 {
            return 0.0;
        }
        eig = norm;
        v = w / norm;
    }
    eig
}

/// Builds the penalized least-squares problem in split coordinates.
///
/// The fit `(1/2)||y - W beta||^2` with `beta = x_plus - x_minus` and penalty
/// `sum p(x_minus_i + x_plus_i)` is assembled in descent form: the quadratic
/// curvature bound `rho` is subtracted from the objective and absorbed into a
/// regularized Burg kernel, leaving a concave objective that is 0-smooth
/// relative to the kernel. The potential `f + mu * h` then equals the plain
/// penalized objective plus `mu` times the unregularized log barrier, so the
/// iterates are those of the fixed-step method with `L = 0`.
pub fn build_scad_problem(
    w: &DMatrix<f64>,
    y: &DVector<f64>,
    params: &ScadParams,
    mu: f64,
) -> Result<ScadProblem> {
    if w.nrows() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: w.nrows(),
            actual: y.len(),
        });
    }
    if !(mu > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "barrier weight must be positive, got {mu}"
        )));
    }
    let d = w.ncols();
    let n = 2 * d;

    // Q = B^T W^T W B with B = [-I I]; its norm is exactly twice that of
    // W^T W, but the estimate follows the fixed power-iteration recipe.
    let gram = w.transpose() * w;
    let mut q = DMatrix::zeros(n, n);
    for i in 0..d {
        for j in 0..d {
            let g = gram[(i, j)];
            q[(i, j)] = g;
            q[(d + i, d + j)] = g;
            q[(i, d + j)] = -g;
            q[(d + i, j)] = -g;
        }
    }
    let rho = operator_norm(&q).max(1.0);

    let kernel = make_kernel(KernelKind::RegularizedBurg { reg: rho / mu }, n)?;
    let w_own = w.clone();
    let y_own = y.clone();
    let p = *params;
    let objective: Objective = Arc::new(move |x: &DVector<f64>| {
        let d = x.len() / 2;
        let beta = DVector::from_fn(d, |i, _| x[d + i] - x[i]);
        let residual = &w_own * &beta - &y_own;
        let mut value = 0.5 * residual.norm_squared();
        let wt_r = w_own.transpose() * &residual;
        let mut grad = DVector::zeros(2 * d);
        for i in 0..d {
            grad[i] = -wt_r[i];
            grad[d + i] = wt_r[i];
        }
        for i in 0..d {
            let s = x[i] + x[d + i];
            // Interior iterates keep s > 0, so the kink at zero is never hit.
            let (pv, pd) = scad_penalty(&p, s.max(0.0)).expect("nonnegative by construction");
            value += pv;
            grad[i] += pd;
            grad[d + i] += pd;
        }
        // Descent form: subtract the curvature absorbed into the kernel.
        value -= 0.5 * rho * x.norm_squared();
        grad -= x * rho;
        (value, grad)
    });

    Ok(ScadProblem {
        problem: Problem {
            dim: n,
            objective,
            cons: Arc::new(ConstraintSet::none(n)),
            kernel,
            smoothness_hint: Some(0.0),
            // The descent-form objective is unbounded below (the subtracted
            // quadratic dominates), so no finite lower bound is reported.
            f_lower_bound: f64::NEG_INFINITY,
            x_start: DVector::from_element(n, 0.5),
        },
        rho,
        coefficients: d,
    })
}

/// Parameters of the L^p recovery instance `min sum x_i^p` over
/// `{Ax = b, x >= 0}`.
#[derive(Clone)]
pub struct LpParams {
    /// Exponent `p` in `(0, 1]`.
    pub p: f64,
    /// Sensing matrix, full row rank.
    pub a: DMatrix<f64>,
    /// Observations `b = A x_true`.
    pub b: DVector<f64>,
}

impl LpParams {
    /// Validates the exponent range; the rank requirement is checked when the
    /// constraint set is built.
    pub fn new(p: f64, a: DMatrix<f64>, b: DVector<f64>) -> Result<Self> {
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "exponent must lie in (0, 1], got {p}"
            )));
        }
        Ok(Self { p, a, b })
    }
}

/// Finds a strictly positive solution of `Ax = b` and pulls it toward the
/// analytic center of the polytope. The least-norm solution is clamped
/// positive and projected back onto the affine set until a round of
/// projection preserves positivity; damped Newton steps on
/// `min -sum ln x_i` subject to `Ax = b` then center the point, so the
/// returned iterate sits well inside the orthant. Fails when no projection
/// round clears zero, which is how an empty interior manifests.
pub fn phase1_interior(a: &DMatrix<f64>, b: &DVector<f64>, floor: f64) -> Result<DVector<f64>> {
    let n = a.ncols();
    let m = a.nrows();
    let gram = a * a.transpose();
    let chol = Cholesky::new(gram).ok_or_else(|| {
        Error::SingularSystem("A A^T failed to factor; rows are dependent".into())
    })?;
    let mut x = a.transpose() * chol.solve(b);
    let scale = x.amax().max(1.0);

    // Coarse clamp first, fine clamps afterwards: the first projection from
    // a well-off-zero point lands near the polytope, and later rounds only
    // nudge the stragglers. When the worst coordinate stops improving the
    // clamp shrinks, so thin polytopes are approached from outside instead
    // of being overshot. An empty interior never clears zero at any clamp.
    let mut clamp = 0.05 * scale;
    let mut positive = x.iter().all(|&v| v > 0.0);
    let mut best = f64::NEG_INFINITY;
    let mut stalled = 0usize;
    for round in 0..8000 {
        if positive {
            break;
        }
        for v in x.iter_mut() {
            if *v < clamp {
                *v = clamp;
            }
        }
        let r = a * &x - b;
        x -= a.transpose() * chol.solve(&r);
        if round == 0 {
            clamp = 1e-3 * scale;
        }
        let min = x.iter().cloned().fold(f64::INFINITY, f64::min);
        positive = min > 0.0;
        if min > best + 1e-12 {
            best = min;
            stalled = 0;
        } else {
            stalled += 1;
            if stalled >= 50 {
                clamp *= 0.3;
                stalled = 0;
                best = f64::NEG_INFINITY;
            }
        }
    }
    if !positive {
        return Err(Error::Infeasible(
            "projection rounds found no strictly positive solution".into(),
        ));
    }

    // Damped Newton on the log barrier over the affine set: directions solve
    // min <g,v> + (1/2) v^T H v over Av = 0 with H = diag(1/x^2), via the
    // Schur system (A H^{-1} A^T) w = A H^{-1} g, v = H^{-1} (A^T w - g).
    for _ in 0..100 {
        let g = DVector::from_fn(n, |i, _| -1.0 / x[i]);
        let mut ah = a.clone();
        for j in 0..n {
            let s = x[j] * x[j];
            for i in 0..m {
                ah[(i, j)] *= s;
            }
        }
        let schur = Cholesky::new(&ah * a.transpose()).ok_or_else(|| {
            Error::SingularSystem("phase-1 centering system failed to factor".into())
        })?;
        let w = schur.solve(&(&ah * &g));
        let at_w = a.transpose() * &w;
        let v = DVector::from_fn(n, |i, _| x[i] * x[i] * (at_w[i] - g[i]));
        let lambda_sq = -g.dot(&v);
        if lambda_sq <= 0.0625 {
            break;
        }
        let h0: f64 = x.iter().map(|&t| -t.ln()).sum();
        let mut t = 1.0;
        while t > 1e-12 {
            let xt = &x + &v * t;
            if xt.iter().all(|&u| u > 0.0) {
                let ht: f64 = xt.iter().map(|&u| -u.ln()).sum();
                if ht <= h0 - 0.25 * t * lambda_sq {
                    x = xt;
                    break;
                }
            }
            t *= 0.5;
        }
        if t <= 1e-12 {
            break;
        }
    }

    let min = x.iter().cloned().fold(f64::INFINITY, f64::min);
    if min >= floor && (a * &x - b).norm() <= 1e-8 * (1.0 + b.norm()) {
        Ok(x)
    } else {
        Err(Error::Infeasible(
            "phase 1 ended below the positivity floor".into(),
        ))
    }
}

/// Builds the L^p minimization instance with the Burg kernel, running
/// phase 1 to obtain the interior start.
pub fn build_lp_problem(params: &LpParams) -> Result<Problem> {
    let n = params.a.ncols();
    let cons = ConstraintSet::new(params.a.clone(), params.b.clone())?;
    let x_start = phase1_interior(&params.a, &params.b, 1e-6)?;
    let kernel = make_kernel(KernelKind::Burg, n)?;
    let p = params.p;
    let objective: Objective = Arc::new(move |x: &DVector<f64>| {
        let value = x.iter().map(|&t| t.powf(p)).sum();
        let grad = DVector::from_iterator(x.len(), x.iter().map(|&t| p * t.powf(p - 1.0)));
        (value, grad)
    });
    Ok(Problem {
        dim: n,
        objective,
        cons: Arc::new(cons),
        kernel,
        // The objective is concave on the orthant, so the pair is smooth for
        // every positive constant; callers pick one or adapt.
        smoothness_hint: None,
        f_lower_bound: 0.0,
        x_start,
    })
}
