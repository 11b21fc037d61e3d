//! Interior-point descent over barrier geometries.
//!
//! This crate minimizes smooth objectives over affine slices of convex
//! domains by following the gradient in the metric of a barrier kernel's
//! Hessian. The kernel is any generalized self-concordant function whose
//! domain closure is the feasible region; its curvature both keeps iterates
//! strictly interior and supplies a closed-form step size, so no line search
//! on the objective is needed.
//!
//! The pieces:
//!
//! - [`kernels`]: a catalog of barrier kernels (log barriers, entropies,
//!   power kernels, a second-order-cone barrier) with their curvature
//!   parameters `(M, nu)`, plus separable lifting and rescaling helpers.
//! - [`geometry`]: local-metric factorizations, Bregman divergences, and the
//!   curvature integral `omega_nu` behind the step-size rule.
//! - [`directions`]: the constrained Newton-like direction solve and the
//!   associated stationarity measures `lambda` and `chi`.
//! - [`stepsize`]: the closed-form step `alpha_opt`, the decrease guarantee
//!   `eta`, and the per-iteration progress floors `gamma_tilde`, `gamma_hat`,
//!   `omega_tilde`.
//! - [`solver`]: fixed and adaptive descent loops on the potential
//!   `f + mu * h`, analytic centering, trace recording, stopping reports.
//! - [`problems`]: assembled experiment instances (folded-concave penalized
//!   regression in split variables, L^p-norm sparse recovery).
//!
//! Errors follow one convention: precondition violations fail fast with
//! [`Error`], while mid-run floating-point trouble ends a solve gracefully
//! with a partial trace and a `NumericalFailure` termination tag.

pub mod directions;
pub mod error;
pub mod geometry;
pub mod kernels;
pub mod problems;
pub mod solver;
pub mod stepsize;

pub use directions::{
    criticality, curvature_scale, riemannian_gradient, solve_direction, ConstraintSet,
    SearchDirection,
};
pub use error::{Error, Result};
pub use geometry::{
    boundary_values, bregman, dikin_contains, gsc_distance, gsc_line_check, hessian_sandwich,
    local_geometry, omega_nu, LocalGeometry,
};
pub use kernels::{
    make_kernel, rescale_to_m2, Hessian, Kernel, KernelHandle, KernelKind, KernelParams,
};
pub use problems::{
    build_lp_problem, build_scad_problem, phase1_interior, scad_penalty, split_to_beta, LpParams,
    Objective, Problem, ScadParams, ScadProblem,
};
pub use solver::{
    ahba_solve, analytic_center, hba_solve, stopping_times, Estimates, IterateRecord,
    IterateTrace, Smoothness, SolveResult, SolverConfig, StoppingReport, StoppingRule,
    Termination,
};
pub use stepsize::{alpha_opt, eta, gamma_hat, gamma_tilde, omega_tilde, StepContext};

/// Column vector of `f64`, the iterate type used throughout.
pub type Vector = nalgebra::DVector<f64>;
/// Dense matrix of `f64`, used for constraint and sensing matrices.
pub type Matrix = nalgebra::DMatrix<f64>;
