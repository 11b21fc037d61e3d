//! Closed-form step-size policies per self-concordance order, the per-step
//! decrease model `eta`, and the guaranteed-decrease function `omega_tilde`
//! with its order-dependent constants.

use crate::error::{Error, Result};
use crate::geometry::omega_nu;

/// Inputs of the step-size and decrease formulas at one iterate.
#[derive(Debug, Clone, Copy)]
pub struct StepContext {
    /// Self-concordance order of the kernel.
    pub nu: f64,
    /// Scale constant of the kernel.
    pub m: f64,
    /// Combined smoothness `L + mu`.
    pub l_plus_mu: f64,
    /// Curvature scale `delta` of the current direction.
    pub delta: f64,
    /// Local norm `lambda` of the current direction.
    pub lambda: f64,
    /// Lower estimate of the kernel Hessian eigenvalues over the trajectory.
    pub sigma_h: f64,
    /// Upper estimate of the kernel Hessian eigenvalues over the trajectory.
    pub tau_h: f64,
}

impl StepContext {
    /// All fields finite, `sigma_h <= tau_h`, positive where required.
    pub fn is_valid(&self) -> bool {
        self.nu > 2.0
            && self.nu <= 4.0
            && self.m > 0.0
            && self.l_plus_mu > 0.0
            && self.delta >= 0.0
            && self.lambda >= 0.0
            && self.sigma_h > 0.0
            && self.sigma_h <= self.tau_h
            && [self.l_plus_mu, self.delta, self.lambda, self.sigma_h, self.tau_h]
                .iter()
                .all(|v| v.is_finite())
    }
}

fn near(nu: f64, target: f64) -> bool {
    (nu - target).abs() < 1e-6
}

/// Worst-case-optimal step size for the current order and curvature.
///
/// With `d = delta` and `q = L + mu`:
///
/// * order 3: `1 / (d + q)`;
/// * order 4: `(1 - exp(-d/q)) / d`;
/// * otherwise: `(1/d) * [1 - (1 + (d/q) (4-nu)/(nu-2))^{-(nu-2)/(4-nu)}]`.
///
/// All branches return `1/q` in the limit `d -> 0`, which is taken explicitly,
/// and always satisfy `alpha * delta < 1` so the step stays inside the unit
/// Dikin ellipsoid. Orders within `1e-6` of 3 or 4 take the matching branch.
pub fn alpha_opt(ctx: &StepContext) -> f64 {
    debug_assert!(ctx.is_valid());
    let d = ctx.delta;
    let q = ctx.l_plus_mu;
    if d <= 0.0 {
        return 1.0 / q;
    }
    let a = if near(ctx.nu, 3.0) {
        1.0 / (d + q)
    } else if near(ctx.nu, 4.0) {
        -(-d / q).exp_m1() / d
    } else {
        let ratio = (4.0 - ctx.nu) / (ctx.nu - 2.0);
        let p = 1.0 / ratio;
        -(-p * (d / q * ratio).ln_1p()).exp_m1() / d
    };
    // The exact step satisfies a * d < 1, but the expressions saturate in
    // floating point when d / q is extreme; keep a hair inside the radius.
    if a * d < 1.0 {
        a
    } else {
        (1.0 - 1e-9) / d
    }
}

/// Model decrease `eta(t) = t lambda^2 - (L + mu) omega_nu(t delta) t^2 lambda^2`.
///
/// Defined for `t * delta < 1`; the step-size policy maximizes this model.
pub fn eta(ctx: &StepContext, t: f64) -> Result<f64> {
    debug_assert!(ctx.is_valid());
    let td = t * ctx.delta;
    if td >= 1.0 {
        return Err(Error::StepDomain(format!(
            "t * delta = {td} reaches the Dikin radius"
        )));
    }
    let l2 = ctx.lambda * ctx.lambda;
    Ok(t * l2 - ctx.l_plus_mu * omega_nu(ctx.nu, td)? * t * t * l2)
}

/// The order constant `gamma_tilde`, continuous in the order with limits
/// `1 - ln 2` at 3 and `1` at 4.
pub fn gamma_tilde(nu: f64) -> f64 {
    if near(nu, 3.0) {
        1.0 - std::f64::consts::LN_2
    } else if near(nu, 4.0) {
        1.0
    } else {
        1.0 + (4.0 - nu) / (2.0 * (3.0 - nu)) * (1.0 - 2.0_f64.powf(2.0 * (3.0 - nu) / (4.0 - nu)))
    }
}

/// The order constant `gamma_hat`: `gamma_tilde * (4-nu)/(nu-2)` away from
/// the special orders, `1` at order 3, `exp(-1)` at order 4.
pub fn gamma_hat(nu: f64) -> f64 {
    if near(nu, 3.0) {
        1.0
    } else if near(nu, 4.0) {
        (-1.0_f64).exp()
    } else {
        gamma_tilde(nu) * (4.0 - nu) / (nu - 2.0)
    }
}

/// Guaranteed decrease `omega_tilde(t)` as a function of the local gradient
/// norm `t`, strictly increasing in `t`.
///
/// Piecewise in the order (with `M` the kernel scale and `q = L + mu`):
///
/// * order in (2,3): `gamma_tilde * t * min{ 2 sigma_h^{(3-nu)/2} / (M (nu-2)),
///   (4-nu) t / ((nu-2) q) }`;
/// * order 3: `2 (1 - ln 2) t / (M q) * min{ q, (M/2) t }`;
/// * order in (3,4): `gamma_tilde * t * min{ 2 tau_h^{-(nu-3)/2} / (M (nu-2)),
///   (4-nu) t / ((nu-2) q) }`;
/// * order 4: `exp(-1) t * min{ 1 / (sqrt(tau_h) M), t / q }`.
///
/// Every iteration of the descent loop decreases the potential by at least
/// `omega_tilde(lambda_k)`.
pub fn omega_tilde(ctx: &StepContext, t: f64) -> f64 {
    debug_assert!(ctx.is_valid());
    if t <= 0.0 {
        return 0.0;
    }
    let m = ctx.m;
    let q = ctx.l_plus_mu;
    let nu = ctx.nu;
    if near(nu, 3.0) {
        2.0 * (1.0 - std::f64::consts::LN_2) * t / (m * q) * q.min(0.5 * m * t)
    } else if near(nu, 4.0) {
        (-1.0_f64).exp() * t * (1.0 / (ctx.tau_h.sqrt() * m)).min(t / q)
    } else if nu < 3.0 {
        let first = 2.0 * ctx.sigma_h.powf(0.5 * (3.0 - nu)) / (m * (nu - 2.0));
        let second = (4.0 - nu) * t / ((nu - 2.0) * q);
        gamma_tilde(nu) * t * first.min(second)
    } else {
        let first = 2.0 * ctx.tau_h.powf(-0.5 * (nu - 3.0)) / (m * (nu - 2.0));
        let second = (4.0 - nu) * t / ((nu - 2.0) * q);
        gamma_tilde(nu) * t * first.min(second)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn ctx(nu: f64, m: f64, l_plus_mu: f64, delta: f64, lambda: f64) -> StepContext {
        StepContext {
            nu,
            m,
            l_plus_mu,
            delta,
            lambda,
            sigma_h: 1.0,
            tau_h: 1.0,
        }
    }

    #[test]
    fn alpha_closed_forms() {
        assert_relative_eq!(alpha_opt(&ctx(3.0, 2.0, 10.0, 5.0, 1.0)), 1.0 / 15.0, epsilon = 1e-15);
        // Frozen oracle values at delta = 10, L + mu = 10.
        assert_relative_eq!(
            alpha_opt(&ctx(4.0, 1.0, 10.0, 10.0, 1.0)),
            0.063212055882855768,
            epsilon = 1e-15
        );
        assert_relative_eq!(
            alpha_opt(&ctx(2.6, 2.0, 10.0, 10.0, 1.0)),
            0.040308965020362062,
            epsilon = 1e-14
        );
        assert_relative_eq!(
            alpha_opt(&ctx(3.0, 2.0, 10.0, 10.0, 1.0)),
            0.05,
            epsilon = 1e-15
        );
        assert_relative_eq!(
            alpha_opt(&ctx(3.5, 2.0, 10.0, 10.0, 1.0)),
            0.0578125,
            epsilon = 1e-15
        );
    }

    #[test]
    fn alpha_zero_curvature_limit() {
        for nu in [2.3, 2.6, 3.0, 3.5, 4.0] {
            assert_relative_eq!(alpha_opt(&ctx(nu, 2.0, 10.0, 0.0, 1.0)), 0.1, epsilon = 1e-15);
            // Tiny curvature stays close to the limit.
            assert_relative_eq!(
                alpha_opt(&ctx(nu, 2.0, 10.0, 1e-12, 1.0)),
                0.1,
                epsilon = 1e-9
            );
        }
    }

    #[test]
    fn alpha_ordering_in_nu() {
        let mut last = 0.0;
        for nu in [2.6, 3.0, 3.5, 4.0] {
            let a = alpha_opt(&ctx(nu, 2.0, 10.0, 10.0, 1.0));
            assert!(a > last, "step size must increase with the order");
            last = a;
        }
    }

    #[test]
    fn alpha_respects_dikin_radius() {
        for nu in [2.2, 2.9, 3.0, 3.4, 4.0] {
            for delta in [0.1, 1.0, 57.0, 4e3] {
                let a = alpha_opt(&ctx(nu, 2.0, 0.5, delta, 1.0));
                assert!(a * delta < 1.0);
                assert!(a > 0.0);
            }
        }
    }

    #[test]
    fn eta_values_and_domain() {
        // delta = 0 keeps omega at its limit 1/2.
        let c = ctx(3.0, 2.0, 10.0, 0.0, 1.0);
        assert_relative_eq!(eta(&c, 0.05).unwrap(), 0.0375, epsilon = 1e-12);
        let tight = ctx(3.0, 2.0, 10.0, 20.0, 1.0);
        assert!(eta(&tight, 0.05).is_err());
        assert!(eta(&tight, 0.049).is_ok());
        assert_relative_eq!(eta(&c, 0.0).unwrap(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn gamma_constants_frozen_values() {
        assert_relative_eq!(gamma_tilde(2.5), 0.11889842204770079, epsilon = 1e-15);
        assert_relative_eq!(gamma_hat(2.5), 0.35669526614310236, epsilon = 1e-15);
        assert_relative_eq!(gamma_tilde(2.6), 0.14950999401034026, epsilon = 1e-15);
        assert_relative_eq!(gamma_hat(2.6), 0.34885665269079393, epsilon = 1e-15);
        assert_relative_eq!(gamma_tilde(2.8), 0.22023685031538051, epsilon = 1e-15);
        assert_relative_eq!(gamma_tilde(3.5), 0.625, epsilon = 1e-15);
        assert_relative_eq!(gamma_hat(3.5), 5.0 / 24.0, epsilon = 1e-15);
        assert_relative_eq!(gamma_tilde(3.0), 1.0 - std::f64::consts::LN_2, epsilon = 1e-15);
        assert_eq!(gamma_hat(3.0), 1.0);
        assert_relative_eq!(gamma_hat(4.0), 0.36787944117144232, epsilon = 1e-15);
        assert_eq!(gamma_tilde(4.0), 1.0);
    }

    #[test]
    fn gamma_tilde_is_continuous_at_special_orders() {
        // Limits 1 - ln 2 at order 3 and 1 at order 4.
        assert_relative_eq!(gamma_tilde(3.0 + 2e-6), 1.0 - std::f64::consts::LN_2, epsilon = 1e-5);
        assert_relative_eq!(gamma_tilde(3.0 - 2e-6), 1.0 - std::f64::consts::LN_2, epsilon = 1e-5);
        assert_relative_eq!(gamma_tilde(4.0 - 2e-6), 1.0, epsilon = 1e-5);
    }

    #[test]
    fn omega_tilde_example_and_monotonicity() {
        let c = ctx(3.0, 2.0, 10.0, 0.0, 0.0);
        assert_relative_eq!(
            omega_tilde(&c, 0.1),
            3.0685281944005469e-4,
            epsilon = 1e-16
        );
        assert_eq!(omega_tilde(&c, 0.0), 0.0);
        for nu in [2.5, 2.6, 3.0, 3.5, 4.0] {
            let c = StepContext {
                nu,
                m: 2.0,
                l_plus_mu: 7.0,
                delta: 0.0,
                lambda: 0.0,
                sigma_h: 0.3,
                tau_h: 4.0,
            };
            let mut last = 0.0;
            for i in 1..=1000 {
                let t = 5.0 * i as f64 / 1000.0;
                let w = omega_tilde(&c, t);
                assert!(w > last, "omega_tilde must increase strictly in t");
                last = w;
            }
        }
    }
}
