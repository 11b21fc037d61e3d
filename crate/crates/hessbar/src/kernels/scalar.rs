//! Scalar barrier kernels used as building blocks for separable sums.
//!
//! Each kernel reports its generalized self-concordance constants `(M, nu)`,
//! meaning `|phi'''(t)| <= M * phi''(t)^(nu/2)` on its open domain. The
//! constants below are the tight values except where noted.

use crate::kernels::KernelParams;

/// One-dimensional kernel with derivatives up to third order.
///
/// Implementations must keep `phi''` strictly positive on the open domain so
/// that separable sums produce positive definite Hessians.
pub trait ScalarKernel: Send + Sync {
    /// Strict membership in the open scalar domain.
    fn contains(&self, t: f64) -> bool;
    /// Kernel value; caller guarantees `contains(t)`.
    fn value(&self, t: f64) -> f64;
    /// First derivative.
    fn d1(&self, t: f64) -> f64;
    /// Second derivative, strictly positive on the domain.
    fn d2(&self, t: f64) -> f64;
    /// Third derivative.
    fn d3(&self, t: f64) -> f64;
    /// Self-concordance constants of the scalar kernel.
    fn params(&self) -> KernelParams;
    /// Whether separable sums in more than one variable keep the same `(M, nu)`.
    ///
    /// True for orders `nu <= 3`. For `nu > 3` the coordinate-sum argument
    /// breaks down (the euclidean factor in the defining inequality carries a
    /// negative exponent), so those kernels are admitted in dimension one only.
    fn separable(&self) -> bool {
        self.params().nu <= 3.0 + 1e-9
    }
}

/// Burg entropy `-ln t` on `(0, inf)`; the reference log barrier.
///
/// Constants `(M, nu) = (2, 3)`, barrier order `theta = 1` per coordinate.
#[derive(Debug, Clone, Copy)]
pub struct Burg;

impl ScalarKernel for Burg {
    fn contains(&self, t: f64) -> bool {
        t > 0.0
    }
    fn value(&self, t: f64) -> f64 {
        -t.ln()
    }
    fn d1(&self, t: f64) -> f64 {
        -1.0 / t
    }
    fn d2(&self, t: f64) -> f64 {
        1.0 / (t * t)
    }
    fn d3(&self, t: f64) -> f64 {
        -2.0 / (t * t * t)
    }
    fn params(&self) -> KernelParams {
        KernelParams::new(2.0, 3.0, Some(1.0))
    }
}

/// Entropy-barrier kernel `t ln t - ln t` on `(0, inf)`.
///
/// Constants `(2, 3)`; the bound `|phi'''| <= 2 (phi'')^{3/2}` is tight as
/// `t -> 0`. Unlike Burg it is not a self-concordant barrier (the gradient,
/// measured in the local norm, is unbounded for large `t`).
#[derive(Debug, Clone, Copy)]
pub struct EntropyBarrier;

impl ScalarKernel for EntropyBarrier {
    fn contains(&self, t: f64) -> bool {
        t > 0.0
    }
    fn value(&self, t: f64) -> f64 {
        (t - 1.0) * t.ln()
    }
    fn d1(&self, t: f64) -> f64 {
        t.ln() + 1.0 - 1.0 / t
    }
    fn d2(&self, t: f64) -> f64 {
        (t + 1.0) / (t * t)
    }
    fn d3(&self, t: f64) -> f64 {
        -(t + 2.0) / (t * t * t)
    }
    fn params(&self) -> KernelParams {
        KernelParams::new(2.0, 3.0, None)
    }
}

/// Negative entropy `t ln t` on `(0, inf)`, the canonical order-4 kernel.
///
/// Constants `(1, 4)` hold with equality everywhere: `|phi'''| = (phi'')^2`.
/// Valid in dimension one only; see [`ScalarKernel::separable`].
#[derive(Debug, Clone, Copy)]
pub struct NegEntropy;

impl ScalarKernel for NegEntropy {
    fn contains(&self, t: f64) -> bool {
        t > 0.0
    }
    fn value(&self, t: f64) -> f64 {
        t * t.ln()
    }
    fn d1(&self, t: f64) -> f64 {
        t.ln() + 1.0
    }
    fn d2(&self, t: f64) -> f64 {
        1.0 / t
    }
    fn d3(&self, t: f64) -> f64 {
        -1.0 / (t * t)
    }
    fn params(&self) -> KernelParams {
        KernelParams::new(1.0, 4.0, None)
    }
}

/// Power kernel `(1 - t/kappa)^{-kappa}` on `(-inf, kappa)` for `kappa > 0`.
///
/// Constants `M = ((2+kappa)/kappa) * (kappa/(1+kappa))^{1/(2+kappa)}` and
/// `nu = 2(3+kappa)/(2+kappa)`, which sweeps `(2, 3)` as `kappa` ranges over
/// `(0, inf)`. The ratio `|phi'''| / (phi'')^{nu/2}` is exactly `M` at every
/// domain point.
#[derive(Debug, Clone, Copy)]
pub struct Power {
    kappa: f64,
}

impl Power {
    /// Creates the kernel; requires `kappa > 0`.
    pub fn new(kappa: f64) -> crate::Result<Self> {
        if !(kappa > 0.0) || !kappa.is_finite() {
            return Err(crate::Error::InvalidParameter(format!(
                "power kernel needs kappa > 0, got {kappa}"
            )));
        }
        Ok(Self { kappa })
    }

    /// The exponent parameter.
    pub fn kappa(&self) -> f64 {
        self.kappa
    }
}

impl ScalarKernel for Power {
    fn contains(&self, t: f64) -> bool {
        t < self.kappa
    }
    fn value(&self, t: f64) -> f64 {
        (1.0 - t / self.kappa).powf(-self.kappa)
    }
    fn d1(&self, t: f64) -> f64 {
        (1.0 - t / self.kappa).powf(-self.kappa - 1.0)
    }
    fn d2(&self, t: f64) -> f64 {
        let k = self.kappa;
        (k + 1.0) / k * (1.0 - t / k).powf(-k - 2.0)
    }
    fn d3(&self, t: f64) -> f64 {
        let k = self.kappa;
        (k + 1.0) * (k + 2.0) / (k * k) * (1.0 - t / k).powf(-k - 3.0)
    }
    fn params(&self) -> KernelParams {
        let k = self.kappa;
        let m = (2.0 + k) / k * (k / (1.0 + k)).powf(1.0 / (2.0 + k));
        let nu = 2.0 * (3.0 + k) / (2.0 + k);
        KernelParams::new(m, nu, None)
    }
}

/// Inverse-square-root kernel `(1 - t^2)^{-1/2}` on `(-1, 1)`.
///
/// Order `nu = 14/5`. The stored scale constant is the conventional bound
/// `M = 3.25`; the true supremum of `|phi'''| / (phi'')^{7/5}` is about
/// `3.2421`, so the stored value carries a little slack.
#[derive(Debug, Clone, Copy)]
pub struct InverseSqrt;

impl ScalarKernel for InverseSqrt {
    fn contains(&self, t: f64) -> bool {
        t.abs() < 1.0
    }
    fn value(&self, t: f64) -> f64 {
        (1.0 - t * t).powf(-0.5)
    }
    fn d1(&self, t: f64) -> f64 {
        t * (1.0 - t * t).powf(-1.5)
    }
    fn d2(&self, t: f64) -> f64 {
        (1.0 + 2.0 * t * t) * (1.0 - t * t).powf(-2.5)
    }
    fn d3(&self, t: f64) -> f64 {
        3.0 * t * (3.0 + 2.0 * t * t) * (1.0 - t * t).powf(-3.5)
    }
    fn params(&self) -> KernelParams {
        KernelParams::new(3.25, 2.8, None)
    }
}

/// Regularized Burg entropy `-ln t + (reg/2) t^2` on `(0, inf)`.
///
/// Adding the convex quadratic leaves the third derivative untouched and only
/// enlarges the second, so the Burg constants `(2, 3)` still apply, while the
/// kernel becomes coercive. Used to absorb a known quadratic curvature bound
/// into the barrier so a concave remainder is smooth with constant zero.
#[derive(Debug, Clone, Copy)]
pub struct RegularizedBurg {
    reg: f64,
}

impl RegularizedBurg {
    /// Creates the kernel; requires `reg >= 0`.
    pub fn new(reg: f64) -> crate::Result<Self> {
        if !(reg >= 0.0) || !reg.is_finite() {
            return Err(crate::Error::InvalidParameter(format!(
                "regularized Burg needs reg >= 0, got {reg}"
            )));
        }
        Ok(Self { reg })
    }

    /// The quadratic weight in front of `t^2 / 2`.
    pub fn reg(&self) -> f64 {
        self.reg
    }
}

impl ScalarKernel for RegularizedBurg {
    fn contains(&self, t: f64) -> bool {
        t > 0.0
    }
    fn value(&self, t: f64) -> f64 {
        -t.ln() + 0.5 * self.reg * t * t
    }
    fn d1(&self, t: f64) -> f64 {
        -1.0 / t + self.reg * t
    }
    fn d2(&self, t: f64) -> f64 {
        1.0 / (t * t) + self.reg
    }
    fn d3(&self, t: f64) -> f64 {
        -2.0 / (t * t * t)
    }
    fn params(&self) -> KernelParams {
        KernelParams::new(2.0, 3.0, None)
    }
}

/// Root-quadratic kernel `t^2/2 - t^s` on `(0, inf)` for `s` in `(0, 1)`.
///
/// Orders between 3 and 4: `nu = 2(3-s)/(2-s)` with the tight scale constant
/// `M = (2-s) * (s(1-s))^{1 - nu/2}` reached as `t -> 0`. The quadratic term
/// keeps the kernel coercive and its second derivative at least 1. Valid in
/// dimension one only; see [`ScalarKernel::separable`].
#[derive(Debug, Clone, Copy)]
pub struct RootQuadratic {
    s: f64,
}

impl RootQuadratic {
    /// Creates the kernel; requires `s` strictly inside `(0, 1)`.
    pub fn new(s: f64) -> crate::Result<Self> {
        if !(s > 0.0 && s < 1.0) {
            return Err(crate::Error::InvalidParameter(format!(
                "root-quadratic kernel needs s in (0,1), got {s}"
            )));
        }
        Ok(Self { s })
    }

    /// The fractional exponent.
    pub fn s(&self) -> f64 {
        self.s
    }
}

impl ScalarKernel for RootQuadratic {
    fn contains(&self, t: f64) -> bool {
        t > 0.0
    }
    fn value(&self, t: f64) -> f64 {
        0.5 * t * t - t.powf(self.s)
    }
    fn d1(&self, t: f64) -> f64 {
        t - self.s * t.powf(self.s - 1.0)
    }
    fn d2(&self, t: f64) -> f64 {
        1.0 + self.s * (1.0 - self.s) * t.powf(self.s - 2.0)
    }
    fn d3(&self, t: f64) -> f64 {
        -self.s * (1.0 - self.s) * (2.0 - self.s) * t.powf(self.s - 3.0)
    }
    fn params(&self) -> KernelParams {
        let s = self.s;
        let nu = 2.0 * (3.0 - s) / (2.0 - s);
        let m = (2.0 - s) * (s * (1.0 - s)).powf(1.0 - 0.5 * nu);
        KernelParams::new(m, nu, None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn fd_check<K: ScalarKernel>(kernel: &K, points: &[f64]) {
        for &t in points {
            let h = 1e-6 * (1.0 + t.abs());
            let d1 = (kernel.value(t + h) - kernel.value(t - h)) / (2.0 * h);
            let d2 = (kernel.d1(t + h) - kernel.d1(t - h)) / (2.0 * h);
            let d3 = (kernel.d2(t + h) - kernel.d2(t - h)) / (2.0 * h);
            assert_relative_eq!(d1, kernel.d1(t), max_relative = 1e-5, epsilon = 1e-8);
            assert_relative_eq!(d2, kernel.d2(t), max_relative = 1e-5, epsilon = 1e-8);
            assert_relative_eq!(d3, kernel.d3(t), max_relative = 1e-4, epsilon = 1e-8);
        }
    }

    fn scalar_gsc_holds<K: ScalarKernel>(kernel: &K, points: &[f64]) {
        let p = kernel.params();
        for &t in points {
            let lhs = kernel.d3(t).abs();
            let rhs = p.m * kernel.d2(t).powf(0.5 * p.nu);
            assert!(
                lhs <= rhs * (1.0 + 1e-12) + 1e-12,
                "scalar bound violated at t={t}: {lhs} > {rhs}"
            );
        }
    }

    #[test]
    fn burg_derivatives_and_constants() {
        fd_check(&Burg, &[0.3, 1.0, 2.5, 7.0]);
        scalar_gsc_holds(&Burg, &[0.1, 0.5, 1.0, 3.0, 10.0]);
        assert_eq!(Burg.value(1.0), 0.0);
        assert_eq!(Burg.d1(1.0), -1.0);
        assert_eq!(Burg.d2(1.0), 1.0);
        // |phi'''(1)| = 2 = M * (phi''(1))^{3/2}: the bound is tight.
        assert_eq!(Burg.d3(1.0).abs(), 2.0);
    }

    #[test]
    fn entropy_barrier_tight_at_zero() {
        fd_check(&EntropyBarrier, &[0.2, 1.0, 4.0]);
        scalar_gsc_holds(&EntropyBarrier, &[0.01, 0.1, 1.0, 5.0, 50.0]);
        // Ratio |phi'''| / (phi'')^{3/2} = (t+2) / (t+1)^{3/2} -> 2 as t -> 0.
        let t = 1e-6;
        let ratio = EntropyBarrier.d3(t).abs() / EntropyBarrier.d2(t).powf(1.5);
        assert_relative_eq!(ratio, 2.0, epsilon = 1e-5);
    }

    #[test]
    fn neg_entropy_order_four_exact() {
        fd_check(&NegEntropy, &[0.2, 1.0, 3.0]);
        let p = NegEntropy.params();
        assert_eq!((p.m, p.nu), (1.0, 4.0));
        for t in [0.05, 0.3, 1.0, 8.0] {
            let ratio = NegEntropy.d3(t).abs() / NegEntropy.d2(t).powi(2);
            assert_relative_eq!(ratio, 1.0, epsilon = 1e-12);
        }
        assert!(!NegEntropy.separable());
    }

    #[test]
    fn power_kernel_constants() {
        let k = Power::new(1.0).unwrap();
        let p = k.params();
        assert_relative_eq!(p.nu, 8.0 / 3.0, epsilon = 1e-15);
        // M(1) = 3 * (1/2)^{1/3}, frozen to 17 digits.
        assert_relative_eq!(p.m, 2.3811015779522992, epsilon = 1e-15);
        let k43 = Power::new(4.0 / 3.0).unwrap();
        let p43 = k43.params();
        assert_relative_eq!(p43.nu, 2.6, epsilon = 1e-15);
        assert_relative_eq!(p43.m, 2.113628197107677, epsilon = 1e-15);
        fd_check(&k, &[-2.0, 0.0, 0.5, 0.9]);
        // The defining ratio equals M at every point for this family.
        for t in [-3.0, -0.5, 0.2, 0.8, 0.95] {
            let ratio = k.d3(t).abs() / k.d2(t).powf(0.5 * p.nu);
            assert_relative_eq!(ratio, p.m, epsilon = 1e-12);
        }
    }

    #[test]
    fn inverse_sqrt_constants_have_slack() {
        let k = InverseSqrt;
        fd_check(&k, &[-0.8, -0.3, 0.0, 0.4, 0.7]);
        let p = k.params();
        assert_eq!(p.nu, 2.8);
        // True supremum of the ratio, attained near t = 0.8419.
        let sup = 3.2421363324881352;
        assert!(p.m > sup);
        let at_peak = k.d3(0.84185).abs() / k.d2(0.84185).powf(1.4);
        assert_relative_eq!(at_peak, sup, epsilon = 1e-6);
        scalar_gsc_holds(&k, &[-0.99, -0.5, 0.0, 0.5, 0.8419, 0.99]);
    }

    #[test]
    fn regularized_burg_keeps_burg_constants() {
        let k = RegularizedBurg::new(350.0).unwrap();
        fd_check(&k, &[0.1, 0.7, 2.0]);
        scalar_gsc_holds(&k, &[0.01, 0.1, 1.0, 10.0]);
        assert_eq!(k.params().nu, 3.0);
        assert_eq!(k.params().m, 2.0);
        assert!(RegularizedBurg::new(-1.0).is_err());
    }

    #[test]
    fn root_quadratic_constants() {
        let k = RootQuadratic::new(2.0 / 3.0).unwrap();
        let p = k.params();
        assert_relative_eq!(p.nu, 3.5, epsilon = 1e-15);
        assert_relative_eq!(p.m, 4.1195342878142355, epsilon = 1e-14);
        fd_check(&k, &[0.2, 1.0, 3.0]);
        scalar_gsc_holds(&k, &[1e-4, 0.01, 0.1, 1.0, 10.0]);
        // The bound is tight in the small-t limit.
        let t = 1e-9;
        let ratio = k.d3(t).abs() / k.d2(t).powf(0.5 * p.nu);
        assert_relative_eq!(ratio, p.m, epsilon = 1e-6);
        assert!(!k.separable());
        assert!(RootQuadratic::new(1.0).is_err());
    }
}
