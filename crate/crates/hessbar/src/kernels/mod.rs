//! Barrier kernel catalog.
//!
//! A kernel is a convex function `h` on an open domain whose Hessian defines
//! the local geometry the solver moves in. Every kernel carries generalized
//! self-concordance constants `(M, nu)`: the third directional derivative is
//! bounded by `M` times mixed powers of the local and euclidean norms,
//!
//! ```text
//! |<D^3 h(x)[v] u, u>| <= M ||u||_x^2 ||v||_x^{nu-2} ||v||_2^{3-nu}.
//! ```
//!
//! Separable kernels expose diagonal Hessians so the downstream linear algebra
//! can take O(n) paths; the polyhedral and second-order-cone barriers are
//! genuinely dense.

pub mod dense;
pub mod scalar;

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub use dense::{Polyhedral, SecondOrderCone};
pub use scalar::{
    Burg, EntropyBarrier, InverseSqrt, NegEntropy, Power, RegularizedBurg, RootQuadratic,
    ScalarKernel,
};

/// Self-concordance constants of a kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelParams {
    /// Scale constant `M > 0` of the defining inequality.
    pub m: f64,
    /// Order `nu` in `(2, 4]`.
    pub nu: f64,
    /// Barrier order `theta` when the kernel is a self-concordant barrier
    /// (then `||grad h(x)||*_x <= sqrt(theta)` at every interior point).
    pub theta: Option<f64>,
}

impl KernelParams {
    /// Bundles the constants; panics on out-of-range values since every call
    /// site passes compile-time or validated constants.
    pub fn new(m: f64, nu: f64, theta: Option<f64>) -> Self {
        assert!(m > 0.0, "scale constant must be positive, got {m}");
        assert!(nu > 2.0 && nu <= 4.0, "order must lie in (2,4], got {nu}");
        if let Some(t) = theta {
            assert!(t >= 0.0, "barrier order must be nonnegative, got {t}");
        }
        Self { m, nu, theta }
    }
}

/// Hessian of a kernel, either diagonal (separable kernels) or dense.
#[derive(Debug, Clone)]
pub enum Hessian {
    /// Diagonal entries, all strictly positive at interior points.
    Diagonal(DVector<f64>),
    /// Full symmetric positive definite matrix.
    Dense(DMatrix<f64>),
}

impl Hessian {
    /// Quadratic form `d^T H d`.
    pub fn quadratic_form(&self, d: &DVector<f64>) -> f64 {
        match self {
            Hessian::Diagonal(h) => d.iter().zip(h.iter()).map(|(&di, &hi)| hi * di * di).sum(),
            Hessian::Dense(h) => (d.transpose() * h * d)[(0, 0)],
        }
    }

    /// Matrix-vector product `H d`.
    pub fn apply(&self, d: &DVector<f64>) -> DVector<f64> {
        match self {
            Hessian::Diagonal(h) => d.component_mul(h),
            Hessian::Dense(h) => h * d,
        }
    }

    /// Dense copy, mainly for tests and small problems.
    pub fn to_dense(&self) -> DMatrix<f64> {
        match self {
            Hessian::Diagonal(h) => DMatrix::from_diagonal(h),
            Hessian::Dense(h) => h.clone(),
        }
    }
}

/// A barrier kernel: value, gradient, Hessian, and domain membership.
///
/// Values are finite exactly on the open domain; queries outside return
/// [`Error::OutsideDomain`]. The Hessian is symmetric positive definite at
/// every interior point. Kernels are immutable and safe to share across
/// threads.
pub trait Kernel: Send + Sync {
    /// Ambient dimension `n`.
    fn dim(&self) -> usize;
    /// Self-concordance constants.
    fn params(&self) -> KernelParams;
    /// Strict membership in the open domain.
    fn contains(&self, x: &DVector<f64>) -> bool;
    /// Kernel value `h(x)`.
    fn value(&self, x: &DVector<f64>) -> Result<f64>;
    /// Gradient `grad h(x)`.
    fn gradient(&self, x: &DVector<f64>) -> Result<DVector<f64>>;
    /// Hessian `H(x)`.
    fn hessian(&self, x: &DVector<f64>) -> Result<Hessian>;
}

/// Shared, immutable handle to a kernel.
pub type KernelHandle = Arc<dyn Kernel>;

/// Separable sum `h(x) = sum_i phi(x_i)` of one scalar kernel.
///
/// Keeps the scalar `(M, nu)` constants, which is valid for orders up to 3;
/// higher-order scalar kernels are restricted to dimension one because the
/// sum argument fails there.
pub struct Separable<K: ScalarKernel> {
    scalar: K,
    dim: usize,
}

impl<K: ScalarKernel> Separable<K> {
    /// Builds the n-fold sum, enforcing the dimension restriction for
    /// orders above 3.
    pub fn new(scalar: K, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        if dim > 1 && !scalar.separable() {
            return Err(Error::InvalidParameter(format!(
                "kernel of order nu = {} admits dimension 1 only; separable sums \
                 of orders above 3 lose self-concordance",
                scalar.params().nu
            )));
        }
        Ok(Self { scalar, dim })
    }

    /// The underlying scalar kernel.
    pub fn scalar(&self) -> &K {
        &self.scalar
    }
}

impl<K: ScalarKernel> Kernel for Separable<K> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn params(&self) -> KernelParams {
        let p = self.scalar.params();
        // Barrier orders add across coordinates.
        let theta = p.theta.map(|t| t * self.dim as f64);
        KernelParams { theta, ..p }
    }

    fn contains(&self, x: &DVector<f64>) -> bool {
        x.len() == self.dim && x.iter().all(|&t| self.scalar.contains(t))
    }

    fn value(&self, x: &DVector<f64>) -> Result<f64> {
        if !self.contains(x) {
            return Err(Error::OutsideDomain("coordinate outside scalar domain".into()));
        }
        Ok(x.iter().map(|&t| self.scalar.value(t)).sum())
    }

    fn gradient(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        if !self.contains(x) {
            return Err(Error::OutsideDomain("coordinate outside scalar domain".into()));
        }
        Ok(DVector::from_iterator(
            self.dim,
            x.iter().map(|&t| self.scalar.d1(t)),
        ))
    }

    fn hessian(&self, x: &DVector<f64>) -> Result<Hessian> {
        if !self.contains(x) {
            return Err(Error::OutsideDomain("coordinate outside scalar domain".into()));
        }
        Ok(Hessian::Diagonal(DVector::from_iterator(
            self.dim,
            x.iter().map(|&t| self.scalar.d2(t)),
        )))
    }
}

/// Kernel scaled by a positive factor, with explicitly supplied constants.
struct Scaled {
    inner: KernelHandle,
    factor: f64,
    params: KernelParams,
}

impl Kernel for Scaled {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn params(&self) -> KernelParams {
        self.params
    }
    fn contains(&self, x: &DVector<f64>) -> bool {
        self.inner.contains(x)
    }
    fn value(&self, x: &DVector<f64>) -> Result<f64> {
        Ok(self.factor * self.inner.value(x)?)
    }
    fn gradient(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        Ok(self.inner.gradient(x)? * self.factor)
    }
    fn hessian(&self, x: &DVector<f64>) -> Result<Hessian> {
        Ok(match self.inner.hessian(x)? {
            Hessian::Diagonal(h) => Hessian::Diagonal(h * self.factor),
            Hessian::Dense(h) => Hessian::Dense(h * self.factor),
        })
    }
}

/// Rescales a kernel so its scale constant becomes `M = 2`.
///
/// Multiplying a `(M, nu)` kernel by `(M/2)^{2/(nu-2)}` yields a `(2, nu)`
/// kernel; value, gradient, and Hessian all scale by that factor, and a
/// barrier order scales with it too.
pub fn rescale_to_m2(h: &KernelHandle) -> KernelHandle {
    let p = h.params();
    let factor = (p.m / 2.0).powf(2.0 / (p.nu - 2.0));
    Arc::new(Scaled {
        inner: Arc::clone(h),
        factor,
        params: KernelParams::new(2.0, p.nu, p.theta.map(|t| factor * t)),
    })
}

/// Same evaluators, different reported constants.
///
/// Exists so checks of the self-concordance inequality can be run against
/// deliberately wrong constants (for example `M/10`) and be seen to fail.
pub fn with_params(h: &KernelHandle, params: KernelParams) -> KernelHandle {
    Arc::new(Scaled {
        inner: Arc::clone(h),
        factor: 1.0,
        params,
    })
}

/// Catalog tag for [`make_kernel`].
#[derive(Debug, Clone)]
pub enum KernelKind {
    /// Burg entropy `-sum ln x_i` on the positive orthant.
    Burg,
    /// Entropy barrier `sum (x_i ln x_i - ln x_i)` on the positive orthant.
    EntropyBarrier,
    /// Negative entropy `t ln t`, order 4, dimension one.
    NegEntropy,
    /// Power kernel `sum (1 - x_i/kappa)^{-kappa}`.
    Power {
        /// Exponent `kappa > 0`.
        kappa: f64,
    },
    /// Inverse square root `sum (1 - x_i^2)^{-1/2}` on the open unit box.
    InverseSqrt,
    /// Burg entropy plus `(reg/2) ||x||^2`.
    RegularizedBurg {
        /// Quadratic weight `reg >= 0`.
        reg: f64,
    },
    /// Root-quadratic `t^2/2 - t^s`, order in `(3, 4)`, dimension one.
    RootQuadratic {
        /// Fractional exponent `s` in `(0, 1)`.
        s: f64,
    },
    /// Polyhedral log barrier for `{x : Bx < d}` with a strict interior witness.
    Polyhedral {
        /// Constraint matrix `B` with full column rank.
        b: DMatrix<f64>,
        /// Right-hand side `d`.
        d: DVector<f64>,
        /// Strictly interior point.
        witness: DVector<f64>,
    },
    /// Second-order-cone log barrier `-ln(t^2 - ||w||^2)`.
    SecondOrderCone,
}

/// Builds a catalog kernel of the given kind and dimension.
pub fn make_kernel(kind: KernelKind, dim: usize) -> Result<KernelHandle> {
    Ok(match kind {
        KernelKind::Burg => Arc::new(Separable::new(Burg, dim)?),
        KernelKind::EntropyBarrier => Arc::new(Separable::new(EntropyBarrier, dim)?),
        KernelKind::NegEntropy => Arc::new(Separable::new(NegEntropy, dim)?),
        KernelKind::Power { kappa } => Arc::new(Separable::new(Power::new(kappa)?, dim)?),
        KernelKind::InverseSqrt => Arc::new(Separable::new(InverseSqrt, dim)?),
        KernelKind::RegularizedBurg { reg } => {
            Arc::new(Separable::new(RegularizedBurg::new(reg)?, dim)?)
        }
        KernelKind::RootQuadratic { s } => Arc::new(Separable::new(RootQuadratic::new(s)?, dim)?),
        KernelKind::Polyhedral { b, d, witness } => {
            if b.ncols() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: b.ncols(),
                });
            }
            Arc::new(Polyhedral::new(b, d, &witness)?)
        }
        KernelKind::SecondOrderCone => Arc::new(SecondOrderCone::new(dim)?),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn burg_at_ones() {
        let k = make_kernel(KernelKind::Burg, 3).unwrap();
        let x = DVector::from_element(3, 1.0);
        assert_eq!(k.value(&x).unwrap(), 0.0);
        assert_eq!(k.gradient(&x).unwrap(), DVector::from_element(3, -1.0));
        match k.hessian(&x).unwrap() {
            Hessian::Diagonal(h) => assert_eq!(h, DVector::from_element(3, 1.0)),
            Hessian::Dense(_) => panic!("separable kernel must report a diagonal Hessian"),
        }
        assert_eq!(k.params().theta, Some(3.0));
    }

    #[test]
    fn power_kernel_reported_constants() {
        let k = make_kernel(KernelKind::Power { kappa: 1.0 }, 2).unwrap();
        let p = k.params();
        assert_relative_eq!(p.nu, 8.0 / 3.0, epsilon = 1e-15);
        assert_relative_eq!(p.m, 3.0 * 0.5_f64.powf(1.0 / 3.0), epsilon = 1e-15);
    }

    #[test]
    fn high_order_kernels_are_univariate() {
        assert!(make_kernel(KernelKind::NegEntropy, 1).is_ok());
        assert!(make_kernel(KernelKind::NegEntropy, 2).is_err());
        assert!(make_kernel(KernelKind::RootQuadratic { s: 2.0 / 3.0 }, 1).is_ok());
        assert!(make_kernel(KernelKind::RootQuadratic { s: 2.0 / 3.0 }, 3).is_err());
    }

    #[test]
    fn rescale_reaches_m_two() {
        // (M, nu) = (8, 4) rescales by (8/2)^{2/2} = 4.
        let k = make_kernel(KernelKind::NegEntropy, 1).unwrap();
        let forced = with_params(&k, KernelParams::new(8.0, 4.0, None));
        let scaled = rescale_to_m2(&forced);
        assert_eq!(scaled.params().m, 2.0);
        let x = DVector::from_element(1, 2.0);
        assert_relative_eq!(
            scaled.value(&x).unwrap(),
            4.0 * k.value(&x).unwrap(),
            epsilon = 1e-14
        );

        // (M, nu) = (3.25, 2.8): factor 1.625^{2.5}, frozen to full precision.
        let inv = make_kernel(KernelKind::InverseSqrt, 2).unwrap();
        let scaled = rescale_to_m2(&inv);
        let x = DVector::from_element(2, 0.25);
        let factor = scaled.value(&x).unwrap() / inv.value(&x).unwrap();
        assert_relative_eq!(factor, 3.3661496007702369, epsilon = 1e-13);

        // M = 2 input: identity scaling.
        let b = make_kernel(KernelKind::Burg, 2).unwrap();
        let same = rescale_to_m2(&b);
        let x = DVector::from_element(2, 0.7);
        assert_relative_eq!(same.value(&x).unwrap(), b.value(&x).unwrap(), epsilon = 1e-15);
    }

    #[test]
    fn domain_errors_signal_outside() {
        let k = make_kernel(KernelKind::Burg, 2).unwrap();
        let x = DVector::from_vec(vec![1.0, -0.5]);
        assert!(!k.contains(&x));
        assert!(matches!(k.value(&x), Err(Error::OutsideDomain(_))));
        assert!(matches!(k.gradient(&x), Err(Error::OutsideDomain(_))));
    }
}
