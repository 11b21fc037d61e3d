//! Search directions under equality constraints: the projected Newton-type
//! system, its dual multiplier, and the criticality measure.

use nalgebra::{Cholesky, DMatrix, DVector};

use crate::error::{Error, Result};
use crate::geometry::LocalGeometry;
use crate::kernels::KernelParams;

/// Affine equality constraints `Ax = b` with `A` of full row rank.
///
/// `m = 0` (no constraints) is supported and stored as an empty matrix.
pub struct ConstraintSet {
    a: DMatrix<f64>,
    b: DVector<f64>,
}

impl ConstraintSet {
    /// Validates shapes and the row-rank requirement (singular values above
    /// `1e-10 * ||A||` are counted as nonzero).
    pub fn new(a: DMatrix<f64>, b: DVector<f64>) -> Result<Self> {
        if a.nrows() != b.len() {
            return Err(Error::DimensionMismatch {
                expected: a.nrows(),
                actual: b.len(),
            });
        }
        if a.nrows() > a.ncols() {
            return Err(Error::RankDeficient {
                rank: a.ncols(),
                rows: a.nrows(),
            });
        }
        if a.nrows() > 0 {
            let sv = a.clone().svd(false, false).singular_values;
            let norm = sv.iter().fold(0.0_f64, |acc, &s| acc.max(s));
            let rank = sv.iter().filter(|&&s| s > 1e-10 * norm).count();
            if rank < a.nrows() {
                return Err(Error::RankDeficient {
                    rank,
                    rows: a.nrows(),
                });
            }
        }
        Ok(Self { a, b })
    }

    /// The unconstrained set over `R^n`.
    pub fn none(n: usize) -> Self {
        Self {
            a: DMatrix::zeros(0, n),
            b: DVector::zeros(0),
        }
    }

    /// Constraint matrix `A`.
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.a
    }

    /// Right-hand side `b`.
    pub fn rhs(&self) -> &DVector<f64> {
        &self.b
    }

    /// Number of constraints `m`.
    pub fn rows(&self) -> usize {
        self.a.nrows()
    }

    /// Ambient dimension `n`.
    pub fn dim(&self) -> usize {
        self.a.ncols()
    }

    /// Residual `Ax - b`.
    pub fn residual(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.a * x - &self.b
    }

    /// Feasibility within the absolute tolerance `1e-9 * (1 + ||b||)`.
    pub fn is_feasible(&self, x: &DVector<f64>) -> bool {
        self.is_feasible_with(x, 1e-9)
    }

    /// Feasibility with a caller-chosen tolerance scale.
    pub fn is_feasible_with(&self, x: &DVector<f64>, tol: f64) -> bool {
        if self.rows() == 0 {
            return x.len() == self.dim();
        }
        self.residual(x).norm() <= tol * (1.0 + self.b.norm())
    }
}

/// Solution of the direction system at one iterate.
#[derive(Debug, Clone)]
pub struct SearchDirection {
    /// Primal direction `v`, lying in the null space of `A`.
    pub v: DVector<f64>,
    /// Dual multiplier `y` (empty when `m = 0`).
    pub y: DVector<f64>,
    /// Local norm `lambda = ||v||_x`.
    pub lambda: f64,
    /// Euclidean norm `beta = ||v||_2`.
    pub beta: f64,
    /// Curvature scale `delta = M (nu-2)/2 * lambda^{nu-2} beta^{3-nu}`.
    pub delta: f64,
}

/// Solves the direction system at the factored geometry `geom` for gradient `g`:
///
/// ```text
/// H v - A^T y = -g,    A v = 0,
/// ```
///
/// via the Schur complement `A H^{-1} A^T`: first `y`, then
/// `v = H^{-1}(A^T y - g)`. Also reports the three scalar summaries the
/// step-size policy wants.
pub fn solve_direction(
    geom: &LocalGeometry,
    cons: &ConstraintSet,
    g: &DVector<f64>,
    params: &KernelParams,
) -> Result<SearchDirection> {
    if g.len() != cons.dim() {
        return Err(Error::DimensionMismatch {
            expected: cons.dim(),
            actual: g.len(),
        });
    }
    let u = geom.solve(g);
    let (v, y) = if cons.rows() == 0 {
        (-&u, DVector::zeros(0))
    } else {
        let at = cons.matrix().transpose();
        let w = geom.solve_matrix(&at);
        let schur = cons.matrix() * &w;
        let chol = Cholesky::new(schur).ok_or_else(|| {
            Error::SingularSystem("Schur complement A H^{-1} A^T failed to factor".into())
        })?;
        let y = chol.solve(&(cons.matrix() * &u));
        (&w * &y - &u, y)
    };
    // The quadratic form is the robust evaluation; the inner-product
    // identity lambda^2 = -<g, v> loses digits to cancellation whenever the
    // constraint projection removes most of the gradient, so it serves only
    // as a consistency check with slack on the inner-product scale.
    let lambda = geom.local_norm(&v);
    debug_assert!({
        let products = g.dot(&v).abs().max(g.norm() * v.norm());
        (lambda * lambda + g.dot(&v)).abs() <= 1e-5 * (1.0 + products)
    });
    let beta = v.norm();
    let delta = curvature_scale(params, lambda, beta);
    Ok(SearchDirection {
        v,
        y,
        lambda,
        beta,
        delta,
    })
}

/// The scale `delta = M (nu-2)/2 * lambda^{nu-2} beta^{3-nu}` (zero when the
/// direction vanishes).
pub fn curvature_scale(params: &KernelParams, lambda: f64, beta: f64) -> f64 {
    if lambda <= 0.0 || beta <= 0.0 {
        return 0.0;
    }
    0.5 * params.m * (params.nu - 2.0) * lambda.powf(params.nu - 2.0) * beta.powf(3.0 - params.nu)
}

/// Primal-dual criticality `chi(x, y) = ||grad_f - A^T y||*_x`.
pub fn criticality(
    geom: &LocalGeometry,
    cons: &ConstraintSet,
    grad_f: &DVector<f64>,
    y: &DVector<f64>,
) -> f64 {
    let residual = if cons.rows() == 0 {
        grad_f.clone()
    } else {
        grad_f - cons.matrix().transpose() * y
    };
    geom.dual_norm(&residual)
}

/// Riemannian gradient `P_x H^{-1} grad`, the negated search direction.
pub fn riemannian_gradient(
    geom: &LocalGeometry,
    cons: &ConstraintSet,
    grad: &DVector<f64>,
    params: &KernelParams,
) -> Result<DVector<f64>> {
    Ok(-solve_direction(geom, cons, grad, params)?.v)
}
