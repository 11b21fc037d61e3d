//! Local geometry induced by a kernel: norms, Bregman divergence, the mixed
//! distance `d_nu`, Dikin ellipsoids, and the `omega_nu` bound family.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::{Error, Result};
use crate::kernels::{Hessian, Kernel, KernelHandle};

/// Factored Hessian at a base point, serving local norms and inverse applies.
///
/// Separable kernels get an O(n) diagonal path; dense kernels are factored
/// once by Cholesky and reused for every solve at this point.
pub struct LocalGeometry {
    hessian: Hessian,
    factor: Factor,
}

enum Factor {
    Diagonal(DVector<f64>),
    Dense(Cholesky<f64, Dyn>),
}

impl LocalGeometry {
    /// Computes and factors the kernel Hessian at `x`.
    pub fn new(kernel: &dyn Kernel, x: &DVector<f64>) -> Result<Self> {
        let hessian = kernel.hessian(x)?;
        let factor = match &hessian {
            Hessian::Diagonal(h) => {
                if h.iter().any(|&v| !(v > 0.0) || !v.is_finite()) {
                    return Err(Error::NumericalFailure(
                        "diagonal Hessian entry not positive and finite".into(),
                    ));
                }
                Factor::Diagonal(h.clone())
            }
            Hessian::Dense(h) => Factor::Dense(Cholesky::new(h.clone()).ok_or_else(|| {
                Error::NumericalFailure("dense Hessian failed Cholesky factorization".into())
            })?),
        };
        Ok(Self { hessian, factor })
    }

    /// The Hessian this geometry was built from.
    pub fn hessian(&self) -> &Hessian {
        &self.hessian
    }

    /// Local norm `||d||_x = sqrt(d^T H d)`.
    pub fn local_norm(&self, d: &DVector<f64>) -> f64 {
        self.hessian.quadratic_form(d).max(0.0).sqrt()
    }

    /// Dual local norm `||u||*_x = sqrt(u^T H^{-1} u)`.
    pub fn dual_norm(&self, u: &DVector<f64>) -> f64 {
        u.dot(&self.solve(u)).max(0.0).sqrt()
    }

    /// Applies the Hessian: `H d`.
    pub fn apply(&self, d: &DVector<f64>) -> DVector<f64> {
        self.hessian.apply(d)
    }

    /// Solves `H z = u`.
    pub fn solve(&self, u: &DVector<f64>) -> DVector<f64> {
        match &self.factor {
            Factor::Diagonal(h) => u.component_div(h),
            Factor::Dense(chol) => chol.solve(u),
        }
    }

    /// Solves `H Z = U` column by column.
    pub fn solve_matrix(&self, u: &DMatrix<f64>) -> DMatrix<f64> {
        match &self.factor {
            Factor::Diagonal(h) => {
                let mut z = u.clone();
                for (i, mut row) in z.row_iter_mut().enumerate() {
                    row *= 1.0 / h[i];
                }
                z
            }
            Factor::Dense(chol) => chol.solve(u),
        }
    }

    /// Lower and upper bounds on the Hessian eigenvalues.
    ///
    /// Exact for diagonal Hessians. Dense Hessians first get the cheap
    /// Gershgorin disc bounds; if those fail to certify positivity the exact
    /// symmetric eigenvalue extremes are computed instead.
    pub fn eigenvalue_bounds(&self) -> (f64, f64) {
        match &self.hessian {
            Hessian::Diagonal(h) => {
                let lo = h.iter().cloned().fold(f64::INFINITY, f64::min);
                let hi = h.iter().cloned().fold(0.0_f64, f64::max);
                (lo, hi)
            }
            Hessian::Dense(h) => {
                let n = h.nrows();
                let mut lo = f64::INFINITY;
                let mut hi = f64::NEG_INFINITY;
                for i in 0..n {
                    let off: f64 = (0..n).filter(|&j| j != i).map(|j| h[(i, j)].abs()).sum();
                    lo = lo.min(h[(i, i)] - off);
                    hi = hi.max(h[(i, i)] + off);
                }
                if lo <= 0.0 {
                    let eig = h.clone().symmetric_eigen().eigenvalues;
                    lo = eig.iter().cloned().fold(f64::INFINITY, f64::min);
                    hi = eig.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                }
                (lo, hi)
            }
        }
    }
}

/// The bound function `omega_nu(t)` controlling Bregman growth.
///
/// Piecewise in the order: closed forms at `nu = 3` and `nu = 4`, a general
/// expression otherwise, and a four-term series near `t = 0` where the closed
/// forms cancel catastrophically. Continuous limit `1/2` at `t = 0`. Orders
/// within `1e-6` of 3 or 4 take the matching closed-form branch.
///
/// Defined for `t < 1`; larger arguments are outside the Dikin radius and
/// signal a domain error.
pub fn omega_nu(nu: f64, t: f64) -> Result<f64> {
    if t >= 1.0 {
        return Err(Error::StepDomain(format!(
            "omega argument t = {t} must stay below 1"
        )));
    }
    if t.abs() < 1e-4 {
        // Series around 0 with e = 2(3-nu)/(2-nu); the closed forms lose all
        // significant digits here. Error at the switch point is below 1e-16
        // for orders away from 2.
        let e = 2.0 * (3.0 - nu) / (2.0 - nu);
        return Ok(0.5 - (e - 2.0) * t / 6.0 + (e - 2.0) * (e - 3.0) * t * t / 24.0
            - (e - 2.0) * (e - 3.0) * (e - 4.0) * t * t * t / 120.0);
    }
    if (nu - 3.0).abs() < 1e-6 {
        Ok((-t - (-t).ln_1p()) / (t * t))
    } else if (nu - 4.0).abs() < 1e-6 {
        Ok(((1.0 - t) * (-t).ln_1p() + t) / (t * t))
    } else {
        let e = 2.0 * (3.0 - nu) / (2.0 - nu);
        let outer = (nu - 2.0) / (4.0 - nu);
        let inner = (nu - 2.0) / (2.0 * (3.0 - nu));
        Ok(outer / t * (inner / t * (e * (-t).ln_1p()).exp_m1() - 1.0))
    }
}

/// Bregman divergence `D_h(y, x) = h(y) - h(x) - <grad h(x), y - x>`.
///
/// Nonnegative by convexity (up to round-off). `x` must be interior; `y` must
/// lie in the domain.
pub fn bregman(kernel: &dyn Kernel, x: &DVector<f64>, y: &DVector<f64>) -> Result<f64> {
    let hx = kernel.value(x)?;
    let hy = kernel.value(y)?;
    let gx = kernel.gradient(x)?;
    Ok(hy - hx - gx.dot(&(y - x)))
}

/// Mixed local/euclidean displacement `d_nu(x, y)`.
///
/// Equals `(nu-2)/2 * M * ||y-x||_2^{3-nu} * ||y-x||_x^{nu-2}`; steps with
/// `d_nu < 1` are guaranteed to stay inside the domain.
pub fn gsc_distance(kernel: &dyn Kernel, x: &DVector<f64>, y: &DVector<f64>) -> Result<f64> {
    let geom = LocalGeometry::new(kernel, x)?;
    Ok(gsc_distance_with(&geom, kernel.params().m, kernel.params().nu, &(y - x)))
}

/// Same as [`gsc_distance`] with a precomputed geometry at `x`.
pub fn gsc_distance_with(geom: &LocalGeometry, m: f64, nu: f64, step: &DVector<f64>) -> f64 {
    let euclid = step.norm();
    if euclid == 0.0 {
        return 0.0;
    }
    let local = geom.local_norm(step);
    if local == 0.0 {
        return 0.0;
    }
    0.5 * (nu - 2.0) * m * euclid.powf(3.0 - nu) * local.powf(nu - 2.0)
}

/// Whether `y` lies in the Dikin ellipsoid `W(x; r) = {y : d_nu(x, y) < r}`.
pub fn dikin_contains(kernel: &dyn Kernel, x: &DVector<f64>, y: &DVector<f64>, r: f64) -> Result<bool> {
    Ok(gsc_distance(kernel, x, y)? < r)
}

/// Checks the defining self-concordance inequality along one line.
///
/// The third directional derivative `<D^3 h(x)[v] u, u>` is approximated by a
/// central difference of the Hessian quadratic form in direction `v`, then
/// compared against `M ||u||_x^2 ||v||_x^{nu-2} ||v||_2^{3-nu}` with slack
/// `1e-3 * (1 + rhs)`. Intended as a property-test oracle, not a production
/// path. If a probe point leaves the domain the step shrinks and retries, up
/// to ten times.
pub fn gsc_line_check(
    kernel: &dyn Kernel,
    x: &DVector<f64>,
    u: &DVector<f64>,
    v: &DVector<f64>,
) -> Result<bool> {
    let geom = LocalGeometry::new(kernel, x)?;
    let p = kernel.params();
    let u_local = geom.local_norm(u);
    let v_local = geom.local_norm(v);
    let v_euclid = v.norm();
    if u_local == 0.0 || v_euclid == 0.0 {
        return Ok(true);
    }
    let rhs = p.m * u_local * u_local * v_local.powf(p.nu - 2.0) * v_euclid.powf(3.0 - p.nu);

    // Scale the probe so the relative displacement is small regardless of
    // ||v||; shrink further if the domain is tight around x.
    let mut t = 1e-4 / v_euclid.max(v_local).max(1.0);
    let mut probes = None;
    for _ in 0..10 {
        let xp = x + v * t;
        let xm = x - v * t;
        match (kernel.hessian(&xp), kernel.hessian(&xm)) {
            (Ok(hp), Ok(hm)) => {
                probes = Some((hp, hm, t));
                break;
            }
            _ => t *= 0.1,
        }
    }
    let (hp, hm, t) = probes.ok_or_else(|| {
        Error::OutsideDomain("finite-difference probes left the kernel domain".into())
    })?;
    let lhs = (hp.quadratic_form(u) - hm.quadratic_form(u)) / (2.0 * t);
    Ok(lhs.abs() <= rhs + 1e-3 * (1.0 + rhs))
}

/// Two-sided Hessian comparison factors between nearby points.
///
/// With `r = d_nu(x, y) < 1`, returns `((1-r)^{2/(nu-2)}, (1-r)^{-2/(nu-2)})`,
/// the scalars sandwiching `H(y)` between multiples of `H(x)`.
pub fn hessian_sandwich(kernel: &dyn Kernel, x: &DVector<f64>, y: &DVector<f64>) -> Result<(f64, f64)> {
    let r = gsc_distance(kernel, x, y)?;
    if r >= 1.0 {
        return Err(Error::StepDomain(format!(
            "points are d_nu distance {r} apart; the sandwich needs r < 1"
        )));
    }
    let e = 2.0 / (kernel.params().nu - 2.0);
    let lo = (1.0 - r).powf(e);
    Ok((lo, 1.0 / lo))
}

/// Barrier-style divergence of the kernel value along a ray toward a
/// boundary point: `h(x + 2^{-k}(x_b - x))` for growing `k`.
///
/// Helper for blow-up property tests; returns the values actually computed
/// (stopping early if evaluation fails, which itself signals the boundary).
pub fn boundary_values(
    kernel: &dyn Kernel,
    x: &DVector<f64>,
    x_boundary: &DVector<f64>,
    halvings: u32,
) -> Vec<f64> {
    let mut out = Vec::new();
    for k in 0..halvings {
        let t = 0.5_f64.powi(k as i32);
        let point = x_boundary + (x - x_boundary) * t;
        match kernel.value(&point) {
            Ok(v) => out.push(v),
            Err(_) => break,
        }
    }
    out
}

/// Handle-based convenience wrappers, matching the solver's storage type.
pub fn local_geometry(kernel: &KernelHandle, x: &DVector<f64>) -> Result<LocalGeometry> {
    LocalGeometry::new(kernel.as_ref(), x)
}
