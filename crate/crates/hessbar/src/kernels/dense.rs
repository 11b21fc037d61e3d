//! Kernels with genuinely dense Hessians: polyhedral and second-order-cone
//! log barriers.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::kernels::{Hessian, Kernel, KernelParams};

/// Log barrier `-sum_j ln(d_j - b_j^T x)` for the polyhedron `{x : Bx < d}`.
///
/// `B` must have full column rank so the Hessian `B^T S^{-2} B` stays positive
/// definite (`S` is the diagonal of slacks). Construction takes a strictly
/// interior witness point because deciding interior nonemptiness from the
/// shape data alone is a linear program in its own right.
pub struct Polyhedral {
    b: DMatrix<f64>,
    d: DVector<f64>,
}

impl Polyhedral {
    /// Builds the barrier for `{x : Bx < d}`, verifying the witness.
    pub fn new(b: DMatrix<f64>, d: DVector<f64>, witness: &DVector<f64>) -> Result<Self> {
        if b.nrows() != d.len() {
            return Err(Error::DimensionMismatch {
                expected: b.nrows(),
                actual: d.len(),
            });
        }
        if witness.len() != b.ncols() {
            return Err(Error::DimensionMismatch {
                expected: b.ncols(),
                actual: witness.len(),
            });
        }
        let sv = b.clone().svd(false, false).singular_values;
        let norm = sv.iter().fold(0.0_f64, |a, &s| a.max(s));
        let rank = sv.iter().filter(|&&s| s > 1e-10 * norm.max(1.0)).count();
        if rank < b.ncols() {
            return Err(Error::InvalidParameter(format!(
                "polyhedral barrier needs rank(B) = {} columns, estimated rank {}",
                b.ncols(),
                rank
            )));
        }
        let built = Self { b, d };
        if !built.contains_impl(witness) {
            return Err(Error::EmptyInterior(
                "witness point does not satisfy Bx < d strictly".into(),
            ));
        }
        Ok(built)
    }

    fn slacks(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.d - &self.b * x
    }

    fn contains_impl(&self, x: &DVector<f64>) -> bool {
        x.len() == self.b.ncols() && self.slacks(x).iter().all(|&s| s > 0.0)
    }
}

impl Kernel for Polyhedral {
    fn dim(&self) -> usize {
        self.b.ncols()
    }

    fn params(&self) -> KernelParams {
        KernelParams::new(2.0, 3.0, Some(self.b.nrows() as f64))
    }

    fn contains(&self, x: &DVector<f64>) -> bool {
        self.contains_impl(x)
    }

    fn value(&self, x: &DVector<f64>) -> Result<f64> {
        let s = self.slacks(x);
        if s.iter().any(|&si| si <= 0.0) {
            return Err(Error::OutsideDomain("slack nonpositive".into()));
        }
        Ok(-s.iter().map(|&si| si.ln()).sum::<f64>())
    }

    fn gradient(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        let s = self.slacks(x);
        if s.iter().any(|&si| si <= 0.0) {
            return Err(Error::OutsideDomain("slack nonpositive".into()));
        }
        let inv = DVector::from_iterator(s.len(), s.iter().map(|&si| 1.0 / si));
        Ok(self.b.transpose() * inv)
    }

    fn hessian(&self, x: &DVector<f64>) -> Result<Hessian> {
        let s = self.slacks(x);
        if s.iter().any(|&si| si <= 0.0) {
            return Err(Error::OutsideDomain("slack nonpositive".into()));
        }
        let mut scaled = self.b.clone();
        for (j, mut row) in scaled.row_iter_mut().enumerate() {
            row *= 1.0 / s[j];
        }
        Ok(Hessian::Dense(scaled.transpose() * &scaled))
    }
}

/// Log barrier `-ln(t^2 - ||w||^2)` for the second-order cone `{(t, w) : t > ||w||}`.
///
/// A self-concordant barrier of order 2 in any dimension, with `(M, nu) = (2, 3)`.
pub struct SecondOrderCone {
    dim: usize,
}

impl SecondOrderCone {
    /// Builds the barrier on `R^dim` with `dim >= 2` (one `t` plus `w`).
    pub fn new(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidParameter(
                "second-order cone barrier needs dimension >= 2".into(),
            ));
        }
        Ok(Self { dim })
    }

    /// The cone gap `q(x) = t^2 - ||w||^2` with `t = x_0`, `w = x_{1..}`.
    fn gap(&self, x: &DVector<f64>) -> f64 {
        let t = x[0];
        let w2: f64 = x.rows(1, self.dim - 1).norm_squared();
        t * t - w2
    }
}

impl Kernel for SecondOrderCone {
    fn dim(&self) -> usize {
        self.dim
    }

    fn params(&self) -> KernelParams {
        KernelParams::new(2.0, 3.0, Some(2.0))
    }

    fn contains(&self, x: &DVector<f64>) -> bool {
        x.len() == self.dim && x[0] > 0.0 && self.gap(x) > 0.0
    }

    fn value(&self, x: &DVector<f64>) -> Result<f64> {
        if !self.contains(x) {
            return Err(Error::OutsideDomain("outside second-order cone".into()));
        }
        Ok(-self.gap(x).ln())
    }

    fn gradient(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        if !self.contains(x) {
            return Err(Error::OutsideDomain("outside second-order cone".into()));
        }
        let q = self.gap(x);
        let mut g = x * (2.0 / q);
        g[0] = -2.0 * x[0] / q;
        Ok(g)
    }

    fn hessian(&self, x: &DVector<f64>) -> Result<Hessian> {
        if !self.contains(x) {
            return Err(Error::OutsideDomain("outside second-order cone".into()));
        }
        let q = self.gap(x);
        // grad q = (2t, -2w); hessian = (grad q)(grad q)^T / q^2 - (grad^2 q) / q.
        let mut gq = x * (-2.0);
        gq[0] = 2.0 * x[0];
        let mut h = DMatrix::from_fn(self.dim, self.dim, |i, j| gq[i] * gq[j] / (q * q));
        h[(0, 0)] -= 2.0 / q;
        for i in 1..self.dim {
            h[(i, i)] += 2.0 / q;
        }
        Ok(Hessian::Dense(h))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn fd_gradient(kernel: &dyn Kernel, x: &DVector<f64>) {
        let g = kernel.gradient(x).unwrap();
        for i in 0..x.len() {
            let h = 1e-6 * (1.0 + x[i].abs());
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[i] += h;
            xm[i] -= h;
            let fd = (kernel.value(&xp).unwrap() - kernel.value(&xm).unwrap()) / (2.0 * h);
            assert_relative_eq!(fd, g[i], max_relative = 1e-5, epsilon = 1e-8);
        }
    }

    fn fd_hessian(kernel: &dyn Kernel, x: &DVector<f64>) {
        let h = match kernel.hessian(x).unwrap() {
            Hessian::Dense(h) => h,
            Hessian::Diagonal(d) => DMatrix::from_diagonal(&d),
        };
        for i in 0..x.len() {
            let step = 1e-6 * (1.0 + x[i].abs());
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[i] += step;
            xm[i] -= step;
            let gp = kernel.gradient(&xp).unwrap();
            let gm = kernel.gradient(&xm).unwrap();
            for j in 0..x.len() {
                let fd = (gp[j] - gm[j]) / (2.0 * step);
                assert_relative_eq!(fd, h[(j, i)], max_relative = 1e-5, epsilon = 1e-7);
            }
        }
    }

    #[test]
    fn polyhedral_flipped_identity_matches_burg() {
        // Constraints -x < 0, i.e. the positive orthant.
        let n = 3;
        let b = DMatrix::from_diagonal(&DVector::from_element(n, -1.0));
        let d = DVector::zeros(n);
        let witness = DVector::from_element(n, 1.0);
        let k = Polyhedral::new(b, d, &witness).unwrap();
        let x = DVector::from_vec(vec![0.5, 1.0, 2.0]);
        let burg: f64 = x.iter().map(|&t| -f64::ln(t)).sum();
        assert_relative_eq!(k.value(&x).unwrap(), burg, epsilon = 1e-12);
        fd_gradient(&k, &x);
        fd_hessian(&k, &x);
        assert_eq!(k.params().theta, Some(3.0));
    }

    #[test]
    fn polyhedral_box_barrier() {
        // Box 0 < x < 2 in two variables: B stacks I and -I.
        let b = DMatrix::from_row_slice(4, 2, &[1.0, 0.0, 0.0, 1.0, -1.0, 0.0, 0.0, -1.0]);
        let d = DVector::from_vec(vec![2.0, 2.0, 0.0, 0.0]);
        let witness = DVector::from_element(2, 1.0);
        let k = Polyhedral::new(b, d, &witness).unwrap();
        let x = DVector::from_vec(vec![0.3, 1.7]);
        fd_gradient(&k, &x);
        fd_hessian(&k, &x);
        assert!(!k.contains(&DVector::from_vec(vec![2.0, 1.0])));
    }

    #[test]
    fn polyhedral_rejects_bad_shapes() {
        // Witness outside.
        let b = DMatrix::from_diagonal(&DVector::from_element(2, -1.0));
        let d = DVector::zeros(2);
        let bad = DVector::from_vec(vec![1.0, -1.0]);
        assert!(matches!(
            Polyhedral::new(b.clone(), d.clone(), &bad),
            Err(Error::EmptyInterior(_))
        ));
        // Rank-deficient B: a single halfspace in two variables.
        let flat = DMatrix::from_row_slice(1, 2, &[1.0, 1.0]);
        let d1 = DVector::from_element(1, 1.0);
        let w = DVector::zeros(2);
        assert!(Polyhedral::new(flat, d1, &w).is_err());
    }

    #[test]
    fn soc_derivatives() {
        let k = SecondOrderCone::new(3).unwrap();
        let x = DVector::from_vec(vec![2.0, 0.7, -0.5]);
        assert!(k.contains(&x));
        fd_gradient(&k, &x);
        fd_hessian(&k, &x);
        assert!(!k.contains(&DVector::from_vec(vec![0.5, 0.7, 0.5])));
        // theta = 2 for the cone barrier: ||grad||_{H^{-1}} = sqrt(2) everywhere.
        assert_eq!(k.params().theta, Some(2.0));
    }
}
