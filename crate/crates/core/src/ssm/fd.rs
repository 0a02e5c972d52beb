//! Finite-difference Hessian fallback for models without analytic
//! log-density curvature. Wrapping a model in [`FdHessians`] makes it usable
//! on the general bound path; runs built on it are flagged in the report
//! metadata since derivative accuracy dominates bound quality.

use rand::RngCore;

use crate::distributions::GaussianLaw;
use crate::error::Result;
use crate::numkit::Matrix;

use super::{GeneralSsm, Ssm};

const FD_STEP: f64 = 1e-5;

fn step(x: f64) -> f64 {
    FD_STEP * (1.0 + x.abs())
}

pub struct FdHessians<M: Ssm>(pub M);

impl<M: Ssm> Ssm for FdHessians<M> {
    fn state_dim(&self) -> usize {
        self.0.state_dim()
    }

    fn meas_dim(&self) -> usize {
        self.0.meas_dim()
    }

    fn prior(&self) -> &GaussianLaw {
        self.0.prior()
    }

    fn transition_mean(&self, x: &[f64], t: usize) -> Vec<f64> {
        self.0.transition_mean(x, t)
    }

    fn measurement_mean(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.0.measurement_mean(x)
    }

    fn sample_transition(&self, x: &[f64], t: usize, rng: &mut dyn RngCore) -> Vec<f64> {
        self.0.sample_transition(x, t, rng)
    }

    fn sample_measurement(&self, x: &[f64], rng: &mut dyn RngCore) -> Result<Vec<f64>> {
        self.0.sample_measurement(x, rng)
    }

    fn log_transition(&self, x_next: &[f64], x: &[f64], t: usize) -> f64 {
        self.0.log_transition(x_next, x, t)
    }

    fn log_likelihood(&self, y: &[f64], x: &[f64]) -> f64 {
        self.0.log_likelihood(y, x)
    }

    fn additive_transition_noise(&self) -> Option<&GaussianLaw> {
        self.0.additive_transition_noise()
    }
}

/// Central-difference Hessian of a scalar function of one vector argument.
fn fd_hessian(f: &dyn Fn(&[f64]) -> f64, x: &[f64]) -> Matrix {
    let n = x.len();
    let mut h = Matrix::zeros(n, n);
    let f0 = f(x);
    for i in 0..n {
        let hi = step(x[i]);
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[i] += hi;
        xm[i] -= hi;
        h[(i, i)] = (f(&xp) - 2.0 * f0 + f(&xm)) / (hi * hi);
        for j in (i + 1)..n {
            let hj = step(x[j]);
            let mut xpp = x.to_vec();
            let mut xpm = x.to_vec();
            let mut xmp = x.to_vec();
            let mut xmm = x.to_vec();
            xpp[i] += hi;
            xpp[j] += hj;
            xpm[i] += hi;
            xpm[j] -= hj;
            xmp[i] -= hi;
            xmp[j] += hj;
            xmm[i] -= hi;
            xmm[j] -= hj;
            let v = (f(&xpp) - f(&xpm) - f(&xmp) + f(&xmm)) / (4.0 * hi * hj);
            h[(i, j)] = v;
            h[(j, i)] = v;
        }
    }
    h
}

/// Mixed second-derivative block d^2/(da db^T) of f(a, b), rows indexed by a.
fn fd_cross(f: &dyn Fn(&[f64], &[f64]) -> f64, a: &[f64], b: &[f64]) -> Matrix {
    let mut h = Matrix::zeros(a.len(), b.len());
    for i in 0..a.len() {
        let hi = step(a[i]);
        for j in 0..b.len() {
            let hj = step(b[j]);
            let mut ap = a.to_vec();
            let mut am = a.to_vec();
            ap[i] += hi;
            am[i] -= hi;
            let mut bp = b.to_vec();
            let mut bm = b.to_vec();
            bp[j] += hj;
            bm[j] -= hj;
            h[(i, j)] = (f(&ap, &bp) - f(&ap, &bm) - f(&am, &bp) + f(&am, &bm)) / (4.0 * hi * hj);
        }
    }
    h
}

impl<M: Ssm> GeneralSsm for FdHessians<M> {
    fn log_transition_hessians(
        &self,
        x_next: &[f64],
        x: &[f64],
        t: usize,
    ) -> Result<(Matrix, Matrix, Matrix)> {
        let h11 = fd_hessian(&|a: &[f64]| self.0.log_transition(x_next, a, t), x);
        let h22 = fd_hessian(&|b: &[f64]| self.0.log_transition(b, x, t), x_next);
        let h12 = fd_cross(&|a: &[f64], b: &[f64]| self.0.log_transition(b, a, t), x, x_next);
        Ok((h11, h12, h22))
    }

    fn log_likelihood_hessian(&self, y: &[f64], x: &[f64]) -> Result<Matrix> {
        Ok(fd_hessian(&|a: &[f64]| self.0.log_likelihood(y, a), x))
    }

    fn uses_fd_hessians(&self) -> bool {
        true
    }
}
