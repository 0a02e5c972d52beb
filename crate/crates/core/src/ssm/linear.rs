//! Linear-Gaussian test model `x' = A x + v`, `y = C x + w`.
//!
//! The bound integrands are constant for this model, so the recursion
//! collapses to the Kalman information recursion exactly; the test suites
//! lean on that as an end-to-end oracle.

use rand::RngCore;

use crate::distributions::GaussianLaw;
use crate::error::Result;
use crate::numkit::Matrix;

use super::{GaussianSsm, Ssm};

#[derive(Clone, Debug)]
pub struct LinearGaussian {
    a: Matrix,
    c: Matrix,
    q: Matrix,
    r: Matrix,
    state_noise: GaussianLaw,
    sensor_noise: GaussianLaw,
    prior: GaussianLaw,
}

impl LinearGaussian {
    pub fn new(a: Matrix, c: Matrix, q: Matrix, r: Matrix, prior: GaussianLaw) -> Result<LinearGaussian> {
        let state_noise = GaussianLaw::zero_mean(q.clone())?;
        let sensor_noise = GaussianLaw::zero_mean(r.clone())?;
        Ok(LinearGaussian { a, c, q, r, state_noise, sensor_noise, prior })
    }

    pub fn scalar(a: f64, c: f64, q: f64, r: f64, prior_mean: f64, prior_var: f64) -> Result<LinearGaussian> {
        LinearGaussian::new(
            Matrix::scalar(a),
            Matrix::scalar(c),
            Matrix::scalar(q),
            Matrix::scalar(r),
            GaussianLaw::scalar(prior_mean, prior_var)?,
        )
    }

    /// A mildly coupled two-state system observed through its first state.
    pub fn two_state() -> Result<LinearGaussian> {
        LinearGaussian::new(
            Matrix::from_rows(&[&[0.9, 0.2], &[0.0, 0.8]]),
            Matrix::from_rows(&[&[1.0, 0.0]]),
            Matrix::from_rows(&[&[0.3, 0.05], &[0.05, 0.2]]),
            Matrix::scalar(0.5),
            GaussianLaw::new(vec![0.0, 0.0], Matrix::diag(&[1.0, 2.0]))?,
        )
    }

    pub fn a(&self) -> &Matrix {
        &self.a
    }

    pub fn c(&self) -> &Matrix {
        &self.c
    }
}

impl Ssm for LinearGaussian {
    fn state_dim(&self) -> usize {
        self.a.dim()
    }

    fn meas_dim(&self) -> usize {
        self.c.rows()
    }

    fn prior(&self) -> &GaussianLaw {
        &self.prior
    }

    fn transition_mean(&self, x: &[f64], _t: usize) -> Vec<f64> {
        self.a.matvec(x)
    }

    fn measurement_mean(&self, x: &[f64]) -> Result<Vec<f64>> {
        Ok(self.c.matvec(x))
    }

    fn sample_transition(&self, x: &[f64], _t: usize, rng: &mut dyn RngCore) -> Vec<f64> {
        let mut out = self.a.matvec(x);
        for (o, v) in out.iter_mut().zip(self.state_noise.sample(rng)) {
            *o += v;
        }
        out
    }

    fn sample_measurement(&self, x: &[f64], rng: &mut dyn RngCore) -> Result<Vec<f64>> {
        let mut out = self.c.matvec(x);
        for (o, v) in out.iter_mut().zip(self.sensor_noise.sample(rng)) {
            *o += v;
        }
        Ok(out)
    }

    fn log_transition(&self, x_next: &[f64], x: &[f64], _t: usize) -> f64 {
        let mean = self.a.matvec(x);
        let resid: Vec<f64> = x_next.iter().zip(&mean).map(|(a, b)| a - b).collect();
        self.state_noise.log_density_of_residual(&resid)
    }

    fn log_likelihood(&self, y: &[f64], x: &[f64]) -> f64 {
        let mean = self.c.matvec(x);
        let resid: Vec<f64> = y.iter().zip(&mean).map(|(a, b)| a - b).collect();
        self.sensor_noise.log_density_of_residual(&resid)
    }

    fn additive_transition_noise(&self) -> Option<&GaussianLaw> {
        Some(&self.state_noise)
    }
}

impl GaussianSsm for LinearGaussian {
    fn q(&self) -> &Matrix {
        &self.q
    }

    fn r(&self) -> &Matrix {
        &self.r
    }

    fn grad_f(&self, _x: &[f64], _t: usize) -> Result<Matrix> {
        Ok(self.a.clone())
    }

    fn grad_g(&self, _x: &[f64]) -> Result<Matrix> {
        Ok(self.c.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transition_density_matches_direct_formula() {
        let m = LinearGaussian::scalar(0.9, 1.0, 2.0, 1.0, 0.0, 1.0).unwrap();
        let lp = m.log_transition(&[1.0], &[2.0], 0);
        let resid: f64 = 1.0 - 1.8;
        let expect = -0.5 * (2.0 * std::f64::consts::PI * 2.0).ln() - resid * resid / 4.0;
        assert!((lp - expect).abs() < 1e-14);
    }
}
