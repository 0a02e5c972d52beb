//! Univariate non-stationary growth model, a standard strongly nonlinear
//! benchmark:
//!
//! `x_{t+1} = x/2 + 25 x / (1 + x^2) + 8 cos(1.2 t) + v_t`,
//! `y_t = x^2 / 20 + w_t`,
//!
//! with Gaussian state noise and either Gaussian or Rayleigh sensor noise.
//! The Rayleigh variant exercises the general (non-Gaussian) bound path and
//! ships analytic log-density Hessians.

use rand::RngCore;

use crate::distributions::{GaussianLaw, RayleighLaw};
use crate::error::Result;
use crate::numkit::Matrix;

use super::{GaussianSsm, GeneralSsm, Ssm};

/// Transition mean `x/2 + 25x/(1+x^2) + 8 cos(1.2 t)`.
pub fn ungm_mean(x: f64, t: usize) -> f64 {
    x / 2.0 + 25.0 * x / (1.0 + x * x) + 8.0 * (1.2 * t as f64).cos()
}

fn ungm_mean_d1(x: f64) -> f64 {
    let s = 1.0 + x * x;
    0.5 + 25.0 * (1.0 - x * x) / (s * s)
}

fn ungm_mean_d2(x: f64) -> f64 {
    let s = 1.0 + x * x;
    50.0 * x * (x * x - 3.0) / (s * s * s)
}

/// Measurement mean `x^2 / 20`.
pub fn ungm_obs(x: f64) -> f64 {
    x * x / 20.0
}

fn ungm_obs_d1(x: f64) -> f64 {
    x / 10.0
}

const UNGM_OBS_D2: f64 = 0.1;

/// Shared state-equation plumbing of the two sensor variants.
#[derive(Clone, Debug)]
struct UngmCore {
    q: f64,
    state_noise: GaussianLaw,
    prior: GaussianLaw,
}

impl UngmCore {
    fn new(q: f64, prior_mean: f64, prior_var: f64) -> Result<UngmCore> {
        Ok(UngmCore {
            q,
            state_noise: GaussianLaw::scalar(0.0, q)?,
            prior: GaussianLaw::scalar(prior_mean, prior_var)?,
        })
    }
}

/// UNGM with Gaussian sensor noise `w ~ N(0, r)`.
#[derive(Clone, Debug)]
pub struct UngmGaussian {
    core: UngmCore,
    q_mat: Matrix,
    r_mat: Matrix,
    sensor_noise: GaussianLaw,
}

impl UngmGaussian {
    pub fn new(q: f64, r: f64, prior_mean: f64, prior_var: f64) -> Result<UngmGaussian> {
        Ok(UngmGaussian {
            core: UngmCore::new(q, prior_mean, prior_var)?,
            q_mat: Matrix::scalar(q),
            r_mat: Matrix::scalar(r),
            sensor_noise: GaussianLaw::scalar(0.0, r)?,
        })
    }

    /// Benchmark configuration: q = 5e-3, r = 1e-3, x0 ~ N(0, 0.01).
    pub fn benchmark() -> Result<UngmGaussian> {
        UngmGaussian::new(5e-3, 1e-3, 0.0, 0.01)
    }
}

impl Ssm for UngmGaussian {
    fn state_dim(&self) -> usize {
        1
    }

    fn meas_dim(&self) -> usize {
        1
    }

    fn prior(&self) -> &GaussianLaw {
        &self.core.prior
    }

    fn transition_mean(&self, x: &[f64], t: usize) -> Vec<f64> {
        vec![ungm_mean(x[0], t)]
    }

    fn measurement_mean(&self, x: &[f64]) -> Result<Vec<f64>> {
        Ok(vec![ungm_obs(x[0])])
    }

    fn sample_transition(&self, x: &[f64], t: usize, rng: &mut dyn RngCore) -> Vec<f64> {
        vec![ungm_mean(x[0], t) + self.core.state_noise.sample(rng)[0]]
    }

    fn sample_measurement(&self, x: &[f64], rng: &mut dyn RngCore) -> Result<Vec<f64>> {
        Ok(vec![ungm_obs(x[0]) + self.sensor_noise.sample(rng)[0]])
    }

    fn log_transition(&self, x_next: &[f64], x: &[f64], t: usize) -> f64 {
        self.core
            .state_noise
            .log_density_of_residual(&[x_next[0] - ungm_mean(x[0], t)])
    }

    fn log_likelihood(&self, y: &[f64], x: &[f64]) -> f64 {
        self.sensor_noise
            .log_density_of_residual(&[y[0] - ungm_obs(x[0])])
    }

    fn additive_transition_noise(&self) -> Option<&GaussianLaw> {
        Some(&self.core.state_noise)
    }
}

impl GaussianSsm for UngmGaussian {
    fn q(&self) -> &Matrix {
        &self.q_mat
    }

    fn r(&self) -> &Matrix {
        &self.r_mat
    }

    fn grad_f(&self, x: &[f64], _t: usize) -> Result<Matrix> {
        Ok(Matrix::scalar(ungm_mean_d1(x[0])))
    }

    fn grad_g(&self, x: &[f64]) -> Result<Matrix> {
        Ok(Matrix::scalar(ungm_obs_d1(x[0])))
    }
}

/// UNGM with Rayleigh sensor noise `w ~ Rayleigh(scale_sq = r)`.
#[derive(Clone, Debug)]
pub struct UngmRayleigh {
    core: UngmCore,
    sensor_noise: RayleighLaw,
}

impl UngmRayleigh {
    pub fn new(q: f64, r: f64, prior_mean: f64, prior_var: f64) -> Result<UngmRayleigh> {
        Ok(UngmRayleigh {
            core: UngmCore::new(q, prior_mean, prior_var)?,
            sensor_noise: RayleighLaw::new(r)?,
        })
    }

    /// Benchmark configuration: q = 5e-3, r = 1e-3, x0 ~ N(0, 0.01).
    pub fn benchmark() -> Result<UngmRayleigh> {
        UngmRayleigh::new(5e-3, 1e-3, 0.0, 0.01)
    }

    pub fn sensor_noise(&self) -> &RayleighLaw {
        &self.sensor_noise
    }
}

impl Ssm for UngmRayleigh {
    fn state_dim(&self) -> usize {
        1
    }

    fn meas_dim(&self) -> usize {
        1
    }

    fn prior(&self) -> &GaussianLaw {
        &self.core.prior
    }

    fn transition_mean(&self, x: &[f64], t: usize) -> Vec<f64> {
        vec![ungm_mean(x[0], t)]
    }

    fn measurement_mean(&self, x: &[f64]) -> Result<Vec<f64>> {
        Ok(vec![ungm_obs(x[0])])
    }

    fn sample_transition(&self, x: &[f64], t: usize, rng: &mut dyn RngCore) -> Vec<f64> {
        vec![ungm_mean(x[0], t) + self.core.state_noise.sample(rng)[0]]
    }

    fn sample_measurement(&self, x: &[f64], rng: &mut dyn RngCore) -> Result<Vec<f64>> {
        Ok(vec![ungm_obs(x[0]) + self.sensor_noise.sample(rng)])
    }

    fn log_transition(&self, x_next: &[f64], x: &[f64], t: usize) -> f64 {
        self.core
            .state_noise
            .log_density_of_residual(&[x_next[0] - ungm_mean(x[0], t)])
    }

    fn log_likelihood(&self, y: &[f64], x: &[f64]) -> f64 {
        self.sensor_noise.logpdf(y[0] - ungm_obs(x[0]))
    }

    fn additive_transition_noise(&self) -> Option<&GaussianLaw> {
        Some(&self.core.state_noise)
    }
}

impl GeneralSsm for UngmRayleigh {
    fn log_transition_hessians(
        &self,
        x_next: &[f64],
        x: &[f64],
        t: usize,
    ) -> Result<(Matrix, Matrix, Matrix)> {
        let q = self.core.q;
        let d1 = ungm_mean_d1(x[0]);
        let resid = x_next[0] - ungm_mean(x[0], t);
        let h11 = (-d1 * d1 + resid * ungm_mean_d2(x[0])) / q;
        let h12 = d1 / q;
        let h22 = -1.0 / q;
        Ok((Matrix::scalar(h11), Matrix::scalar(h12), Matrix::scalar(h22)))
    }

    fn log_likelihood_hessian(&self, y: &[f64], x: &[f64]) -> Result<Matrix> {
        let w = y[0] - ungm_obs(x[0]);
        let (_, l1, l2) = self.sensor_noise.logpdf_derivs(w)?;
        let g1 = ungm_obs_d1(x[0]);
        Ok(Matrix::scalar(l2 * g1 * g1 - l1 * UNGM_OBS_D2))
    }
}
