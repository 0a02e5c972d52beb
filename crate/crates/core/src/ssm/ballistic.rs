//! Ballistic target re-entry model in a 2D Cartesian frame.
//!
//! State `x = [X, Xdot, H, Hdot]` in SI units (m, m/s): downrange position
//! and velocity, altitude and vertical velocity. The only forces are gravity
//! and drag, with drag scaled by an exponentially decaying air density. A
//! radar at the origin measures range and elevation.
//!
//! Everything is stored in SI internally; the standard benchmark initial
//! state is given in km and converted in the constructors.

use rand::RngCore;

use crate::distributions::GaussianLaw;
use crate::error::{Error, Result};
use crate::numkit::Matrix;

use super::{GaussianSsm, Ssm};

/// Air density in kg/m^3 as a function of altitude in meters. Two exponential
/// branches split at 9144 m; the branch constants make the profile
/// discontinuous at the split, which is kept as specified.
pub fn air_density(h: f64) -> f64 {
    if h < 9144.0 {
        1.227 * (-1.09310e-4 * h).exp()
    } else {
        1.754 * (-1.4910e-4 * h).exp()
    }
}

fn density_decay_rate(h: f64) -> f64 {
    if h < 9144.0 {
        1.09310e-4
    } else {
        1.4910e-4
    }
}

/// Physical and noise parameters of one tracking scenario.
#[derive(Clone, Copy, Debug)]
pub struct BallisticParams {
    /// Gravitational acceleration, m/s^2.
    pub gravity: f64,
    /// Ballistic coefficient, kg m^-1 s^-2.
    pub beta: f64,
    /// Radar sampling interval, seconds.
    pub dt: f64,
    /// State-noise intensity multiplier.
    pub gamma: f64,
    /// Range noise standard deviation, meters.
    pub sigma_r: f64,
    /// Elevation noise standard deviation, radians.
    pub sigma_e: f64,
}

impl BallisticParams {
    /// Benchmark scenario: g = 9.8, beta = 40000, dt = 2 s, with the
    /// case-numbered noise intensities (1..=4).
    pub fn case(case: u8) -> Result<BallisticParams> {
        let (gamma, sigma_r, sigma_e) = match case {
            1 => (1.0, 100.0, 0.017),
            2 => (5.0, 100.0, 0.017),
            3 => (1.0, 500.0, 0.085),
            4 => (5.0, 500.0, 0.085),
            other => return Err(Error::Config(format!("ballistic case must be 1..=4, got {other}"))),
        };
        Ok(BallisticParams {
            gravity: 9.8,
            beta: 40000.0,
            dt: 2.0,
            gamma,
            sigma_r,
            sigma_e,
        })
    }
}

#[derive(Clone, Debug)]
pub struct Ballistic {
    params: BallisticParams,
    a: Matrix,
    g_in: Matrix,
    q: Matrix,
    r: Matrix,
    state_noise: GaussianLaw,
    sensor_noise: GaussianLaw,
    prior: GaussianLaw,
}

impl Ballistic {
    pub fn new(params: BallisticParams, prior: GaussianLaw) -> Result<Ballistic> {
        let dt = params.dt;
        let a = Matrix::from_rows(&[
            &[1.0, dt, 0.0, 0.0],
            &[0.0, 1.0, 0.0, 0.0],
            &[0.0, 0.0, 1.0, dt],
            &[0.0, 0.0, 0.0, 1.0],
        ]);
        let g_in = Matrix::from_rows(&[
            &[dt * dt / 2.0, 0.0],
            &[dt, 0.0],
            &[0.0, dt * dt / 2.0],
            &[0.0, dt],
        ]);
        // Q = gamma * I_2 (x) Theta with Theta = [[dt^3/3, dt^2/2], [dt^2/2, dt]]
        let th = [
            [dt.powi(3) / 3.0, dt * dt / 2.0],
            [dt * dt / 2.0, dt],
        ];
        let mut q = Matrix::zeros(4, 4);
        for b in 0..2 {
            for i in 0..2 {
                for j in 0..2 {
                    q[(2 * b + i, 2 * b + j)] = params.gamma * th[i][j];
                }
            }
        }
        let r = Matrix::diag(&[params.sigma_r * params.sigma_r, params.sigma_e * params.sigma_e]);
        let state_noise = GaussianLaw::zero_mean(q.clone())?;
        let sensor_noise = GaussianLaw::zero_mean(r.clone())?;
        Ok(Ballistic { params, a, g_in, q, r, state_noise, sensor_noise, prior })
    }

    /// Benchmark scenario with the standard prior: mean at the nominal
    /// launch point (232 km downrange, 88 km up, 2.290 km/s at 190 degrees)
    /// and standard deviations (1 km, 20 m/s, 1 km, 20 m/s).
    pub fn case(case: u8) -> Result<Ballistic> {
        let params = BallisticParams::case(case)?;
        let angle = 190.0f64.to_radians();
        let speed = 2.290e3;
        let mean = vec![232.0e3, speed * angle.cos(), 88.0e3, speed * angle.sin()];
        let p0 = Matrix::diag(&[1.0e6, 400.0, 1.0e6, 400.0]);
        Ballistic::new(params, GaussianLaw::new(mean, p0)?)
    }

    pub fn params(&self) -> &BallisticParams {
        &self.params
    }

    /// Drag acceleration `F(x) = -(g rho(H) / 2 beta) |v| (Xdot, Hdot)`.
    pub fn drag(&self, x: &[f64]) -> [f64; 2] {
        let speed = (x[1] * x[1] + x[3] * x[3]).sqrt();
        let c = -self.params.gravity * air_density(x[2]) / (2.0 * self.params.beta);
        [c * speed * x[1], c * speed * x[3]]
    }

    /// Range and elevation of a state, with the elevation shifted by pi for
    /// targets behind the radar (X < 0). Undefined at X = 0.
    pub fn observe(&self, x: &[f64]) -> Result<[f64; 2]> {
        if x[0] == 0.0 {
            return Err(Error::UndefinedBearing);
        }
        let range = (x[0] * x[0] + x[2] * x[2]).sqrt();
        let mut elev = (x[2] / x[0]).atan();
        if x[0] < 0.0 {
            elev += std::f64::consts::PI;
        }
        Ok([range, elev])
    }

    /// Jacobian of the drag term, the 2x4 matrix `M(x)`; singular at zero
    /// velocity.
    fn drag_jacobian(&self, x: &[f64]) -> Result<Matrix> {
        let (vx, h, vh) = (x[1], x[2], x[3]);
        let speed_sq = vx * vx + vh * vh;
        if speed_sq == 0.0 {
            return Err(Error::SingularGradient);
        }
        let speed = speed_sq.sqrt();
        let c = self.params.gravity * air_density(h) / (2.0 * self.params.beta);
        let alpha2 = density_decay_rate(h);
        let mut m = Matrix::zeros(2, 4);
        m[(0, 1)] = -c * (2.0 * vx * vx + vh * vh) / speed;
        m[(1, 1)] = -c * vx * vh / speed;
        m[(0, 2)] = c * alpha2 * speed * vx;
        m[(1, 2)] = c * alpha2 * speed * vh;
        m[(0, 3)] = m[(1, 1)];
        m[(1, 3)] = -c * (vx * vx + 2.0 * vh * vh) / speed;
        Ok(m)
    }
}

impl Ssm for Ballistic {
    fn state_dim(&self) -> usize {
        4
    }

    fn meas_dim(&self) -> usize {
        2
    }

    fn prior(&self) -> &GaussianLaw {
        &self.prior
    }

    fn transition_mean(&self, x: &[f64], _t: usize) -> Vec<f64> {
        let drag = self.drag(x);
        let forcing = [drag[0], drag[1] - self.params.gravity];
        let mut out = self.a.matvec(x);
        for i in 0..4 {
            out[i] += self.g_in[(i, 0)] * forcing[0] + self.g_in[(i, 1)] * forcing[1];
        }
        out
    }

    fn measurement_mean(&self, x: &[f64]) -> Result<Vec<f64>> {
        Ok(self.observe(x)?.to_vec())
    }

    fn sample_transition(&self, x: &[f64], t: usize, rng: &mut dyn RngCore) -> Vec<f64> {
        let mut out = self.transition_mean(x, t);
        for (o, v) in out.iter_mut().zip(self.state_noise.sample(rng)) {
            *o += v;
        }
        out
    }

    fn sample_measurement(&self, x: &[f64], rng: &mut dyn RngCore) -> Result<Vec<f64>> {
        let mut out = self.measurement_mean(x)?;
        for (o, v) in out.iter_mut().zip(self.sensor_noise.sample(rng)) {
            *o += v;
        }
        Ok(out)
    }

    fn log_transition(&self, x_next: &[f64], x: &[f64], t: usize) -> f64 {
        let mean = self.transition_mean(x, t);
        let resid: Vec<f64> = x_next.iter().zip(&mean).map(|(a, b)| a - b).collect();
        self.state_noise.log_density_of_residual(&resid)
    }

    fn log_likelihood(&self, y: &[f64], x: &[f64]) -> f64 {
        match self.observe(x) {
            Ok(mean) => {
                let resid = [y[0] - mean[0], y[1] - mean[1]];
                self.sensor_noise.log_density_of_residual(&resid)
            }
            Err(_) => f64::NEG_INFINITY,
        }
    }

    fn additive_transition_noise(&self) -> Option<&GaussianLaw> {
        Some(&self.state_noise)
    }
}

impl GaussianSsm for Ballistic {
    fn q(&self) -> &Matrix {
        &self.q
    }

    fn r(&self) -> &Matrix {
        &self.r
    }

    fn grad_f(&self, x: &[f64], _t: usize) -> Result<Matrix> {
        let m = self.drag_jacobian(x)?;
        Ok(self.a.add(&self.g_in.matmul(&m)))
    }

    fn grad_g(&self, x: &[f64]) -> Result<Matrix> {
        if x[0] == 0.0 {
            return Err(Error::UndefinedBearing);
        }
        let (px, ph) = (x[0], x[2]);
        let r_sq = px * px + ph * ph;
        let range = r_sq.sqrt();
        let mut n = Matrix::zeros(2, 4);
        n[(0, 0)] = px / range;
        n[(0, 2)] = ph / range;
        n[(1, 0)] = -ph / r_sq;
        n[(1, 2)] = px / r_sq;
        Ok(n)
    }
}
