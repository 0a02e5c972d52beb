//! State-space model abstraction and the built-in models.
//!
//! A model is a discrete-time Markov process `x_{t+1} = f_t(x_t) + v_t`
//! observed through `y_t = g(x_t) + w_t`. Two refinements matter to the
//! bound engines: [`GaussianSsm`] for additive-Gaussian state and sensor
//! noise (drives the gradient-based recursion), and [`GeneralSsm`] for
//! arbitrary sensor noise (drives the log-density Hessian recursion).
//!
//! Time indexing: transitions are indexed by the source step, so the first
//! transition applies `f_0` to the initial state `x_0`, and measurements run
//! `y_1..y_T` against states `x_1..x_T`.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::distributions::GaussianLaw;
use crate::error::Result;
use crate::numkit::Matrix;

mod ballistic;
mod fd;
mod linear;
mod ungm;

pub use ballistic::{air_density, Ballistic, BallisticParams};
pub use fd::FdHessians;
pub use linear::LinearGaussian;
pub use ungm::{ungm_mean, ungm_obs, UngmGaussian, UngmRayleigh};

/// Common behavior of every state-space model.
pub trait Ssm: Send + Sync {
    fn state_dim(&self) -> usize;
    fn meas_dim(&self) -> usize;

    /// Initial-state law x_0 ~ N(mean, P0).
    fn prior(&self) -> &GaussianLaw;

    /// Noise-free state map `f_t(x)`.
    fn transition_mean(&self, x: &[f64], t: usize) -> Vec<f64>;

    /// Noise-free measurement map `g(x)`.
    fn measurement_mean(&self, x: &[f64]) -> Result<Vec<f64>>;

    fn sample_transition(&self, x: &[f64], t: usize, rng: &mut dyn RngCore) -> Vec<f64>;

    fn sample_measurement(&self, x: &[f64], rng: &mut dyn RngCore) -> Result<Vec<f64>>;

    /// `log p(x_{t+1} | x_t)`.
    fn log_transition(&self, x_next: &[f64], x: &[f64], t: usize) -> f64;

    /// `log p(y_t | x_t)`; `-inf` encodes zero likelihood.
    fn log_likelihood(&self, y: &[f64], x: &[f64]) -> f64;

    /// The additive-Gaussian state-noise law, when the model has that
    /// structure. Lets the pairwise smoother precompute transition means
    /// once per source particle instead of once per particle pair.
    fn additive_transition_noise(&self) -> Option<&GaussianLaw> {
        None
    }
}

/// Models with additive Gaussian state and sensor noise.
pub trait GaussianSsm: Ssm {
    /// State-noise covariance Q.
    fn q(&self) -> &Matrix;
    /// Sensor-noise covariance R.
    fn r(&self) -> &Matrix;
    /// Jacobian of the state map, entries `[i][j] = d f_i / d x_j`.
    fn grad_f(&self, x: &[f64], t: usize) -> Result<Matrix>;
    /// Jacobian of the measurement map, `m x n`.
    fn grad_g(&self, x: &[f64]) -> Result<Matrix>;
}

/// Models exposing the log-density curvature needed by the general-model
/// bound recursion.
pub trait GeneralSsm: Ssm {
    /// Hessian blocks of `log p(x_{t+1} | x_t)`: second derivatives in
    /// `(x_t, x_t)`, the mixed block `(x_t, x_{t+1})` (rows indexed by x_t),
    /// and `(x_{t+1}, x_{t+1})`.
    fn log_transition_hessians(
        &self,
        x_next: &[f64],
        x: &[f64],
        t: usize,
    ) -> Result<(Matrix, Matrix, Matrix)>;

    /// Hessian of `log p(y | x)` in x.
    fn log_likelihood_hessian(&self, y: &[f64], x: &[f64]) -> Result<Matrix>;

    /// Whether the Hessians come from finite differences rather than
    /// analytic expressions; surfaced in run metadata.
    fn uses_fd_hessians(&self) -> bool {
        false
    }
}

/// One simulated path: states `x_0..x_T` and measurements `y_1..y_T`.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub states: Vec<Vec<f64>>,
    pub measurements: Vec<Vec<f64>>,
    pub seed: u64,
}

impl Trajectory {
    pub fn horizon(&self) -> usize {
        self.measurements.len()
    }
}

/// SplitMix64 finalizer.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E3779B97F4A7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// Counter-based stream split of a master seed. Stream k of a master seed is
/// independent of every other stream and of the order in which streams are
/// drawn, so parallel sequence generation is order-independent.
pub fn derive_stream(master: u64, stream: u64) -> u64 {
    splitmix64(master ^ splitmix64(stream.wrapping_add(0x517CC1B727220A95)))
}

/// Seeded RNG for one derived stream.
pub fn stream_rng(master: u64, stream: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(derive_stream(master, stream))
}

/// Simulate one trajectory of `horizon` steps, fully determined by `seed`.
pub fn simulate(model: &dyn Ssm, horizon: usize, seed: u64) -> Result<Trajectory> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut states = Vec::with_capacity(horizon + 1);
    let mut measurements = Vec::with_capacity(horizon);
    states.push(model.prior().sample(&mut rng));
    for t in 0..horizon {
        let next = model.sample_transition(&states[t], t, &mut rng);
        let y = model.sample_measurement(&next, &mut rng)?;
        states.push(next);
        measurements.push(y);
    }
    Ok(Trajectory { states, measurements, seed })
}

/// Noise-free rollout from a fixed initial state; used as a sanity oracle.
pub fn simulate_noise_free(
    model: &dyn Ssm,
    x0: &[f64],
    horizon: usize,
) -> Result<(Vec<Vec<f64>>, Vec<Vec<f64>>)> {
    let mut states = vec![x0.to_vec()];
    let mut measurements = Vec::with_capacity(horizon);
    for t in 0..horizon {
        let next = model.transition_mean(&states[t], t);
        measurements.push(model.measurement_mean(&next)?);
        states.push(next);
    }
    Ok((states, measurements))
}
