//! Sequential importance resampling particle filter.
//!
//! The filter alternates prediction through the state transition, likelihood
//! reweighting against the newest measurement, and systematic resampling
//! every step, so that downstream consumers always see equally weighted
//! clouds. Weight arithmetic runs in log space with max-subtraction:
//! range likelihoods with a 100 m standard deviation over km-scale residuals
//! underflow in linear space.

use rand::{Rng, RngCore};

use crate::error::{Error, Result};
use crate::ssm::Ssm;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParticleKind {
    /// Draws from the initial-state law; doubles as the filtered cloud at
    /// t = 0 since no measurement exists there.
    Prior,
    /// Propagated one step past the last measurement, p(x_t | y_{1:t-1}).
    Predicted,
    /// Reweighted by the likelihood and resampled, p(x_t | y_{1:t}).
    FilteredResampled,
    /// Marginal of the pairwise joint, p(x_t | y_{1:t+1}).
    OneStepSmoothed,
}

/// A weighted cloud of state samples at one time step.
#[derive(Clone, Debug)]
pub struct ParticleSet {
    kind: ParticleKind,
    time_index: usize,
    state_dim: usize,
    states: Vec<f64>,
    weights: Vec<f64>,
}

impl ParticleSet {
    pub(crate) fn from_parts(
        kind: ParticleKind,
        time_index: usize,
        state_dim: usize,
        states: Vec<f64>,
        weights: Vec<f64>,
    ) -> ParticleSet {
        assert!(state_dim > 0 && !weights.is_empty());
        assert_eq!(states.len(), weights.len() * state_dim);
        ParticleSet { kind, time_index, state_dim, states, weights }
    }

    /// Assemble a cloud from raw parts; weights must be nonnegative with a
    /// positive finite sum and are normalized when they do not already sum
    /// to one.
    pub fn new(
        kind: ParticleKind,
        time_index: usize,
        state_dim: usize,
        states: Vec<f64>,
        mut weights: Vec<f64>,
    ) -> ParticleSet {
        let sum: f64 = weights.iter().sum();
        assert!(sum > 0.0 && sum.is_finite(), "weights must have positive finite mass");
        assert!(weights.iter().all(|&w| w >= 0.0), "weights must be nonnegative");
        if (sum - 1.0).abs() > 1e-12 {
            for w in &mut weights {
                *w /= sum;
            }
        }
        ParticleSet::from_parts(kind, time_index, state_dim, states, weights)
    }

    /// N i.i.d. prior draws with uniform weights.
    pub fn from_prior(model: &dyn Ssm, n: usize, rng: &mut dyn RngCore) -> ParticleSet {
        assert!(n >= 1, "particle count must be at least 1");
        let dim = model.state_dim();
        let mut states = Vec::with_capacity(n * dim);
        for _ in 0..n {
            states.extend_from_slice(&model.prior().sample(rng));
        }
        ParticleSet {
            kind: ParticleKind::Prior,
            time_index: 0,
            state_dim: dim,
            states,
            weights: vec![1.0 / n as f64; n],
        }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn kind(&self) -> ParticleKind {
        self.kind
    }

    pub fn time_index(&self) -> usize {
        self.time_index
    }

    pub fn state_dim(&self) -> usize {
        self.state_dim
    }

    pub fn particle(&self, i: usize) -> &[f64] {
        &self.states[i * self.state_dim..(i + 1) * self.state_dim]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub(crate) fn states_flat(&self) -> &[f64] {
        &self.states
    }

    /// Effective sample size `1 / sum(w_i^2)`.
    pub fn ess(&self) -> f64 {
        1.0 / self.weights.iter().map(|w| w * w).sum::<f64>()
    }

    pub fn weighted_mean(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.state_dim];
        for (i, w) in self.weights.iter().enumerate() {
            for (o, v) in out.iter_mut().zip(self.particle(i)) {
                *o += w * v;
            }
        }
        out
    }

    fn uniform_weight_cloud(&self) -> bool {
        matches!(
            self.kind,
            ParticleKind::Prior | ParticleKind::FilteredResampled | ParticleKind::OneStepSmoothed
        )
    }

    /// Propagate every particle through the state transition; the source
    /// cloud must be equally weighted (prior or resampled).
    pub fn predict(&self, model: &dyn Ssm, rng: &mut dyn RngCore) -> ParticleSet {
        assert!(
            self.uniform_weight_cloud(),
            "predict requires an equally weighted source cloud"
        );
        let t = self.time_index;
        let mut states = Vec::with_capacity(self.states.len());
        for i in 0..self.len() {
            states.extend_from_slice(&model.sample_transition(self.particle(i), t, rng));
        }
        ParticleSet {
            kind: ParticleKind::Predicted,
            time_index: t + 1,
            state_dim: self.state_dim,
            states,
            weights: vec![1.0 / self.len() as f64; self.len()],
        }
    }

    /// Reweight a predicted cloud against a measurement: `w_i'
    /// proportional to w_i p(y | x_i)`, normalized. Fails with
    /// `AllWeightsZero` when every likelihood underflows.
    pub fn update_weights(&self, y: &[f64], model: &dyn Ssm) -> Result<ParticleSet> {
        assert_eq!(self.kind, ParticleKind::Predicted, "update_weights takes a predicted cloud");
        let mut log_w: Vec<f64> = (0..self.len())
            .map(|i| self.weights[i].ln() + model.log_likelihood(y, self.particle(i)))
            .collect();
        let max = log_w.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if !max.is_finite() {
            return Err(Error::AllWeightsZero);
        }
        let mut sum = 0.0;
        for lw in &mut log_w {
            *lw = (*lw - max).exp();
            sum += *lw;
        }
        for lw in &mut log_w {
            *lw /= sum;
        }
        Ok(ParticleSet {
            kind: ParticleKind::Predicted,
            time_index: self.time_index,
            state_dim: self.state_dim,
            states: self.states.clone(),
            weights: log_w,
        })
    }

    /// Systematic resampling with a caller-supplied stratum offset
    /// `u0 in [0, 1)`: selection points `(u0 + k)/N` against the weight CDF.
    pub fn resample_with_offset(&self, u0: f64) -> ParticleSet {
        assert!((0.0..1.0).contains(&u0));
        let n = self.len();
        let dim = self.state_dim;
        let mut states = Vec::with_capacity(n * dim);
        let mut i = 0;
        let mut cum = self.weights[0];
        for k in 0..n {
            let u = (u0 + k as f64) / n as f64;
            while i + 1 < n && u >= cum {
                i += 1;
                cum += self.weights[i];
            }
            states.extend_from_slice(self.particle(i));
        }
        ParticleSet {
            kind: ParticleKind::FilteredResampled,
            time_index: self.time_index,
            state_dim: dim,
            states,
            weights: vec![1.0 / n as f64; n],
        }
    }

    /// Systematic resampling with one shared uniform offset per call.
    pub fn systematic_resample(&self, rng: &mut dyn RngCore) -> ParticleSet {
        self.resample_with_offset(rng.gen::<f64>())
    }
}
