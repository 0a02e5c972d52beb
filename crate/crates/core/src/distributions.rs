//! Noise laws: multivariate Gaussian and scalar Rayleigh.
//!
//! Gaussian laws cache their Cholesky factor at construction since the noise
//! covariances are time-invariant in every built-in model. The Rayleigh law
//! exposes analytic first and second log-density derivatives, which the
//! general-model bound engine consumes.

use rand::RngCore;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::numkit::Matrix;

const LN_2PI: f64 = 1.8378770664093453;

/// Draw a standard normal variate from any RNG.
pub fn standard_normal(rng: &mut dyn RngCore) -> f64 {
    StandardNormal.sample(&mut *rng)
}

/// Multivariate Gaussian with cached Cholesky factor.
#[derive(Clone, Debug)]
pub struct GaussianLaw {
    mean: Vec<f64>,
    cov: Matrix,
    chol: Matrix,
    log_norm: f64,
}

impl GaussianLaw {
    /// Build a law from a mean vector and an SPD covariance.
    pub fn new(mean: Vec<f64>, cov: Matrix) -> Result<GaussianLaw> {
        if cov.dim() != mean.len() {
            return Err(Error::DimensionMismatch("mean and covariance dimensions disagree"));
        }
        if !cov.is_symmetric() {
            return Err(Error::DimensionMismatch("covariance is not symmetric"));
        }
        let chol = cov.cholesky()?;
        let d = mean.len();
        let log_det: f64 = (0..d).map(|i| chol[(i, i)].ln()).sum::<f64>() * 2.0;
        let log_norm = -0.5 * (d as f64 * LN_2PI + log_det);
        Ok(GaussianLaw { mean, cov, chol, log_norm })
    }

    /// Zero-mean law, the usual shape for process and sensor noise.
    pub fn zero_mean(cov: Matrix) -> Result<GaussianLaw> {
        let d = cov.dim();
        GaussianLaw::new(vec![0.0; d], cov)
    }

    /// Scalar N(mean, variance).
    pub fn scalar(mean: f64, variance: f64) -> Result<GaussianLaw> {
        GaussianLaw::new(vec![mean], Matrix::scalar(variance))
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn cov(&self) -> &Matrix {
        &self.cov
    }

    /// `mean + L z` for a caller-supplied standard-normal vector `z`.
    pub fn sample_with_z(&self, z: &[f64]) -> Vec<f64> {
        assert_eq!(z.len(), self.dim());
        let d = self.dim();
        let mut out = self.mean.clone();
        for i in 0..d {
            for j in 0..=i {
                out[i] += self.chol[(i, j)] * z[j];
            }
        }
        out
    }

    /// Draw one sample; deterministic given the RNG state.
    pub fn sample(&self, rng: &mut dyn RngCore) -> Vec<f64> {
        let z: Vec<f64> = (0..self.dim()).map(|_| standard_normal(rng)).collect();
        self.sample_with_z(&z)
    }

    /// Exact log-density including the normalizing constant.
    pub fn logpdf(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch("logpdf argument dimension disagrees"));
        }
        let mut resid = [0.0f64; 16];
        let d = self.dim();
        if d <= 16 {
            for i in 0..d {
                resid[i] = x[i] - self.mean[i];
            }
            Ok(self.log_density_of_residual(&resid[..d]))
        } else {
            let resid: Vec<f64> = x.iter().zip(&self.mean).map(|(a, b)| a - b).collect();
            Ok(self.log_density_of_residual(&resid))
        }
    }

    /// Log-density of a residual `x - mean`, the hot path of the pairwise
    /// smoothing kernel. Allocation-free for dimensions up to 16.
    pub fn log_density_of_residual(&self, resid: &[f64]) -> f64 {
        let d = self.dim();
        debug_assert_eq!(resid.len(), d);
        let mut stack = [0.0f64; 16];
        let mut heap;
        let z: &mut [f64] = if d <= 16 {
            &mut stack[..d]
        } else {
            heap = vec![0.0; d];
            &mut heap
        };
        // forward solve L z = resid
        for i in 0..d {
            let mut s = resid[i];
            for j in 0..i {
                s -= self.chol[(i, j)] * z[j];
            }
            z[i] = s / self.chol[(i, i)];
        }
        let quad: f64 = z.iter().map(|v| v * v).sum();
        self.log_norm - 0.5 * quad
    }
}

/// Scalar Rayleigh law parameterized by the squared scale sigma^2, so that
/// `logpdf(w) = ln(w / sigma^2) - w^2 / (2 sigma^2)` on w > 0.
#[derive(Clone, Copy, Debug)]
pub struct RayleighLaw {
    scale_sq: f64,
}

impl RayleighLaw {
    pub fn new(scale_sq: f64) -> Result<RayleighLaw> {
        if scale_sq <= 0.0 || !scale_sq.is_finite() {
            return Err(Error::Config(format!("rayleigh scale_sq must be positive, got {scale_sq}")));
        }
        Ok(RayleighLaw { scale_sq })
    }

    pub fn scale_sq(&self) -> f64 {
        self.scale_sq
    }

    /// Log-density; `-inf` off the nonnegative support.
    pub fn logpdf(&self, w: f64) -> f64 {
        if w <= 0.0 {
            f64::NEG_INFINITY
        } else {
            (w / self.scale_sq).ln() - w * w / (2.0 * self.scale_sq)
        }
    }

    /// Log-density plus its first and second derivatives in w:
    /// `d1 = 1/w - w/sigma^2`, `d2 = -1/w^2 - 1/sigma^2`.
    pub fn logpdf_derivs(&self, w: f64) -> Result<(f64, f64, f64)> {
        if w <= 0.0 {
            return Err(Error::OutOfSupport("rayleigh derivatives need w > 0"));
        }
        let s2 = self.scale_sq;
        Ok((
            self.logpdf(w),
            1.0 / w - w / s2,
            -1.0 / (w * w) - 1.0 / s2,
        ))
    }

    pub fn sample(&self, rng: &mut dyn RngCore) -> f64 {
        let u: f64 = rand::Rng::gen(&mut *rng);
        (self.scale_sq * (-2.0 * (1.0 - u).ln())).sqrt()
    }
}
