//! Bound engines.
//!
//! The posterior Fisher information J_t advances through
//! `J_{t+1} = D22 - D12^T (J_t + D11)^{-1} D12`, where the D blocks are
//! expectations of log-density curvature over the joint law of states and
//! measurements. Two estimators are provided:
//!
//! - [`run_bound`] approximates the expectations from measurement sequences
//!   alone, replacing the hidden states with one-step-smoothed and predicted
//!   particle clouds (the additive-Gaussian path averages Jacobian products;
//!   the general path averages log-density Hessians at pair particles);
//! - [`theoretical_bound`] plugs simulated true states into the same
//!   integrands, the Monte-Carlo reference the approximation is judged
//!   against.
//!
//! Both record the bound `J_t^{-1}` through the direct inversion-lemma step
//! and advance `J_t` itself through the information step; the two routes are
//! kept as independent code paths and cross-checked in the test suites.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numkit::{invert_spd, pcrlb_inverse_step, pfim_step, Matrix};
use crate::particle::ParticleSet;
use crate::smoother::{pairwise_weights, PairParticleSet};
use crate::ssm::{derive_stream, simulate, stream_rng, GaussianSsm, GeneralSsm, Ssm, Trajectory};
use crate::distributions::GaussianLaw;

/// Which bound path a model drives.
#[derive(Clone, Copy)]
pub enum ModelRef<'a> {
    /// Additive Gaussian state and sensor noise; D blocks average
    /// `grad_f^T Q^{-1} grad_f` and `grad_g^T R^{-1} grad_g`.
    Gaussian(&'a dyn GaussianSsm),
    /// General sensor noise; D blocks average log-density Hessians.
    General(&'a dyn GeneralSsm),
}

impl<'a> ModelRef<'a> {
    pub fn ssm(&self) -> &'a dyn Ssm {
        match self {
            ModelRef::Gaussian(m) => *m,
            ModelRef::General(m) => *m,
        }
    }
}

/// Engine parameters for one bound run.
#[derive(Clone, Copy, Debug)]
pub struct EngineConfig {
    pub n_particles: usize,
    pub seed: u64,
    /// Retain per-step D blocks and both recursion outputs.
    pub keep_history: bool,
    /// How many times a degenerate weighting step (every likelihood zero,
    /// possible under hard-support sensor noise) may redraw its prediction
    /// with fresh transition noise before the run aborts. Retried steps are
    /// counted in the run notes.
    pub max_weight_retries: usize,
}

impl EngineConfig {
    pub fn new(n_particles: usize, seed: u64) -> EngineConfig {
        EngineConfig {
            n_particles,
            seed,
            keep_history: false,
            max_weight_retries: DEFAULT_WEIGHT_RETRIES,
        }
    }
}

/// Default retry budget for degenerate weighting steps.
pub const DEFAULT_WEIGHT_RETRIES: usize = 25;

/// Everything recorded about one recursion step.
#[derive(Clone, Debug)]
pub struct StepRecord {
    pub d11: Matrix,
    pub d12: Matrix,
    pub d22: Matrix,
    pub pfim: Matrix,
    pub pcrlb: Matrix,
}

/// Run identification carried alongside a bound series.
#[derive(Clone, Debug, Default)]
pub struct RunMeta {
    pub model_id: String,
    pub case_id: Option<String>,
    pub n_particles: usize,
    pub m_sequences: usize,
    pub horizon: usize,
    pub seed: u64,
    pub notes: Vec<String>,
}

/// Per-step bound matrices `J_t^{-1}` for t = 1..=T plus run metadata.
#[derive(Clone, Debug)]
pub struct BoundSeries {
    pub state_dim: usize,
    pub j0: Matrix,
    /// `J_t^{-1}` from the direct inversion-lemma recursion, t = 1..=T.
    pub pcrlb: Vec<Matrix>,
    /// `J_t` from the information recursion, t = 1..=T.
    pub pfim: Vec<Matrix>,
    pub meta: RunMeta,
    pub history: Option<Vec<StepRecord>>,
}

impl BoundSeries {
    pub fn horizon(&self) -> usize {
        self.pcrlb.len()
    }

    /// Re-express the series in rescaled state units (`unit` new units per
    /// old unit, e.g. 1e-3 for meters to kilometers). Bound matrices carry
    /// squared state units; information matrices carry their inverse.
    pub fn rescale_units(&mut self, unit: f64) {
        let b = unit * unit;
        for m in &mut self.pcrlb {
            *m = m.scale(b);
        }
        for m in &mut self.pfim {
            *m = m.scale(1.0 / b);
        }
        self.j0 = self.j0.scale(1.0 / b);
        if let Some(history) = &mut self.history {
            for rec in history {
                rec.pcrlb = rec.pcrlb.scale(b);
                rec.pfim = rec.pfim.scale(1.0 / b);
                rec.d11 = rec.d11.scale(1.0 / b);
                rec.d12 = rec.d12.scale(1.0 / b);
                rec.d22 = rec.d22.scale(1.0 / b);
            }
        }
    }

    /// sqrt of the diagonal of `J_t^{-1}` at step index `k` (t = k + 1).
    pub fn sqrt_diagonal(&self, k: usize) -> Vec<f64> {
        (0..self.state_dim)
            .map(|s| self.pcrlb[k][(s, s)].max(0.0).sqrt())
            .collect()
    }
}

/// Time-averaged elementwise squared error between two bound series.
#[derive(Clone, Debug)]
pub struct QualityMetric {
    pub lambda: Matrix,
}

impl QualityMetric {
    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.lambda.dim()).map(|i| self.lambda[(i, i)]).collect()
    }
}

/// Information content of a Gaussian initial-state law: `J_0 = P_0^{-1}`.
pub fn j0_gaussian(prior: &GaussianLaw) -> Result<Matrix> {
    invert_spd(prior.cov())
}

/// The running information recursion.
pub struct FisherRecursion {
    j: Matrix,
    t: usize,
    history: Option<Vec<StepRecord>>,
}

impl FisherRecursion {
    pub fn new(j0: Matrix, keep_history: bool) -> FisherRecursion {
        FisherRecursion {
            j: j0,
            t: 0,
            history: if keep_history { Some(Vec::new()) } else { None },
        }
    }

    pub fn current(&self) -> &Matrix {
        &self.j
    }

    pub fn time_index(&self) -> usize {
        self.t
    }

    /// Advance one step; returns `(J_{t+1}, J_{t+1}^{-1})` where the inverse
    /// comes from the direct recursion, not from inverting `J_{t+1}`.
    pub fn step(&mut self, d11: &Matrix, d12: &Matrix, d22: &Matrix) -> Result<(Matrix, Matrix)> {
        let bound = pcrlb_inverse_step(&self.j, d11, d12, d22)?;
        let j_next = pfim_step(&self.j, d11, d12, d22)?;
        if let Some(h) = &mut self.history {
            h.push(StepRecord {
                d11: d11.clone(),
                d12: d12.clone(),
                d22: d22.clone(),
                pfim: j_next.clone(),
                pcrlb: bound.clone(),
            });
        }
        self.j = j_next.clone();
        self.t += 1;
        Ok((j_next, bound))
    }

    pub fn into_history(self) -> Option<Vec<StepRecord>> {
        self.history
    }
}

/// Sum over one smoothed/predicted cloud pair of the additive-Gaussian
/// integrands: `(sum grad_f^T Q^{-1} grad_f, sum -grad_f^T Q^{-1},
/// sum grad_g^T R^{-1} grad_g)`.
fn gaussian_sums(
    model: &dyn GaussianSsm,
    q_inv: &Matrix,
    r_inv: &Matrix,
    smoothed: &ParticleSet,
    predicted: &ParticleSet,
) -> Result<(Matrix, Matrix, Matrix)> {
    let n = model.state_dim();
    let mut s11 = Matrix::zeros(n, n);
    let mut s12 = Matrix::zeros(n, n);
    let mut s22 = Matrix::zeros(n, n);
    let t = smoothed.time_index();
    for i in 0..smoothed.len() {
        let jf = model
            .grad_f(smoothed.particle(i), t)
            .map_err(|e| Error::AtParticle { particle: i, source: Box::new(e) })?;
        let jft_qinv = jf.transpose().matmul(q_inv);
        s11.add_assign(&jft_qinv.matmul(&jf));
        s12.add_assign(&jft_qinv.scale(-1.0));
    }
    for i in 0..predicted.len() {
        let jg = model
            .grad_g(predicted.particle(i))
            .map_err(|e| Error::AtParticle { particle: i, source: Box::new(e) })?;
        s22.add_assign(&jg.transpose().matmul(r_inv).matmul(&jg));
    }
    Ok((s11, s12, s22))
}

/// Sum over one resampled pair cloud of the general-model integrands: the
/// negated Hessian blocks of the transition log-density at the pair
/// particles, with the measurement log-likelihood Hessian folded into the
/// third block.
fn general_sums(
    model: &dyn GeneralSsm,
    pairs: &PairParticleSet,
    y_next: &[f64],
) -> Result<(Matrix, Matrix, Matrix)> {
    let n = model.state_dim();
    let mut s11 = Matrix::zeros(n, n);
    let mut s12 = Matrix::zeros(n, n);
    let mut s22 = Matrix::zeros(n, n);
    let t = pairs.time_index();
    for i in 0..pairs.len() {
        let (xt, xt1) = pairs.pair(i);
        let wrap = |e: Error| Error::AtParticle { particle: i, source: Box::new(e) };
        let (h11, h12, h22) = model.log_transition_hessians(xt1, xt, t).map_err(wrap)?;
        let hl = model.log_likelihood_hessian(y_next, xt1).map_err(wrap)?;
        s11.add_assign(&h11.scale(-1.0));
        s12.add_assign(&h12.scale(-1.0));
        s22.add_assign(&h22.add(&hl).scale(-1.0));
    }
    Ok((s11, s12, s22))
}

fn check_cloud_shapes(sets: &[ParticleSet]) -> Result<usize> {
    let m = sets.len();
    if m == 0 {
        return Err(Error::Config("at least one sequence is required".into()));
    }
    let n = sets[0].len();
    if sets.iter().any(|s| s.len() != n) {
        return Err(Error::DimensionMismatch("particle counts differ across sequences"));
    }
    Ok(n)
}

/// Average the additive-Gaussian D-block integrands over M sequences of
/// smoothed (time t) and predicted (time t+1) clouds:
///
/// `D11 = mean grad_f^T Q^{-1} grad_f`, `D12 = -mean grad_f^T Q^{-1}`,
/// `D22 = Q^{-1} + mean grad_g^T R^{-1} grad_g`.
///
/// The `Q^{-1}` term of D22 is exact by construction and never estimated.
pub fn d_blocks_gaussian(
    smoothed: &[ParticleSet],
    predicted: &[ParticleSet],
    model: &dyn GaussianSsm,
) -> Result<(Matrix, Matrix, Matrix)> {
    if smoothed.len() != predicted.len() {
        return Err(Error::DimensionMismatch("smoothed/predicted sequence counts differ"));
    }
    let n_particles = check_cloud_shapes(smoothed)?;
    let q_inv = invert_spd(model.q())?;
    let r_inv = invert_spd(model.r())?;
    let n = model.state_dim();
    let mut s11 = Matrix::zeros(n, n);
    let mut s12 = Matrix::zeros(n, n);
    let mut s22 = Matrix::zeros(n, n);
    for (j, (sm, pr)) in smoothed.iter().zip(predicted).enumerate() {
        let t = sm.time_index();
        let (a, b, c) = gaussian_sums(model, &q_inv, &r_inv, sm, pr)
            .map_err(|e| e.at_step(j, t))?;
        s11.add_assign(&a);
        s12.add_assign(&b);
        s22.add_assign(&c);
    }
    let scale = 1.0 / (smoothed.len() * n_particles) as f64;
    Ok((
        s11.scale(scale),
        s12.scale(scale),
        q_inv.add(&s22.scale(scale)),
    ))
}

/// Average the general-model D-block integrands over M sequences of
/// resampled pair clouds, with `ys[j]` the measurement at time t+1 of
/// sequence j.
pub fn d_blocks_general(
    pairs_by_seq: &[PairParticleSet],
    ys: &[&[f64]],
    model: &dyn GeneralSsm,
) -> Result<(Matrix, Matrix, Matrix)> {
    let m = pairs_by_seq.len();
    if m == 0 {
        return Err(Error::Config("at least one sequence is required".into()));
    }
    if ys.len() != m {
        return Err(Error::DimensionMismatch("one measurement per sequence is required"));
    }
    let n_particles = pairs_by_seq[0].len();
    if pairs_by_seq.iter().any(|p| p.len() != n_particles) {
        return Err(Error::DimensionMismatch("pair counts differ across sequences"));
    }
    let n = model.state_dim();
    let mut s11 = Matrix::zeros(n, n);
    let mut s12 = Matrix::zeros(n, n);
    let mut s22 = Matrix::zeros(n, n);
    for (j, pairs) in pairs_by_seq.iter().enumerate() {
        let (a, b, c) =
            general_sums(model, pairs, ys[j]).map_err(|e| e.at_step(j, pairs.time_index()))?;
        s11.add_assign(&a);
        s12.add_assign(&b);
        s22.add_assign(&c);
    }
    let scale = 1.0 / (m * n_particles) as f64;
    Ok((s11.scale(scale), s12.scale(scale), s22.scale(scale)))
}

/// What one sequence's pipeline produced.
enum SeqOutcome {
    /// Per-step integrand sums plus the number of degenerate weighting
    /// steps that were recovered by redrawing the prediction.
    Completed(Vec<(Matrix, Matrix, Matrix)>, usize),
    /// The filter lost the state irrecoverably at step t: every particle
    /// likelihood (or every pairwise transition density) stayed zero
    /// through the whole retry budget.
    Diverged { t: usize },
}

/// Per-sequence particle pipeline: SIR filter, pairwise smoothing, and the
/// per-step integrand sums. Stream `2 j + 1` of the master seed drives all
/// randomness of sequence j.
fn sequence_sums(
    model: &ModelRef,
    cfg: &EngineConfig,
    j: usize,
    ys: &[Vec<f64>],
    q_inv: &Option<(Matrix, Matrix)>,
) -> Result<SeqOutcome> {
    let ssm = model.ssm();
    let mut rng = stream_rng(cfg.seed, 2 * j as u64 + 1);
    let mut filtered_prev = ParticleSet::from_prior(ssm, cfg.n_particles, &mut rng);
    let mut out = Vec::with_capacity(ys.len());
    let mut retries_used = 0usize;
    for (step, y) in ys.iter().enumerate() {
        let t = step + 1;
        let mut attempt = 0;
        let (predicted, weighted) = loop {
            let predicted = filtered_prev.predict(ssm, &mut rng);
            match predicted.update_weights(y, ssm) {
                Ok(weighted) => break (predicted, weighted),
                Err(Error::AllWeightsZero) if attempt < cfg.max_weight_retries => {
                    attempt += 1;
                    retries_used += 1;
                }
                Err(Error::AllWeightsZero) => return Ok(SeqOutcome::Diverged { t }),
                Err(e) => return Err(e.at_step(j, t)),
            }
        };
        let filtered = weighted.systematic_resample(&mut rng);
        let pairs = match pairwise_weights(&filtered_prev, &filtered, ssm) {
            Ok(pairs) => pairs.resample_pairs(&mut rng),
            Err(Error::ZeroTransitionMass) => return Ok(SeqOutcome::Diverged { t }),
            Err(e) => return Err(e.at_step(j, t)),
        };
        let sums = match model {
            ModelRef::Gaussian(g) => {
                let (q_inv, r_inv) = q_inv.as_ref().expect("gaussian path has cached inverses");
                let smoothed = pairs.marginal_t();
                gaussian_sums(*g, q_inv, r_inv, &smoothed, &predicted)
            }
            ModelRef::General(g) => general_sums(*g, &pairs, y),
        }
        .map_err(|e| e.at_step(j, t))?;
        out.push(sums);
        filtered_prev = filtered;
    }
    Ok(SeqOutcome::Completed(out, retries_used))
}

fn validate_sequences(sequences: &[Vec<Vec<f64>>]) -> Result<usize> {
    if sequences.is_empty() {
        return Err(Error::Config("at least one measurement sequence is required".into()));
    }
    let horizon = sequences[0].len();
    if sequences.iter().any(|s| s.len() != horizon) {
        return Err(Error::Config("measurement sequences must share one horizon".into()));
    }
    Ok(horizon)
}

fn assemble_series(
    model: &ModelRef,
    per_step_sums: Vec<(Matrix, Matrix, Matrix)>,
    divisor: f64,
    q_inv: Option<&Matrix>,
    keep_history: bool,
    meta: RunMeta,
) -> Result<BoundSeries> {
    let ssm = model.ssm();
    let j0 = j0_gaussian(ssm.prior())?;
    let mut recursion = FisherRecursion::new(j0.clone(), keep_history);
    let mut pcrlb = Vec::with_capacity(per_step_sums.len());
    let mut pfim = Vec::with_capacity(per_step_sums.len());
    for (step, (s11, s12, s22)) in per_step_sums.into_iter().enumerate() {
        let d11 = s11.scale(1.0 / divisor);
        let d12 = s12.scale(1.0 / divisor);
        let d22 = match (model, q_inv) {
            (ModelRef::Gaussian(_), Some(q_inv)) => q_inv.add(&s22.scale(1.0 / divisor)),
            _ => s22.scale(1.0 / divisor),
        };
        let (j_next, bound) = recursion.step(&d11, &d12, &d22).map_err(|e| {
            Error::AtRecursionStep { t: step + 1, source: Box::new(e) }
        })?;
        pfim.push(j_next);
        pcrlb.push(bound);
    }
    let history = recursion.into_history();
    Ok(BoundSeries {
        state_dim: ssm.state_dim(),
        j0,
        pcrlb,
        pfim,
        meta,
        history,
    })
}

/// Approximate the bound from measurement sequences alone.
///
/// Per sequence j and step t the filter produces the predicted cloud at t,
/// the filtered cloud at t, and the resampled (t-1, t) pair cloud; the
/// integrand sums are averaged over all sequences in fixed j order and fed
/// to the recursion. Sequences run in parallel; the reduction order is
/// deterministic, so reports do not depend on the worker count.
pub fn run_bound(
    model: &ModelRef,
    cfg: &EngineConfig,
    sequences: &[Vec<Vec<f64>>],
) -> Result<BoundSeries> {
    if cfg.n_particles == 0 {
        return Err(Error::Config("n_particles must be at least 1".into()));
    }
    let horizon = validate_sequences(sequences)?;
    let m = sequences.len();
    let cached = match model {
        ModelRef::Gaussian(g) => Some((invert_spd(g.q())?, invert_spd(g.r())?)),
        ModelRef::General(_) => None,
    };
    let mut meta = RunMeta {
        n_particles: cfg.n_particles,
        m_sequences: m,
        horizon,
        seed: cfg.seed,
        ..RunMeta::default()
    };
    if horizon == 0 {
        return assemble_series(model, Vec::new(), 1.0, None, cfg.keep_history, meta);
    }

    let per_seq: Vec<SeqOutcome> = {
        let results: Result<Vec<_>> = (0..m)
            .into_par_iter()
            .map(|j| sequence_sums(model, cfg, j, &sequences[j], &cached))
            .collect();
        results?
    };

    // Sequences whose filter diverged irrecoverably are excluded from the
    // ensemble average, with the events reported; a systemic divergence rate
    // aborts the run instead, surfacing the first failing (sequence, step).
    let diverged: Vec<(usize, usize)> = per_seq
        .iter()
        .enumerate()
        .filter_map(|(j, o)| match o {
            SeqOutcome::Diverged { t } => Some((j, *t)),
            SeqOutcome::Completed(..) => None,
        })
        .collect();
    if diverged.len() * 5 > m {
        let (j, t) = diverged[0];
        return Err(Error::AllWeightsZero.at_step(j, t));
    }
    let survivors = m - diverged.len();
    let retried: usize = per_seq
        .iter()
        .map(|o| match o {
            SeqOutcome::Completed(_, r) => *r,
            SeqOutcome::Diverged { .. } => 0,
        })
        .sum();
    if retried > 0 {
        meta.notes.push(format!("degenerate weighting steps redrawn: {retried}"));
    }
    for (j, t) in &diverged {
        meta.notes.push(format!(
            "sequence {j} diverged at step {t} and was excluded from the average"
        ));
    }
    let n = model.ssm().state_dim();
    let mut per_step =
        vec![(Matrix::zeros(n, n), Matrix::zeros(n, n), Matrix::zeros(n, n)); horizon];
    for outcome in &per_seq {
        if let SeqOutcome::Completed(seq, _) = outcome {
            for (acc, s) in per_step.iter_mut().zip(seq) {
                acc.0.add_assign(&s.0);
                acc.1.add_assign(&s.1);
                acc.2.add_assign(&s.2);
            }
        }
    }
    let divisor = (survivors * cfg.n_particles) as f64;
    assemble_series(
        model,
        per_step,
        divisor,
        cached.as_ref().map(|(q, _)| q),
        cfg.keep_history,
        meta,
    )
}

/// Reference bound from an ensemble of simulated true trajectories: the same
/// integrands evaluated at the true states (and, on the general path, the
/// true measurements), averaged over the ensemble.
pub fn theoretical_bound_from(
    model: &ModelRef,
    trajectories: &[Trajectory],
    seed: u64,
    keep_history: bool,
) -> Result<BoundSeries> {
    let m = trajectories.len();
    if m == 0 {
        return Err(Error::Config("at least one trajectory is required".into()));
    }
    let horizon = trajectories[0].horizon();
    if trajectories.iter().any(|tr| tr.horizon() != horizon) {
        return Err(Error::Config("trajectories must share one horizon".into()));
    }
    let cached = match model {
        ModelRef::Gaussian(g) => Some((invert_spd(g.q())?, invert_spd(g.r())?)),
        ModelRef::General(_) => None,
    };
    let n = model.ssm().state_dim();
    let mut per_step =
        vec![(Matrix::zeros(n, n), Matrix::zeros(n, n), Matrix::zeros(n, n)); horizon];
    for (j, traj) in trajectories.iter().enumerate() {
        for step in 0..horizon {
            let x_t = &traj.states[step];
            let x_t1 = &traj.states[step + 1];
            let acc = &mut per_step[step];
            match model {
                ModelRef::Gaussian(g) => {
                    let (q_inv, r_inv) = cached.as_ref().unwrap();
                    let jf = g.grad_f(x_t, step).map_err(|e| e.at_step(j, step))?;
                    let jft_qinv = jf.transpose().matmul(q_inv);
                    acc.0.add_assign(&jft_qinv.matmul(&jf));
                    acc.1.add_assign(&jft_qinv.scale(-1.0));
                    let jg = g.grad_g(x_t1).map_err(|e| e.at_step(j, step + 1))?;
                    acc.2.add_assign(&jg.transpose().matmul(r_inv).matmul(&jg));
                }
                ModelRef::General(g) => {
                    let y = &traj.measurements[step];
                    let (h11, h12, h22) = g
                        .log_transition_hessians(x_t1, x_t, step)
                        .map_err(|e| e.at_step(j, step))?;
                    let hl = g
                        .log_likelihood_hessian(y, x_t1)
                        .map_err(|e| e.at_step(j, step + 1))?;
                    acc.0.add_assign(&h11.scale(-1.0));
                    acc.1.add_assign(&h12.scale(-1.0));
                    acc.2.add_assign(&h22.add(&hl).scale(-1.0));
                }
            }
        }
    }
    let meta = RunMeta {
        n_particles: 0,
        m_sequences: m,
        horizon,
        seed,
        notes: vec!["true-state plug-in reference".into()],
        ..RunMeta::default()
    };
    assemble_series(
        model,
        per_step,
        m as f64,
        cached.as_ref().map(|(q, _)| q),
        keep_history,
        meta,
    )
}

/// Stream-id offset separating the reference ensemble from the measurement
/// ensemble (streams `2 j` / `2 j + 1`) of the same master seed.
const THEORY_STREAM_BASE: u64 = 1 << 32;

/// Simulate a fresh `m`-trajectory ensemble on the theory streams of the
/// master seed and run the true-state reference bound on it. The ensemble is
/// independent of the measurement ensemble feeding [`run_bound`], so the
/// quality metric against this reference carries the Monte-Carlo error of
/// both computations, matching how the reference is produced in practice.
pub fn theoretical_bound(
    model: &ModelRef,
    m: usize,
    horizon: usize,
    seed: u64,
) -> Result<BoundSeries> {
    let ssm = model.ssm();
    let trajectories: Result<Vec<Trajectory>> = (0..m)
        .map(|j| simulate(ssm, horizon, derive_stream(seed, THEORY_STREAM_BASE + j as u64)))
        .collect();
    theoretical_bound_from(model, &trajectories?, seed, false)
}

/// Time-averaged elementwise squared difference between two bound series
/// (Hadamard square of the difference, averaged over t).
pub fn lambda_j(approx: &BoundSeries, reference: &BoundSeries) -> Result<QualityMetric> {
    if approx.state_dim != reference.state_dim {
        return Err(Error::DimensionMismatch("bound series dimensions differ"));
    }
    if approx.horizon() != reference.horizon() {
        return Err(Error::DimensionMismatch("bound series horizons differ"));
    }
    let n = approx.state_dim;
    let mut lambda = Matrix::zeros(n, n);
    let horizon = approx.horizon();
    for k in 0..horizon {
        let diff = approx.pcrlb[k].sub(&reference.pcrlb[k]);
        for i in 0..n {
            for jj in 0..n {
                lambda[(i, jj)] += diff[(i, jj)] * diff[(i, jj)];
            }
        }
    }
    if horizon > 0 {
        lambda = lambda.scale(1.0 / horizon as f64);
    }
    Ok(QualityMetric { lambda })
}
