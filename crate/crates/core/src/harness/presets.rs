//! Reproduction presets binding every benchmark constant to a named run.

use super::config::{ModelId, RunConfig};

/// A named, fully pinned configuration plus a provenance note for every
/// numeric constant it carries.
#[derive(Clone, Copy, Debug)]
pub struct Preset {
    pub name: &'static str,
    pub note: &'static str,
    model: ModelId,
    case: Option<&'static str>,
    n_particles: usize,
    m_sequences: usize,
    horizon_steps: usize,
    seed: u64,
    /// Full-size ensemble switched on by the `--paper-scale` flag.
    paper_scale: Option<(usize, usize)>,
}

const PRESETS: &[Preset] = &[
    Preset {
        name: "linear-sanity",
        note: "scalar linear-Gaussian model (a=0.9, c=1, q=1, r=1, x0~N(0,1)); \
               the bound equals the Kalman covariance recursion exactly, so the \
               quality metric against the reference collapses to zero",
        model: ModelId::LinearGaussian,
        case: Some("scalar"),
        n_particles: 50,
        m_sequences: 5,
        horizon_steps: 50,
        seed: 101,
        paper_scale: None,
    },
    Preset {
        name: "example2-gaussian",
        note: "univariate non-stationary growth benchmark with Gaussian sensor \
               noise: q=5e-3, r=1e-3, x0~N(0,0.01), N=100, M=200, T=30",
        model: ModelId::UngmGaussian,
        case: None,
        n_particles: 100,
        m_sequences: 200,
        horizon_steps: 30,
        seed: 202,
        paper_scale: None,
    },
    Preset {
        name: "example2-rayleigh",
        note: "univariate non-stationary growth benchmark with Rayleigh sensor \
               noise: q=5e-3, rayleigh scale_sq=1e-3, x0~N(0,0.01), N=100, \
               M=200, T=30",
        model: ModelId::UngmRayleigh,
        case: None,
        n_particles: 100,
        m_sequences: 200,
        horizon_steps: 30,
        seed: 303,
        paper_scale: None,
    },
    Preset {
        name: "ballistic-case1",
        note: "re-entry tracking, low state and sensor noise: gamma=1.0, \
               sigma_r=100 m, sigma_e=0.017 rad; g=9.8 m/s^2, beta=40000, \
               dt=2 s, 60 steps; desk scale M=50, N=500 (full scale via --paper-scale: M=200, N=1000)",
        model: ModelId::Ballistic,
        case: Some("1"),
        n_particles: 500,
        m_sequences: 50,
        horizon_steps: 60,
        seed: 401,
        paper_scale: Some((1000, 200)),
    },
    Preset {
        name: "ballistic-case2",
        note: "re-entry tracking, raised state noise: gamma=5.0, sigma_r=100 m, \
               sigma_e=0.017 rad; desk scale M=50, N=500 (full scale via --paper-scale: M=200, N=1000)",
        model: ModelId::Ballistic,
        case: Some("2"),
        n_particles: 500,
        m_sequences: 50,
        horizon_steps: 60,
        seed: 402,
        paper_scale: Some((1000, 200)),
    },
    Preset {
        name: "ballistic-case3",
        note: "re-entry tracking, raised sensor noise: gamma=1.0, sigma_r=500 m, \
               sigma_e=0.085 rad; desk scale M=50, N=500 (full scale via --paper-scale: M=200, N=1000)",
        model: ModelId::Ballistic,
        case: Some("3"),
        n_particles: 500,
        m_sequences: 50,
        horizon_steps: 60,
        seed: 403,
        paper_scale: Some((1000, 200)),
    },
    Preset {
        name: "ballistic-case4",
        note: "re-entry tracking, raised state and sensor noise: gamma=5.0, \
               sigma_r=500 m, sigma_e=0.085 rad; desk scale M=50, N=500 \
               (full scale via --paper-scale: M=200, N=1000)",
        model: ModelId::Ballistic,
        case: Some("4"),
        n_particles: 500,
        m_sequences: 50,
        horizon_steps: 60,
        seed: 404,
        paper_scale: Some((1000, 200)),
    },
];

pub fn presets() -> &'static [Preset] {
    PRESETS
}

pub fn preset_names() -> Vec<&'static str> {
    PRESETS.iter().map(|p| p.name).collect()
}

/// Resolve a preset into a run configuration; `paper_scale` switches the
/// full-size ensemble on where one is defined.
pub fn preset(name: &str, paper_scale: bool) -> Option<RunConfig> {
    let p = PRESETS.iter().find(|p| p.name == name)?;
    let (n, m) = match (paper_scale, p.paper_scale) {
        (true, Some(scale)) => scale,
        _ => (p.n_particles, p.m_sequences),
    };
    Some(RunConfig {
        model: p.model,
        case: p.case.map(str::to_string),
        n_particles: n,
        m_sequences: m,
        horizon_steps: p.horizon_steps,
        seed: p.seed,
        emit_theory: true,
        out_dir: None,
        emit_history: false,
        workers: None,
    })
}
