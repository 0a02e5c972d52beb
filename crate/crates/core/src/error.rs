//! Crate-wide error type.

use std::fmt;

/// Errors raised by the numerical kernels, models, filter and bound engines.
#[derive(Debug)]
pub enum Error {
    /// Cholesky factorization hit a nonpositive pivot.
    NotPositiveDefinite,
    /// Cholesky diagonal ratio exceeded the conditioning guard (1e12).
    IllConditioned,
    /// `(J_t + D11)` is numerically singular in the information recursion.
    SingularInformation,
    /// `D22` or the bracketed inner term of the direct inverse recursion is
    /// numerically singular; the bound step is ill-posed.
    SingularInnerTerm,
    /// Operand shapes do not agree.
    DimensionMismatch(&'static str),
    /// Density derivative requested outside the distribution's support.
    OutOfSupport(&'static str),
    /// Drag-force gradient is undefined at zero velocity.
    SingularGradient,
    /// Bearing (and its gradient) is undefined at zero downrange position.
    UndefinedBearing,
    /// Every particle likelihood underflowed; the filter diverged.
    AllWeightsZero,
    /// Every pairwise transition density underflowed; the filtered clouds at
    /// t and t+1 are incompatible.
    ZeroTransitionMass,
    /// A numerical failure inside the per-sequence pipeline, tagged with the
    /// failing sequence index `seq` (0-based) and time step `t`.
    AtStep {
        seq: usize,
        t: usize,
        source: Box<Error>,
    },
    /// An integrand evaluation failure at one particle.
    AtParticle {
        particle: usize,
        source: Box<Error>,
    },
    /// A failure while advancing the information recursion at step t.
    AtRecursionStep {
        t: usize,
        source: Box<Error>,
    },
    /// Invalid run configuration; the message names the offending field.
    Config(String),
    /// Output I/O failure, tagged with the path.
    Io(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NotPositiveDefinite => write!(f, "matrix is not positive definite"),
            Error::IllConditioned => {
                write!(f, "matrix conditioning guard tripped (Cholesky diagonal ratio > 1e12)")
            }
            Error::SingularInformation => write!(f, "(J + D11) is singular"),
            Error::SingularInnerTerm => {
                write!(f, "singular term in the direct PCRLB inverse recursion")
            }
            Error::DimensionMismatch(what) => write!(f, "dimension mismatch: {what}"),
            Error::OutOfSupport(what) => write!(f, "outside distribution support: {what}"),
            Error::SingularGradient => {
                write!(f, "drag gradient undefined at zero velocity")
            }
            Error::UndefinedBearing => write!(f, "bearing undefined at zero downrange position"),
            Error::AllWeightsZero => write!(f, "all particle weights underflowed to zero"),
            Error::ZeroTransitionMass => {
                write!(f, "all pairwise transition densities underflowed to zero")
            }
            Error::AtStep { seq, t, source } => {
                write!(f, "sequence {seq}, step {t}: {source}")
            }
            Error::AtParticle { particle, source } => {
                write!(f, "particle {particle}: {source}")
            }
            Error::AtRecursionStep { t, source } => {
                write!(f, "recursion step {t}: {source}")
            }
            Error::Config(msg) => write!(f, "config error: {msg}"),
            Error::Io(msg) => write!(f, "i/o error: {msg}"),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::AtStep { source, .. }
            | Error::AtParticle { source, .. }
            | Error::AtRecursionStep { source, .. } => Some(source),
            _ => None,
        }
    }
}

impl Error {
    /// Wrap a per-sequence failure with its (sequence, step) coordinates.
    pub fn at_step(self, seq: usize, t: usize) -> Error {
        Error::AtStep {
            seq,
            t,
            source: Box::new(self),
        }
    }

    /// True for failures of the numerical pipeline (as opposed to config or I/O).
    pub fn is_numerical(&self) -> bool {
        !matches!(self, Error::Config(_) | Error::Io(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
