use thiserror::Error;

/// Errors raised by the SO(3) primitives, the controllers and the integrator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// The relative rotation angle reached the cut locus at pi, where the
    /// principal logarithm (and every controller built on it) is undefined.
    #[error("rotation angle {angle} is at or beyond the logarithm domain limit {limit}")]
    Singularity { angle: f64, limit: f64 },

    #[error("matrix is not skew-symmetric (symmetric part has Frobenius norm {asymmetry:e})")]
    NotSkew { asymmetry: f64 },

    #[error("matrix is not a rotation (orthogonality error {orthogonality:e}, det {det})")]
    NotRotation { orthogonality: f64, det: f64 },

    #[error("cannot project matrix onto SO(3): {0}")]
    Projection(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("non-finite value produced at t = {t}")]
    NonFinite { t: f64 },

    #[error("need at least {needed} samples with positive energy, found {found}")]
    InsufficientSamples { needed: usize, found: usize },

    /// A simulation step failed; `t` is the start time of the failing step.
    #[error("step at t = {t} failed: {source}")]
    Step {
        t: f64,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// True if this error (or the step error wrapping it) is a singularity.
    pub fn is_singularity(&self) -> bool {
        match self {
            Error::Singularity { .. } => true,
            Error::Step { source, .. } => source.is_singularity(),
            _ => false,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
