//! Body angular velocity of the target, `ω_r(t)`.

use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::so3::BodyRate;

/// Target velocity profile.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub enum ReferenceKind {
    /// `t·sin(3t)` on every axis. Grows without bound.
    #[default]
    PaperSim,
    Constant { amplitude: BodyRate },
    /// `amplitude ⊙ sin(frequency·t + phase)`, componentwise.
    Sinusoid {
        amplitude: BodyRate,
        frequency: BodyRate,
        phase: BodyRate,
    },
    Zero,
}

impl ReferenceKind {
    pub fn name(&self) -> &'static str {
        match self {
            ReferenceKind::PaperSim => "paper_sim",
            ReferenceKind::Constant { .. } => "constant",
            ReferenceKind::Sinusoid { .. } => "sinusoid",
            ReferenceKind::Zero => "zero",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = |v: &BodyRate| v.iter().all(|x| x.is_finite());
        match self {
            ReferenceKind::Constant { amplitude } if !finite(amplitude) => Err(
                Error::InvalidParameter("reference amplitude must be finite".into()),
            ),
            ReferenceKind::Sinusoid {
                amplitude,
                frequency,
                phase,
            } => {
                if !(finite(amplitude) && finite(frequency) && finite(phase)) {
                    Err(Error::InvalidParameter(
                        "reference parameters must be finite".into(),
                    ))
                } else if frequency.iter().any(|&w| w < 0.0) {
                    Err(Error::InvalidParameter(
                        "reference frequency must be non-negative".into(),
                    ))
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }

    /// `ω_r(t)` in the target body frame.
    pub fn sample(&self, t: f64) -> BodyRate {
        match self {
            ReferenceKind::PaperSim => {
                let w = t * (3.0 * t).sin();
                Vector3::new(w, w, w)
            }
            ReferenceKind::Constant { amplitude } => *amplitude,
            ReferenceKind::Sinusoid {
                amplitude,
                frequency,
                phase,
            } => Vector3::from_fn(|i, _| amplitude[i] * (frequency[i] * t + phase[i]).sin()),
            ReferenceKind::Zero => Vector3::zeros(),
        }
    }
}
