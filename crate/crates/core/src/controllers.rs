//! Feedback laws for the follower's body velocity.
//!
//! All four laws use only the relative attitude `Q = R₁ᵀR_r` and the target
//! velocity `ω_r`:
//!
//! | law       | feedback term added to `ω_r`            | error measure |
//! |-----------|-----------------------------------------|---------------|
//! | `asy_geo` | `vee(log Q)`                            | `d_R`         |
//! | `ftt_geo` | `vee(log Q) / ‖log Q‖_F`                | `d_R`         |
//! | `asy_fro` | `vee(Q − Qᵀ)`                           | `d_F`         |
//! | `ftt_fro` | `vee(Q − Qᵀ) / ‖R₁ − R_r‖_F`            | `d_F`         |
//!
//! The two finite-time laws are discontinuous at `Q = I`. Below
//! `epsilon_switch` in their own metric they return `ω_r` unchanged, which
//! is the element of the Filippov set that keeps the error at zero.

use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::so3::{axial, log_so3, rotation_angle, BodyRate, Rotation, LOG_MARGIN};

pub const DEFAULT_EPSILON_SWITCH: f64 = 1e-9;

/// Which distance a control law measures the tracking error in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Metric {
    Geodesic,
    Frobenius,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ControlLaw {
    AsyGeo,
    FttGeo,
    AsyFro,
    FttFro,
}

impl ControlLaw {
    pub const ALL: [ControlLaw; 4] = [
        ControlLaw::AsyGeo,
        ControlLaw::FttGeo,
        ControlLaw::AsyFro,
        ControlLaw::FttFro,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ControlLaw::AsyGeo => "asy_geo",
            ControlLaw::FttGeo => "ftt_geo",
            ControlLaw::AsyFro => "asy_fro",
            ControlLaw::FttFro => "ftt_fro",
        }
    }

    pub fn metric(self) -> Metric {
        match self {
            ControlLaw::AsyGeo | ControlLaw::FttGeo => Metric::Geodesic,
            ControlLaw::AsyFro | ControlLaw::FttFro => Metric::Frobenius,
        }
    }

    pub fn is_finite_time(self) -> bool {
        matches!(self, ControlLaw::FttGeo | ControlLaw::FttFro)
    }
}

impl fmt::Display for ControlLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ControlLaw {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ControlLaw::ALL
            .into_iter()
            .find(|law| law.name() == s)
            .ok_or_else(|| {
                Error::InvalidParameter(format!(
                    "unknown controller '{s}' (expected asy_geo, ftt_geo, asy_fro or ftt_fro)"
                ))
            })
    }
}

/// A control law together with its switching threshold.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ControllerKind {
    pub law: ControlLaw,
    /// Error measure below which the finite-time laws return `ω_r`.
    pub epsilon_switch: f64,
}

impl ControllerKind {
    pub fn new(law: ControlLaw) -> Self {
        ControllerKind {
            law,
            epsilon_switch: DEFAULT_EPSILON_SWITCH,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon_switch > 0.0 && self.epsilon_switch.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "epsilon_switch must be positive, got {}",
                self.epsilon_switch
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ControlOutput {
    pub omega1: BodyRate,
    /// `d_R` for the geodesic laws, `d_F` for the Frobenius laws.
    pub error_measure: f64,
    /// `error_measure < epsilon_switch`.
    pub regularized: bool,
}

impl ControlOutput {
    pub fn feedback(&self, omega_r: &BodyRate) -> BodyRate {
        self.omega1 - omega_r
    }
}

/// Commanded body velocity of the follower.
///
/// Fails with [`Error::Singularity`] when the relative angle between `r1`
/// and `rr` is at or beyond `π − LOG_MARGIN`, for every law.
pub fn control(
    kind: &ControllerKind,
    r1: &Rotation,
    rr: &Rotation,
    omega_r: &BodyRate,
) -> Result<ControlOutput> {
    let q = r1.relative_to(rr);
    let theta = rotation_angle(&q);
    let limit = PI - LOG_MARGIN;
    if !(theta < limit) {
        return Err(Error::Singularity { angle: theta, limit });
    }
    let (feedback, error_measure) = match kind.law.metric() {
        Metric::Geodesic => {
            let log = log_so3(&q)?;
            let norm = log.norm_frobenius();
            let d_r = norm / SQRT_2;
            let term = match kind.law {
                ControlLaw::FttGeo if d_r >= kind.epsilon_switch => log.vee() / norm,
                ControlLaw::FttGeo => BodyRate::zeros(),
                _ => log.vee(),
            };
            (term, d_r)
        }
        Metric::Frobenius => {
            // vee(Q − Qᵀ) = 2·axial(Q); ‖R₁ − R_r‖_F = ‖I − Q‖_F.
            let diff = 2.0 * axial(q.matrix());
            let d_f = (nalgebra::Matrix3::identity() - q.matrix()).norm();
            let term = match kind.law {
                ControlLaw::FttFro if d_f >= kind.epsilon_switch => diff / d_f,
                ControlLaw::FttFro => BodyRate::zeros(),
                _ => diff,
            };
            (term, d_f)
        }
    };
    Ok(ControlOutput {
        omega1: feedback + omega_r,
        error_measure,
        regularized: error_measure < kind.epsilon_switch,
    })
}
