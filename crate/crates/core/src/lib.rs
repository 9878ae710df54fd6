//! Attitude tracking on SO(3) with relative information only.
//!
//! A follower with attitude `R₁` tracks a target `R_r` whose body velocity
//! `ω_r(t)` is known, using one of four kinematic feedback laws built from the
//! relative rotation `R₁ᵀR_r`: an exponential and a finite-time law in the
//! geodesic metric, and the same pair in the Frobenius metric.
//!
//! - [`so3`]: hat/vee, Rodrigues exponential, principal logarithm, metrics.
//! - [`reference`]: target velocity profiles.
//! - [`controllers`]: the four laws.
//! - [`integrator`]: Lie-group time stepping and trajectory sampling.
//! - [`analysis`]: Lyapunov functions, rate fits, convergence time, monotonicity.
//!
//! ```
//! use so3_track::controllers::{ControlLaw, ControllerKind};
//! use so3_track::integrator::{simulate, SimConfig};
//!
//! let mut config = SimConfig::new(ControllerKind::new(ControlLaw::FttGeo));
//! config.t_final = 5.0;
//! let records = simulate(&config).unwrap();
//! assert!(records.last().unwrap().theta < 1e-9);
//! ```

// Negated comparisons are how NaN is made to fail validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod controllers;
pub mod error;
pub mod integrator;
pub mod reference;
pub mod so3;

pub use error::{Error, Result};
