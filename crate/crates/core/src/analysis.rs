//! Post-hoc checks on recorded trajectories: Lyapunov functions, the
//! exponential decay rate, finite convergence time and monotonicity of the
//! relative angle.
//!
//! For the geodesic laws `W = d_R²`; with `asy_geo` it obeys `Ẇ = −2W`, and
//! with `ftt_geo` the root `√W = d_R` decreases linearly at slope `1/√2`,
//! so the error vanishes at `T = √2·d_R(0)`. For the Frobenius laws
//! `W = 3 − trace(R_rᵀR₁) = ½d_F²`.
//!
//! The finite-time argument works with `V = W^α`, `α > ½`, which satisfies
//! `V̇ = −α√2·V^β` with `β = (2α − 1)/(2α)`. Integrating gives the same
//! `T` for every admissible `α`.

use std::f64::consts::{PI, SQRT_2};
use std::fmt::Write as _;

use crate::controllers::{ControlLaw, Metric};
use crate::error::{Error, Result};
use crate::integrator::TrajectoryRecord;
use crate::so3::{dist_geodesic, Rotation};

/// Default metric threshold for convergence detection.
pub const DEFAULT_THRESHOLD: f64 = 1e-6;
/// Largest per-record increase of θ still counted as non-increasing.
pub const THETA_MONOTONE_TOL: f64 = 1e-6;
/// Same, for the Lyapunov function.
pub const LYAPUNOV_MONOTONE_TOL: f64 = 1e-9;
/// Samples with `W` at or below this are excluded from rate fits.
pub const ENERGY_FLOOR: f64 = 1e-14;
pub const MIN_FIT_SAMPLES: usize = 10;
pub const DEFAULT_FIT_WINDOW: (f64, f64) = (0.1, 5.0);
pub const DEFAULT_ALPHA: f64 = 1.0;

/// `W = d_R²(R_r, R₁) = ½‖log(R_rᵀR₁)‖²_F`.
pub fn lyapunov_geodesic(rr: &Rotation, r1: &Rotation) -> Result<f64> {
    let d = dist_geodesic(rr, r1)?;
    Ok(d * d)
}

/// `W = 3 − trace(R_rᵀR₁)`, which equals `½d_F²` and lies in `[0, 4]`.
pub fn lyapunov_frobenius(rr: &Rotation, r1: &Rotation) -> f64 {
    3.0 - rr.relative_to(r1).trace()
}

/// Least-squares slope of `ln W` against `t` over records with
/// `t ∈ [t_start, t_end]` and `W > ENERGY_FLOOR`.
pub fn fit_exponential_rate(records: &[TrajectoryRecord], t_start: f64, t_end: f64) -> Result<f64> {
    let samples: Vec<(f64, f64)> = records
        .iter()
        .filter(|r| r.t >= t_start && r.t <= t_end && r.w > ENERGY_FLOOR && r.w.is_finite())
        .map(|r| (r.t, r.w.ln()))
        .collect();
    least_squares_slope(&samples)
}

/// Ordinary least-squares slope of `y` against `x`.
pub fn least_squares_slope(samples: &[(f64, f64)]) -> Result<f64> {
    if samples.len() < MIN_FIT_SAMPLES {
        return Err(Error::InsufficientSamples {
            needed: MIN_FIT_SAMPLES,
            found: samples.len(),
        });
    }
    let n = samples.len() as f64;
    let mean_x = samples.iter().map(|s| s.0).sum::<f64>() / n;
    let mean_y = samples.iter().map(|s| s.1).sum::<f64>() / n;
    let (sxy, sxx) = samples.iter().fold((0.0, 0.0), |(sxy, sxx), &(x, y)| {
        let dx = x - mean_x;
        (sxy + dx * (y - mean_y), sxx + dx * dx)
    });
    if sxx == 0.0 {
        return Err(Error::InvalidParameter(
            "rate fit needs samples at distinct times".into(),
        ));
    }
    Ok(sxy / sxx)
}

/// First record time from which the error measure stays below `threshold`
/// until the end of the trajectory.
pub fn detect_convergence_time(
    records: &[TrajectoryRecord],
    metric: Metric,
    threshold: f64,
) -> Option<f64> {
    // NaN compares false, so an undefined distance counts as not converged.
    let last_above = records
        .iter()
        .rposition(|r| !(r.error_measure(metric) < threshold));
    match last_above {
        None => records.first().map(|r| r.t),
        Some(i) => records.get(i + 1).map(|r| r.t),
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MonotoneCheck {
    pub monotone: bool,
    /// Largest increase between consecutive samples (0 if none increased).
    pub max_increment: f64,
}

fn check_monotone(values: impl Iterator<Item = f64>, tol: f64) -> MonotoneCheck {
    let mut prev: Option<f64> = None;
    let mut max_increment = 0.0f64;
    let mut undefined = false;
    for v in values {
        if !v.is_finite() {
            undefined = true;
        }
        if let Some(p) = prev {
            max_increment = max_increment.max(v - p);
        }
        prev = Some(v);
    }
    MonotoneCheck {
        monotone: !undefined && max_increment <= tol,
        max_increment,
    }
}

/// Whether θ never grows by more than [`THETA_MONOTONE_TOL`] between records.
pub fn check_theta_monotone(records: &[TrajectoryRecord]) -> MonotoneCheck {
    check_monotone(records.iter().map(|r| r.theta), THETA_MONOTONE_TOL)
}

pub fn check_lyapunov_monotone(records: &[TrajectoryRecord]) -> MonotoneCheck {
    check_monotone(records.iter().map(|r| r.w), LYAPUNOV_MONOTONE_TOL)
}

/// `β = (2α − 1)/(2α)`.
pub fn beta(alpha: f64) -> f64 {
    (2.0 * alpha - 1.0) / (2.0 * alpha)
}

/// Closed-form convergence time of the finite-time laws from initial
/// relative angle `theta0`; `None` for the asymptotic laws.
///
/// `ftt_geo`: integrating `V̇ = −α√2 V^β` from `V₀ = θ₀^(2α)` gives
/// `T = V₀^(1−β) / (α√2 (1−β)) = √2 θ₀`.
/// `ftt_fro`: `θ̇ = −√2 cos(θ/2)` gives `T = √2 ln(sec(θ₀/2) + tan(θ₀/2))`.
pub fn predicted_convergence_time(law: ControlLaw, theta0: f64, alpha: f64) -> Option<f64> {
    match law {
        ControlLaw::FttGeo => {
            let v0 = (theta0 * theta0).powf(alpha);
            let b = beta(alpha);
            Some(v0.powf(1.0 - b) / (alpha * SQRT_2 * (1.0 - b)))
        }
        ControlLaw::FttFro => {
            let half = theta0 / 2.0;
            Some(SQRT_2 * (1.0 / half.cos() + half.tan()).ln())
        }
        ControlLaw::AsyGeo | ControlLaw::AsyFro => None,
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnalysisSettings {
    pub law: ControlLaw,
    pub threshold: f64,
    pub alpha: f64,
    pub fit_window: (f64, f64),
}

impl AnalysisSettings {
    pub fn new(law: ControlLaw) -> Self {
        AnalysisSettings {
            law,
            threshold: DEFAULT_THRESHOLD,
            alpha: DEFAULT_ALPHA,
            fit_window: DEFAULT_FIT_WINDOW,
        }
    }

    /// `epsilon_switch` is the controller's switching threshold; detection
    /// must sit well above it.
    pub fn validate(&self, epsilon_switch: f64) -> Result<()> {
        if !(self.threshold > 10.0 * epsilon_switch && self.threshold.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "convergence threshold {} must exceed 10 x epsilon_switch = {}",
                self.threshold,
                10.0 * epsilon_switch
            )));
        }
        if !(self.alpha > 0.5 && self.alpha.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "alpha must exceed 1/2, got {}",
                self.alpha
            )));
        }
        if !(self.fit_window.0 < self.fit_window.1) {
            return Err(Error::InvalidParameter(
                "fit window start must precede its end".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceReport {
    pub controller: ControlLaw,
    pub theta0: f64,
    pub theta_peak: f64,
    pub theta_monotone: bool,
    pub theta_max_increment: f64,
    pub lyapunov_monotone: bool,
    pub w0: f64,
    pub alpha: f64,
    pub beta: f64,
    /// Slope of `ln W`; `None` when the window holds too few usable samples.
    pub fitted_rate: Option<f64>,
    pub convergence_time: Option<f64>,
    pub predicted_time: Option<f64>,
    pub singularity_hit: bool,
}

impl ConvergenceReport {
    /// Panics if `records` is empty.
    pub fn from_records(records: &[TrajectoryRecord], settings: &AnalysisSettings) -> Self {
        let first = records.first().expect("at least one record");
        let theta = check_theta_monotone(records);
        let lyapunov = check_lyapunov_monotone(records);
        let (t0, t1) = settings.fit_window;
        ConvergenceReport {
            controller: settings.law,
            theta0: first.theta,
            theta_peak: records.iter().map(|r| r.theta).fold(0.0, f64::max),
            theta_monotone: theta.monotone,
            theta_max_increment: theta.max_increment,
            lyapunov_monotone: lyapunov.monotone,
            w0: first.w,
            alpha: settings.alpha,
            beta: beta(settings.alpha),
            fitted_rate: fit_exponential_rate(records, t0, t1).ok(),
            convergence_time: detect_convergence_time(
                records,
                settings.law.metric(),
                settings.threshold,
            ),
            predicted_time: predicted_convergence_time(settings.law, first.theta, settings.alpha),
            singularity_hit: records.iter().any(|r| r.d_r.is_none() || r.theta >= PI),
        }
    }

    /// Flat `key = value` text, one entry per line.
    pub fn to_key_value(&self) -> String {
        let opt = |v: Option<f64>, missing: &str| v.map_or(missing.to_string(), format_real);
        let mut out = String::new();
        let mut line = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        line("controller", self.controller.name().to_string());
        line("theta0", format_real(self.theta0));
        line("theta_peak", format_real(self.theta_peak));
        line("theta_monotone", self.theta_monotone.to_string());
        line("theta_max_increment", format_real(self.theta_max_increment));
        line("lyapunov_monotone", self.lyapunov_monotone.to_string());
        line("w0", format_real(self.w0));
        line("alpha", format_real(self.alpha));
        line("beta", format_real(self.beta));
        line("fitted_rate", opt(self.fitted_rate, "n/a"));
        line("convergence_time", opt(self.convergence_time, "none"));
        line("predicted_time", opt(self.predicted_time, "n/a"));
        line("singularity_hit", self.singularity_hit.to_string());
        out
    }
}

/// 17 significant digits, locale independent; NaN is written as `nan`.
pub fn format_real(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{x:.16e}")
    }
}
