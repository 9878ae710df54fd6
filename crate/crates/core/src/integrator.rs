//! Structure-preserving time stepping of the closed loop
//! `Ṙ_r = R_r·hat(ω_r)`, `Ṙ₁ = R₁·hat(ω₁)`.
//!
//! Both methods only ever multiply the attitudes by exact exponentials, so
//! the iterates stay on SO(3) up to round-off. A periodic polar projection
//! removes what round-off accumulates.
//!
//! The finite-time laws drive the relative angle down at a finite rate
//! `‖ω₁ − ω_r‖`. A fixed step that would carry the error past zero instead
//! lands the follower on the target (`R₁⁺ = R_r⁺`): the continuous solution
//! reaches the sliding set inside that step and stays there. Without this the
//! discrete loop oscillates around the equilibrium with amplitude `h·‖ω₁ − ω_r‖`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::controllers::{control, ControlOutput, ControllerKind, Metric};
use crate::error::{Error, Result};
use crate::reference::ReferenceKind;
use crate::so3::{
    dist_frobenius, exp_so3, project_to_so3, random_rotation_with, rotation_angle, BodyRate,
    Rotation, LOG_MARGIN,
};

pub const DEFAULT_STEP: f64 = 1e-3;
pub const DEFAULT_T_FINAL: f64 = 10.0;
pub const DEFAULT_REPROJECT_EVERY: u64 = 1000;
pub const DEFAULT_SAMPLE_EVERY: u64 = 10;
pub const DEFAULT_THETA_MAX: f64 = 3.0;

/// Smallest relative angle margin below π accepted for explicit initial conditions.
pub const INIT_MARGIN: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    /// `R ← R·exp(h ω(t, R))`. First order.
    LieEuler,
    /// Runge–Kutta–Munthe-Kaas with the classical fourth-order tableau.
    LieRk4,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::LieEuler => "lie_euler",
            Method::LieRk4 => "lie_rk4",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lie_euler" => Ok(Method::LieEuler),
            "lie_rk4" => Ok(Method::LieRk4),
            other => Err(Error::InvalidParameter(format!(
                "unknown integrator method '{other}' (expected lie_euler or lie_rk4)"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegratorSpec {
    pub method: Method,
    pub h: f64,
    pub reproject_every: u64,
}

impl Default for IntegratorSpec {
    fn default() -> Self {
        IntegratorSpec {
            method: Method::LieEuler,
            h: DEFAULT_STEP,
            reproject_every: DEFAULT_REPROJECT_EVERY,
        }
    }
}

impl IntegratorSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.h > 0.0 && self.h.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "step size must be positive, got {}",
                self.h
            )));
        }
        if self.reproject_every == 0 {
            return Err(Error::InvalidParameter(
                "reproject_every must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Time, target attitude and follower attitude.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimState {
    pub t: f64,
    pub rr: Rotation,
    pub r1: Rotation,
    /// Number of steps taken so far; drives the reprojection schedule.
    pub steps: u64,
}

impl SimState {
    pub fn new(rr: Rotation, r1: Rotation) -> Self {
        SimState {
            t: 0.0,
            rr,
            r1,
            steps: 0,
        }
    }

    /// Relative rotation `R₁ᵀR_r`.
    pub fn relative(&self) -> Rotation {
        self.r1.relative_to(&self.rr)
    }

    pub fn theta(&self) -> f64 {
        rotation_angle(&self.relative())
    }
}

struct Rates {
    target: BodyRate,
    follower: ControlOutput,
}

fn rates(
    t: f64,
    rr: &Rotation,
    r1: &Rotation,
    kind: &ControllerKind,
    reference: &ReferenceKind,
) -> Result<Rates> {
    let target = reference.sample(t);
    let follower = control(kind, r1, rr, &target)?;
    Ok(Rates { target, follower })
}

/// Advances `state` by one step of size `spec.h`.
pub fn step(
    state: &SimState,
    kind: &ControllerKind,
    reference: &ReferenceKind,
    spec: &IntegratorSpec,
) -> Result<SimState> {
    step_inner(state, kind, reference, spec).map_err(|e| Error::Step {
        t: state.t,
        source: Box::new(e),
    })
}

fn step_inner(
    state: &SimState,
    kind: &ControllerKind,
    reference: &ReferenceKind,
    spec: &IntegratorSpec,
) -> Result<SimState> {
    let h = spec.h;
    let (t, rr, r1) = (state.t, state.rr, state.r1);
    let first = rates(t, &rr, &r1, kind, reference)?;

    let (mut rr_next, mut r1_next) = match spec.method {
        Method::LieEuler => (
            rr * exp_so3(&(first.target * h)),
            r1 * exp_so3(&(first.follower.omega1 * h)),
        ),
        Method::LieRk4 => rkmk4(t, h, &rr, &r1, &first, kind, reference)?,
    };

    if kind.law.is_finite_time() && !first.follower.regularized {
        let reach = h * first.follower.feedback(&first.target).norm();
        if reach >= state.theta() {
            r1_next = rr_next;
        }
    }

    let steps = state.steps + 1;
    if steps.is_multiple_of(spec.reproject_every) {
        rr_next = project_to_so3(rr_next.matrix())?;
        r1_next = project_to_so3(r1_next.matrix())?;
    }

    let finite = |r: &Rotation| r.matrix().iter().all(|x| x.is_finite());
    if !(finite(&rr_next) && finite(&r1_next)) {
        return Err(Error::NonFinite { t });
    }

    Ok(SimState {
        t: t + h,
        rr: rr_next,
        r1: r1_next,
        steps,
    })
}

/// One RKMK4 step on SO(3) × SO(3).
///
/// Stages live in the body-frame algebra, `R(t+τ) = R(t)·exp(u(τ))`. The
/// inverse differential of exp is kept to the commutator terms the
/// classical tableau needs for fourth order:
/// `u₃ = k₂/2 + k₁×k₂/8` and `u = (k₁+2k₂+2k₃+k₄)/6 + k₁×k₄/12`.
fn rkmk4(
    t: f64,
    h: f64,
    rr: &Rotation,
    r1: &Rotation,
    first: &Rates,
    kind: &ControllerKind,
    reference: &ReferenceKind,
) -> Result<(Rotation, Rotation)> {
    let scaled = |r: &Rates| (r.target * h, r.follower.omega1 * h);
    let (k1r, k1f) = scaled(first);

    let s2 = rates(
        t + 0.5 * h,
        &(rr * &exp_so3(&(k1r * 0.5))),
        &(r1 * &exp_so3(&(k1f * 0.5))),
        kind,
        reference,
    )?;
    let (k2r, k2f) = scaled(&s2);

    let u3r = k2r * 0.5 + k1r.cross(&k2r) / 8.0;
    let u3f = k2f * 0.5 + k1f.cross(&k2f) / 8.0;
    let s3 = rates(
        t + 0.5 * h,
        &(rr * &exp_so3(&u3r)),
        &(r1 * &exp_so3(&u3f)),
        kind,
        reference,
    )?;
    let (k3r, k3f) = scaled(&s3);

    let s4 = rates(
        t + h,
        &(rr * &exp_so3(&k3r)),
        &(r1 * &exp_so3(&k3f)),
        kind,
        reference,
    )?;
    let (k4r, k4f) = scaled(&s4);

    let ur = (k1r + 2.0 * k2r + 2.0 * k3r + k4r) / 6.0 + k1r.cross(&k4r) / 12.0;
    let uf = (k1f + 2.0 * k2f + 2.0 * k3f + k4f) / 6.0 + k1f.cross(&k4f) / 12.0;
    Ok((rr * &exp_so3(&ur), r1 * &exp_so3(&uf)))
}

/// How the two initial attitudes are chosen.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum InitialCondition {
    /// `R_r(0)` random, then `R₁(0) = R_r(0)·Qᵀ` with `Q` random, so the
    /// initial relative angle is uniform on `(0, theta_max]`.
    Random { seed: u64, theta_max: f64 },
    /// Rotation vectors (axis·angle) of `R_r(0)` and `R₁(0)`.
    Explicit { target: BodyRate, follower: BodyRate },
}

impl Default for InitialCondition {
    fn default() -> Self {
        InitialCondition::Random {
            seed: 0,
            theta_max: DEFAULT_THETA_MAX,
        }
    }
}

impl InitialCondition {
    pub fn state(&self) -> Result<SimState> {
        match *self {
            InitialCondition::Random { seed, theta_max } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let rr = random_rotation_with(&mut rng, theta_max)?;
                let q = random_rotation_with(&mut rng, theta_max)?;
                Ok(SimState::new(rr, rr * q.transpose()))
            }
            InitialCondition::Explicit { target, follower } => {
                if !target.iter().chain(follower.iter()).all(|x| x.is_finite()) {
                    return Err(Error::InvalidParameter(
                        "explicit initial rotation vectors must be finite".into(),
                    ));
                }
                let state = SimState::new(exp_so3(&target), exp_so3(&follower));
                let theta = state.theta();
                if !(theta < PI - INIT_MARGIN) {
                    return Err(Error::InvalidParameter(format!(
                        "initial relative angle {theta} is not below pi - {INIT_MARGIN}"
                    )));
                }
                Ok(state)
            }
        }
    }
}

/// One closed-loop run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimConfig {
    pub controller: ControllerKind,
    pub reference: ReferenceKind,
    pub init: InitialCondition,
    pub integrator: IntegratorSpec,
    pub t_final: f64,
    /// A record is written every `sample_every` steps, plus one at `t_final`.
    pub sample_every: u64,
}

impl SimConfig {
    pub fn new(controller: ControllerKind) -> Self {
        SimConfig {
            controller,
            reference: ReferenceKind::default(),
            init: InitialCondition::default(),
            integrator: IntegratorSpec::default(),
            t_final: DEFAULT_T_FINAL,
            sample_every: DEFAULT_SAMPLE_EVERY,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.controller.validate()?;
        self.reference.validate()?;
        self.integrator.validate()?;
        if !(self.t_final >= 0.0 && self.t_final.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "t_final must be non-negative, got {}",
                self.t_final
            )));
        }
        if self.sample_every == 0 {
            return Err(Error::InvalidParameter(
                "sample_every must be at least 1".into(),
            ));
        }
        if let InitialCondition::Random { theta_max, .. } = self.init {
            if !(theta_max > 0.0 && theta_max < PI) {
                return Err(Error::InvalidParameter(format!(
                    "init theta_max must lie in (0, pi), got {theta_max}"
                )));
            }
        }
        self.init.state().map(|_| ())
    }
}

/// One sample of the closed loop.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrajectoryRecord {
    pub t: f64,
    pub rr: Rotation,
    pub r1: Rotation,
    /// Relative rotation angle of `R₁ᵀR_r`.
    pub theta: f64,
    /// Geodesic distance; `None` when `theta ≥ π − LOG_MARGIN`.
    pub d_r: Option<f64>,
    pub d_f: f64,
    /// `d_R²` for the geodesic laws, `3 − trace(R_rᵀR₁)` for the Frobenius laws.
    pub w: f64,
    pub omega1_norm: f64,
    pub regularized: bool,
}

impl TrajectoryRecord {
    fn from_state(
        state: &SimState,
        kind: &ControllerKind,
        reference: &ReferenceKind,
    ) -> Result<Self> {
        let theta = state.theta();
        let d_r = (theta < PI - LOG_MARGIN).then_some(theta);
        let out = control(kind, &state.r1, &state.rr, &reference.sample(state.t))?;
        let w = match kind.law.metric() {
            Metric::Geodesic => d_r.map_or(f64::NAN, |d| d * d),
            Metric::Frobenius => 3.0 - state.rr.relative_to(&state.r1).trace(),
        };
        Ok(TrajectoryRecord {
            t: state.t,
            rr: state.rr,
            r1: state.r1,
            theta,
            d_r,
            d_f: dist_frobenius(&state.r1, &state.rr),
            w,
            omega1_norm: out.omega1.norm(),
            regularized: out.regularized,
        })
    }

    /// The distance the given metric's laws drive to zero.
    pub fn error_measure(&self, metric: Metric) -> f64 {
        match metric {
            Metric::Geodesic => self.d_r.unwrap_or(f64::NAN),
            Metric::Frobenius => self.d_f,
        }
    }
}

/// Runs `config` from `t = 0` to `t_final` and returns the sampled records.
///
/// The last step is shortened when `t_final` is not a multiple of `h`.
pub fn simulate(config: &SimConfig) -> Result<Vec<TrajectoryRecord>> {
    config.validate()?;
    let kind = &config.controller;
    let reference = &config.reference;
    let h = config.integrator.h;

    let mut state = config.init.state()?;
    let n_steps = ((config.t_final / h) - 1e-9).ceil().max(0.0) as u64;
    let at_record = |s: &SimState| {
        TrajectoryRecord::from_state(s, kind, reference).map_err(|e| Error::Step {
            t: s.t,
            source: Box::new(e),
        })
    };

    let mut records = Vec::with_capacity((n_steps / config.sample_every + 2) as usize);
    records.push(at_record(&state)?);
    for k in 0..n_steps {
        let t_next = if k + 1 == n_steps {
            config.t_final
        } else {
            (k + 1) as f64 * h
        };
        let spec = IntegratorSpec {
            h: t_next - state.t,
            ..config.integrator
        };
        state = step(&state, kind, reference, &spec)?;
        state.t = t_next;
        if state.steps.is_multiple_of(config.sample_every) || k + 1 == n_steps {
            records.push(at_record(&state)?);
        }
    }
    Ok(records)
}
