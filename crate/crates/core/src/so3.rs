//! Rotation matrices, skew-symmetric matrices and the maps between them.
//!
//! Everything here works on dense row-major 3×3 `f64` matrices. The
//! exponential is Rodrigues' formula, the logarithm is the principal branch
//! and is only defined strictly inside the ball of rotation angles below π.
//! Both switch to Taylor-series coefficients when the angle is below
//! [`SMALL_ANGLE`] so that nothing divides by a vanishing `sin θ` or `θ²`.
//!
//! ```
//! use so3_track::so3::{exp_so3, log_so3, BodyRate};
//!
//! let p = BodyRate::new(0.3, -0.4, 1.2);
//! let r = exp_so3(&p);
//! let back = log_so3(&r).unwrap().vee();
//! assert!((back - p).norm() < 1e-12);
//! ```

use std::f64::consts::PI;
use std::fmt;
use std::ops::Mul;

use nalgebra::{Matrix3, Vector3};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Body angular velocity (rad/s) or rotation vector (rad) in vee coordinates.
pub type BodyRate = Vector3<f64>;

/// Below this angle the exp/log coefficients are evaluated by series.
pub const SMALL_ANGLE: f64 = 1e-4;

/// The logarithm refuses rotation angles at or above `π - LOG_MARGIN`.
pub const LOG_MARGIN: f64 = 1e-6;

/// Tolerance of the orthogonality and determinant checks in [`Rotation::from_matrix`].
pub const ROTATION_TOL: f64 = 1e-9;

/// Largest Frobenius norm of the symmetric part accepted by [`vee`].
pub const SKEW_TOL: f64 = 1e-6;

/// A 3×3 rotation matrix (an element of SO(3)).
#[derive(Clone, Copy, PartialEq)]
pub struct Rotation(Matrix3<f64>);

impl Rotation {
    pub fn identity() -> Self {
        Rotation(Matrix3::identity())
    }

    /// Wraps `m` after checking `‖mᵀm − I‖_F` and `det m − 1` against [`ROTATION_TOL`].
    pub fn from_matrix(m: Matrix3<f64>) -> Result<Self> {
        let r = Rotation(m);
        let orthogonality = r.orthogonality_error();
        let det = m.determinant();
        if !(orthogonality <= ROTATION_TOL && (det - 1.0).abs() <= ROTATION_TOL) {
            return Err(Error::NotRotation { orthogonality, det });
        }
        Ok(r)
    }

    #[cfg(test)]
    pub(crate) fn from_matrix_unchecked(m: Matrix3<f64>) -> Self {
        Rotation(m)
    }

    /// Builds a rotation from nine row-major entries, checking the invariants.
    pub fn from_row_slice(entries: &[f64; 9]) -> Result<Self> {
        Self::from_matrix(Matrix3::from_row_slice(entries))
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    pub fn transpose(&self) -> Self {
        Rotation(self.0.transpose())
    }

    /// Same as [`transpose`](Self::transpose).
    pub fn inverse(&self) -> Self {
        self.transpose()
    }

    /// Row-major entries.
    pub fn to_row_array(&self) -> [f64; 9] {
        let m = &self.0;
        [
            m[(0, 0)],
            m[(0, 1)],
            m[(0, 2)],
            m[(1, 0)],
            m[(1, 1)],
            m[(1, 2)],
            m[(2, 0)],
            m[(2, 1)],
            m[(2, 2)],
        ]
    }

    pub fn trace(&self) -> f64 {
        self.0.trace()
    }

    /// `‖RᵀR − I‖_F`, the distance of the stored matrix from orthogonality.
    pub fn orthogonality_error(&self) -> f64 {
        (self.0.transpose() * self.0 - Matrix3::identity()).norm()
    }

    pub fn angle(&self) -> f64 {
        rotation_angle(self)
    }

    pub fn log(&self) -> Result<SkewMatrix> {
        log_so3(self)
    }

    /// `selfᵀ · other`, the rotation taking this frame to `other`.
    pub fn relative_to(&self, other: &Rotation) -> Rotation {
        Rotation(self.0.transpose() * other.0)
    }
}

impl fmt::Debug for Rotation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = &self.0;
        write!(
            f,
            "Rotation[[{:.6}, {:.6}, {:.6}], [{:.6}, {:.6}, {:.6}], [{:.6}, {:.6}, {:.6}]]",
            m[(0, 0)],
            m[(0, 1)],
            m[(0, 2)],
            m[(1, 0)],
            m[(1, 1)],
            m[(1, 2)],
            m[(2, 0)],
            m[(2, 1)],
            m[(2, 2)]
        )
    }
}

impl Mul for Rotation {
    type Output = Rotation;

    fn mul(self, rhs: Rotation) -> Rotation {
        Rotation(self.0 * rhs.0)
    }
}

impl Mul<&Rotation> for &Rotation {
    type Output = Rotation;

    fn mul(self, rhs: &Rotation) -> Rotation {
        Rotation(self.0 * rhs.0)
    }
}

/// A 3×3 skew-symmetric matrix (an element of so(3)).
///
/// Always built from three independent entries, so `S + Sᵀ = 0` holds exactly.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SkewMatrix(Matrix3<f64>);

impl SkewMatrix {
    pub fn zero() -> Self {
        SkewMatrix(Matrix3::zeros())
    }

    /// Checked conversion from a general matrix, see [`vee`].
    pub fn from_matrix(m: &Matrix3<f64>) -> Result<Self> {
        vee(m).map(|v| hat(&v))
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    pub fn vee(&self) -> BodyRate {
        let m = &self.0;
        Vector3::new(m[(2, 1)], m[(0, 2)], m[(1, 0)])
    }

    pub fn norm_frobenius(&self) -> f64 {
        self.0.norm()
    }
}

/// The singular relative attitudes `E₁ = diag(−1,−1,1)`, `E₂ = diag(−1,1,−1)`,
/// `E₃ = diag(1,−1,−1)`: half-turns about the coordinate axes.
pub fn singular_set() -> [Rotation; 3] {
    [
        Rotation(Matrix3::from_diagonal(&Vector3::new(-1.0, -1.0, 1.0))),
        Rotation(Matrix3::from_diagonal(&Vector3::new(-1.0, 1.0, -1.0))),
        Rotation(Matrix3::from_diagonal(&Vector3::new(1.0, -1.0, -1.0))),
    ]
}

/// The hat map `p ↦ p̂` with `p̂ q = p × q`.
pub fn hat(p: &BodyRate) -> SkewMatrix {
    SkewMatrix(Matrix3::new(
        0.0, -p.z, p.y, //
        p.z, 0.0, -p.x, //
        -p.y, p.x, 0.0,
    ))
}

/// Inverse of [`hat`] on a general matrix.
///
/// The skew part `(S − Sᵀ)/2` is used; a symmetric part larger than
/// [`SKEW_TOL`] in Frobenius norm is rejected.
pub fn vee(m: &Matrix3<f64>) -> Result<BodyRate> {
    let asymmetry = ((m + m.transpose()) * 0.5).norm();
    if !(asymmetry <= SKEW_TOL) {
        return Err(Error::NotSkew { asymmetry });
    }
    let s = (m - m.transpose()) * 0.5;
    Ok(Vector3::new(s[(2, 1)], s[(0, 2)], s[(1, 0)]))
}

/// `vee((m − mᵀ)/2)` without the skewness check.
pub(crate) fn axial(m: &Matrix3<f64>) -> BodyRate {
    0.5 * Vector3::new(
        m[(2, 1)] - m[(1, 2)],
        m[(0, 2)] - m[(2, 0)],
        m[(1, 0)] - m[(0, 1)],
    )
}

/// `sin θ / θ` and `(1 − cos θ)/θ²`.
fn rodrigues_coefficients(theta: f64) -> (f64, f64) {
    if theta < SMALL_ANGLE {
        let t2 = theta * theta;
        let t4 = t2 * t2;
        (1.0 - t2 / 6.0 + t4 / 120.0, 0.5 - t2 / 24.0 + t4 / 720.0)
    } else {
        (theta.sin() / theta, (1.0 - theta.cos()) / (theta * theta))
    }
}

/// Rodrigues' formula: rotation by `‖p‖` anticlockwise about `p`.
pub fn exp_so3(p: &BodyRate) -> Rotation {
    let theta = p.norm();
    if theta == 0.0 {
        return Rotation::identity();
    }
    let (a, b) = rodrigues_coefficients(theta);
    let k = hat(p).0;
    Rotation(Matrix3::identity() + k * a + (k * k) * b)
}

/// Rotation angle in `[0, π]`.
///
/// Evaluated as `atan2(sin θ, cos θ)` with `sin θ = ‖axial(R)‖` and
/// `cos θ = (trace R − 1)/2` clamped to `[−1, 1]`. This agrees with
/// `arccos((trace R − 1)/2)` but keeps full relative accuracy near 0 and π.
pub fn rotation_angle(r: &Rotation) -> f64 {
    let cos = ((r.trace() - 1.0) * 0.5).clamp(-1.0, 1.0);
    let sin = axial(&r.0).norm();
    sin.atan2(cos)
}

/// Principal logarithm `θ/(2 sin θ) (R − Rᵀ)`.
///
/// Fails with [`Error::Singularity`] when `θ ≥ π − LOG_MARGIN`.
pub fn log_so3(r: &Rotation) -> Result<SkewMatrix> {
    let theta = rotation_angle(r);
    let limit = PI - LOG_MARGIN;
    if !(theta < limit) {
        return Err(Error::Singularity { angle: theta, limit });
    }
    if theta == 0.0 {
        return Ok(SkewMatrix::zero());
    }
    let c = if theta < SMALL_ANGLE {
        let t2 = theta * theta;
        0.5 + t2 / 12.0 + 7.0 * t2 * t2 / 720.0
    } else {
        theta / (2.0 * theta.sin())
    };
    Ok(hat(&(2.0 * c * axial(&r.0))))
}

/// Chordal distance `‖R₁ − R₂‖_F`.
pub fn dist_frobenius(r1: &Rotation, r2: &Rotation) -> f64 {
    (r1.0 - r2.0).norm()
}

/// Geodesic distance `‖log(R₁ᵀR₂)‖_F / √2`, equal to the relative rotation angle.
pub fn dist_geodesic(r1: &Rotation, r2: &Rotation) -> Result<f64> {
    Ok(log_so3(&r1.relative_to(r2))?.norm_frobenius() / std::f64::consts::SQRT_2)
}

/// `‖log R₁ − log R₂‖_F`. Not bi-invariant; provided for completeness.
pub fn dist_hyperbolic(r1: &Rotation, r2: &Rotation) -> Result<f64> {
    Ok((log_so3(r1)?.0 - log_so3(r2)?.0).norm())
}

/// Orthogonal polar factor of `m`, the rotation nearest to `m` in Frobenius norm.
///
/// Computed with the scaled Newton iteration `X ← (γX + γ⁻¹X⁻ᵀ)/2`,
/// `γ = |det X|^(−1/3)`, which converges quadratically for `det m > 0`.
pub fn project_to_so3(m: &Matrix3<f64>) -> Result<Rotation> {
    if !m.iter().all(|x| x.is_finite()) {
        return Err(Error::Projection("matrix has non-finite entries"));
    }
    let scale = m.norm();
    let det = m.determinant();
    if !(det > 0.0) {
        return Err(Error::Projection("determinant is not positive"));
    }
    if det <= 1e-12 * scale * scale * scale {
        return Err(Error::Projection("matrix is numerically rank-deficient"));
    }
    let mut x = *m;
    for _ in 0..100 {
        let inv_t = match x.try_inverse() {
            Some(inv) => inv.transpose(),
            None => return Err(Error::Projection("matrix is numerically rank-deficient")),
        };
        let gamma = x.determinant().abs().powf(-1.0 / 3.0);
        let next = (x * gamma + inv_t / gamma) * 0.5;
        let delta = (next - x).norm();
        x = next;
        if delta <= 1e-15 {
            break;
        }
    }
    Ok(Rotation(x))
}

/// Rotation `exp(θ u)` with `u` uniform on the unit sphere and `θ` uniform
/// on `(0, θ_max]`, drawn from `rng`.
pub fn random_rotation_with<R: Rng + ?Sized>(rng: &mut R, theta_max: f64) -> Result<Rotation> {
    if !(theta_max > 0.0 && theta_max < PI) {
        return Err(Error::InvalidParameter(format!(
            "theta_max must lie in (0, pi), got {theta_max}"
        )));
    }
    // Archimedes: z uniform on [-1, 1] gives a uniform point on the sphere.
    let z: f64 = rng.gen_range(-1.0..=1.0);
    let phi: f64 = rng.gen_range(0.0..2.0 * PI);
    let rho = (1.0 - z * z).max(0.0).sqrt();
    let axis = Vector3::new(rho * phi.cos(), rho * phi.sin(), z);
    let theta = theta_max * (1.0 - rng.gen::<f64>());
    Ok(exp_so3(&(axis * theta)))
}

/// Seeded version of [`random_rotation_with`]; deterministic in `seed`.
pub fn random_rotation(seed: u64, theta_max: f64) -> Result<Rotation> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_rotation_with(&mut rng, theta_max)
}
