//! Dense small-dimension kernels for SO(3), SE(2) and their Lie algebras.
//!
//! Everything here is plain value arithmetic on 3x3 matrices: the hat/vee
//! isomorphism of so(3), Rodrigues exponential and logarithm, the coadjoint
//! action, and the homogeneous representation of SE(2) used by the reduced
//! planar model.

use nalgebra::{Matrix3, Vector3};
use thiserror::Error;

pub type Vec3 = Vector3<f64>;
pub type Mat3 = Matrix3<f64>;

/// Orthogonality / determinant slack accepted when validating a rotation.
pub const ROTATION_TOL: f64 = 1e-10;
/// Antisymmetry slack accepted by [`vee`].
pub const ANTISYM_TOL: f64 = 1e-10;
/// Below this angle the trigonometric coefficients switch to Taylor forms.
const SMALL_ANGLE: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum GeomError {
    #[error("matrix is not antisymmetric (max symmetric part {defect:.3e})")]
    NotAntisymmetric { defect: f64 },
    #[error("matrix is not a rotation (orthogonality defect {ortho:.3e}, det {det:.15})")]
    NotARotation { ortho: f64, det: f64 },
    #[error("rotation angle too close to pi for the logarithm (trace {trace:.15})")]
    LogNearPi { trace: f64 },
    #[error("matrix is not a valid SE(2) element (defect {defect:.3e})")]
    NotSE2 { defect: f64 },
}

/// A rotation matrix in SO(3).
///
/// The checked constructor enforces `R^T R = I` and `det R = 1` to
/// [`ROTATION_TOL`]; composition and transposition stay inside the group up
/// to roundoff, so long products are re-validated only at test boundaries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation(Mat3);

impl Rotation {
    pub fn identity() -> Self {
        Rotation(Mat3::identity())
    }

    /// Validates the rotation invariants before wrapping.
    pub fn new(m: Mat3) -> Result<Self, GeomError> {
        let ortho = (m.transpose() * m - Mat3::identity()).abs().max();
        let det = m.determinant();
        if ortho > ROTATION_TOL || (det - 1.0).abs() > ROTATION_TOL {
            return Err(GeomError::NotARotation { ortho, det });
        }
        Ok(Rotation(m))
    }

    /// Wraps a matrix that is already known to be a rotation.
    pub fn from_matrix_unchecked(m: Mat3) -> Self {
        Rotation(m)
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.0
    }

    pub fn transpose(&self) -> Self {
        Rotation(self.0.transpose())
    }

    pub fn compose(&self, other: &Rotation) -> Self {
        Rotation(self.0 * other.0)
    }

    /// Rotates a vector.
    pub fn apply(&self, v: &Vec3) -> Vec3 {
        self.0 * v
    }

    /// Nearest rotation to a nonsingular matrix with positive determinant:
    /// the orthogonal polar factor, by the Newton iteration
    /// `R <- (R + R^-T)/2`. Smooth in the input, unlike an SVD route whose
    /// factors degenerate near orthogonal matrices.
    pub fn project(m: &Mat3) -> Self {
        assert!(m.determinant() > 0.0, "polar projection needs det > 0");
        let mut r = *m;
        for _ in 0..30 {
            let inv_t = r.try_inverse().expect("iterate stays nonsingular").transpose();
            let next = (r + inv_t) * 0.5;
            let delta = (next - r).abs().max();
            r = next;
            if delta <= 1e-15 {
                break;
            }
        }
        Rotation(r)
    }
}

/// Hat map: the axial vector as an antisymmetric matrix, `hat(v) w = v x w`.
pub fn hat(v: &Vec3) -> Mat3 {
    Mat3::new(0.0, -v.z, v.y, v.z, 0.0, -v.x, -v.y, v.x, 0.0)
}

/// Inverse of [`hat`]. Rejects inputs whose symmetric part exceeds
/// [`ANTISYM_TOL`]; the antisymmetric part of valid inputs is averaged so
/// roundoff does not bias a single triangle.
pub fn vee(a: &Mat3) -> Result<Vec3, GeomError> {
    let defect = (a + a.transpose()).abs().max();
    if defect > ANTISYM_TOL {
        return Err(GeomError::NotAntisymmetric { defect });
    }
    Ok(Vec3::new(
        0.5 * (a[(2, 1)] - a[(1, 2)]),
        0.5 * (a[(0, 2)] - a[(2, 0)]),
        0.5 * (a[(1, 0)] - a[(0, 1)]),
    ))
}

/// Rodrigues exponential so(3) -> SO(3).
pub fn exp_so3(v: &Vec3) -> Rotation {
    let theta2 = v.norm_squared();
    let theta = theta2.sqrt();
    // sin(t)/t and (1-cos(t))/t^2, with Taylor branches below SMALL_ANGLE
    let (a, b) = if theta < SMALL_ANGLE {
        (1.0 - theta2 / 6.0, 0.5 - theta2 / 24.0)
    } else {
        (theta.sin() / theta, (1.0 - theta.cos()) / theta2)
    };
    let k = hat(v);
    Rotation(Mat3::identity() + k * a + k * k * b)
}

/// Logarithm SO(3) -> so(3) as an axial vector.
///
/// Rotations within ~3e-5 of angle pi are rejected: there the axial vector is
/// not recoverable from the antisymmetric part at full precision.
pub fn log_so3(r: &Rotation) -> Result<Vec3, GeomError> {
    let trace = r.matrix().trace();
    if trace <= -1.0 + 1e-9 {
        return Err(GeomError::LogNearPi { trace });
    }
    let cos_theta = ((trace - 1.0) / 2.0).clamp(-1.0, 1.0);
    let theta = cos_theta.acos();
    let w = vee(&((r.matrix() - r.matrix().transpose()) * 0.5))
        .expect("antisymmetric by construction");
    // w = sin(theta) * axis
    if theta < SMALL_ANGLE {
        Ok(w * (1.0 + theta * theta / 6.0))
    } else {
        Ok(w * (theta / theta.sin()))
    }
}

/// Adjoint action of SO(3) on so(3): `Ad_R xi = R xi` on axial vectors,
/// equivalently `hat(Ad_R xi) = R hat(xi) R^T`.
pub fn adjoint(r: &Rotation, xi: &Vec3) -> Vec3 {
    r.matrix() * xi
}

/// Coadjoint action on so(3)*, fixed by the pairing convention
/// `<ad_star(R, mu), xi> = <mu, Ad_R xi>`, hence `ad_star(R, mu) = R^T mu`.
pub fn ad_star(r: &Rotation, mu: &Vec3) -> Vec3 {
    r.matrix().transpose() * mu
}

// ---------------------------------------------------------------------------
// SE(2)
// ---------------------------------------------------------------------------

/// Basis of se(2) in the homogeneous representation: two translations and
/// one rotation generator. `exp(t * se2_basis(2))` spins clockwise, so the
/// planar angle of the group element is minus the third algebra coordinate.
pub fn se2_basis(i: usize) -> Mat3 {
    match i {
        0 => Mat3::new(0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0),
        1 => Mat3::new(0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0),
        2 => Mat3::new(0.0, 1.0, 0.0, -1.0, 0.0, 0.0, 0.0, 0.0, 0.0),
        _ => panic!("se(2) basis index out of range: {i}"),
    }
}

/// An element of SE(2) stored as a 3x3 homogeneous matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SE2Element(Mat3);

impl SE2Element {
    pub fn identity() -> Self {
        SE2Element(Mat3::identity())
    }

    /// Builds from the planar rotation angle and translation.
    pub fn from_angle_translation(angle: f64, tx: f64, ty: f64) -> Self {
        let (s, c) = angle.sin_cos();
        SE2Element(Mat3::new(c, -s, tx, s, c, ty, 0.0, 0.0, 1.0))
    }

    /// Validates the homogeneous-matrix invariants before wrapping.
    pub fn new(m: Mat3) -> Result<Self, GeomError> {
        let bottom = (m[(2, 0)].abs()).max(m[(2, 1)].abs()).max((m[(2, 2)] - 1.0).abs());
        let r = m.fixed_view::<2, 2>(0, 0);
        let ortho = (r.transpose() * r - nalgebra::Matrix2::identity()).abs().max();
        let det = r[(0, 0)] * r[(1, 1)] - r[(0, 1)] * r[(1, 0)];
        let defect = bottom.max(ortho).max((det - 1.0).abs());
        if defect > ROTATION_TOL {
            return Err(GeomError::NotSE2 { defect });
        }
        Ok(SE2Element(m))
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.0
    }

    /// Counter-clockwise rotation angle in (-pi, pi].
    pub fn angle(&self) -> f64 {
        self.0[(1, 0)].atan2(self.0[(0, 0)])
    }

    pub fn translation(&self) -> (f64, f64) {
        (self.0[(0, 2)], self.0[(1, 2)])
    }

    pub fn compose(&self, other: &SE2Element) -> Self {
        SE2Element(self.0 * other.0)
    }

    pub fn inverse(&self) -> Self {
        let r = self.0.fixed_view::<2, 2>(0, 0).transpose();
        let t = self.0.fixed_view::<2, 1>(0, 2);
        let ti = -(r * t);
        SE2Element(Mat3::new(
            r[(0, 0)], r[(0, 1)], ti[(0, 0)],
            r[(1, 0)], r[(1, 1)], ti[(1, 0)],
            0.0, 0.0, 1.0,
        ))
    }
}

/// Exponential se(2) -> SE(2) for coordinates in the [`se2_basis`] basis.
pub fn exp_se2(xi: &Vec3) -> SE2Element {
    let w = xi.z;
    // rotation block of exp is R(-w); V integrates the rotation flow
    let (v11, v12) = if w.abs() < SMALL_ANGLE {
        (1.0 - w * w / 6.0, w / 2.0 - w * w * w / 24.0)
    } else {
        (w.sin() / w, (1.0 - w.cos()) / w)
    };
    let tx = v11 * xi.x + v12 * xi.y;
    let ty = -v12 * xi.x + v11 * xi.y;
    SE2Element::from_angle_translation(-w, tx, ty)
}
