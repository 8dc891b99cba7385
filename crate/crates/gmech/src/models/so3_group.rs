//! SO(3) viewed as a groupoid over one point: the discrete free rigid body.
//!
//! The discrete Euler-Lagrange equations specialize here to the discrete
//! Lie-Poisson update `mu_{k+1} = Ad*_{W_k} mu_k`, and advancing the body
//! means solving the quadratic matrix equation `hat(Pi) = W J - J W^T`
//! (J the shifted inertia) for the next step rotation.

use nalgebra::{DVector, Matrix4, Vector4};
use thiserror::Error;

use crate::geom::{ad_star, exp_so3, hat, vee, Mat3, Rotation, Vec3};
use crate::groupoid::{DiscreteLagrangian, Groupoid, GroupoidError};

/// A Lie group is a groupoid over a single base point; here SO(3) with the
/// exponential retraction and the flattened matrix as ambient coordinates.
#[derive(Debug, Clone, Default)]
pub struct LieGroupSO3;

fn fiber_to_vec3(v: &DVector<f64>) -> Vec3 {
    Vec3::new(v[0], v[1], v[2])
}

impl Groupoid for LieGroupSO3 {
    type Base = ();
    type Element = Rotation;

    fn source(&self, _g: &Rotation) {}

    fn target(&self, _g: &Rotation) {}

    fn identity(&self, _x: &()) -> Rotation {
        Rotation::identity()
    }

    fn compose(&self, g: &Rotation, h: &Rotation) -> Result<Rotation, GroupoidError> {
        Ok(g.compose(h))
    }

    fn invert(&self, g: &Rotation) -> Rotation {
        g.transpose()
    }

    fn fiber_dim(&self) -> usize {
        3
    }

    fn retract(&self, _x: &(), v: &DVector<f64>, t: f64) -> Rotation {
        exp_so3(&(fiber_to_vec3(v) * t))
    }

    fn chart_dim(&self) -> usize {
        9
    }

    fn to_chart(&self, g: &Rotation) -> DVector<f64> {
        DVector::from_column_slice(g.matrix().as_slice())
    }

    fn from_chart(&self, c: &DVector<f64>) -> Rotation {
        Rotation::project(&Mat3::from_column_slice(c.as_slice()))
    }

    fn base_distance(&self, _x: &(), _y: &()) -> f64 {
        0.0
    }
}

/// Moser-Veselov discrete rigid body Lagrangian `L(W) = -(1/h) Tr(J W)`
/// with `J = (Tr(I)/2) I_3 - I` the shifted inertia tensor.
#[derive(Debug, Clone)]
pub struct RigidBodyLagrangian {
    pub shifted_inertia: Mat3,
    pub step_h: f64,
}

impl RigidBodyLagrangian {
    /// Builds from the body inertia tensor.
    pub fn from_inertia(inertia: &Mat3, step_h: f64) -> Self {
        RigidBodyLagrangian {
            shifted_inertia: shifted_inertia(inertia),
            step_h,
        }
    }

    /// Body angular momentum read off a step rotation:
    /// `hat(Pi) = W J - J W^T`.
    pub fn momentum(&self, w: &Rotation) -> Vec3 {
        body_momentum(w, &self.shifted_inertia)
    }
}

/// `J = (Tr(I)/2) I_3 - I`.
pub fn shifted_inertia(inertia: &Mat3) -> Mat3 {
    Mat3::identity() * (0.5 * inertia.trace()) - inertia
}

/// Axial vector of `W J - J W^T`.
pub fn body_momentum(w: &Rotation, shifted: &Mat3) -> Vec3 {
    let m = w.matrix() * shifted;
    let a = m - m.transpose();
    vee(&a).expect("difference with own transpose is antisymmetric")
}

impl DiscreteLagrangian<LieGroupSO3> for RigidBodyLagrangian {
    fn evaluate(&self, w: &Rotation) -> f64 {
        -(self.shifted_inertia * w.matrix()).trace() / self.step_h
    }

    fn exact_left_derivative(&self, w: &Rotation, v: &DVector<f64>) -> Option<f64> {
        let k = hat(&fiber_to_vec3(v));
        Some(-(self.shifted_inertia * w.matrix() * k).trace() / self.step_h)
    }

    fn exact_right_derivative(&self, w: &Rotation, v: &DVector<f64>) -> Option<f64> {
        let k = hat(&fiber_to_vec3(v));
        Some(-(self.shifted_inertia * k * w.matrix()).trace() / self.step_h)
    }
}

/// One discrete Lie-Poisson step: `mu_{k+1} = Ad*_{g_k} mu_k`.
pub fn discrete_lie_poisson_step(mu: &Vec3, g: &Rotation) -> Vec3 {
    ad_star(g, mu)
}

#[derive(Debug, Error)]
pub enum MoserVeselovError {
    #[error("quaternion Newton did not reach tolerance: residual {residual:.3e} after {iterations} iterations")]
    NoConvergence { residual: f64, iterations: usize },
    #[error("shifted inertia must be symmetric positive definite")]
    BadInertia,
}

const MV_TOL: f64 = 1e-12;
const MV_MAX_ITERS: usize = 60;

fn rotation_from_unit_quat(q: &Vector4<f64>) -> Mat3 {
    let (w, x, y, z) = (q[0], q[1], q[2], q[3]);
    Mat3::new(
        1.0 - 2.0 * (y * y + z * z),
        2.0 * (x * y - w * z),
        2.0 * (x * z + w * y),
        2.0 * (x * y + w * z),
        1.0 - 2.0 * (x * x + z * z),
        2.0 * (y * z - w * x),
        2.0 * (x * z - w * y),
        2.0 * (y * z + w * x),
        1.0 - 2.0 * (x * x + y * y),
    )
}

fn quat_from_rotation(r: &Rotation) -> Vector4<f64> {
    let q = nalgebra::UnitQuaternion::from_rotation_matrix(
        &nalgebra::Rotation3::from_matrix_unchecked(*r.matrix()),
    );
    Vector4::new(q.w, q.i, q.j, q.k)
}

/// Solves the Moser-Veselov equation `hat(Pi) = W J - J W^T` for
/// `W` in SO(3), returning the root nearest `w_guess`.
///
/// The unknown is parametrized by a unit quaternion; each Newton iteration
/// solves the 4x4 system (momentum residual plus the unit constraint) and
/// renormalizes once. The equation has several rotation roots, so the guess
/// selects the branch.
pub fn moser_veselov_solve(
    pi: &Vec3,
    shifted: &Mat3,
    w_guess: &Rotation,
) -> Result<Rotation, MoserVeselovError> {
    if (shifted - shifted.transpose()).abs().max() > 1e-12 {
        return Err(MoserVeselovError::BadInertia);
    }
    let eig = shifted.symmetric_eigenvalues();
    if eig.min() <= 0.0 {
        return Err(MoserVeselovError::BadInertia);
    }

    let residual = |q: &Vector4<f64>| -> Vector4<f64> {
        let w = rotation_from_unit_quat(q);
        let m = w * shifted;
        let r = vee(&(m - m.transpose())).expect("antisymmetric by construction") - pi;
        Vector4::new(r.x, r.y, r.z, 0.5 * (q.norm_squared() - 1.0))
    };

    let mut q = quat_from_rotation(w_guess);
    let mut res = residual(&q);
    for iter in 0..MV_MAX_ITERS {
        let rnorm = res.fixed_rows::<3>(0).amax();
        if rnorm <= MV_TOL {
            return Ok(Rotation::from_matrix_unchecked(rotation_from_unit_quat(&q)));
        }
        // central-difference Jacobian in the quaternion coordinates
        let mut jac = Matrix4::zeros();
        let dq = 1e-6;
        for j in 0..4 {
            let mut qp = q;
            let mut qm = q;
            qp[j] += dq;
            qm[j] -= dq;
            jac.set_column(j, &((residual(&qp) - residual(&qm)) / (2.0 * dq)));
        }
        let delta = jac.lu().solve(&(-res)).ok_or(MoserVeselovError::NoConvergence {
            residual: rnorm,
            iterations: iter,
        })?;
        q += delta;
        q.normalize_mut();
        res = residual(&q);
    }
    let rnorm = res.fixed_rows::<3>(0).amax();
    if rnorm <= MV_TOL {
        Ok(Rotation::from_matrix_unchecked(rotation_from_unit_quat(&q)))
    } else {
        Err(MoserVeselovError::NoConvergence {
            residual: rnorm,
            iterations: MV_MAX_ITERS,
        })
    }
}

/// One closed-form free rigid body step:
/// `Pi_{k+1} = W_k^T Pi_k`, then `W_{k+1}` from the Moser-Veselov equation
/// warm-started at `W_k`.
pub fn free_rigid_body_step(
    w: &Rotation,
    pi: &Vec3,
    shifted: &Mat3,
) -> Result<(Rotation, Vec3), MoserVeselovError> {
    let pi_next = ad_star(w, pi);
    let w_next = moser_veselov_solve(&pi_next, shifted, w)?;
    Ok((w_next, pi_next))
}
