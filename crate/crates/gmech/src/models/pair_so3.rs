//! Pair groupoid over SO(3) for the unreduced discrete rigid body, plus its
//! parameter-carrying variant used to reduce onto the heavy top.
//!
//! A left-invariant Lagrangian on the pair groupoid pushes forward along
//! `(R0, R1) -> R0^{-1} R1` to the Lie-group model, which is how the
//! Lie-Poisson reduction is exercised numerically.

use nalgebra::DVector;

use crate::geom::{exp_so3, hat, Mat3, Rotation, Vec3};
use crate::groupoid::{DiscreteLagrangian, Groupoid, GroupoidError};

fn fiber_to_vec3(v: &DVector<f64>) -> Vec3 {
    Vec3::new(v[0], v[1], v[2])
}

fn rotation_chart(r: &Rotation, out: &mut [f64]) {
    out.copy_from_slice(r.matrix().as_slice());
}

/// Pair groupoid over SO(3): elements are attitude pairs `(R0, R1)`.
/// The retraction moves the second slot by a body-frame exponential, so the
/// fiber basis is the standard so(3) basis at every base point.
#[derive(Debug, Clone, Default)]
pub struct PairSO3Groupoid;

impl Groupoid for PairSO3Groupoid {
    type Base = Rotation;
    type Element = (Rotation, Rotation);

    fn source(&self, g: &Self::Element) -> Rotation {
        g.0
    }

    fn target(&self, g: &Self::Element) -> Rotation {
        g.1
    }

    fn identity(&self, x: &Rotation) -> Self::Element {
        (*x, *x)
    }

    fn compose(
        &self,
        g: &Self::Element,
        h: &Self::Element,
    ) -> Result<Self::Element, GroupoidError> {
        self.check_composable(g, h)?;
        Ok((g.0, h.1))
    }

    fn invert(&self, g: &Self::Element) -> Self::Element {
        (g.1, g.0)
    }

    fn fiber_dim(&self) -> usize {
        3
    }

    fn retract(&self, x: &Rotation, v: &DVector<f64>, t: f64) -> Self::Element {
        (*x, x.compose(&exp_so3(&(fiber_to_vec3(v) * t))))
    }

    fn chart_dim(&self) -> usize {
        18
    }

    fn to_chart(&self, g: &Self::Element) -> DVector<f64> {
        let mut c = DVector::zeros(18);
        rotation_chart(&g.0, &mut c.as_mut_slice()[0..9]);
        rotation_chart(&g.1, &mut c.as_mut_slice()[9..18]);
        c
    }

    fn from_chart(&self, c: &DVector<f64>) -> Self::Element {
        (
            Rotation::project(&Mat3::from_column_slice(&c.as_slice()[0..9])),
            Rotation::project(&Mat3::from_column_slice(&c.as_slice()[9..18])),
        )
    }

    fn base_distance(&self, x: &Rotation, y: &Rotation) -> f64 {
        (x.matrix() - y.matrix()).abs().max()
    }
}

/// Left-invariant rigid body Lagrangian on the attitude pair groupoid:
/// `L(R0, R1) = -(1/h) Tr(J R0^T R1)`.
#[derive(Debug, Clone)]
pub struct LeftInvariantRigidBodyLagrangian {
    pub shifted: Mat3,
    pub step_h: f64,
}

impl DiscreteLagrangian<PairSO3Groupoid> for LeftInvariantRigidBodyLagrangian {
    fn evaluate(&self, g: &(Rotation, Rotation)) -> f64 {
        -(self.shifted * (g.0.matrix().transpose() * g.1.matrix())).trace() / self.step_h
    }

    fn exact_left_derivative(&self, g: &(Rotation, Rotation), v: &DVector<f64>) -> Option<f64> {
        let w = g.0.matrix().transpose() * g.1.matrix();
        Some(-(self.shifted * w * hat(&fiber_to_vec3(v))).trace() / self.step_h)
    }

    fn exact_right_derivative(&self, g: &(Rotation, Rotation), v: &DVector<f64>) -> Option<f64> {
        let w = g.0.matrix().transpose() * g.1.matrix();
        Some(-(self.shifted * hat(&fiber_to_vec3(v)) * w).trace() / self.step_h)
    }
}

/// Groupoid of attitude pairs carrying a frozen S^2 parameter: the groupoid
/// of the fibration `SO(3) x S^2 -> S^2`. Reducing it by
/// `(g, h, m) -> (g^T m, g^T h)` lands on the heavy top action groupoid.
#[derive(Debug, Clone, Default)]
pub struct ParamPairSO3Groupoid;

impl Groupoid for ParamPairSO3Groupoid {
    type Base = (Rotation, Vec3);
    type Element = (Rotation, Rotation, Vec3);

    fn source(&self, g: &Self::Element) -> (Rotation, Vec3) {
        (g.0, g.2)
    }

    fn target(&self, g: &Self::Element) -> (Rotation, Vec3) {
        (g.1, g.2)
    }

    fn identity(&self, x: &(Rotation, Vec3)) -> Self::Element {
        (x.0, x.0, x.1)
    }

    fn compose(
        &self,
        g: &Self::Element,
        h: &Self::Element,
    ) -> Result<Self::Element, GroupoidError> {
        self.check_composable(g, h)?;
        Ok((g.0, h.1, g.2))
    }

    fn invert(&self, g: &Self::Element) -> Self::Element {
        (g.1, g.0, g.2)
    }

    fn fiber_dim(&self) -> usize {
        3
    }

    fn retract(&self, x: &(Rotation, Vec3), v: &DVector<f64>, t: f64) -> Self::Element {
        (x.0, x.0.compose(&exp_so3(&(fiber_to_vec3(v) * t))), x.1)
    }

    fn chart_dim(&self) -> usize {
        21
    }

    fn to_chart(&self, g: &Self::Element) -> DVector<f64> {
        let mut c = DVector::zeros(21);
        rotation_chart(&g.0, &mut c.as_mut_slice()[0..9]);
        rotation_chart(&g.1, &mut c.as_mut_slice()[9..18]);
        c.rows_mut(18, 3).copy_from(&g.2);
        c
    }

    fn from_chart(&self, c: &DVector<f64>) -> Self::Element {
        (
            Rotation::project(&Mat3::from_column_slice(&c.as_slice()[0..9])),
            Rotation::project(&Mat3::from_column_slice(&c.as_slice()[9..18])),
            Vec3::new(c[18], c[19], c[20]).normalize(),
        )
    }

    fn base_distance(&self, x: &(Rotation, Vec3), y: &(Rotation, Vec3)) -> f64 {
        (x.0.matrix() - y.0.matrix()).abs().max().max((x.1 - y.1).amax())
    }
}

/// Heavy top Lagrangian lifted to the parametrized pair groupoid:
/// `L(g, h, m) = -(1/h) Tr(J g^T h) - h m g l (g^T m) . e`. By construction
/// it equals the heavy top Lagrangian composed with the reduction morphism.
#[derive(Debug, Clone)]
pub struct ParamRigidBodyLagrangian {
    pub shifted: Mat3,
    pub mgl: f64,
    pub axis_e: Vec3,
    pub step_h: f64,
}

impl DiscreteLagrangian<ParamPairSO3Groupoid> for ParamRigidBodyLagrangian {
    fn evaluate(&self, g: &(Rotation, Rotation, Vec3)) -> f64 {
        let w = g.0.matrix().transpose() * g.1.matrix();
        let gamma = g.0.matrix().transpose() * g.2;
        -(self.shifted * w).trace() / self.step_h - self.step_h * self.mgl * gamma.dot(&self.axis_e)
    }

    fn exact_left_derivative(&self, g: &(Rotation, Rotation, Vec3), v: &DVector<f64>) -> Option<f64> {
        let w = g.0.matrix().transpose() * g.1.matrix();
        Some(-(self.shifted * w * hat(&fiber_to_vec3(v))).trace() / self.step_h)
    }

    fn exact_right_derivative(&self, g: &(Rotation, Rotation, Vec3), v: &DVector<f64>) -> Option<f64> {
        let w = g.0.matrix().transpose() * g.1.matrix();
        let gamma = g.0.matrix().transpose() * g.2;
        let kv = fiber_to_vec3(v);
        Some(
            -(self.shifted * hat(&kv) * w).trace() / self.step_h
                - self.step_h * self.mgl * kv.cross(&gamma).dot(&self.axis_e),
        )
    }
}
