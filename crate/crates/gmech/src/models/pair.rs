//! Pair groupoid over R^d: the discrete state space of classical
//! variational integrators. An element is an ordered pair of points, source
//! and target are the projections, and composition glues matching endpoints.

use nalgebra::DVector;

use crate::groupoid::{DiscreteLagrangian, Groupoid, GroupoidError};

/// Pair groupoid over R^d. The fiber basis at every point is the canonical
/// basis of R^d and the retraction is the straight line in the second slot.
#[derive(Debug, Clone)]
pub struct PairGroupoid {
    dim: usize,
}

impl PairGroupoid {
    pub fn new(dim: usize) -> Self {
        PairGroupoid { dim }
    }

    pub fn element(&self, x: DVector<f64>, y: DVector<f64>) -> (DVector<f64>, DVector<f64>) {
        assert_eq!(x.len(), self.dim);
        assert_eq!(y.len(), self.dim);
        (x, y)
    }
}

impl Groupoid for PairGroupoid {
    type Base = DVector<f64>;
    type Element = (DVector<f64>, DVector<f64>);

    fn source(&self, g: &Self::Element) -> Self::Base {
        g.0.clone()
    }

    fn target(&self, g: &Self::Element) -> Self::Base {
        g.1.clone()
    }

    fn identity(&self, x: &Self::Base) -> Self::Element {
        (x.clone(), x.clone())
    }

    fn compose(
        &self,
        g: &Self::Element,
        h: &Self::Element,
    ) -> Result<Self::Element, GroupoidError> {
        self.check_composable(g, h)?;
        Ok((g.0.clone(), h.1.clone()))
    }

    fn invert(&self, g: &Self::Element) -> Self::Element {
        (g.1.clone(), g.0.clone())
    }

    fn fiber_dim(&self) -> usize {
        self.dim
    }

    fn retract(&self, x: &Self::Base, v: &DVector<f64>, t: f64) -> Self::Element {
        (x.clone(), x + v * t)
    }

    fn chart_dim(&self) -> usize {
        2 * self.dim
    }

    fn to_chart(&self, g: &Self::Element) -> DVector<f64> {
        let mut c = DVector::zeros(2 * self.dim);
        c.rows_mut(0, self.dim).copy_from(&g.0);
        c.rows_mut(self.dim, self.dim).copy_from(&g.1);
        c
    }

    fn from_chart(&self, c: &DVector<f64>) -> Self::Element {
        (
            c.rows(0, self.dim).into_owned(),
            c.rows(self.dim, self.dim).into_owned(),
        )
    }

    fn base_distance(&self, x: &Self::Base, y: &Self::Base) -> f64 {
        if self.dim == 0 {
            0.0
        } else {
            (x - y).amax()
        }
    }
}

/// `L(x, y) = (c/2) |y - x|^2`; with `c = 1` this is the free particle of
/// the classical discrete Euler-Lagrange examples.
#[derive(Debug, Clone)]
pub struct FreeParticleLagrangian {
    pub coeff: f64,
}

impl FreeParticleLagrangian {
    pub fn unit() -> Self {
        FreeParticleLagrangian { coeff: 1.0 }
    }
}

impl DiscreteLagrangian<PairGroupoid> for FreeParticleLagrangian {
    fn evaluate(&self, g: &(DVector<f64>, DVector<f64>)) -> f64 {
        0.5 * self.coeff * (&g.1 - &g.0).norm_squared()
    }

    fn exact_left_derivative(&self, g: &(DVector<f64>, DVector<f64>), v: &DVector<f64>) -> Option<f64> {
        Some(self.coeff * (&g.1 - &g.0).dot(v))
    }

    fn exact_right_derivative(&self, g: &(DVector<f64>, DVector<f64>), v: &DVector<f64>) -> Option<f64> {
        Some(self.coeff * (&g.1 - &g.0).dot(v))
    }
}

/// Midpoint discretization of the harmonic oscillator,
/// `L(x, y) = (m/2h) |y-x|^2 - (h k/2) |(x+y)/2|^2`.
#[derive(Debug, Clone)]
pub struct HarmonicOscillatorLagrangian {
    pub mass: f64,
    pub spring: f64,
    pub step_h: f64,
}

impl HarmonicOscillatorLagrangian {
    pub fn d1(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        -(y - x) * (self.mass / self.step_h) - (x + y) * (self.step_h * self.spring / 4.0)
    }

    pub fn d2(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        (y - x) * (self.mass / self.step_h) - (x + y) * (self.step_h * self.spring / 4.0)
    }

    /// Closed-form next point of the classical discrete Euler-Lagrange
    /// recursion `D2 L(x, y) + D1 L(y, z) = 0`.
    pub fn classical_next(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        let a = self.mass / self.step_h;
        let b = self.step_h * self.spring / 4.0;
        (y * (2.0 * a - 2.0 * b) - x * (a + b)) / (a + b)
    }
}

impl DiscreteLagrangian<PairGroupoid> for HarmonicOscillatorLagrangian {
    fn evaluate(&self, g: &(DVector<f64>, DVector<f64>)) -> f64 {
        let mid = (&g.0 + &g.1) * 0.5;
        0.5 * self.mass / self.step_h * (&g.1 - &g.0).norm_squared()
            - 0.5 * self.step_h * self.spring * mid.norm_squared()
    }

    fn exact_left_derivative(&self, g: &(DVector<f64>, DVector<f64>), v: &DVector<f64>) -> Option<f64> {
        Some(self.d2(&g.0, &g.1).dot(v))
    }

    fn exact_right_derivative(&self, g: &(DVector<f64>, DVector<f64>), v: &DVector<f64>) -> Option<f64> {
        Some(-self.d1(&g.0, &g.1).dot(v))
    }
}

pub type PointFunction = Box<dyn Fn(&DVector<f64>) -> f64 + Send + Sync>;

/// Degenerate Lagrangian `L(x, y) = f(x) + g(y)`: its mixed-derivative
/// matrix vanishes identically, so the discrete flow does not exist.
pub struct SeparableLagrangian {
    pub f: PointFunction,
    pub g: PointFunction,
}

impl DiscreteLagrangian<PairGroupoid> for SeparableLagrangian {
    fn evaluate(&self, g: &(DVector<f64>, DVector<f64>)) -> f64 {
        (self.f)(&g.0) + (self.g)(&g.1)
    }
}
