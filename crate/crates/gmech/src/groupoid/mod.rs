//! Abstract Lie-groupoid interface and the generic discrete-mechanics
//! calculus built on top of it.
//!
//! A model plugs in by implementing [`Groupoid`]: structural maps, a
//! retraction into the source fibers, and smooth ambient coordinates. All
//! derivative machinery (invariant derivatives, the discrete Euler-Lagrange
//! residual, Legendre transforms, the regularity matrix) is expressed purely
//! through that interface, so it runs unchanged on every concrete model.

pub mod axioms;
pub mod calculus;

use nalgebra::DVector;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GroupoidError {
    #[error("elements are not composable: target/source mismatch {mismatch:.3e}")]
    NotComposable { mismatch: f64 },
    #[error("coordinate vector has length {got}, chart dimension is {expected}")]
    ChartDimension { got: usize, expected: usize },
}

/// A Lie groupoid over a base manifold, presented through the operations the
/// discrete calculus needs.
///
/// Fiber vectors and momenta are coordinate vectors in a fixed basis of the
/// source-fiber tangent space at the identity, one basis per base point,
/// chosen once by the model and constant along trajectories. The basis is
/// realized implicitly by `retract`: basis vector `e_i` is the initial
/// tangent of `t -> retract(x, e_i, t)`.
///
/// `to_chart`/`from_chart` provide smooth ambient coordinates for finite
/// differences and tangent decompositions. A genuine local chart qualifies;
/// so does a smooth embedding, provided `from_chart` is a smooth left
/// inverse of `to_chart` defined near the image (models with rotation
/// factors use the flattened matrix plus a polar projection).
///
/// Implementations must be immutable after construction; every method is
/// read-only and callable concurrently.
pub trait Groupoid {
    type Base: Clone;
    type Element: Clone;

    /// Source map (alpha).
    fn source(&self, g: &Self::Element) -> Self::Base;
    /// Target map (beta).
    fn target(&self, g: &Self::Element) -> Self::Base;
    /// Identity section (epsilon).
    fn identity(&self, x: &Self::Base) -> Self::Element;
    /// Partial multiplication; requires `target(g) = source(h)`.
    fn compose(
        &self,
        g: &Self::Element,
        h: &Self::Element,
    ) -> Result<Self::Element, GroupoidError>;
    /// Inversion.
    fn invert(&self, g: &Self::Element) -> Self::Element;

    /// Dimension of the source-fiber tangent space at identities.
    fn fiber_dim(&self) -> usize;

    /// Curve in the source fiber over `x` through the identity with initial
    /// tangent `v` (coordinates in the fiber basis at `x`). Implementations
    /// satisfy `retract(x, v, t) = retract(x, t*v, 1)`.
    fn retract(&self, x: &Self::Base, v: &DVector<f64>, t: f64) -> Self::Element;

    /// Dimension of the ambient coordinate vector.
    fn chart_dim(&self) -> usize;
    fn to_chart(&self, g: &Self::Element) -> DVector<f64>;
    #[allow(clippy::wrong_self_convention)]
    fn from_chart(&self, c: &DVector<f64>) -> Self::Element;

    /// Distance between base points, used for composability checks.
    fn base_distance(&self, x: &Self::Base, y: &Self::Base) -> f64;

    /// Canonical fiber basis: the columns of the identity in coordinates.
    fn fiber_basis(&self) -> Vec<DVector<f64>> {
        let n = self.fiber_dim();
        (0..n)
            .map(|i| {
                let mut e = DVector::zeros(n);
                e[i] = 1.0;
                e
            })
            .collect()
    }

    /// Slack accepted when checking that a pair is composable.
    fn composability_tol(&self) -> f64 {
        1e-9
    }

    /// Chart distance between two elements (infinity norm).
    fn chart_distance(&self, g: &Self::Element, h: &Self::Element) -> f64 {
        (self.to_chart(g) - self.to_chart(h)).amax()
    }

    fn check_composable(
        &self,
        g: &Self::Element,
        h: &Self::Element,
    ) -> Result<(), GroupoidError> {
        let mismatch = self.base_distance(&self.target(g), &self.source(h));
        if mismatch > self.composability_tol() {
            return Err(GroupoidError::NotComposable { mismatch });
        }
        Ok(())
    }
}

/// A discrete Lagrangian: a real function on the groupoid.
///
/// Models may expose exact directional derivatives along the invariant
/// lifts; the calculus uses them when the caller selects
/// [`calculus::DerivativeMode::ModelAnalytic`] and falls back to central
/// finite differences otherwise.
pub trait DiscreteLagrangian<G: Groupoid> {
    fn evaluate(&self, g: &G::Element) -> f64;

    /// Exact left-invariant derivative at `g` along fiber coordinates `v`
    /// at `target(g)`, when the model provides one.
    fn exact_left_derivative(&self, _g: &G::Element, _v: &DVector<f64>) -> Option<f64> {
        None
    }

    /// Exact right-invariant derivative at `g` along fiber coordinates `v`
    /// at `source(g)`, when the model provides one.
    fn exact_right_derivative(&self, _g: &G::Element, _v: &DVector<f64>) -> Option<f64> {
        None
    }
}

/// Blanket impl so plain closures work as Lagrangians in tests and ad-hoc
/// experiments.
impl<G: Groupoid, F: Fn(&G::Element) -> f64> DiscreteLagrangian<G> for F {
    fn evaluate(&self, g: &G::Element) -> f64 {
        self(g)
    }
}

/// An element of the dual fiber at `base`: coordinates in the basis dual to
/// the fiber basis. Pairing with a fiber vector is the coordinate dot
/// product.
#[derive(Debug, Clone)]
pub struct Momentum<B> {
    pub base: B,
    pub coords: DVector<f64>,
}

impl<B> Momentum<B> {
    pub fn new(base: B, coords: DVector<f64>) -> Self {
        Momentum { base, coords }
    }

    pub fn pair(&self, v: &DVector<f64>) -> f64 {
        self.coords.dot(v)
    }

    pub fn norm_inf(&self) -> f64 {
        if self.coords.is_empty() {
            0.0
        } else {
            self.coords.amax()
        }
    }
}
