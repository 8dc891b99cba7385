//! Structure-preserving discrete mechanics on Lie groupoids.
//!
//! The discrete state space of a mechanical integrator is a Lie groupoid: a
//! set of arrows over a base manifold with a partial composition. Classical
//! two-point variational integrators (pair groupoid), Lie-Poisson updates
//! on a Lie group, the discrete heavy top (action groupoid) and reduced
//! planar systems (gauge groupoid chart) are all instances of the same
//! discrete Euler-Lagrange equations, and this crate implements that common
//! calculus once:
//!
//! - [`geom`]: SO(3)/SE(2) matrix kernels (hat/vee, exp/log, coadjoint).
//! - [`groupoid`]: the abstract groupoid interface, invariant derivatives,
//!   discrete Euler-Lagrange residual, Legendre transforms, regularity.
//! - [`solver`]: Newton iteration advancing the discrete flow inside the
//!   source fibers, plus trajectory orchestration.
//! - [`models`]: concrete instances and their closed-form steppers
//!   (Moser-Veselov rigid body, heavy top, planar two-body system).
//! - [`diagnostics`]: numerical certification of symplecticity, Noether
//!   constants and reduction consistency.

pub mod diagnostics;
pub mod geom;
pub mod groupoid;
pub mod models;
pub mod solver;

pub use groupoid::calculus::{DerivativeMode, DiffConfig};
pub use groupoid::{DiscreteLagrangian, Groupoid, Momentum};
pub use solver::{NewtonConfig, StepReport, Trajectory};
