//! Concrete groupoid instances and discrete Lagrangians, together with the
//! closed-form steppers used as oracles for the generic Newton solver.

pub mod beanie;
pub mod heavy_top;
pub mod pair;
pub mod pair_so3;
pub mod so3_group;

pub use beanie::{beanie_step, BeanieElement, BeanieGroupoid, BeanieLagrangian, BeanieParams, CosinePotential, Potential, ZeroPotential};
pub use heavy_top::{
    discrete_euler_poincare_residual, heavy_top_step, HeavyTopGroupoid, HeavyTopLagrangian,
    HeavyTopParams, HeavyTopState,
};
pub use pair::{FreeParticleLagrangian, HarmonicOscillatorLagrangian, PairGroupoid, SeparableLagrangian};
pub use pair_so3::{LeftInvariantRigidBodyLagrangian, PairSO3Groupoid, ParamPairSO3Groupoid, ParamRigidBodyLagrangian};
pub use so3_group::{
    discrete_lie_poisson_step, free_rigid_body_step, moser_veselov_solve, LieGroupSO3,
    RigidBodyLagrangian,
};
