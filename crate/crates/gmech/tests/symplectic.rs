//! Preservation of the Poincare-Cartan 2-section by the discrete flow,
//! checked as a matrix identity in the invariant lift bases, plus the
//! classical cotangent-side cross-check on the pair groupoid.

use gmech::diagnostics::symplectic_residual;
use gmech::geom::{exp_so3, Mat3, Vec3};
use gmech::models::{HarmonicOscillatorLagrangian, LieGroupSO3, PairGroupoid, RigidBodyLagrangian};
use gmech::solver::{evolve_step, hamiltonian_step, NewtonConfig};
use gmech::{DerivativeMode, DiffConfig, Groupoid, Momentum};
use nalgebra::{dvector, DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn tight_newton() -> NewtonConfig {
    NewtonConfig {
        residual_tol: 1e-13,
        jacobian_mode: DerivativeMode::ModelAnalytic,
        ..Default::default()
    }
}

fn oscillator() -> HarmonicOscillatorLagrangian {
    HarmonicOscillatorLagrangian {
        mass: 1.0,
        spring: 2.0,
        step_h: 0.1,
    }
}

#[test]
fn harmonic_oscillator_preserves_two_section() {
    let gpd = PairGroupoid::new(1);
    let lag = oscillator();
    let cfg = tight_newton();
    let diff = DiffConfig::analytic();
    let mut rng = ChaCha8Rng::seed_from_u64(21);

    for _ in 0..5 {
        let x0 = rng.gen_range(-1.0..1.0);
        let x1 = x0 + rng.gen_range(-0.2..0.2);
        let g = (dvector![x0], dvector![x1]);
        let step_offset = dvector![x1 - x0];
        let step = |q: &(DVector<f64>, DVector<f64>)| {
            let guess = gpd.retract(&gpd.target(q), &step_offset, 1.0);
            evolve_step(&gpd, &lag, q, &guess, &cfg).map(|(h, _)| h)
        };
        let res = symplectic_residual(&gpd, &lag, &g, step, &diff).unwrap();
        println!("oscillator symplectic residual: {res:.3e}");
        assert!(res <= 1e-6, "residual {res:.3e}");
    }
}

#[test]
fn free_rigid_body_preserves_two_section() {
    let gpd = LieGroupSO3;
    let h = 0.1;
    let lag = RigidBodyLagrangian::from_inertia(&Mat3::from_diagonal(&Vec3::new(2.0, 3.0, 4.0)), h);
    let cfg = tight_newton();
    let diff = DiffConfig::analytic();
    let mut rng = ChaCha8Rng::seed_from_u64(22);

    for _ in 0..5 {
        let axis = Vec3::new(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        );
        let w = exp_so3(&(axis * 0.15));
        let v = gmech::geom::log_so3(&w).unwrap();
        let step_offset = dvector![v.x, v.y, v.z];
        let step = |q: &gmech::geom::Rotation| {
            let guess = gpd.retract(&gpd.target(q), &step_offset, 1.0);
            evolve_step(&gpd, &lag, q, &guess, &cfg).map(|(h, _)| h)
        };
        let res = symplectic_residual(&gpd, &lag, &w, step, &diff).unwrap();
        println!("rigid body symplectic residual: {res:.3e}");
        assert!(res <= 1e-6, "residual {res:.3e}");
    }
}

#[test]
fn residual_shrinks_at_second_order_in_the_step() {
    // needs a genuinely nonlinear flow: the oscillator map is affine and
    // leaves nothing to truncate, so use the rigid body
    let gpd = LieGroupSO3;
    let lag = RigidBodyLagrangian::from_inertia(&Mat3::from_diagonal(&Vec3::new(2.0, 3.0, 4.0)), 0.1);
    let cfg = tight_newton();
    let w = exp_so3(&Vec3::new(0.2, -0.1, 0.15));
    let v = gmech::geom::log_so3(&w).unwrap();
    let step_offset = dvector![v.x, v.y, v.z];
    let step = |q: &gmech::geom::Rotation| {
        let guess = gpd.retract(&gpd.target(q), &step_offset, 1.0);
        evolve_step(&gpd, &lag, q, &guess, &cfg).map(|(h, _)| h)
    };
    let res_at = |delta: f64| {
        symplectic_residual(
            &gpd,
            &lag,
            &w,
            step,
            &DiffConfig {
                fd_step: delta,
                mode: DerivativeMode::ModelAnalytic,
            },
        )
        .unwrap()
    };
    let coarse = res_at(4e-3);
    let fine = res_at(2e-3);
    let ratio = coarse / fine;
    println!("symplectic residual ratio at halved step: {ratio:.2} ({coarse:.3e} -> {fine:.3e})");
    assert!(
        (2.5..=6.0).contains(&ratio),
        "expected roughly fourfold reduction, got {ratio:.2}"
    );
}

/// Classical cotangent cross-check: the (q, p) step map of the midpoint
/// oscillator has a Jacobian satisfying DF^T J DF = J.
#[test]
fn pair_groupoid_cotangent_jacobian_is_symplectic() {
    let gpd = PairGroupoid::new(1);
    let lag = oscillator();
    let cfg = tight_newton();
    let a = lag.mass / lag.step_h;

    let flow = |q: f64, p: f64| -> (f64, f64) {
        let mu = Momentum::new(dvector![q], dvector![p]);
        let guess = (dvector![q], dvector![q + p / a]);
        let (mu_next, h, _) = hamiltonian_step(&gpd, &lag, &mu, &guess, &cfg).unwrap();
        (h.1[0], mu_next.coords[0])
    };

    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..5 {
        let q = rng.gen_range(-1.0..1.0);
        let p = rng.gen_range(-1.0..1.0);
        let d = 1e-5;
        let mut jac = DMatrix::zeros(2, 2);
        for (col, (dq, dp)) in [(d, 0.0), (0.0, d)].iter().enumerate() {
            let (qp, pp) = flow(q + dq, p + dp);
            let (qm, pm) = flow(q - dq, p - dp);
            jac[(0, col)] = (qp - qm) / (2.0 * d);
            jac[(1, col)] = (pp - pm) / (2.0 * d);
        }
        let j = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]);
        let defect = (jac.transpose() * &j * &jac - &j).abs().max();
        println!("cotangent symplectic defect: {defect:.3e}");
        assert!(defect <= 1e-6, "DF^T J DF - J = {defect:.3e}");
    }
}
