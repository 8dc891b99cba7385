//! The discrete Hamiltonian evolution operator, obtained by inverting the
//! backward Legendre transform and pushing through the forward one.

use gmech::geom::{ad_star, exp_so3, Mat3, Vec3};
use gmech::groupoid::calculus::{legendre_minus, legendre_plus};
use gmech::models::{HarmonicOscillatorLagrangian, LieGroupSO3, PairGroupoid, RigidBodyLagrangian};
use gmech::solver::{hamiltonian_step, invert_legendre_minus, NewtonConfig};
use gmech::{DerivativeMode, Groupoid, Momentum};
use nalgebra::dvector;

#[test]
fn rigid_body_hamiltonian_step_is_coadjoint_action() {
    // on a Lie group the operator sends mu to Ad*_W mu, with W the solved
    // step rotation; the momentum norm is a Casimir
    let gpd = LieGroupSO3;
    let lag = RigidBodyLagrangian::from_inertia(&Mat3::from_diagonal(&Vec3::new(2.0, 3.0, 4.0)), 0.1);
    let w0 = exp_so3(&Vec3::new(0.12, -0.07, 0.18));
    let cfg = NewtonConfig {
        residual_tol: 1e-12,
        jacobian_mode: DerivativeMode::ModelAnalytic,
        ..Default::default()
    };
    let diff = cfg.diff();

    let mu = legendre_minus(&gpd, &lag, &w0, &diff);
    // guess near but not at the root
    let guess = w0.compose(&exp_so3(&Vec3::new(0.03, -0.01, 0.02)));
    let (w, _) = invert_legendre_minus(&gpd, &lag, &mu, &guess, &cfg).unwrap();
    assert!(
        (w.matrix() - w0.matrix()).abs().max() <= 1e-9,
        "inverse Legendre strayed from the seeded root"
    );

    let (mu_next, w_solved, _) = hamiltonian_step(&gpd, &lag, &mu, &guess, &cfg).unwrap();
    let mu_vec = Vec3::new(mu.coords[0], mu.coords[1], mu.coords[2]);
    let expected = ad_star(&w_solved, &mu_vec);
    for i in 0..3 {
        approx::assert_relative_eq!(mu_next.coords[i], expected[i], epsilon = 1e-9);
    }
    approx::assert_relative_eq!(mu_next.coords.norm(), mu.coords.norm(), epsilon = 1e-10);
}

#[test]
fn harmonic_oscillator_hamiltonian_step_matches_composition_oracle() {
    // independent oracle: solve p = -D1 L(q, y) for y in closed form, then
    // p' = D2 L(q, y)
    let gpd = PairGroupoid::new(1);
    let lag = HarmonicOscillatorLagrangian {
        mass: 1.0,
        spring: 2.0,
        step_h: 0.1,
    };
    let a = lag.mass / lag.step_h;
    let b = lag.step_h * lag.spring / 4.0;
    let oracle = |q: f64, p: f64| -> (f64, f64) {
        let y = (p + q * (a - b)) / (a + b);
        let p_next = a * (y - q) - b * (q + y);
        (y, p_next)
    };

    let cfg = NewtonConfig {
        residual_tol: 1e-13,
        jacobian_mode: DerivativeMode::ModelAnalytic,
        ..Default::default()
    };
    for (q, p) in [(0.4, 0.1), (-0.2, 0.5), (1.1, -0.3)] {
        let mu = Momentum::new(dvector![q], dvector![p]);
        let guess = (dvector![q], dvector![q + p / a]);
        let (mu_next, h, _) = hamiltonian_step(&gpd, &lag, &mu, &guess, &cfg).unwrap();
        let (y, p_next) = oracle(q, p);
        approx::assert_relative_eq!(h.1[0], y, epsilon = 1e-10);
        approx::assert_relative_eq!(mu_next.coords[0], p_next, epsilon = 1e-10);
        assert_eq!(gpd.base_distance(&mu_next.base, &h.1), 0.0);
    }
}

#[test]
fn momentum_based_at_wrong_point_is_rejected() {
    let gpd = PairGroupoid::new(1);
    let lag = HarmonicOscillatorLagrangian {
        mass: 1.0,
        spring: 1.0,
        step_h: 0.1,
    };
    let mu = Momentum::new(dvector![0.5], dvector![0.2]);
    let guess = (dvector![0.0], dvector![0.1]);
    match invert_legendre_minus(&gpd, &lag, &mu, &guess, &NewtonConfig::default()) {
        Err(gmech::solver::SolverError::BaseMismatch { .. }) => {}
        other => panic!("expected BaseMismatch, got {other:?}"),
    }
}

#[test]
fn hamiltonian_step_agrees_with_lagrangian_flow() {
    // F-L(xi(g)) = F+L(g): pushing the momentum of g through the
    // Hamiltonian operator lands on the momentum of the solved successor
    let gpd = PairGroupoid::new(1);
    let lag = HarmonicOscillatorLagrangian {
        mass: 1.3,
        spring: 0.9,
        step_h: 0.08,
    };
    let cfg = NewtonConfig {
        residual_tol: 1e-13,
        jacobian_mode: DerivativeMode::ModelAnalytic,
        ..Default::default()
    };
    let diff = cfg.diff();
    let g = (dvector![0.25], dvector![0.31]);
    let guess = (dvector![0.31], dvector![0.37]);
    let (h, _) = gmech::solver::evolve_step(&gpd, &lag, &g, &guess, &cfg).unwrap();

    let mu_plus = legendre_plus(&gpd, &lag, &g, &diff);
    let (mu_next, h_ham, _) = hamiltonian_step(&gpd, &lag, &mu_plus, &guess, &cfg).unwrap();
    approx::assert_relative_eq!(h_ham.1[0], h.1[0], epsilon = 1e-9);
    approx::assert_relative_eq!(
        mu_next.coords[0],
        legendre_plus(&gpd, &lag, &h, &diff).coords[0],
        epsilon = 1e-9
    );
}
