//! Invariant derivatives of a discrete Lagrangian and the operators built
//! from them: discrete Euler-Lagrange residual, Legendre transforms,
//! regularity matrix and the Poincare-Cartan 2-section.
//!
//! The left-invariant derivative of `L` at `g` along a fiber vector `v` at
//! `target(g)` is the derivative at `t = 0` of `L(g * retract(target(g), v, t))`;
//! the right-invariant one at `h` along `v` at `source(h)` is minus the
//! derivative of `L(retract(source(h), v, t)^{-1} * h)`. Derivatives are
//! central finite differences of step `fd_step` unless the model supplies
//! exact values and `ModelAnalytic` mode is selected. Exact limits do not
//! depend on the choice of retraction; the finite-difference truncation is
//! second order in the step.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use super::{DiscreteLagrangian, Groupoid, GroupoidError, Momentum};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivativeMode {
    /// Central finite differences through the retraction.
    FiniteDifference,
    /// Use the Lagrangian's exact directional derivatives where provided,
    /// falling back to finite differences where not.
    ModelAnalytic,
}

#[derive(Debug, Clone, Copy)]
pub struct DiffConfig {
    pub fd_step: f64,
    pub mode: DerivativeMode,
}

impl Default for DiffConfig {
    fn default() -> Self {
        DiffConfig {
            fd_step: 1e-5,
            mode: DerivativeMode::FiniteDifference,
        }
    }
}

impl DiffConfig {
    pub fn analytic() -> Self {
        DiffConfig {
            fd_step: 1e-5,
            mode: DerivativeMode::ModelAnalytic,
        }
    }

    pub fn with_step(step: f64) -> Self {
        DiffConfig {
            fd_step: step,
            mode: DerivativeMode::FiniteDifference,
        }
    }
}

#[derive(Debug, Error)]
pub enum CalculusError {
    #[error(transparent)]
    Groupoid(#[from] GroupoidError),
}

/// Left-invariant derivative of `L` at `g` along fiber coordinates `v` at
/// `target(g)`.
pub fn left_derivative<G: Groupoid, L: DiscreteLagrangian<G>>(
    gpd: &G,
    lag: &L,
    g: &G::Element,
    v: &DVector<f64>,
    cfg: &DiffConfig,
) -> f64 {
    if cfg.mode == DerivativeMode::ModelAnalytic {
        if let Some(d) = lag.exact_left_derivative(g, v) {
            return d;
        }
    }
    let x = gpd.target(g);
    let d = cfg.fd_step;
    let plus = gpd
        .compose(g, &gpd.retract(&x, v, d))
        .expect("retraction stays in the source fiber of target(g)");
    let minus = gpd
        .compose(g, &gpd.retract(&x, v, -d))
        .expect("retraction stays in the source fiber of target(g)");
    (lag.evaluate(&plus) - lag.evaluate(&minus)) / (2.0 * d)
}

/// Right-invariant derivative of `L` at `h` along fiber coordinates `v` at
/// `source(h)`.
pub fn right_derivative<G: Groupoid, L: DiscreteLagrangian<G>>(
    gpd: &G,
    lag: &L,
    h: &G::Element,
    v: &DVector<f64>,
    cfg: &DiffConfig,
) -> f64 {
    if cfg.mode == DerivativeMode::ModelAnalytic {
        if let Some(d) = lag.exact_right_derivative(h, v) {
            return d;
        }
    }
    let x = gpd.source(h);
    let d = cfg.fd_step;
    let plus = gpd
        .compose(&gpd.invert(&gpd.retract(&x, v, d)), h)
        .expect("inverted retraction composes with h");
    let minus = gpd
        .compose(&gpd.invert(&gpd.retract(&x, v, -d)), h)
        .expect("inverted retraction composes with h");
    -(lag.evaluate(&plus) - lag.evaluate(&minus)) / (2.0 * d)
}

/// Forward discrete Legendre transform: components are the left-invariant
/// derivatives along the fiber basis at `target(g)`.
pub fn legendre_plus<G: Groupoid, L: DiscreteLagrangian<G>>(
    gpd: &G,
    lag: &L,
    g: &G::Element,
    cfg: &DiffConfig,
) -> Momentum<G::Base> {
    let basis = gpd.fiber_basis();
    let coords =
        DVector::from_iterator(basis.len(), basis.iter().map(|e| left_derivative(gpd, lag, g, e, cfg)));
    Momentum::new(gpd.target(g), coords)
}

/// Backward discrete Legendre transform: components are the right-invariant
/// derivatives along the fiber basis at `source(h)`.
pub fn legendre_minus<G: Groupoid, L: DiscreteLagrangian<G>>(
    gpd: &G,
    lag: &L,
    h: &G::Element,
    cfg: &DiffConfig,
) -> Momentum<G::Base> {
    let basis = gpd.fiber_basis();
    let coords = DVector::from_iterator(
        basis.len(),
        basis.iter().map(|e| right_derivative(gpd, lag, h, e, cfg)),
    );
    Momentum::new(gpd.source(h), coords)
}

/// Discrete Euler-Lagrange residual of the composable pair `(g, h)`, a
/// covector at `target(g)`. Computed literally as
/// `legendre_plus(g) - legendre_minus(h)`, so the two-transform identity
/// holds by construction. The pair solves the discrete Euler-Lagrange
/// equations exactly when this vanishes.
pub fn del_residual<G: Groupoid, L: DiscreteLagrangian<G>>(
    gpd: &G,
    lag: &L,
    g: &G::Element,
    h: &G::Element,
    cfg: &DiffConfig,
) -> Result<Momentum<G::Base>, CalculusError> {
    gpd.check_composable(g, h)?;
    let plus = legendre_plus(gpd, lag, g, cfg);
    let minus = legendre_minus(gpd, lag, h, cfg);
    Ok(Momentum::new(plus.base, plus.coords - minus.coords))
}

/// Regularity matrix and its 2-norm condition number.
#[derive(Debug, Clone)]
pub struct RegularityReport {
    pub matrix: DMatrix<f64>,
    pub condition: f64,
}

/// Matrix of mixed invariant derivatives, entry `(i, j)` being the
/// right-invariant derivative along `e_i` of the left-invariant derivative
/// along `e_j`. Its invertibility is the regularity of `L` at `g`:
/// singularity is reported through the condition number, never raised.
pub fn regularity_matrix<G: Groupoid, L: DiscreteLagrangian<G>>(
    gpd: &G,
    lag: &L,
    g: &G::Element,
    cfg: &DiffConfig,
) -> RegularityReport {
    let n = gpd.fiber_dim();
    let basis = gpd.fiber_basis();
    let d = cfg.fd_step;
    let alpha = gpd.source(g);
    let mut m = DMatrix::zeros(n, n);

    let exact_inner = n > 0
        && cfg.mode == DerivativeMode::ModelAnalytic
        && lag.exact_left_derivative(g, &basis[0]).is_some();

    for i in 0..n {
        let left_shift = |s: f64| -> G::Element {
            gpd.compose(&gpd.invert(&gpd.retract(&alpha, &basis[i], s)), g)
                .expect("inverted retraction composes with g")
        };
        let gp = left_shift(d);
        let gm = left_shift(-d);
        for j in 0..n {
            let entry = if exact_inner {
                // one outer difference over the exact inner derivative
                let fp = lag
                    .exact_left_derivative(&gp, &basis[j])
                    .expect("exact derivative available");
                let fm = lag
                    .exact_left_derivative(&gm, &basis[j])
                    .expect("exact derivative available");
                -(fp - fm) / (2.0 * d)
            } else {
                // four-point stencil for the mixed second derivative
                let x_p = gpd.target(&gp);
                let x_m = gpd.target(&gm);
                let val = |base: &G::Element, x: &G::Base, t: f64| -> f64 {
                    lag.evaluate(
                        &gpd.compose(base, &gpd.retract(x, &basis[j], t))
                            .expect("retraction composes on the right"),
                    )
                };
                let pp = val(&gp, &x_p, d);
                let pm = val(&gp, &x_p, -d);
                let mp = val(&gm, &x_m, d);
                let mm = val(&gm, &x_m, -d);
                -(pp - pm - mp + mm) / (4.0 * d * d)
            };
            m[(i, j)] = entry;
        }
    }

    let condition = condition_number(&m);
    RegularityReport { matrix: m, condition }
}

/// 2-norm condition number; infinite when the smallest singular value
/// underflows against the largest.
pub fn condition_number(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 {
        return 1.0;
    }
    let sv = m.clone().svd(false, false).singular_values;
    let smax = sv.max();
    let smin = sv.min();
    if smin <= smax * f64::EPSILON || smax == 0.0 {
        f64::INFINITY
    } else {
        smax / smin
    }
}

/// Poincare-Cartan 2-section evaluated on two tangent pairs at `g`.
///
/// A tangent pair `(a, b)` holds the coefficients of a right-invariant part
/// (fiber basis at `source(g)`) and a left-invariant part (fiber basis at
/// `target(g)`). The diagonal lift blocks vanish, so the value is assembled
/// from the regularity matrix alone:
/// `Omega((a,b),(a',b')) = -a.M.b' + a'.M.b`.
pub fn omega_l<G: Groupoid, L: DiscreteLagrangian<G>>(
    gpd: &G,
    lag: &L,
    g: &G::Element,
    u: (&DVector<f64>, &DVector<f64>),
    w: (&DVector<f64>, &DVector<f64>),
    cfg: &DiffConfig,
) -> f64 {
    let m = regularity_matrix(gpd, lag, g, cfg).matrix;
    omega_l_from_matrix(&m, u, w)
}

/// Same as [`omega_l`] with a precomputed regularity matrix.
pub fn omega_l_from_matrix(
    m: &DMatrix<f64>,
    u: (&DVector<f64>, &DVector<f64>),
    w: (&DVector<f64>, &DVector<f64>),
) -> f64 {
    -(u.0.transpose() * m * w.1)[(0, 0)] + (w.0.transpose() * m * u.1)[(0, 0)]
}

/// Assembles the matrix of the 2-section in the lift basis (right-invariant
/// lifts first, then left-invariant ones): `[[0, -M], [M^T, 0]]`.
pub fn omega_matrix(m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    let mut out = DMatrix::zeros(2 * n, 2 * n);
    out.view_mut((0, n), (n, n)).copy_from(&(-m));
    out.view_mut((n, 0), (n, n)).copy_from(&m.transpose());
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{exp_so3, hat, Mat3, Vec3};
    use crate::models::{HarmonicOscillatorLagrangian, HeavyTopGroupoid, HeavyTopParams, PairGroupoid};
    use approx::assert_relative_eq;
    use nalgebra::dvector;

    fn top_params() -> HeavyTopParams {
        HeavyTopParams {
            inertia: Mat3::from_diagonal(&Vec3::new(2.0, 3.0, 4.0)),
            mass: 1.0,
            gravity: 9.8,
            length: 0.25,
            axis_e: Vec3::z(),
            step_h: 0.1,
        }
    }

    fn top_point() -> (Vec3, crate::geom::Rotation) {
        (
            Vec3::new(0.3, -0.2, 0.93).normalize(),
            exp_so3(&Vec3::new(0.25, 0.4, -0.15)),
        )
    }

    #[test]
    fn derivatives_converge_at_second_order() {
        // halving the step should shrink the truncation error by ~4
        let gpd = HeavyTopGroupoid;
        let p = top_params();
        let lag = p.lagrangian();
        let g = top_point();
        let dir = dvector![0.7, -0.4, 0.5];
        let exact_left = lag.exact_left_derivative(&g, &dir).unwrap();
        let exact_right = lag.exact_right_derivative(&g, &dir).unwrap();

        for (exact, kind) in [(exact_left, "left"), (exact_right, "right")] {
            let err = |step: f64| -> f64 {
                let cfg = DiffConfig::with_step(step);
                let fd = match kind {
                    "left" => left_derivative(&gpd, &lag, &g, &dir, &cfg),
                    _ => right_derivative(&gpd, &lag, &g, &dir, &cfg),
                };
                (fd - exact).abs()
            };
            let ratio = err(1e-3) / err(5e-4);
            assert!(
                (3.5..=4.5).contains(&ratio),
                "{kind} derivative not second order: ratio {ratio}"
            );
        }
    }

    #[test]
    fn regularity_matrix_on_pair_groupoid_is_minus_mixed_partials() {
        let gpd = PairGroupoid::new(2);
        let lag = HarmonicOscillatorLagrangian {
            mass: 1.1,
            spring: 2.3,
            step_h: 0.1,
        };
        let g = (dvector![0.2, -0.3], dvector![0.4, 0.1]);
        // d2L/dx_i dy_j of the midpoint oscillator is (-a - b) I, so the
        // regularity matrix is (a + b) I
        let a = lag.mass / lag.step_h;
        let b = lag.step_h * lag.spring / 4.0;
        let expected = nalgebra::DMatrix::from_diagonal_element(2, 2, a + b);

        // pure finite differences carry the mixed-stencil roundoff floor
        let rep = regularity_matrix(&gpd, &lag, &g, &DiffConfig::default());
        assert_relative_eq!(rep.matrix, expected, epsilon = 1e-5);
        assert!(rep.condition < 10.0);

        // the exact-inner-derivative path is clean
        let rep = regularity_matrix(&gpd, &lag, &g, &DiffConfig::analytic());
        assert_relative_eq!(rep.matrix, expected, epsilon = 1e-9);
    }

    #[test]
    fn regularity_matrix_of_constant_lagrangian_is_singular_zero() {
        let gpd = PairGroupoid::new(2);
        let lag = |_: &(nalgebra::DVector<f64>, nalgebra::DVector<f64>)| 3.0;
        let g = (dvector![0.0, 0.0], dvector![1.0, 1.0]);
        let rep = regularity_matrix(&gpd, &lag, &g, &DiffConfig::default());
        assert_eq!(rep.matrix.abs().max(), 0.0);
        assert!(rep.condition.is_infinite());
    }

    #[test]
    fn heavy_top_regularity_matches_trace_oracle() {
        // analytic oracle: entry(i,j) = -(1/h) Tr(J e_i^ W e_j^)
        let gpd = HeavyTopGroupoid;
        let p = top_params();
        let lag = p.lagrangian();
        let g = top_point();
        let shifted = p.shifted_inertia();
        let rep = regularity_matrix(&gpd, &lag, &g, &DiffConfig::default());
        let basis = [Vec3::x(), Vec3::y(), Vec3::z()];
        for i in 0..3 {
            for j in 0..3 {
                let oracle =
                    -(shifted * hat(&basis[i]) * g.1.matrix() * hat(&basis[j])).trace() / p.step_h;
                assert_relative_eq!(rep.matrix[(i, j)], oracle, epsilon = 1e-4);
            }
        }
        assert!(rep.condition.is_finite() && rep.condition < 1e6);

        // the exact-inner-derivative path should agree more tightly
        let rep2 = regularity_matrix(&gpd, &lag, &g, &DiffConfig::analytic());
        for i in 0..3 {
            for j in 0..3 {
                let oracle =
                    -(shifted * hat(&basis[i]) * g.1.matrix() * hat(&basis[j])).trace() / p.step_h;
                assert_relative_eq!(rep2.matrix[(i, j)], oracle, epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn omega_is_antisymmetric_and_vanishes_on_diagonal_lifts() {
        let gpd = HeavyTopGroupoid;
        let p = top_params();
        let lag = p.lagrangian();
        let g = top_point();
        let cfg = DiffConfig::default();
        let u = (dvector![0.3, -0.1, 0.8], dvector![0.2, 0.5, -0.7]);
        let w = (dvector![-0.6, 0.4, 0.1], dvector![0.9, -0.2, 0.3]);

        let uw = omega_l(&gpd, &lag, &g, (&u.0, &u.1), (&w.0, &w.1), &cfg);
        let wu = omega_l(&gpd, &lag, &g, (&w.0, &w.1), (&u.0, &u.1), &cfg);
        assert_relative_eq!(uw, -wu, epsilon = 1e-12);
        assert_eq!(
            omega_l(&gpd, &lag, &g, (&u.0, &u.1), (&u.0, &u.1), &cfg),
            0.0
        );

        // pure beta-lift pairs pair to zero
        let zero = dvector![0.0, 0.0, 0.0];
        assert_eq!(
            omega_l(&gpd, &lag, &g, (&u.0, &zero), (&w.0, &zero), &cfg),
            0.0
        );
    }

    #[test]
    fn omega_mixed_value_matches_nested_difference_oracle() {
        // independent oracle: Omega((a,0),(0,b)) = -a_i M_ij b_j with M by
        // raw nested central differences, coded straight from the lifts
        let gpd = HeavyTopGroupoid;
        let p = top_params();
        let lag = p.lagrangian();
        let g = top_point();
        let cfg = DiffConfig::analytic();
        let a = dvector![0.4, -0.2, 0.6];
        let b = dvector![-0.3, 0.7, 0.5];
        let zero = dvector![0.0, 0.0, 0.0];

        let d = 1e-4;
        let alpha = gpd.source(&g);
        let value = |s: f64, t: f64| -> f64 {
            let shifted_g = gpd
                .compose(&gpd.invert(&gpd.retract(&alpha, &a, s)), &g)
                .unwrap();
            let x = gpd.target(&shifted_g);
            lag.evaluate(&gpd.compose(&shifted_g, &gpd.retract(&x, &b, t)).unwrap())
        };
        let oracle = -(value(d, d) - value(d, -d) - value(-d, d) + value(-d, -d)) / (4.0 * d * d);

        let omega = omega_l(&gpd, &lag, &g, (&a, &zero), (&zero, &b), &cfg);
        assert_relative_eq!(omega, -oracle, epsilon = 1e-5);
    }

    #[test]
    fn omega_matrix_has_block_structure() {
        let m = nalgebra::DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        let omega = omega_matrix(&m);
        assert_eq!(omega[(0, 2)], -1.0);
        assert_eq!(omega[(0, 3)], -2.0);
        assert_eq!(omega[(2, 0)], 1.0);
        assert_eq!(omega[(3, 1)], 4.0);
        assert_eq!(omega[(0, 0)], 0.0);
        assert_eq!(omega[(2, 2)], 0.0);
        // quadratic form agrees with the assembled evaluation
        let u = (dvector![0.5, -0.2], dvector![0.1, 0.3]);
        let w = (dvector![-0.4, 0.9], dvector![0.7, 0.2]);
        let stack = |p: &(nalgebra::DVector<f64>, nalgebra::DVector<f64>)| {
            nalgebra::DVector::from_iterator(4, p.0.iter().chain(p.1.iter()).copied())
        };
        let direct = omega_l_from_matrix(&m, (&u.0, &u.1), (&w.0, &w.1));
        let via_matrix = (stack(&u).transpose() * &omega * stack(&w))[(0, 0)];
        assert_relative_eq!(direct, via_matrix, epsilon = 1e-14);
    }
}
