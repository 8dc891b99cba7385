//! Newton iteration advancing the discrete dynamics on a groupoid.
//!
//! The unknown next element is parametrized through the source fiber of the
//! current target point, `h(theta) = h_guess * retract(target(h_guess), theta, 1)`,
//! which keeps every iterate composable with the current element exactly; the
//! groupoid constraint is enforced by construction, never by penalty. Newton
//! then drives the discrete Euler-Lagrange residual (or a Legendre-transform
//! mismatch) to zero in the unconstrained fiber coordinates.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::groupoid::calculus::{
    self, condition_number, legendre_minus, legendre_plus, regularity_matrix, DerivativeMode,
    DiffConfig,
};
use crate::groupoid::{DiscreteLagrangian, Groupoid, GroupoidError, Momentum};

/// Jacobians with a larger 2-norm condition number are treated as singular;
/// by the regularity theorem this signals a non-regular Lagrangian region.
pub const CONDITION_LIMIT: f64 = 1e12;

#[derive(Debug, Clone)]
pub struct NewtonConfig {
    pub max_iters: usize,
    /// Convergence threshold on the covector infinity norm.
    pub residual_tol: f64,
    /// Step for all finite differences (invariant derivatives and the
    /// Jacobian in fiber coordinates).
    pub fd_step: f64,
    /// How residual derivatives (and hence the Jacobian assembled from
    /// them) are evaluated: plain finite differences, or the model's exact
    /// directional derivatives where registered.
    pub jacobian_mode: DerivativeMode,
}

impl Default for NewtonConfig {
    fn default() -> Self {
        NewtonConfig {
            max_iters: 50,
            residual_tol: 1e-11,
            fd_step: 1e-5,
            jacobian_mode: DerivativeMode::FiniteDifference,
        }
    }
}

impl NewtonConfig {
    pub fn analytic() -> Self {
        NewtonConfig {
            jacobian_mode: DerivativeMode::ModelAnalytic,
            ..Default::default()
        }
    }

    pub fn diff(&self) -> DiffConfig {
        DiffConfig {
            fd_step: self.fd_step,
            mode: self.jacobian_mode,
        }
    }
}

/// Outcome of one Newton solve.
#[derive(Debug, Clone)]
pub struct StepReport {
    pub iterations: usize,
    pub residual_norm: f64,
    pub jacobian_condition: f64,
    /// Residual infinity norms per iterate, starting at the guess.
    pub residual_history: Vec<f64>,
}

#[derive(Debug, Error)]
pub enum SolverError {
    #[error(transparent)]
    Groupoid(#[from] GroupoidError),
    #[error("momentum based at distance {distance:.3e} from the guess source point")]
    BaseMismatch { distance: f64 },
    #[error("momentum has {got} coordinates, fiber dimension is {expected}")]
    DimensionMismatch { got: usize, expected: usize },
    #[error("singular Jacobian (condition {condition:.3e}); Lagrangian not regular near the iterate")]
    SingularJacobian { condition: f64 },
    #[error("Newton stalled after {iterations} iterations, residual {residual:.3e}")]
    MaxItersExceeded { iterations: usize, residual: f64 },
}

#[derive(Debug, Error)]
#[error("solver failed at step {step}: {source}")]
pub struct TrajectoryError {
    pub step: usize,
    #[source]
    pub source: SolverError,
}

/// A solved admissible sequence with per-step solver reports
/// (`reports[k]` produced `elements[k + 1]`). `guess_offsets[k]` is the
/// fiber offset that seeded step `k`, useful for warm-starting further
/// solves near the trajectory.
#[derive(Debug, Clone)]
pub struct Trajectory<G: Groupoid> {
    pub elements: Vec<G::Element>,
    pub reports: Vec<StepReport>,
    pub guess_offsets: Vec<DVector<f64>>,
}

impl<G: Groupoid> Trajectory<G> {
    pub fn steps(&self) -> usize {
        self.reports.len()
    }

    pub fn max_residual(&self) -> f64 {
        self.reports
            .iter()
            .map(|r| r.residual_norm)
            .fold(0.0, f64::max)
    }
}

/// Newton on fiber coordinates around `h_guess` for a generic residual.
/// Returns the solution, the report and the final fiber offset.
#[allow(clippy::type_complexity)]
fn solve_in_fiber<G, F>(
    gpd: &G,
    h_guess: &G::Element,
    residual: F,
    cfg: &NewtonConfig,
) -> Result<(G::Element, StepReport, DVector<f64>), SolverError>
where
    G: Groupoid,
    F: Fn(&G::Element) -> DVector<f64>,
{
    let n = gpd.fiber_dim();
    let anchor = gpd.target(h_guess);
    let element_at = |theta: &DVector<f64>| -> G::Element {
        gpd.compose(h_guess, &gpd.retract(&anchor, theta, 1.0))
            .expect("retraction stays composable with the guess")
    };

    let mut theta = DVector::zeros(n);
    let mut current = h_guess.clone();
    let mut res = residual(&current);
    let mut rnorm = if n == 0 { 0.0 } else { res.amax() };
    let mut history = vec![rnorm];
    let mut condition = 1.0;

    for iter in 0..cfg.max_iters {
        if rnorm <= cfg.residual_tol {
            return Ok((
                current,
                StepReport {
                    iterations: iter,
                    residual_norm: rnorm,
                    jacobian_condition: condition,
                    residual_history: history,
                },
                theta,
            ));
        }

        // Jacobian of the residual in fiber coordinates
        let mut jac = DMatrix::zeros(n, n);
        for j in 0..n {
            let mut tp = theta.clone();
            let mut tm = theta.clone();
            tp[j] += cfg.fd_step;
            tm[j] -= cfg.fd_step;
            let col = (residual(&element_at(&tp)) - residual(&element_at(&tm)))
                / (2.0 * cfg.fd_step);
            jac.set_column(j, &col);
        }
        condition = condition_number(&jac);
        if !condition.is_finite() || condition > CONDITION_LIMIT {
            return Err(SolverError::SingularJacobian { condition });
        }
        let delta = jac
            .lu()
            .solve(&(-&res))
            .ok_or(SolverError::SingularJacobian { condition })?;

        // full step, halved while the residual grows
        let mut improved = false;
        let mut scale = 1.0;
        for _ in 0..5 {
            let candidate = &theta + &delta * scale;
            let cand_elem = element_at(&candidate);
            let cand_res = residual(&cand_elem);
            let cand_norm = cand_res.amax();
            if cand_norm < rnorm {
                theta = candidate;
                current = cand_elem;
                res = cand_res;
                rnorm = cand_norm;
                improved = true;
                break;
            }
            scale *= 0.5;
        }
        history.push(rnorm);
        if !improved {
            return Err(SolverError::MaxItersExceeded {
                iterations: iter + 1,
                residual: rnorm,
            });
        }
    }

    if rnorm <= cfg.residual_tol {
        Ok((
            current,
            StepReport {
                iterations: cfg.max_iters,
                residual_norm: rnorm,
                jacobian_condition: condition,
                residual_history: history,
            },
            theta,
        ))
    } else {
        Err(SolverError::MaxItersExceeded {
            iterations: cfg.max_iters,
            residual: rnorm,
        })
    }
}

fn check_regular<G: Groupoid, L: DiscreteLagrangian<G>>(
    gpd: &G,
    lag: &L,
    at: &G::Element,
    cfg: &NewtonConfig,
) -> Result<(), SolverError> {
    let reg = regularity_matrix(gpd, lag, at, &cfg.diff());
    if !reg.condition.is_finite() || reg.condition > CONDITION_LIMIT {
        return Err(SolverError::SingularJacobian {
            condition: reg.condition,
        });
    }
    Ok(())
}

/// Advances the discrete dynamics: finds the composable successor of `g`
/// with vanishing discrete Euler-Lagrange residual, starting Newton at
/// `h_guess`. The result's source point equals `target(g)` exactly.
pub fn evolve_step<G: Groupoid, L: DiscreteLagrangian<G>>(
    gpd: &G,
    lag: &L,
    g: &G::Element,
    h_guess: &G::Element,
    cfg: &NewtonConfig,
) -> Result<(G::Element, StepReport), SolverError> {
    let (h, report, _) = evolve_step_offset(gpd, lag, g, h_guess, cfg)?;
    Ok((h, report))
}

#[allow(clippy::type_complexity)]
pub(crate) fn evolve_step_offset<G: Groupoid, L: DiscreteLagrangian<G>>(
    gpd: &G,
    lag: &L,
    g: &G::Element,
    h_guess: &G::Element,
    cfg: &NewtonConfig,
) -> Result<(G::Element, StepReport, DVector<f64>), SolverError> {
    gpd.check_composable(g, h_guess)?;
    check_regular(gpd, lag, h_guess, cfg)?;
    let diff = cfg.diff();
    solve_in_fiber(
        gpd,
        h_guess,
        |h: &G::Element| {
            calculus::del_residual(gpd, lag, g, h, &diff)
                .expect("iterates stay composable with g by construction")
                .coords
        },
        cfg,
    )
}

/// Inverts the backward Legendre transform: finds `h` near `h_guess` with
/// `legendre_minus(L, h) = mu`. Composing with `legendre_plus` yields the
/// discrete Hamiltonian evolution operator on the dual bundle.
pub fn invert_legendre_minus<G: Groupoid, L: DiscreteLagrangian<G>>(
    gpd: &G,
    lag: &L,
    mu: &Momentum<G::Base>,
    h_guess: &G::Element,
    cfg: &NewtonConfig,
) -> Result<(G::Element, StepReport), SolverError> {
    if mu.coords.len() != gpd.fiber_dim() {
        return Err(SolverError::DimensionMismatch {
            got: mu.coords.len(),
            expected: gpd.fiber_dim(),
        });
    }
    let distance = gpd.base_distance(&gpd.source(h_guess), &mu.base);
    if distance > gpd.composability_tol() {
        return Err(SolverError::BaseMismatch { distance });
    }
    check_regular(gpd, lag, h_guess, cfg)?;
    let diff = cfg.diff();
    let (h, report, _) = solve_in_fiber(
        gpd,
        h_guess,
        |h: &G::Element| legendre_minus(gpd, lag, h, &diff).coords - &mu.coords,
        cfg,
    )?;
    Ok((h, report))
}

/// One application of the discrete Hamiltonian evolution operator:
/// `mu -> legendre_plus(L, legendre_minus(L, .)^{-1}(mu))`.
#[allow(clippy::type_complexity)]
pub fn hamiltonian_step<G: Groupoid, L: DiscreteLagrangian<G>>(
    gpd: &G,
    lag: &L,
    mu: &Momentum<G::Base>,
    h_guess: &G::Element,
    cfg: &NewtonConfig,
) -> Result<(Momentum<G::Base>, G::Element, StepReport), SolverError> {
    let (h, report) = invert_legendre_minus(gpd, lag, mu, h_guess, cfg)?;
    let out = legendre_plus(gpd, lag, &h, &cfg.diff());
    Ok((out, h, report))
}

/// Runs `n_steps` of the discrete flow from `g0`. `offset_guess` seeds the
/// first unknown as `retract(target(g0), offset_guess, 1)`; afterwards each
/// step warm-starts from the accumulated fiber offset of the previous
/// solution (constant-velocity heuristic). Basin-of-attraction failures
/// propagate with their step index, never silently repaired.
pub fn run_trajectory<G: Groupoid, L: DiscreteLagrangian<G>>(
    gpd: &G,
    lag: &L,
    g0: &G::Element,
    offset_guess: &DVector<f64>,
    n_steps: usize,
    cfg: &NewtonConfig,
) -> Result<Trajectory<G>, TrajectoryError> {
    let mut elements = Vec::with_capacity(n_steps + 1);
    let mut reports = Vec::with_capacity(n_steps);
    let mut guess_offsets = Vec::with_capacity(n_steps);
    elements.push(g0.clone());
    let mut lambda = offset_guess.clone();

    for step in 0..n_steps {
        let prev = elements.last().expect("trajectory is never empty");
        let guess = gpd.retract(&gpd.target(prev), &lambda, 1.0);
        guess_offsets.push(lambda.clone());
        let (h, report, theta) = evolve_step_offset(gpd, lag, prev, &guess, cfg)
            .map_err(|source| TrajectoryError { step, source })?;
        lambda += theta;
        elements.push(h);
        reports.push(report);
    }

    Ok(Trajectory {
        elements,
        reports,
        guess_offsets,
    })
}
