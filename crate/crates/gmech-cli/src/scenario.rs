//! Model dispatch: builds the groupoid, Lagrangian and initial data from a
//! parsed configuration, advances the dynamics with the selected stepper,
//! and collects trajectory rows plus diagnostics into a model-independent
//! result.

use gmech::diagnostics::symplectic_residual;
use gmech::geom::{exp_so3, Mat3, Rotation, Vec3};
use gmech::groupoid::calculus::del_residual;
use gmech::models::{
    beanie_step, free_rigid_body_step, heavy_top_step, BeanieElement, BeanieGroupoid,
    BeanieLagrangian, BeanieParams, CosinePotential, FreeParticleLagrangian,
    HarmonicOscillatorLagrangian, HeavyTopGroupoid, HeavyTopParams, HeavyTopState,
    LeftInvariantRigidBodyLagrangian, LieGroupSO3, PairGroupoid, Potential, RigidBodyLagrangian,
    ZeroPotential,
};
use gmech::solver::run_trajectory;
use gmech::{DiffConfig, DiscreteLagrangian, Groupoid, NewtonConfig};
use log::info;
use nalgebra::DVector;
use serde_json::Value;

use crate::config::{
    BeanieInitial, BeanieParamsConfig, BeaniePotentialKind, HeavyTopInitial,
    HeavyTopParamsConfig, PairInitial, PairLagrangianKind, PairParams, RawConfig,
    RigidPairInitial, So3Initial, So3Params, StepperKind,
};

#[derive(Debug)]
pub enum RunError {
    /// Configuration is structurally or semantically invalid (exit 2).
    Config(String),
    /// The solver failed; carries the failing step index (exit 3).
    Solver { step: usize, message: String },
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Config(m) => write!(f, "configuration error: {m}"),
            RunError::Solver { step, message } => {
                write!(f, "solver failed at step {step}: {message}")
            }
        }
    }
}

/// Model-independent outcome of a scenario run. All vectors are aligned
/// with the trajectory elements; the step-0 row has no residual/iterations.
pub struct RunResult {
    pub chart_rows: Vec<DVector<f64>>,
    pub residuals: Vec<Option<f64>>,
    pub iters: Vec<Option<usize>>,
    pub quantities: Vec<(String, Vec<f64>)>,
    pub symplectic: Vec<Option<f64>>,
    pub reduction_max: Option<f64>,
}

impl RunResult {
    pub fn max_residual(&self) -> Option<f64> {
        let mut max: Option<f64> = None;
        for r in self.residuals.iter().flatten() {
            max = Some(max.map_or(*r, |m: f64| m.max(*r)));
        }
        max
    }

    pub fn max_symplectic(&self) -> Option<f64> {
        let mut max: Option<f64> = None;
        for r in self.symplectic.iter().flatten() {
            max = Some(max.map_or(*r, |m: f64| m.max(*r)));
        }
        max
    }
}

fn parse_block<T: serde::de::DeserializeOwned>(value: &Value, what: &str) -> Result<T, RunError> {
    serde_json::from_value(value.clone())
        .map_err(|e| RunError::Config(format!("invalid {what}: {e}")))
}

pub fn run_scenario(cfg: &RawConfig) -> Result<RunResult, RunError> {
    info!("running model '{}' for {} steps", cfg.model, cfg.steps);
    match cfg.model.as_str() {
        "pair" => run_pair(cfg),
        "lie_group_so3" => run_so3(cfg),
        "heavy_top" => run_heavy_top(cfg),
        "beanie" => run_beanie(cfg),
        "rigid_body_pair" => run_rigid_pair(cfg),
        other => Err(RunError::Config(format!("unknown model id '{other}'"))),
    }
}

// ---------------------------------------------------------------------------
// generic helpers
// ---------------------------------------------------------------------------

struct NewtonRun<E> {
    elements: Vec<E>,
    residuals: Vec<Option<f64>>,
    iters: Vec<Option<usize>>,
    guess_offsets: Vec<DVector<f64>>,
}

fn newton_run<G: Groupoid, L: DiscreteLagrangian<G>>(
    gpd: &G,
    lag: &L,
    g0: G::Element,
    lambda0: DVector<f64>,
    steps: usize,
    newton: &NewtonConfig,
) -> Result<NewtonRun<G::Element>, RunError> {
    let traj = run_trajectory(gpd, lag, &g0, &lambda0, steps, newton).map_err(|e| {
        RunError::Solver {
            step: e.step,
            message: e.source.to_string(),
        }
    })?;
    let mut residuals = vec![None];
    let mut iters = vec![None];
    for r in &traj.reports {
        residuals.push(Some(r.residual_norm));
        iters.push(Some(r.iterations));
    }
    Ok(NewtonRun {
        elements: traj.elements,
        residuals,
        iters,
        guess_offsets: traj.guess_offsets,
    })
}

/// Evaluated DEL residual along consecutive closed-form elements, as a
/// diagnostic column (exact model derivatives).
fn evaluated_residuals<G: Groupoid, L: DiscreteLagrangian<G>>(
    gpd: &G,
    lag: &L,
    elements: &[G::Element],
) -> Vec<Option<f64>> {
    let diff = DiffConfig::analytic();
    let mut out = vec![None];
    for pair in elements.windows(2) {
        let r = del_residual(gpd, lag, &pair[0], &pair[1], &diff)
            .map(|m| m.norm_inf())
            .unwrap_or(f64::NAN);
        out.push(Some(r));
    }
    out
}

fn sample_symplectic<G: Groupoid, L: DiscreteLagrangian<G>>(
    gpd: &G,
    lag: &L,
    elements: &[G::Element],
    guess_offsets: &[DVector<f64>],
    every_k: usize,
    newton: &NewtonConfig,
) -> Result<Vec<Option<f64>>, RunError> {
    let mut out = vec![None; elements.len()];
    if every_k == 0 {
        return Ok(out);
    }
    let diff = DiffConfig {
        fd_step: newton.fd_step,
        mode: newton.jacobian_mode,
    };
    for (k, g) in elements.iter().enumerate() {
        if k % every_k != 0 || guess_offsets.is_empty() {
            continue;
        }
        let lambda = &guess_offsets[k.min(guess_offsets.len() - 1)];
        let step = |q: &G::Element| {
            gmech::solver::evolve_step(gpd, lag, q, &gpd.retract(&gpd.target(q), lambda, 1.0), newton)
                .map(|(h, _)| h)
        };
        let res = symplectic_residual(gpd, lag, g, step, &diff)
            .map_err(|e| RunError::Solver {
                step: k,
                message: e.to_string(),
            })?;
        out[k] = Some(res);
    }
    Ok(out)
}

fn charts<G: Groupoid>(gpd: &G, elements: &[G::Element]) -> Vec<DVector<f64>> {
    elements.iter().map(|e| gpd.to_chart(e)).collect()
}

fn track<E>(
    elements: &[E],
    quantities: &[gmech::diagnostics::Quantity<E>],
) -> Vec<(String, Vec<f64>)> {
    quantities
        .iter()
        .map(|(name, f)| ((*name).to_string(), elements.iter().map(f).collect()))
        .collect()
}

fn reject_symplectic_for_closed_form(cfg: &RawConfig) -> Result<(), RunError> {
    if cfg.diagnostics.symplectic_every_k > 0 && cfg.stepper == StepperKind::ClosedForm {
        return Err(RunError::Config(
            "symplectic sampling requires the newton stepper".into(),
        ));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// pair groupoid over R^d
// ---------------------------------------------------------------------------

enum PairLagrangian {
    Free(FreeParticleLagrangian),
    Harmonic(HarmonicOscillatorLagrangian),
}

impl DiscreteLagrangian<PairGroupoid> for PairLagrangian {
    fn evaluate(&self, g: &(DVector<f64>, DVector<f64>)) -> f64 {
        match self {
            PairLagrangian::Free(l) => l.evaluate(g),
            PairLagrangian::Harmonic(l) => l.evaluate(g),
        }
    }
    fn exact_left_derivative(&self, g: &(DVector<f64>, DVector<f64>), v: &DVector<f64>) -> Option<f64> {
        match self {
            PairLagrangian::Free(l) => l.exact_left_derivative(g, v),
            PairLagrangian::Harmonic(l) => l.exact_left_derivative(g, v),
        }
    }
    fn exact_right_derivative(&self, g: &(DVector<f64>, DVector<f64>), v: &DVector<f64>) -> Option<f64> {
        match self {
            PairLagrangian::Free(l) => l.exact_right_derivative(g, v),
            PairLagrangian::Harmonic(l) => l.exact_right_derivative(g, v),
        }
    }
}

fn run_pair(cfg: &RawConfig) -> Result<RunResult, RunError> {
    let params: PairParams = parse_block(&cfg.params, "pair params")?;
    let initial: PairInitial = parse_block(&cfg.initial, "pair initial state")?;
    if initial.x0.len() != params.dim || initial.x1.len() != params.dim {
        return Err(RunError::Config(format!(
            "initial points must have dim {}",
            params.dim
        )));
    }
    if cfg.diagnostics.noether || cfg.diagnostics.casimir || cfg.diagnostics.reduction {
        return Err(RunError::Config(
            "pair model defines no noether/casimir/reduction diagnostics".into(),
        ));
    }

    let gpd = PairGroupoid::new(params.dim);
    let lag = match params.lagrangian {
        PairLagrangianKind::FreeParticle => PairLagrangian::Free(FreeParticleLagrangian {
            coeff: params.coeff,
        }),
        PairLagrangianKind::HarmonicOscillator => {
            PairLagrangian::Harmonic(HarmonicOscillatorLagrangian {
                mass: params.mass,
                spring: params.spring,
                step_h: params.step_h,
            })
        }
    };
    let x0 = DVector::from_column_slice(&initial.x0);
    let x1 = DVector::from_column_slice(&initial.x1);
    let g0 = (x0.clone(), x1.clone());

    let (elements, residuals, iters, offsets) = match cfg.stepper {
        StepperKind::Newton => {
            let run = newton_run(&gpd, &lag, g0, &x1 - &x0, cfg.steps, &cfg.solver.to_newton())?;
            (run.elements, run.residuals, run.iters, run.guess_offsets)
        }
        StepperKind::ClosedForm => {
            let mut elements = vec![g0];
            for _ in 0..cfg.steps {
                let prev = elements.last().unwrap();
                let next = match &lag {
                    PairLagrangian::Free(_) => &prev.1 * 2.0 - &prev.0,
                    PairLagrangian::Harmonic(l) => l.classical_next(&prev.0, &prev.1),
                };
                elements.push((prev.1.clone(), next));
            }
            let residuals = evaluated_residuals(&gpd, &lag, &elements);
            let n = elements.len();
            (elements, residuals, vec![None; n], Vec::new())
        }
    };

    reject_symplectic_for_closed_form(cfg)?;
    let symplectic = sample_symplectic(
        &gpd,
        &lag,
        &elements,
        &offsets,
        cfg.diagnostics.symplectic_every_k,
        &cfg.solver.to_newton(),
    )?;

    Ok(RunResult {
        chart_rows: charts(&gpd, &elements),
        residuals,
        iters,
        quantities: Vec::new(),
        symplectic,
        reduction_max: None,
    })
}

// ---------------------------------------------------------------------------
// free rigid body on SO(3)
// ---------------------------------------------------------------------------

fn so3_lagrangian(params: &So3Params) -> RigidBodyLagrangian {
    RigidBodyLagrangian::from_inertia(&Mat3::from_diagonal(&Vec3::from(params.inertia_diag)), params.step_h)
}

fn run_so3(cfg: &RawConfig) -> Result<RunResult, RunError> {
    let params: So3Params = parse_block(&cfg.params, "lie_group_so3 params")?;
    let initial: So3Initial = parse_block(&cfg.initial, "lie_group_so3 initial state")?;
    if cfg.diagnostics.noether || cfg.diagnostics.reduction {
        return Err(RunError::Config(
            "lie_group_so3 defines casimir and symplectic diagnostics only".into(),
        ));
    }

    let gpd = LieGroupSO3;
    let lag = so3_lagrangian(&params);
    let omega = Vec3::from(initial.angular_velocity);
    let w0 = exp_so3(&(omega * params.step_h));
    let lambda0 = DVector::from_column_slice((omega * params.step_h).as_slice());

    let (elements, residuals, iters, offsets) = match cfg.stepper {
        StepperKind::Newton => {
            let run = newton_run(&gpd, &lag, w0, lambda0, cfg.steps, &cfg.solver.to_newton())?;
            (run.elements, run.residuals, run.iters, run.guess_offsets)
        }
        StepperKind::ClosedForm => {
            let mut elements = vec![w0];
            let mut w = w0;
            let mut pi = lag.momentum(&w0);
            for step in 0..cfg.steps {
                let (wn, pn) =
                    free_rigid_body_step(&w, &pi, &lag.shifted_inertia).map_err(|e| {
                        RunError::Solver {
                            step,
                            message: e.to_string(),
                        }
                    })?;
                elements.push(wn);
                w = wn;
                pi = pn;
            }
            let residuals = evaluated_residuals(&gpd, &lag, &elements);
            let n = elements.len();
            (elements, residuals, vec![None; n], Vec::new())
        }
    };

    reject_symplectic_for_closed_form(cfg)?;
    let symplectic = sample_symplectic(
        &gpd,
        &lag,
        &elements,
        &offsets,
        cfg.diagnostics.symplectic_every_k,
        &cfg.solver.to_newton(),
    )?;

    let mut quantities = Vec::new();
    if cfg.diagnostics.casimir {
        let pi_norm = |w: &Rotation| lag.momentum(w).norm();
        quantities = track(&elements, &[("pi_norm", &pi_norm)]);
    }

    Ok(RunResult {
        chart_rows: charts(&gpd, &elements),
        residuals,
        iters,
        quantities,
        symplectic,
        reduction_max: None,
    })
}

// ---------------------------------------------------------------------------
// heavy top
// ---------------------------------------------------------------------------

fn run_heavy_top(cfg: &RawConfig) -> Result<RunResult, RunError> {
    let pc: HeavyTopParamsConfig = parse_block(&cfg.params, "heavy_top params")?;
    let initial: HeavyTopInitial = parse_block(&cfg.initial, "heavy_top initial state")?;
    if cfg.diagnostics.casimir || cfg.diagnostics.reduction {
        return Err(RunError::Config(
            "heavy_top defines noether and symplectic diagnostics only".into(),
        ));
    }

    let params = HeavyTopParams {
        inertia: Mat3::from_diagonal(&Vec3::from(pc.inertia_diag)),
        mass: pc.mass,
        gravity: pc.gravity,
        length: pc.length,
        axis_e: Vec3::from(pc.axis_e).normalize(),
        step_h: pc.step_h,
    };
    let gpd = HeavyTopGroupoid;
    let lag = params.lagrangian();
    let gamma0 = Vec3::from(initial.gamma).normalize();
    let omega = Vec3::from(initial.angular_velocity);
    let w0 = exp_so3(&(omega * params.step_h));
    let lambda0 = DVector::from_column_slice((omega * params.step_h).as_slice());
    let g0 = (gamma0, w0);

    let (elements, residuals, iters, offsets) = match cfg.stepper {
        StepperKind::Newton => {
            let run = newton_run(&gpd, &lag, g0, lambda0, cfg.steps, &cfg.solver.to_newton())?;
            (run.elements, run.residuals, run.iters, run.guess_offsets)
        }
        StepperKind::ClosedForm => {
            let mut state = HeavyTopState::from_gamma_w(gamma0, w0, &params);
            let mut elements = vec![(state.gamma, state.w)];
            for step in 0..cfg.steps {
                state = heavy_top_step(&state, &params).map_err(|e| RunError::Solver {
                    step,
                    message: e.to_string(),
                })?;
                elements.push((state.gamma, state.w));
            }
            let residuals = evaluated_residuals(&gpd, &lag, &elements);
            let n = elements.len();
            (elements, residuals, vec![None; n], Vec::new())
        }
    };

    reject_symplectic_for_closed_form(cfg)?;
    let symplectic = sample_symplectic(
        &gpd,
        &lag,
        &elements,
        &offsets,
        cfg.diagnostics.symplectic_every_k,
        &cfg.solver.to_newton(),
    )?;

    let mut quantities = Vec::new();
    if cfg.diagnostics.noether {
        let shifted = params.shifted_inertia();
        let pairing = move |g: &(Vec3, Rotation)| {
            -gmech::models::so3_group::body_momentum(&g.1, &shifted).dot(&g.0)
        };
        let gamma_err = |g: &(Vec3, Rotation)| (g.0.norm() - 1.0).abs();
        quantities = track(
            &elements,
            &[
                ("minus_pi_dot_gamma", &pairing),
                ("gamma_norm_err", &gamma_err),
            ],
        );
    }

    Ok(RunResult {
        chart_rows: charts(&gpd, &elements),
        residuals,
        iters,
        quantities,
        symplectic,
        reduction_max: None,
    })
}

// ---------------------------------------------------------------------------
// beanie
// ---------------------------------------------------------------------------

enum BeaniePotentialDyn {
    Zero(ZeroPotential),
    Cosine(CosinePotential),
}

impl Potential for BeaniePotentialDyn {
    fn value(&self, psi: f64) -> f64 {
        match self {
            BeaniePotentialDyn::Zero(p) => p.value(psi),
            BeaniePotentialDyn::Cosine(p) => p.value(psi),
        }
    }
    fn derivative(&self, psi: f64) -> f64 {
        match self {
            BeaniePotentialDyn::Zero(p) => p.derivative(psi),
            BeaniePotentialDyn::Cosine(p) => p.derivative(psi),
        }
    }
}

fn run_beanie(cfg: &RawConfig) -> Result<RunResult, RunError> {
    let pc: BeanieParamsConfig = parse_block(&cfg.params, "beanie params")?;
    let initial: BeanieInitial = parse_block(&cfg.initial, "beanie initial state")?;
    if cfg.diagnostics.noether || cfg.diagnostics.reduction {
        return Err(RunError::Config(
            "beanie defines casimir and symplectic diagnostics only".into(),
        ));
    }

    let params = BeanieParams {
        mass: pc.mass,
        inertia1: pc.inertia1,
        inertia2: pc.inertia2,
        step_h: pc.step_h,
    };
    let potential = match pc.potential {
        BeaniePotentialKind::None => BeaniePotentialDyn::Zero(ZeroPotential),
        BeaniePotentialKind::Cosine => BeaniePotentialDyn::Cosine(CosinePotential {
            amplitude: pc.amplitude,
        }),
    };
    let gpd = BeanieGroupoid::new(&params);
    let lag = BeanieLagrangian {
        params,
        potential: match pc.potential {
            BeaniePotentialKind::None => BeaniePotentialDyn::Zero(ZeroPotential),
            BeaniePotentialKind::Cosine => BeaniePotentialDyn::Cosine(CosinePotential {
                amplitude: pc.amplitude,
            }),
        },
    };
    let g0 = BeanieElement::new(
        initial.psi0,
        initial.psi1,
        initial.omega[0],
        initial.omega[1],
        initial.omega[2],
    );

    let (elements, residuals, iters, offsets) = match cfg.stepper {
        StepperKind::Newton => {
            // seed the shape rate from the initial pair, the group offsets
            // from the stored momenta
            let lambda0 = nalgebra::dvector![
                initial.psi1 - initial.psi0,
                initial.omega[0],
                initial.omega[1],
                initial.omega[2]
            ];
            let run = newton_run(&gpd, &lag, g0, lambda0, cfg.steps, &cfg.solver.to_newton())?;
            (run.elements, run.residuals, run.iters, run.guess_offsets)
        }
        StepperKind::ClosedForm => {
            let mut elements = vec![g0];
            for step in 0..cfg.steps {
                let prev = elements.last().unwrap();
                let next = beanie_step(prev, &params, &potential).map_err(|e| {
                    RunError::Solver {
                        step,
                        message: e.to_string(),
                    }
                })?;
                elements.push(next);
            }
            let residuals = evaluated_residuals(&gpd, &lag, &elements);
            let n = elements.len();
            (elements, residuals, vec![None; n], Vec::new())
        }
    };

    reject_symplectic_for_closed_form(cfg)?;
    let symplectic = sample_symplectic(
        &gpd,
        &lag,
        &elements,
        &offsets,
        cfg.diagnostics.symplectic_every_k,
        &cfg.solver.to_newton(),
    )?;

    let mut quantities = Vec::new();
    if cfg.diagnostics.casimir {
        let om3 = |g: &BeanieElement| g.om[2];
        let plane = |g: &BeanieElement| g.om[0] * g.om[0] + g.om[1] * g.om[1];
        quantities = track(&elements, &[("omega3", &om3), ("omega_plane_sq", &plane)]);
    }

    Ok(RunResult {
        chart_rows: charts(&gpd, &elements),
        residuals,
        iters,
        quantities,
        symplectic,
        reduction_max: None,
    })
}

// ---------------------------------------------------------------------------
// unreduced rigid body on the attitude pair groupoid
// ---------------------------------------------------------------------------

fn run_rigid_pair(cfg: &RawConfig) -> Result<RunResult, RunError> {
    let params: So3Params = parse_block(&cfg.params, "rigid_body_pair params")?;
    let initial: RigidPairInitial = parse_block(&cfg.initial, "rigid_body_pair initial state")?;
    if cfg.diagnostics.noether {
        return Err(RunError::Config(
            "rigid_body_pair defines casimir, symplectic and reduction diagnostics".into(),
        ));
    }

    let gpd = gmech::models::PairSO3Groupoid;
    let shifted =
        gmech::models::so3_group::shifted_inertia(&Mat3::from_diagonal(&Vec3::from(params.inertia_diag)));
    let lag = LeftInvariantRigidBodyLagrangian {
        shifted,
        step_h: params.step_h,
    };
    let omega = Vec3::from(initial.angular_velocity);
    let r0 = exp_so3(&Vec3::from(initial.attitude_log));
    let w0 = exp_so3(&(omega * params.step_h));
    let g0 = (r0, r0.compose(&w0));
    let lambda0 = DVector::from_column_slice((omega * params.step_h).as_slice());

    let (elements, residuals, iters, offsets) = match cfg.stepper {
        StepperKind::Newton => {
            let run = newton_run(&gpd, &lag, g0, lambda0, cfg.steps, &cfg.solver.to_newton())?;
            (run.elements, run.residuals, run.iters, run.guess_offsets)
        }
        StepperKind::ClosedForm => {
            // reconstruct the attitude chain from the reduced closed form
            let mut elements = vec![g0];
            let mut w = w0;
            let mut pi = gmech::models::so3_group::body_momentum(&w0, &shifted);
            for step in 0..cfg.steps {
                let prev = elements.last().unwrap();
                let (wn, pn) = free_rigid_body_step(&w, &pi, &shifted).map_err(|e| {
                    RunError::Solver {
                        step,
                        message: e.to_string(),
                    }
                })?;
                let next = (prev.1, prev.1.compose(&wn));
                elements.push(next);
                w = wn;
                pi = pn;
            }
            let residuals = evaluated_residuals(&gpd, &lag, &elements);
            let n = elements.len();
            (elements, residuals, vec![None; n], Vec::new())
        }
    };

    reject_symplectic_for_closed_form(cfg)?;
    let symplectic = sample_symplectic(
        &gpd,
        &lag,
        &elements,
        &offsets,
        cfg.diagnostics.symplectic_every_k,
        &cfg.solver.to_newton(),
    )?;

    let mut quantities = Vec::new();
    if cfg.diagnostics.casimir {
        let pi_norm = move |g: &(Rotation, Rotation)| {
            let w = Rotation::from_matrix_unchecked(g.0.matrix().transpose() * g.1.matrix());
            gmech::models::so3_group::body_momentum(&w, &shifted).norm()
        };
        quantities = track(&elements, &[("pi_norm", &pi_norm)]);
    }

    // reduction diagnostic: project onto the Lie group and compare with the
    // closed-form Lie-Poisson chain
    let reduction_max = if cfg.diagnostics.reduction {
        let project = |g: &(Rotation, Rotation)| g.0.matrix().transpose() * g.1.matrix();
        let mut w = Rotation::from_matrix_unchecked(project(&elements[0]));
        let mut pi = gmech::models::so3_group::body_momentum(&w, &shifted);
        let mut max: f64 = 0.0;
        for (step, el) in elements.iter().enumerate() {
            max = max.max((project(el) - w.matrix()).abs().max());
            if step + 1 < elements.len() {
                let (wn, pn) = free_rigid_body_step(&w, &pi, &shifted).map_err(|e| {
                    RunError::Solver {
                        step,
                        message: e.to_string(),
                    }
                })?;
                w = wn;
                pi = pn;
            }
        }
        Some(max)
    } else {
        None
    };

    Ok(RunResult {
        chart_rows: charts(&gpd, &elements),
        residuals,
        iters,
        quantities,
        symplectic,
        reduction_max,
    })
}
