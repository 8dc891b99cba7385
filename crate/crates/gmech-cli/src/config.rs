//! JSON configuration schema for scenario runs.
//!
//! The top level carries the model id, step count, stepper/solver choices,
//! diagnostics toggles and output paths; `params` and `initial` are parsed
//! per model. Unknown fields are rejected everywhere so malformed configs
//! fail loudly before any computation starts.

use serde::Deserialize;
use serde_json::Value;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub model: String,
    pub params: Value,
    pub initial: Value,
    pub steps: usize,
    #[serde(default)]
    pub stepper: StepperKind,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub diagnostics: DiagnosticsConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum StepperKind {
    #[default]
    Newton,
    ClosedForm,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    #[serde(default = "default_max_iters")]
    pub max_iters: usize,
    #[serde(default = "default_residual_tol")]
    pub residual_tol: f64,
    #[serde(default = "default_fd_step")]
    pub fd_step: f64,
    #[serde(default)]
    pub jacobian_mode: JacobianModeConfig,
}

fn default_max_iters() -> usize {
    50
}
fn default_residual_tol() -> f64 {
    1e-11
}
fn default_fd_step() -> f64 {
    1e-5
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            max_iters: default_max_iters(),
            residual_tol: default_residual_tol(),
            fd_step: default_fd_step(),
            jacobian_mode: JacobianModeConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum JacobianModeConfig {
    #[default]
    FiniteDifference,
    ModelAnalytic,
}

impl SolverConfig {
    pub fn to_newton(&self) -> gmech::NewtonConfig {
        gmech::NewtonConfig {
            max_iters: self.max_iters,
            residual_tol: self.residual_tol,
            fd_step: self.fd_step,
            jacobian_mode: match self.jacobian_mode {
                JacobianModeConfig::FiniteDifference => gmech::DerivativeMode::FiniteDifference,
                JacobianModeConfig::ModelAnalytic => gmech::DerivativeMode::ModelAnalytic,
            },
        }
    }
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct DiagnosticsConfig {
    #[serde(default)]
    pub noether: bool,
    #[serde(default)]
    pub casimir: bool,
    /// Sample the symplectic residual every k steps (0 disables).
    #[serde(default)]
    pub symplectic_every_k: usize,
    #[serde(default)]
    pub reduction: bool,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_trajectory_csv")]
    pub trajectory_csv: String,
    #[serde(default = "default_diagnostics_csv")]
    pub diagnostics_csv: String,
    #[serde(default = "default_summary_json")]
    pub summary_json: String,
}

fn default_trajectory_csv() -> String {
    "trajectory.csv".into()
}
fn default_diagnostics_csv() -> String {
    "diagnostics.csv".into()
}
fn default_summary_json() -> String {
    "summary.json".into()
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            trajectory_csv: default_trajectory_csv(),
            diagnostics_csv: default_diagnostics_csv(),
            summary_json: default_summary_json(),
        }
    }
}

// per-model parameter and initial-state blocks

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairParams {
    pub dim: usize,
    pub step_h: f64,
    pub lagrangian: PairLagrangianKind,
    #[serde(default = "one")]
    pub mass: f64,
    #[serde(default = "one")]
    pub spring: f64,
    #[serde(default = "one")]
    pub coeff: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairLagrangianKind {
    FreeParticle,
    HarmonicOscillator,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairInitial {
    pub x0: Vec<f64>,
    pub x1: Vec<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct So3Params {
    pub inertia_diag: [f64; 3],
    pub step_h: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct So3Initial {
    /// Body angular velocity; the initial step rotation is its exponential
    /// scaled by the time step.
    pub angular_velocity: [f64; 3],
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RigidPairInitial {
    pub angular_velocity: [f64; 3],
    /// Log coordinates of the initial attitude (defaults to the identity).
    #[serde(default)]
    pub attitude_log: [f64; 3],
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HeavyTopParamsConfig {
    pub inertia_diag: [f64; 3],
    pub mass: f64,
    pub gravity: f64,
    pub length: f64,
    #[serde(default = "default_axis_e")]
    pub axis_e: [f64; 3],
    pub step_h: f64,
}

fn default_axis_e() -> [f64; 3] {
    [0.0, 0.0, 1.0]
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HeavyTopInitial {
    /// Gravity direction in the body frame; normalized on load.
    pub gamma: [f64; 3],
    pub angular_velocity: [f64; 3],
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BeanieParamsConfig {
    pub mass: f64,
    pub inertia1: f64,
    pub inertia2: f64,
    pub step_h: f64,
    #[serde(default)]
    pub potential: BeaniePotentialKind,
    #[serde(default)]
    pub amplitude: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum BeaniePotentialKind {
    #[default]
    None,
    Cosine,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BeanieInitial {
    pub psi0: f64,
    pub psi1: f64,
    pub omega: [f64; 3],
}
