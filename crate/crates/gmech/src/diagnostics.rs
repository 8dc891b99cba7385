//! Numerical verification of the structural properties of the discrete
//! flow: Noether symmetries and their conserved quantities, preservation of
//! the Poincare-Cartan 2-section, and consistency of dynamics related by a
//! groupoid morphism (reduction).

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::groupoid::calculus::{
    del_residual, left_derivative, omega_matrix, regularity_matrix, right_derivative,
    CalculusError, DiffConfig,
};
use crate::groupoid::{DiscreteLagrangian, Groupoid, Momentum};
use crate::solver::SolverError;

#[derive(Debug, Error)]
pub enum DiagnosticsError {
    #[error("invariant lift bases are rank deficient in the chart (singular value ratio {sigma_ratio:.3e}); chart breakdown")]
    RankDeficientLifts { sigma_ratio: f64 },
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Calculus(#[from] CalculusError),
    #[error("paired trajectories have different lengths: {a} vs {b}")]
    TrajectoryLengthMismatch { a: usize, b: usize },
}

/// Fiber-bundle section given by its coordinates in the fiber basis.
pub type Section<'a, B> = Box<dyn Fn(&B) -> DVector<f64> + 'a>;
/// Real function on the base manifold.
pub type BaseFunction<'a, B> = Box<dyn Fn(&B) -> f64 + 'a>;
/// A named scalar observable of trajectory elements.
pub type Quantity<'a, T> = (&'a str, &'a dyn Fn(&T) -> f64);

/// A candidate symmetry: a section of the fiber bundle together with a
/// gauge function on the base (identically zero for strict invariance).
pub struct NoetherSymmetry<'a, G: Groupoid> {
    pub section: Section<'a, G::Base>,
    pub gauge: BaseFunction<'a, G::Base>,
}

impl<'a, G: Groupoid> NoetherSymmetry<'a, G> {
    pub fn new(
        section: impl Fn(&G::Base) -> DVector<f64> + 'a,
        gauge: impl Fn(&G::Base) -> f64 + 'a,
    ) -> Self {
        NoetherSymmetry {
            section: Box::new(section),
            gauge: Box::new(gauge),
        }
    }

    /// Symmetry without a gauge term.
    pub fn strict(section: impl Fn(&G::Base) -> DVector<f64> + 'a) -> Self {
        NoetherSymmetry {
            section: Box::new(section),
            gauge: Box::new(|_| 0.0),
        }
    }
}

/// Quasi-invariance defect of `L` under the candidate symmetry: the maximum
/// over the samples of
/// `|left_X(L) - right_X(L) - f(target) + f(source)|`.
/// Near zero certifies the symmetry numerically.
pub fn noether_defect<G: Groupoid, L: DiscreteLagrangian<G>>(
    gpd: &G,
    lag: &L,
    sym: &NoetherSymmetry<G>,
    samples: &[G::Element],
    cfg: &DiffConfig,
) -> f64 {
    samples
        .iter()
        .map(|g| {
            let src = gpd.source(g);
            let tgt = gpd.target(g);
            let left = left_derivative(gpd, lag, g, &(sym.section)(&tgt), cfg);
            let right = right_derivative(gpd, lag, g, &(sym.section)(&src), cfg);
            (left - right - (sym.gauge)(&tgt) + (sym.gauge)(&src)).abs()
        })
        .fold(0.0, f64::max)
}

/// The conserved quantity attached to a Noether symmetry,
/// `F(g) = right_X(L)(g) - f(source(g))`; constant along solutions of the
/// discrete Euler-Lagrange equations.
pub fn noether_constant<G: Groupoid, L: DiscreteLagrangian<G>>(
    gpd: &G,
    lag: &L,
    sym: &NoetherSymmetry<G>,
    g: &G::Element,
    cfg: &DiffConfig,
) -> f64 {
    let src = gpd.source(g);
    right_derivative(gpd, lag, g, &(sym.section)(&src), cfg) - (sym.gauge)(&src)
}

/// Per-step values and drifts of tracked quantities along a trajectory.
#[derive(Debug, Clone, Default)]
pub struct ConservationReport {
    pub names: Vec<String>,
    pub series: Vec<Vec<f64>>,
    pub max_abs_drift: Vec<f64>,
    pub max_rel_drift: Vec<f64>,
}

impl ConservationReport {
    pub fn len(&self) -> usize {
        self.series.first().map_or(0, Vec::len)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Evaluates each named quantity along the elements and records maximal
/// absolute and relative drift from the initial value.
pub fn track_conserved<T>(elements: &[T], quantities: &[Quantity<T>]) -> ConservationReport {
    let mut report = ConservationReport::default();
    for (name, f) in quantities {
        let values: Vec<f64> = elements.iter().map(f).collect();
        let first = values.first().copied().unwrap_or(0.0);
        let abs = values
            .iter()
            .map(|v| (v - first).abs())
            .fold(0.0, f64::max);
        let rel = abs / first.abs().max(f64::MIN_POSITIVE);
        report.names.push((*name).to_string());
        report.series.push(values);
        report.max_abs_drift.push(abs);
        report.max_rel_drift.push(rel);
    }
    report
}

const RANK_TOL: f64 = 1e-8;

/// Chart-coordinate tangents of the left-invariant lift basis at `q`
/// (columns indexed by the fiber basis).
fn left_lift_matrix<G: Groupoid>(gpd: &G, q: &G::Element, delta: f64) -> DMatrix<f64> {
    let n = gpd.fiber_dim();
    let tgt = gpd.target(q);
    let mut m = DMatrix::zeros(gpd.chart_dim(), n);
    for (j, e) in gpd.fiber_basis().iter().enumerate() {
        let plus = gpd
            .to_chart(&gpd.compose(q, &gpd.retract(&tgt, e, delta)).expect("composable"));
        let minus = gpd
            .to_chart(&gpd.compose(q, &gpd.retract(&tgt, e, -delta)).expect("composable"));
        m.set_column(j, &((plus - minus) / (2.0 * delta)));
    }
    m
}

/// Chart-coordinate tangents of the right-invariant lift basis at `q`.
fn right_lift_matrix<G: Groupoid>(gpd: &G, q: &G::Element, delta: f64) -> DMatrix<f64> {
    let n = gpd.fiber_dim();
    let src = gpd.source(q);
    let mut m = DMatrix::zeros(gpd.chart_dim(), n);
    for (i, e) in gpd.fiber_basis().iter().enumerate() {
        let plus = gpd.to_chart(
            &gpd.compose(&gpd.invert(&gpd.retract(&src, e, delta)), q)
                .expect("composable"),
        );
        let minus = gpd.to_chart(
            &gpd.compose(&gpd.invert(&gpd.retract(&src, e, -delta)), q)
                .expect("composable"),
        );
        m.set_column(i, &(-(plus - minus) / (2.0 * delta)));
    }
    m
}

struct LiftDecomposer {
    svd: nalgebra::linalg::SVD<f64, nalgebra::Dyn, nalgebra::Dyn>,
}

impl LiftDecomposer {
    fn new(basis: &DMatrix<f64>) -> Result<Self, DiagnosticsError> {
        let svd = basis.clone().svd(true, true);
        let smax = svd.singular_values.max();
        let smin = svd.singular_values.min();
        if smax == 0.0 || smin / smax < RANK_TOL {
            return Err(DiagnosticsError::RankDeficientLifts {
                sigma_ratio: if smax == 0.0 { 0.0 } else { smin / smax },
            });
        }
        Ok(LiftDecomposer { svd })
    }

    /// Least-squares coefficients of `v` on the basis columns.
    fn decompose(&self, v: &DVector<f64>) -> DVector<f64> {
        self.svd
            .solve(v, 0.0)
            .expect("svd computed with both factors")
            .column(0)
            .into_owned()
    }
}

/// Measures preservation of the Poincare-Cartan 2-section by one step of
/// the discrete flow at `g`.
///
/// Builds the 2n x 2n matrix of the 2-section in the invariant lift basis
/// at `g` and at `step(g)`, the matrix `P` of the prolonged step map in
/// those bases (tangent map by central differences through the chart,
/// image components decomposed onto the lift bases by least squares), and
/// returns the infinity norm of `P^T Omega(step(g)) P - Omega(g)`.
///
/// `step` is invoked at chart-perturbed copies of `g`, so it must succeed
/// on a neighborhood; warm-starting it from the unperturbed solution keeps
/// the tangent estimate clean.
pub fn symplectic_residual<G, L, S>(
    gpd: &G,
    lag: &L,
    g: &G::Element,
    step: S,
    cfg: &DiffConfig,
) -> Result<f64, DiagnosticsError>
where
    G: Groupoid,
    L: DiscreteLagrangian<G>,
    S: Fn(&G::Element) -> Result<G::Element, SolverError>,
{
    let n = gpd.fiber_dim();
    if n == 0 {
        return Ok(0.0);
    }
    let delta = cfg.fd_step;
    let h = step(g)?;

    let left_g = left_lift_matrix(gpd, g, delta);
    let right_g = right_lift_matrix(gpd, g, delta);
    let left_h = left_lift_matrix(gpd, &h, delta);
    let right_h = right_lift_matrix(gpd, &h, delta);

    let left_dec = LiftDecomposer::new(&left_h)?;
    let right_dec = LiftDecomposer::new(&right_h)?;

    // tangent of the step map in chart coordinates
    let cdim = gpd.chart_dim();
    let c0 = gpd.to_chart(g);
    let mut dstep = DMatrix::zeros(cdim, cdim);
    for k in 0..cdim {
        let mut cp = c0.clone();
        let mut cm = c0.clone();
        cp[k] += delta;
        cm[k] -= delta;
        let hp = gpd.to_chart(&step(&gpd.from_chart(&cp))?);
        let hm = gpd.to_chart(&step(&gpd.from_chart(&cm))?);
        dstep.set_column(k, &((hp - hm) / (2.0 * delta)));
    }

    // matrix of the prolonged step in the lift bases: right-invariant
    // coordinates first, left-invariant second
    let mut p = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        // image of a right-lift basis vector: no right-invariant part, the
        // tangent image decomposes on the left lifts at h
        let w = &dstep * right_g.column(i).into_owned();
        let coeff = left_dec.decompose(&w);
        p.view_mut((n, 0), (n, n)).set_column(i, &coeff);
    }
    for j in 0..n {
        // image of a left-lift basis vector: the right-invariant component
        // at h is minus the corresponding right lift
        let beta_part = right_dec.decompose(&(-right_h.column(j).into_owned()));
        p.view_mut((0, n), (n, n)).set_column(j, &beta_part);
        let w = &dstep * left_g.column(j).into_owned() + right_h.column(j).into_owned();
        let coeff = left_dec.decompose(&w);
        p.view_mut((n, n), (n, n)).set_column(j, &coeff);
    }

    let omega_g = omega_matrix(&regularity_matrix(gpd, lag, g, cfg).matrix);
    let omega_h = omega_matrix(&regularity_matrix(gpd, lag, &h, cfg).matrix);
    let defect = p.transpose() * omega_h * p - omega_g;
    Ok(defect.abs().max())
}

/// A morphism of Lie groupoids presented as callables: the element map, the
/// base map and the induced fiber map in the chosen bases.
pub struct GroupoidMorphism<'a, A: Groupoid, B: Groupoid> {
    pub map: ElementMap<'a, A, B>,
    pub base_map: BaseMap<'a, A, B>,
    pub fiber_map: FiberMap<'a, A>,
}

pub type ElementMap<'a, A, B> =
    Box<dyn Fn(&<A as Groupoid>::Element) -> <B as Groupoid>::Element + 'a>;
pub type BaseMap<'a, A, B> = Box<dyn Fn(&<A as Groupoid>::Base) -> <B as Groupoid>::Base + 'a>;
pub type FiberMap<'a, A> =
    Box<dyn Fn(&<A as Groupoid>::Base, &DVector<f64>) -> DVector<f64> + 'a>;

/// Worst-case discrepancies of a reduction test.
#[derive(Debug, Clone, Default)]
pub struct ReductionReport {
    /// `max |L_up(g) - L_down(Phi g)|` over the sampled elements.
    pub lagrangian_mismatch: f64,
    /// Defect of the residual transformation identity
    /// `D_DEL L(g,h)(v) = D_DEL L'(Phi g, Phi h)(A Phi v)` over samples.
    pub pairing_defect: f64,
    /// Chart distance between the projected and the reduced trajectory.
    pub trajectory_discrepancy: f64,
}

impl ReductionReport {
    pub fn max_discrepancy(&self) -> f64 {
        self.pairing_defect.max(self.trajectory_discrepancy)
    }
}

/// Checks that the upstairs dynamics projects onto the downstairs dynamics
/// along the morphism: the residual pairing identity on sampled composable
/// pairs, and pointwise agreement of a projected trajectory with a reduced
/// one when supplied.
#[allow(clippy::too_many_arguments, clippy::type_complexity)]
pub fn reduction_check<A, B, LA, LB>(
    up: &A,
    lag_up: &LA,
    down: &B,
    lag_down: &LB,
    phi: &GroupoidMorphism<A, B>,
    sample_pairs: &[(A::Element, A::Element)],
    paired_trajectories: Option<(&[A::Element], &[B::Element])>,
    cfg: &DiffConfig,
) -> Result<ReductionReport, DiagnosticsError>
where
    A: Groupoid,
    B: Groupoid,
    LA: DiscreteLagrangian<A>,
    LB: DiscreteLagrangian<B>,
{
    let mut report = ReductionReport::default();

    for (g, h) in sample_pairs {
        for el in [g, h] {
            let mismatch = (lag_up.evaluate(el) - lag_down.evaluate(&(phi.map)(el))).abs();
            report.lagrangian_mismatch = report.lagrangian_mismatch.max(mismatch);
        }
        let r_up = del_residual(up, lag_up, g, h, cfg)?;
        let r_down = del_residual(down, lag_down, &(phi.map)(g), &(phi.map)(h), cfg)?;
        let base = up.target(g);
        for v in up.fiber_basis() {
            let mapped = (phi.fiber_map)(&base, &v);
            let defect = (r_up.pair(&v) - r_down.pair(&mapped)).abs();
            report.pairing_defect = report.pairing_defect.max(defect);
        }
    }

    if let Some((upstairs, downstairs)) = paired_trajectories {
        if upstairs.len() != downstairs.len() {
            return Err(DiagnosticsError::TrajectoryLengthMismatch {
                a: upstairs.len(),
                b: downstairs.len(),
            });
        }
        for (a, b) in upstairs.iter().zip(downstairs) {
            let d = down.chart_distance(&(phi.map)(a), b);
            report.trajectory_discrepancy = report.trajectory_discrepancy.max(d);
        }
    }

    Ok(report)
}

/// Drift of a Noether constant along a trajectory.
pub fn noether_drift<G: Groupoid, L: DiscreteLagrangian<G>>(
    gpd: &G,
    lag: &L,
    sym: &NoetherSymmetry<G>,
    elements: &[G::Element],
    cfg: &DiffConfig,
) -> f64 {
    let values: Vec<f64> = elements
        .iter()
        .map(|g| noether_constant(gpd, lag, sym, g, cfg))
        .collect();
    let first = values.first().copied().unwrap_or(0.0);
    values
        .iter()
        .map(|v| (v - first).abs())
        .fold(0.0, f64::max)
}

/// Momentum covector of the model's dual bundle tracked along elements;
/// convenience for Casimir-type quantities.
pub fn momentum_series<G: Groupoid, L: DiscreteLagrangian<G>>(
    gpd: &G,
    lag: &L,
    elements: &[G::Element],
    cfg: &DiffConfig,
) -> Vec<Momentum<G::Base>> {
    elements
        .iter()
        .map(|g| crate::groupoid::calculus::legendre_minus(gpd, lag, g, cfg))
        .collect()
}
