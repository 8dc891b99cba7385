//! Randomized verification of the groupoid axioms on a concrete instance.
//!
//! Samples composable triples built from caller-supplied random elements and
//! fiber offsets, then checks associativity, the identity laws, the inverse
//! laws and the retraction contract in chart coordinates.

use nalgebra::DVector;
use rand::Rng;

use super::Groupoid;

/// Worst violations observed over a sample run, all in chart coordinates
/// except the base-point rows.
#[derive(Debug, Clone, Default)]
pub struct AxiomReport {
    pub samples: usize,
    pub identity_base: f64,
    pub source_target_of_product: f64,
    pub associativity: f64,
    pub left_identity: f64,
    pub right_identity: f64,
    pub inverse_left: f64,
    pub inverse_right: f64,
    pub retract_at_zero: f64,
    pub retract_source: f64,
}

impl AxiomReport {
    pub fn max_violation(&self) -> f64 {
        [
            self.identity_base,
            self.source_target_of_product,
            self.associativity,
            self.left_identity,
            self.right_identity,
            self.inverse_left,
            self.inverse_right,
            self.retract_at_zero,
            self.retract_source,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

fn random_fiber<R: Rng>(rng: &mut R, n: usize, scale: f64) -> DVector<f64> {
    DVector::from_iterator(n, (0..n).map(|_| rng.gen_range(-scale..=scale)))
}

/// Runs the axiom suite on `samples` random composable triples. `sample`
/// draws a generic element; the two partners of each triple are produced by
/// retracting random fiber vectors, which keeps the pairs composable by
/// construction and the products inside the model's chart domain when
/// `fiber_scale` is modest.
pub fn check_axioms<G, R, S>(
    gpd: &G,
    samples: usize,
    fiber_scale: f64,
    rng: &mut R,
    mut sample: S,
) -> AxiomReport
where
    G: Groupoid,
    R: Rng,
    S: FnMut(&mut R) -> G::Element,
{
    let n = gpd.fiber_dim();
    let mut rep = AxiomReport {
        samples,
        ..Default::default()
    };

    for _ in 0..samples {
        let g = sample(rng);
        let h = gpd.retract(&gpd.target(&g), &random_fiber(rng, n, fiber_scale), 1.0);
        let k = gpd.retract(&gpd.target(&h), &random_fiber(rng, n, fiber_scale), 1.0);

        // identity section sits over its base point
        let x = gpd.source(&g);
        let eps = gpd.identity(&x);
        rep.identity_base = rep
            .identity_base
            .max(gpd.base_distance(&gpd.source(&eps), &x))
            .max(gpd.base_distance(&gpd.target(&eps), &x));

        // source/target of a product
        let gh = gpd.compose(&g, &h).expect("composable by construction");
        rep.source_target_of_product = rep
            .source_target_of_product
            .max(gpd.base_distance(&gpd.source(&gh), &gpd.source(&g)))
            .max(gpd.base_distance(&gpd.target(&gh), &gpd.target(&h)));

        // associativity
        let hk = gpd.compose(&h, &k).expect("composable by construction");
        let left = gpd.compose(&gh, &k).expect("composable by construction");
        let right = gpd.compose(&g, &hk).expect("composable by construction");
        rep.associativity = rep.associativity.max(gpd.chart_distance(&left, &right));

        // identity laws
        let lid = gpd
            .compose(&gpd.identity(&gpd.source(&g)), &g)
            .expect("identity composes on the left");
        let rid = gpd
            .compose(&g, &gpd.identity(&gpd.target(&g)))
            .expect("identity composes on the right");
        rep.left_identity = rep.left_identity.max(gpd.chart_distance(&lid, &g));
        rep.right_identity = rep.right_identity.max(gpd.chart_distance(&rid, &g));

        // inverse laws
        let ginv = gpd.invert(&g);
        let gg = gpd.compose(&g, &ginv).expect("inverse composes");
        let gg2 = gpd.compose(&ginv, &g).expect("inverse composes");
        rep.inverse_left = rep
            .inverse_left
            .max(gpd.chart_distance(&gg, &gpd.identity(&gpd.source(&g))));
        rep.inverse_right = rep
            .inverse_right
            .max(gpd.chart_distance(&gg2, &gpd.identity(&gpd.target(&g))));

        // retraction contract
        let x = gpd.target(&g);
        let v = random_fiber(rng, n, fiber_scale);
        rep.retract_at_zero = rep
            .retract_at_zero
            .max(gpd.chart_distance(&gpd.retract(&x, &v, 0.0), &gpd.identity(&x)));
        for t in [0.25, 0.5, 1.0] {
            rep.retract_source = rep
                .retract_source
                .max(gpd.base_distance(&gpd.source(&gpd.retract(&x, &v, t)), &x));
        }
    }

    rep
}
