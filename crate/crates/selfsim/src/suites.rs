//! Randomized verification batteries.
//!
//! Each battery runs a family of exact identity checks against one graph
//! and reports counts instead of panicking, so the CLI and the acceptance
//! tests can share them. All batteries are deterministic given the RNG.

use std::sync::Arc;

use rand::Rng;

use crate::algebra::{check_intertwine, tau, AlgebraElement};
use crate::correspondence::{check_covariance, check_toeplitz, AElement, CorrVector, PathModel};
use crate::error::Result;
use crate::expr;
use crate::graph::Graph;
use crate::sampling::{
    random_cylinder, random_cylinder_at, random_corrvector, random_element, random_vertex,
    random_aelement,
};

/// Outcome of one battery: case and failure counts plus the first failure
/// description, which is enough to reproduce with the same seed.
#[derive(Debug, Clone)]
pub struct SuiteOutcome {
    pub name: &'static str,
    pub cases: usize,
    pub failures: usize,
    pub first_failure: Option<String>,
}

impl SuiteOutcome {
    fn new(name: &'static str) -> SuiteOutcome {
        SuiteOutcome { name, cases: 0, failures: 0, first_failure: None }
    }

    fn record(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(describe());
            }
        }
    }

    pub fn pass(&self) -> bool {
        self.failures == 0
    }

    /// Folds another outcome into this one, keeping the earliest failure.
    pub fn absorb(&mut self, other: &SuiteOutcome) {
        self.cases += other.cases;
        self.failures += other.failures;
        if self.first_failure.is_none() {
            self.first_failure = other.first_failure.clone();
        }
    }
}

/// Associativity, adjoint anti-multiplicativity, grading, and the defining
/// relations, on random triples over one graph.
pub fn algebra_battery(g: &Arc<Graph>, rng: &mut impl Rng, pairs: usize) -> Result<SuiteOutcome> {
    let mut out = SuiteOutcome::new("algebra");
    g.require_valid()?;

    // Defining relations once per graph.
    for e in g.edges() {
        let s = AlgebraElement::s(g.clone(), e)?;
        let p = AlgebraElement::p(g.clone(), g.source(e))?;
        let ok = s.adjoint().multiply(&s)?.equals(&p)?;
        out.record(ok, || format!("s({0})^* s({0}) != p(s({0}))", g.edge_name(e)));
    }
    for v in g.vertices() {
        let mut sum = AlgebraElement::zero(g.clone());
        for &e in g.incoming(v) {
            let s = AlgebraElement::s(g.clone(), e)?;
            sum = sum.add(&s.multiply(&s.adjoint())?)?;
        }
        let ok = sum.equals(&AlgebraElement::p(g.clone(), v)?)?;
        out.record(ok, || format!("sum of s_e s_e^* over r(e)={0} != p({0})", g.vertex_name(v)));
    }

    for case in 0..pairs {
        let x = random_element(rng, g, 4, 3);
        let y = random_element(rng, g, 4, 3);
        let z = random_element(rng, g, 3, 2);

        let xy = x.multiply(&y)?;
        let assoc = xy.multiply(&z)?.equals(&x.multiply(&y.multiply(&z)?)?)?;
        out.record(assoc, || format!("associativity failed at case {case}"));

        let anti = xy.adjoint().equals(&y.adjoint().multiply(&x.adjoint())?)?;
        out.record(anti, || format!("adjoint anti-multiplicativity failed at case {case}"));

        let dx = x.degrees();
        let dy = y.degrees();
        let graded = xy
            .degrees()
            .iter()
            .all(|d| dx.iter().any(|a| dy.iter().any(|b| a + b == *d)));
        out.record(graded, || format!("grading failed at case {case}"));
    }
    Ok(out)
}

/// tau is multiplicative and intertwines every edge shift.
pub fn tau_battery(g: &Arc<Graph>, rng: &mut impl Rng, samples: usize) -> Result<SuiteOutcome> {
    let mut out = SuiteOutcome::new("tau");
    g.require_valid()?;
    for case in 0..samples {
        let f = random_cylinder(rng, g, 4, 2);
        let h = random_cylinder(rng, g, 4, 2);
        let mult = tau(&f.mul(&h)?).equals(&tau(&f).multiply(&tau(&h))?)?;
        out.record(mult, || format!("tau multiplicativity failed at case {case}"));
        for e in g.edges() {
            let ok = check_intertwine(&f, e)?;
            out.record(ok, || {
                format!("intertwining failed at case {case}, edge {}", g.edge_name(e))
            });
        }
    }
    Ok(out)
}

/// The three Toeplitz identities on random module data.
pub fn toeplitz_battery(g: &Arc<Graph>, rng: &mut impl Rng, cases: usize) -> Result<SuiteOutcome> {
    let mut out = SuiteOutcome::new("toeplitz");
    let model = Arc::new(PathModel::new(g.clone())?);
    for case in 0..cases {
        let xi = random_corrvector(rng, &model, 3, 2);
        let eta = random_corrvector(rng, &model, 3, 2);
        let a = random_aelement(rng, &model, 3, 2);
        let ok = check_toeplitz(&xi, &eta, &a)?;
        out.record(ok, || format!("Toeplitz identity failed at case {case}"));
    }
    Ok(out)
}

/// Covariance at a random vertex with random supported coefficients.
pub fn covariance_battery(
    g: &Arc<Graph>,
    rng: &mut impl Rng,
    cases: usize,
) -> Result<SuiteOutcome> {
    let mut out = SuiteOutcome::new("covariance");
    let model = Arc::new(PathModel::new(g.clone())?);
    for case in 0..cases {
        let u = random_vertex(rng, g);
        let fiber = random_cylinder_at(rng, g, u, 3, 2);
        let a = AElement::from_components(model.clone(), vec![(u, fiber)])?;
        let ok = check_covariance(&a, u)?;
        out.record(ok, || {
            format!("covariance failed at case {case}, vertex {}", g.vertex_name(u))
        });
    }
    Ok(out)
}

/// psi hits every generator s_e, pi every projection p_v.
pub fn generator_battery(g: &Arc<Graph>) -> Result<SuiteOutcome> {
    let mut out = SuiteOutcome::new("generators");
    let model = Arc::new(PathModel::new(g.clone())?);
    for e in g.edges() {
        let psi = CorrVector::unit_edge(model.clone(), e).psi();
        let ok = psi.equals(&AlgebraElement::s(g.clone(), e)?)?;
        out.record(ok, || format!("psi(unit_{}) != s({})", g.edge_name(e), g.edge_name(e)));
    }
    for v in g.vertices() {
        let pi = AElement::unit_at(model.clone(), v).pi();
        let ok = pi.equals(&AlgebraElement::p(g.clone(), v)?)?;
        out.record(ok, || format!("pi(unit at {0}) != p({0})", g.vertex_name(v)));
    }
    Ok(out)
}

/// parse(print(x)) agrees with x, and printing is stable.
pub fn roundtrip_battery(g: &Arc<Graph>, rng: &mut impl Rng, cases: usize) -> Result<SuiteOutcome> {
    let mut out = SuiteOutcome::new("roundtrip");
    g.require_valid()?;
    for case in 0..cases {
        let x = random_element(rng, g, 5, 3);
        let printed = expr::print(&x);
        match expr::parse(g, &printed) {
            Err(e) => out.record(false, || format!("case {case}: `{printed}` failed: {e}")),
            Ok(y) => {
                let ok = y.equals(&x)? && expr::print(&y) == printed;
                out.record(ok, || format!("case {case}: `{printed}` round-trip mismatch"));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::random_graph;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn batteries_pass_on_random_graphs() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..3 {
            let g = random_graph(&mut rng, 5, 10);
            let a = algebra_battery(&g, &mut rng, 25).unwrap();
            assert!(a.pass(), "{:?}", a.first_failure);
            let t = tau_battery(&g, &mut rng, 10).unwrap();
            assert!(t.pass(), "{:?}", t.first_failure);
            let tp = toeplitz_battery(&g, &mut rng, 10).unwrap();
            assert!(tp.pass(), "{:?}", tp.first_failure);
            let cv = covariance_battery(&g, &mut rng, 10).unwrap();
            assert!(cv.pass(), "{:?}", cv.first_failure);
            let gen = generator_battery(&g).unwrap();
            assert!(gen.pass(), "{:?}", gen.first_failure);
            let rt = roundtrip_battery(&g, &mut rng, 10).unwrap();
            assert!(rt.pass(), "{:?}", rt.first_failure);
        }
    }

    #[test]
    fn outcomes_absorb_counts() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let g = random_graph(&mut rng, 3, 6);
        let mut total = generator_battery(&g).unwrap();
        let other = generator_battery(&g).unwrap();
        let expected = total.cases * 2;
        total.absorb(&other);
        assert_eq!(total.cases, expected);
        assert!(total.pass());
    }
}
