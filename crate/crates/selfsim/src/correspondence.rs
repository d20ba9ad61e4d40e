//! The bundle of correspondences over a graph and its representation.
//!
//! Over the coefficient algebra `A`, a direct sum of one fiber function
//! space per vertex, sits the module `X` with one fiber per edge; the edge
//! fiber lives over the edge's source vertex, the left action pulls
//! coefficients back through the edge, and the inner product sums over
//! edges with a common source:
//!
//! * `(a xi)_e = pullback(a_{r(e)}, e) * xi_e`
//! * `(xi a)_e = xi_e * a_{s(e)}`
//! * `<xi, eta>_v = sum over s(e) = v of conj(xi_e) * eta_e`
//!
//! Two models implement the fiber arithmetic behind one trait. The
//! path-space model uses exact cylinder functions, so the Toeplitz and
//! covariance identities for `psi(xi) = sum s_e tau(xi_e)` and
//! `pi(a) = sum tau(a_v)` are decided exactly. The geometric model samples
//! mesh functions along the coding map of a Mauldin-Williams system; its
//! identities hold up to residuals that shrink at the contraction rate.
//! Mixing the models is a compile error rather than a runtime check.

use std::collections::BTreeMap;
use std::sync::Arc;

use num::complex::Complex64;
use num::Zero;

use crate::algebra::{tau, AlgebraElement};
use crate::cylinder::CylinderFn;
use crate::error::{Error, Result};
use crate::graph::{EdgeId, Graph, VertexId};
use crate::mesh::MeshFn;
use crate::mwifs::{MwSystem, Point};
use crate::scalar::{rat_from_f64, sc_complex};

/// Fiber arithmetic shared by the exact and the geometric model.
pub trait CorrespondenceModel {
    type Fiber: Clone + PartialEq + std::fmt::Debug;

    fn graph(&self) -> &Arc<Graph>;
    fn zero_fiber(&self, v: VertexId) -> Self::Fiber;
    fn unit_fiber(&self, v: VertexId) -> Self::Fiber;
    fn add(&self, x: &Self::Fiber, y: &Self::Fiber) -> Result<Self::Fiber>;
    fn mul(&self, x: &Self::Fiber, y: &Self::Fiber) -> Result<Self::Fiber>;
    fn conj(&self, x: &Self::Fiber) -> Self::Fiber;
    /// Pullback of a fiber over `r(e)` to a fiber over `s(e)`.
    fn pullback(&self, a: &Self::Fiber, e: EdgeId) -> Self::Fiber;
    fn is_zero_fiber(&self, x: &Self::Fiber) -> bool;
    /// Validates that `x` is a legal fiber over `v`.
    fn check_fiber(&self, v: VertexId, x: &Self::Fiber) -> Result<()>;
}

/// Exact model: fibers are cylinder functions on the path space of a fiber.
#[derive(Debug)]
pub struct PathModel {
    graph: Arc<Graph>,
}

impl PathModel {
    pub fn new(graph: Arc<Graph>) -> Result<PathModel> {
        graph.require_valid()?;
        Ok(PathModel { graph })
    }
}

impl CorrespondenceModel for PathModel {
    type Fiber = CylinderFn;

    fn graph(&self) -> &Arc<Graph> {
        &self.graph
    }

    fn zero_fiber(&self, _v: VertexId) -> CylinderFn {
        CylinderFn::zero(self.graph.clone())
    }

    fn unit_fiber(&self, v: VertexId) -> CylinderFn {
        CylinderFn::vertex_unit(self.graph.clone(), v).expect("valid graph")
    }

    fn add(&self, x: &CylinderFn, y: &CylinderFn) -> Result<CylinderFn> {
        x.add(y)
    }

    fn mul(&self, x: &CylinderFn, y: &CylinderFn) -> Result<CylinderFn> {
        x.mul(y)
    }

    fn conj(&self, x: &CylinderFn) -> CylinderFn {
        x.conjugate()
    }

    fn pullback(&self, a: &CylinderFn, e: EdgeId) -> CylinderFn {
        a.pullback_shift(e)
    }

    fn is_zero_fiber(&self, x: &CylinderFn) -> bool {
        x.is_zero()
    }

    fn check_fiber(&self, v: VertexId, x: &CylinderFn) -> Result<()> {
        if !Arc::ptr_eq(x.graph(), &self.graph) {
            return Err(Error::GraphMismatch);
        }
        if x.supported_on(v) {
            Ok(())
        } else {
            Err(Error::SupportViolation {
                place: format!("vertex `{}`", self.graph.vertex_name(v)),
                fiber: self.graph.vertex_name(v).to_string(),
            })
        }
    }
}

/// Geometric model: fibers are mesh functions on the boxes of a
/// Mauldin-Williams system, evaluated along its coding map.
#[derive(Debug)]
pub struct GeoModel {
    system: Arc<MwSystem>,
    nodes_per_axis: usize,
}

impl GeoModel {
    pub fn new(system: Arc<MwSystem>, nodes_per_axis: usize) -> Result<GeoModel> {
        system.require_valid()?;
        if nodes_per_axis < 2 {
            return Err(Error::Config("mesh needs at least 2 nodes per axis".into()));
        }
        Ok(GeoModel { system, nodes_per_axis })
    }

    pub fn system(&self) -> &Arc<MwSystem> {
        &self.system
    }

    /// Samples a function as a fiber over `v`.
    pub fn sample_fiber(&self, v: VertexId, f: impl Fn(&Point) -> Complex64) -> MeshFn {
        MeshFn::sample(
            self.system.space(v).clone(),
            self.system.dim(),
            self.nodes_per_axis,
            f,
        )
    }

    /// Depth-`n` cylinder approximation of `fiber` composed with the coding
    /// map: the coefficient at a path is the fiber value at its code point.
    fn cylinder_sample(&self, fiber: &MeshFn, v: VertexId, n: usize) -> Result<CylinderFn> {
        let g = self.system.graph();
        let mut terms = Vec::new();
        for alpha in g.paths_with_range(v, n) {
            let (pt, _) = self.system.code(&alpha, n)?;
            let val = fiber.eval(&pt);
            if !val.is_zero() {
                terms.push((alpha, sc_complex(rat_from_f64(val.re), rat_from_f64(val.im))));
            }
        }
        CylinderFn::from_terms(g.clone(), terms)
    }
}

impl CorrespondenceModel for GeoModel {
    type Fiber = MeshFn;

    fn graph(&self) -> &Arc<Graph> {
        self.system.graph()
    }

    fn zero_fiber(&self, v: VertexId) -> MeshFn {
        MeshFn::zero(self.system.space(v).clone(), self.system.dim(), self.nodes_per_axis)
    }

    fn unit_fiber(&self, v: VertexId) -> MeshFn {
        MeshFn::constant(
            self.system.space(v).clone(),
            self.system.dim(),
            self.nodes_per_axis,
            Complex64::new(1.0, 0.0),
        )
    }

    fn add(&self, x: &MeshFn, y: &MeshFn) -> Result<MeshFn> {
        x.add(y)
    }

    fn mul(&self, x: &MeshFn, y: &MeshFn) -> Result<MeshFn> {
        x.mul(y)
    }

    fn conj(&self, x: &MeshFn) -> MeshFn {
        x.conj()
    }

    fn pullback(&self, a: &MeshFn, e: EdgeId) -> MeshFn {
        let m = self.system.map(e).clone();
        self.sample_fiber(self.system.graph().source(e), |x| a.eval(&m.apply(x)))
    }

    fn is_zero_fiber(&self, x: &MeshFn) -> bool {
        x.is_zero()
    }

    fn check_fiber(&self, v: VertexId, x: &MeshFn) -> Result<()> {
        let expected = self.zero_fiber(v);
        if x.region() == expected.region()
            && x.dim() == expected.dim()
            && x.values().len() == expected.values().len()
        {
            Ok(())
        } else {
            Err(Error::ModelMismatch(format!(
                "fiber over `{}` is sampled on the wrong grid",
                self.system.graph().vertex_name(v)
            )))
        }
    }
}

/// Element of the coefficient algebra: one fiber per vertex.
pub struct AElement<M: CorrespondenceModel> {
    model: Arc<M>,
    components: BTreeMap<VertexId, M::Fiber>,
}

impl<M: CorrespondenceModel> Clone for AElement<M> {
    fn clone(&self) -> Self {
        AElement { model: self.model.clone(), components: self.components.clone() }
    }
}

impl<M: CorrespondenceModel> std::fmt::Debug for AElement<M> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("AElement").field("components", &self.components).finish()
    }
}

impl<M: CorrespondenceModel> PartialEq for AElement<M> {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.model, &other.model) && self.components == other.components
    }
}

fn require_same_model<M: CorrespondenceModel>(a: &Arc<M>, b: &Arc<M>) -> Result<()> {
    if Arc::ptr_eq(a, b) {
        Ok(())
    } else {
        Err(Error::ModelMismatch("operands built over different model instances".into()))
    }
}

impl<M: CorrespondenceModel> AElement<M> {
    pub fn zero(model: Arc<M>) -> Self {
        AElement { model, components: BTreeMap::new() }
    }

    /// The unit: the fiber unit at every vertex.
    pub fn unit(model: Arc<M>) -> Self {
        let components =
            model.graph().vertices().map(|v| (v, model.unit_fiber(v))).collect();
        AElement { model, components }
    }

    /// The fiber unit at one vertex.
    pub fn unit_at(model: Arc<M>, v: VertexId) -> Self {
        let fiber = model.unit_fiber(v);
        AElement { model, components: BTreeMap::from([(v, fiber)]) }
    }

    pub fn from_components(model: Arc<M>, parts: Vec<(VertexId, M::Fiber)>) -> Result<Self> {
        let mut components = BTreeMap::new();
        for (v, fiber) in parts {
            model.check_fiber(v, &fiber)?;
            if model.is_zero_fiber(&fiber) {
                continue;
            }
            match components.remove(&v) {
                None => {
                    components.insert(v, fiber);
                }
                Some(prev) => {
                    let sum = model.add(&prev, &fiber)?;
                    if !model.is_zero_fiber(&sum) {
                        components.insert(v, sum);
                    }
                }
            }
        }
        Ok(AElement { model, components })
    }

    pub fn model(&self) -> &Arc<M> {
        &self.model
    }

    pub fn component(&self, v: VertexId) -> Option<&M::Fiber> {
        self.components.get(&v)
    }

    pub fn support(&self) -> Vec<VertexId> {
        self.components.keys().copied().collect()
    }

    pub fn is_zero(&self) -> bool {
        self.components.is_empty()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        require_same_model(&self.model, &other.model)?;
        let mut components = self.components.clone();
        for (&v, fiber) in &other.components {
            match components.remove(&v) {
                None => {
                    components.insert(v, fiber.clone());
                }
                Some(prev) => {
                    let sum = self.model.add(&prev, fiber)?;
                    if !self.model.is_zero_fiber(&sum) {
                        components.insert(v, sum);
                    }
                }
            }
        }
        Ok(AElement { model: self.model.clone(), components })
    }

    /// Componentwise product; the algebra is a direct sum over vertices.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        require_same_model(&self.model, &other.model)?;
        let mut components = BTreeMap::new();
        for (&v, fiber) in &self.components {
            if let Some(g) = other.components.get(&v) {
                let prod = self.model.mul(fiber, g)?;
                if !self.model.is_zero_fiber(&prod) {
                    components.insert(v, prod);
                }
            }
        }
        Ok(AElement { model: self.model.clone(), components })
    }

    pub fn conjugate(&self) -> Self {
        let components =
            self.components.iter().map(|(&v, f)| (v, self.model.conj(f))).collect();
        AElement { model: self.model.clone(), components }
    }
}

/// Element of the module: one fiber per edge, living over the edge source.
pub struct CorrVector<M: CorrespondenceModel> {
    model: Arc<M>,
    components: BTreeMap<EdgeId, M::Fiber>,
}

impl<M: CorrespondenceModel> Clone for CorrVector<M> {
    fn clone(&self) -> Self {
        CorrVector { model: self.model.clone(), components: self.components.clone() }
    }
}

impl<M: CorrespondenceModel> std::fmt::Debug for CorrVector<M> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CorrVector").field("components", &self.components).finish()
    }
}

impl<M: CorrespondenceModel> PartialEq for CorrVector<M> {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.model, &other.model) && self.components == other.components
    }
}

impl<M: CorrespondenceModel> CorrVector<M> {
    pub fn zero(model: Arc<M>) -> Self {
        CorrVector { model, components: BTreeMap::new() }
    }

    /// The frame vector: the fiber unit in slot `e`, zero elsewhere.
    pub fn unit_edge(model: Arc<M>, e: EdgeId) -> Self {
        let fiber = model.unit_fiber(model.graph().source(e));
        CorrVector { model, components: BTreeMap::from([(e, fiber)]) }
    }

    pub fn from_components(model: Arc<M>, parts: Vec<(EdgeId, M::Fiber)>) -> Result<Self> {
        let mut components = BTreeMap::new();
        for (e, fiber) in parts {
            model.check_fiber(model.graph().source(e), &fiber)?;
            if model.is_zero_fiber(&fiber) {
                continue;
            }
            match components.remove(&e) {
                None => {
                    components.insert(e, fiber);
                }
                Some(prev) => {
                    let sum = model.add(&prev, &fiber)?;
                    if !model.is_zero_fiber(&sum) {
                        components.insert(e, sum);
                    }
                }
            }
        }
        Ok(CorrVector { model, components })
    }

    pub fn model(&self) -> &Arc<M> {
        &self.model
    }

    pub fn component(&self, e: EdgeId) -> Option<&M::Fiber> {
        self.components.get(&e)
    }

    pub fn support(&self) -> Vec<EdgeId> {
        self.components.keys().copied().collect()
    }

    pub fn is_zero(&self) -> bool {
        self.components.is_empty()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        require_same_model(&self.model, &other.model)?;
        let mut components = self.components.clone();
        for (&e, fiber) in &other.components {
            match components.remove(&e) {
                None => {
                    components.insert(e, fiber.clone());
                }
                Some(prev) => {
                    let sum = self.model.add(&prev, fiber)?;
                    if !self.model.is_zero_fiber(&sum) {
                        components.insert(e, sum);
                    }
                }
            }
        }
        Ok(CorrVector { model: self.model.clone(), components })
    }

    /// `(a xi)_e = pullback(a_{r(e)}, e) * xi_e`.
    pub fn left_act(&self, a: &AElement<M>) -> Result<Self> {
        require_same_model(&self.model, &a.model)?;
        let g = self.model.graph();
        let mut components = BTreeMap::new();
        for (&e, fiber) in &self.components {
            if let Some(coeff) = a.components.get(&g.range(e)) {
                let pulled = self.model.pullback(coeff, e);
                let prod = self.model.mul(&pulled, fiber)?;
                if !self.model.is_zero_fiber(&prod) {
                    components.insert(e, prod);
                }
            }
        }
        Ok(CorrVector { model: self.model.clone(), components })
    }

    /// `(xi a)_e = xi_e * a_{s(e)}`.
    pub fn right_act(&self, a: &AElement<M>) -> Result<Self> {
        require_same_model(&self.model, &a.model)?;
        let g = self.model.graph();
        let mut components = BTreeMap::new();
        for (&e, fiber) in &self.components {
            if let Some(coeff) = a.components.get(&g.source(e)) {
                let prod = self.model.mul(fiber, coeff)?;
                if !self.model.is_zero_fiber(&prod) {
                    components.insert(e, prod);
                }
            }
        }
        Ok(CorrVector { model: self.model.clone(), components })
    }

    /// `<xi, eta>_v = sum over s(e) = v of conj(xi_e) * eta_e`.
    pub fn inner(&self, other: &Self) -> Result<AElement<M>> {
        require_same_model(&self.model, &other.model)?;
        let g = self.model.graph();
        let mut parts = Vec::new();
        for (&e, fiber) in &self.components {
            if let Some(eta) = other.components.get(&e) {
                let prod = self.model.mul(&self.model.conj(fiber), eta)?;
                parts.push((g.source(e), prod));
            }
        }
        AElement::from_components(self.model.clone(), parts)
    }
}

impl AElement<PathModel> {
    /// `pi(a) = sum over v of tau(a_v)`; exact.
    pub fn pi(&self) -> AlgebraElement {
        let g = self.model.graph().clone();
        let mut acc = AlgebraElement::zero(g);
        for fiber in self.components.values() {
            acc = acc.add(&tau(fiber)).expect("components share the model graph");
        }
        acc
    }
}

impl CorrVector<PathModel> {
    /// `psi(xi) = sum over e of s_e tau(xi_e)`; exact.
    pub fn psi(&self) -> AlgebraElement {
        let g = self.model.graph().clone();
        let mut acc = AlgebraElement::zero(g.clone());
        for (&e, fiber) in &self.components {
            let gen = AlgebraElement::s(g.clone(), e).expect("valid graph");
            let term = gen.multiply(&tau(fiber)).expect("same graph");
            acc = acc.add(&term).expect("same graph");
        }
        acc
    }
}

/// Exact Toeplitz check: the inner-product identity and both module
/// compatibilities, each decided by normal form.
pub fn check_toeplitz(
    xi: &CorrVector<PathModel>,
    eta: &CorrVector<PathModel>,
    a: &AElement<PathModel>,
) -> Result<bool> {
    require_same_model(&xi.model, &eta.model)?;
    require_same_model(&xi.model, &a.model)?;
    let psi_xi = xi.psi();
    let psi_eta = eta.psi();
    let pi_a = a.pi();

    let lhs1 = psi_xi.adjoint().multiply(&psi_eta)?;
    let rhs1 = xi.inner(eta)?.pi();
    let lhs2 = pi_a.multiply(&psi_xi)?;
    let rhs2 = xi.left_act(a)?.psi();
    let lhs3 = psi_xi.multiply(&pi_a)?;
    let rhs3 = xi.right_act(a)?.psi();
    Ok(lhs1.equals(&rhs1)? && lhs2.equals(&rhs2)? && lhs3.equals(&rhs3)?)
}

/// Exact covariance check at vertex `u` for `a` supported on `u`: the sum
/// of one rank-one term per incoming edge, through the frame of fiber
/// units, reproduces `pi(a)`.
pub fn check_covariance(a: &AElement<PathModel>, u: VertexId) -> Result<bool> {
    let g = a.model.graph().clone();
    for v in a.support() {
        if v != u {
            return Err(Error::SupportViolation {
                place: format!("vertex `{}`", g.vertex_name(v)),
                fiber: g.vertex_name(u).to_string(),
            });
        }
    }
    let mut lhs = AlgebraElement::zero(g.clone());
    for &e in g.incoming(u) {
        let unit = CorrVector::unit_edge(a.model.clone(), e);
        let loaded = unit.left_act(a)?.psi();
        let term = loaded.multiply(&unit.psi().adjoint())?;
        lhs = lhs.add(&term)?;
    }
    lhs.equals(&a.pi())
}

impl AElement<GeoModel> {
    /// Depth-`n` approximation of `pi`: each component is sampled along the
    /// coding map and mapped through `tau`.
    pub fn pi_geo(&self, n: usize) -> Result<AlgebraElement> {
        if n == 0 {
            return Err(Error::Config("sampling depth must be at least 1".into()));
        }
        let g = self.model.graph().clone();
        let mut acc = AlgebraElement::zero(g);
        for (&v, fiber) in &self.components {
            let sampled = self.model.cylinder_sample(fiber, v, n)?;
            acc = acc.add(&tau(&sampled))?;
        }
        Ok(acc)
    }
}

impl CorrVector<GeoModel> {
    /// Depth-`n` approximation of `psi`.
    pub fn psi_geo(&self, n: usize) -> Result<AlgebraElement> {
        if n == 0 {
            return Err(Error::Config("sampling depth must be at least 1".into()));
        }
        let g = self.model.graph().clone();
        let mut acc = AlgebraElement::zero(g.clone());
        for (&e, fiber) in &self.components {
            let sampled = self.model.cylinder_sample(fiber, g.source(e), n)?;
            let gen = AlgebraElement::s(g.clone(), e)?;
            acc = acc.add(&gen.multiply(&tau(&sampled))?)?;
        }
        Ok(acc)
    }
}

/// Largest absolute normal-form coefficient among the three Toeplitz
/// defects at sampling depth `n`. Decays at the contraction rate for
/// Lipschitz data.
pub fn toeplitz_residual_geo(
    xi: &CorrVector<GeoModel>,
    eta: &CorrVector<GeoModel>,
    a: &AElement<GeoModel>,
    n: usize,
) -> Result<f64> {
    require_same_model(&xi.model, &eta.model)?;
    require_same_model(&xi.model, &a.model)?;
    let psi_xi = xi.psi_geo(n)?;
    let psi_eta = eta.psi_geo(n)?;
    let pi_a = a.pi_geo(n)?;

    let d1 = psi_xi.adjoint().multiply(&psi_eta)?.sub(&xi.inner(eta)?.pi_geo(n)?)?;
    let d2 = pi_a.multiply(&psi_xi)?.sub(&xi.left_act(a)?.psi_geo(n)?)?;
    let d3 = psi_xi.multiply(&pi_a)?.sub(&xi.right_act(a)?.psi_geo(n)?)?;
    Ok([d1, d2, d3]
        .iter()
        .map(|d| d.normal_form().max_abs_coefficient())
        .fold(0.0, f64::max))
}
