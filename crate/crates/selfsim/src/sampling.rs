//! Deterministic random generators for the verification suites.
//!
//! Everything is driven by a caller-supplied RNG so a seed fully
//! determines a run. Graphs are always row-finite without sources: each
//! vertex receives at least one edge by construction.

use std::sync::Arc;

use num::bigint::BigInt;
use num::rational::BigRational;
use rand::Rng;

use crate::algebra::AlgebraElement;
use crate::correspondence::{AElement, CorrVector, CorrespondenceModel, PathModel};
use crate::cylinder::CylinderFn;
use crate::graph::{Graph, Path, VertexId};
use crate::scalar::{sc_complex, Scalar};

/// Random graph with at most `max_vertices` vertices and `max_edges` edges;
/// every vertex receives an edge, so validation always passes.
pub fn random_graph(rng: &mut impl Rng, max_vertices: usize, max_edges: usize) -> Arc<Graph> {
    let nv = rng.random_range(1..=max_vertices);
    let vertex_names: Vec<String> = (1..=nv).map(|i| format!("v{i}")).collect();
    let ne = rng.random_range(nv..=max_edges.max(nv));
    let mut edges = Vec::with_capacity(ne);
    // One incoming edge per vertex first, then free extras.
    for (i, name) in vertex_names.iter().enumerate() {
        let source = rng.random_range(0..nv);
        edges.push((format!("e{}", i + 1), name.clone(), vertex_names[source].clone()));
    }
    for i in nv..ne {
        let range = rng.random_range(0..nv);
        let source = rng.random_range(0..nv);
        edges.push((
            format!("e{}", i + 1),
            vertex_names[range].clone(),
            vertex_names[source].clone(),
        ));
    }
    let vertex_refs: Vec<&str> = vertex_names.iter().map(String::as_str).collect();
    let edge_refs: Vec<(&str, &str, &str)> =
        edges.iter().map(|(a, b, c)| (a.as_str(), b.as_str(), c.as_str())).collect();
    Arc::new(Graph::new(&vertex_refs, &edge_refs).expect("constructed names are unique"))
}

pub fn random_vertex(rng: &mut impl Rng, g: &Graph) -> VertexId {
    let i = rng.random_range(0..g.vertex_count());
    g.vertices().nth(i).expect("index in range")
}

/// Random path with range `v`, built by a backward walk along incoming
/// edges; always succeeds on a validated graph.
pub fn random_path_with_range(rng: &mut impl Rng, g: &Graph, v: VertexId, len: usize) -> Path {
    let mut p = Path::vertex(v);
    for _ in 0..len {
        let inc = g.incoming(p.source());
        let e = inc[rng.random_range(0..inc.len())];
        p = p.extend(e, g).expect("incoming edge composes");
    }
    p
}

/// Random path with source `w`, built by prepending outgoing edges.
pub fn random_path_with_source(rng: &mut impl Rng, g: &Graph, w: VertexId, len: usize) -> Path {
    let mut p = Path::vertex(w);
    for _ in 0..len {
        let out = g.outgoing(p.range());
        if out.is_empty() {
            // A vertex may emit nothing; stop early rather than fail.
            break;
        }
        let e = out[rng.random_range(0..out.len())];
        p = Path::single(e, g).concat(&p, g).expect("outgoing edge composes");
    }
    p
}

fn random_rational(rng: &mut impl Rng) -> BigRational {
    let numer = rng.random_range(-9i64..=9);
    let denom = rng.random_range(1i64..=4);
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}

/// Small exact scalar; occasionally purely real or purely imaginary.
pub fn random_scalar(rng: &mut impl Rng) -> Scalar {
    let re = random_rational(rng);
    let im = random_rational(rng);
    let zero = || BigRational::from_integer(BigInt::from(0));
    match rng.random_range(0..4) {
        0 => sc_complex(re, zero()),
        1 => sc_complex(zero(), im),
        _ => sc_complex(re, im),
    }
}

/// Random algebra element: a short sum of scaled monomials.
pub fn random_element(
    rng: &mut impl Rng,
    g: &Arc<Graph>,
    max_terms: usize,
    max_len: usize,
) -> AlgebraElement {
    let mut acc = AlgebraElement::zero(g.clone());
    let terms = rng.random_range(0..=max_terms);
    for _ in 0..terms {
        let w = random_vertex(rng, g);
        let mu_len = rng.random_range(0..=max_len);
        let nu_len = rng.random_range(0..=max_len);
        let mu = random_path_with_source(rng, g, w, mu_len);
        let nu = random_path_with_source(rng, g, w, nu_len);
        let m = AlgebraElement::monomial(g.clone(), mu, nu).expect("sources match");
        acc = acc.add(&m.scale(&random_scalar(rng))).expect("same graph");
    }
    acc
}

/// Random cylinder function with keys of depth at most `max_depth`.
pub fn random_cylinder(
    rng: &mut impl Rng,
    g: &Arc<Graph>,
    max_terms: usize,
    max_depth: usize,
) -> CylinderFn {
    let v = random_vertex(rng, g);
    random_cylinder_at(rng, g, v, max_terms, max_depth)
}

/// Random cylinder function supported on the fiber of `v`.
pub fn random_cylinder_at(
    rng: &mut impl Rng,
    g: &Arc<Graph>,
    v: VertexId,
    max_terms: usize,
    max_depth: usize,
) -> CylinderFn {
    let terms = rng.random_range(0..=max_terms);
    let parts: Vec<(Path, Scalar)> = (0..terms)
        .map(|_| {
            let depth = rng.random_range(0..=max_depth);
            let p = random_path_with_range(rng, g, v, depth);
            (p, random_scalar(rng))
        })
        .collect();
    CylinderFn::from_terms(g.clone(), parts).expect("keys share the graph")
}

/// Random coefficient-algebra element in the path-space model.
pub fn random_aelement(
    rng: &mut impl Rng,
    model: &Arc<PathModel>,
    max_terms: usize,
    max_depth: usize,
) -> AElement<PathModel> {
    let g = model.graph().clone();
    let mut parts = Vec::new();
    for v in g.vertices() {
        if rng.random_range(0..10) < 7 {
            parts.push((v, random_cylinder_at(rng, &g, v, max_terms, max_depth)));
        }
    }
    AElement::from_components(model.clone(), parts).expect("fibers match their vertices")
}

/// Random module vector in the path-space model.
pub fn random_corrvector(
    rng: &mut impl Rng,
    model: &Arc<PathModel>,
    max_terms: usize,
    max_depth: usize,
) -> CorrVector<PathModel> {
    let g = model.graph().clone();
    let mut parts = Vec::new();
    for e in g.edges() {
        if rng.random_range(0..10) < 5 {
            let v = g.source(e);
            parts.push((e, random_cylinder_at(rng, &g, v, max_terms, max_depth)));
        }
    }
    CorrVector::from_components(model.clone(), parts).expect("fibers match their sources")
}
