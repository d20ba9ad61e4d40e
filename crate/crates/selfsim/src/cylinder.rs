//! Exact cylinder functions on the infinite path space.
//!
//! A value of [`CylinderFn`] is a finite linear combination of indicators
//! `chi(Z(alpha))`, where `Z(alpha)` is the set of infinite paths beginning
//! with the finite path `alpha`. Two facts drive every operation:
//!
//! * subdivision: `chi(Z(alpha)) = sum over r(e) = s(alpha) of chi(Z(alpha e))`,
//!   which needs the no-source hypothesis so the sum is nonempty;
//! * intersection: `Z(alpha)` and `Z(beta)` are nested when one path is a
//!   prefix of the other and disjoint otherwise.
//!
//! Values are kept in a canonical form with keys at minimal mixed depths: the
//! key set is an antichain under the prefix order and no complete sibling
//! family carries one common coefficient. Refinement to a uniform depth is
//! available explicitly and is deliberately not canonical; equality always
//! compares canonical forms, so refined copies stay equal to their sources.

use std::collections::BTreeMap;
use std::sync::Arc;

use num::traits::{One, Zero};

use crate::error::{Error, Result};
use crate::graph::{EdgeId, Graph, Path, VertexId};
use crate::scalar::{format_scalar, sc_conj, Scalar};

/// Finite linear combination of cylinder indicators over one graph.
#[derive(Debug, Clone)]
pub struct CylinderFn {
    graph: Arc<Graph>,
    terms: BTreeMap<Path, Scalar>,
    canonical: bool,
}

fn add_term(acc: &mut BTreeMap<Path, Scalar>, key: Path, c: Scalar) {
    if c.is_zero() {
        return;
    }
    let entry = acc.entry(key.clone()).or_insert_with(Scalar::zero);
    *entry = entry.clone() + c;
    if entry.is_zero() {
        acc.remove(&key);
    }
}

fn parent_of(key: &Path, g: &Graph) -> Path {
    debug_assert!(!key.is_empty());
    if key.len() == 1 {
        Path::vertex(key.range())
    } else {
        Path::from_edges(&key.edges()[..key.len() - 1], g).expect("prefix of a path composes")
    }
}

/// Canonicalizes a raw term list: merge, disjointify, collapse.
fn canonical_map(
    g: &Graph,
    terms: impl IntoIterator<Item = (Path, Scalar)>,
) -> BTreeMap<Path, Scalar> {
    let mut acc: BTreeMap<Path, Scalar> = BTreeMap::new();
    for (p, c) in terms {
        add_term(&mut acc, p, c);
    }

    // Disjointify: expand any key lying under another until the key set is
    // an antichain. Among nonempty keys a nesting always shows up between
    // lexicographic neighbours; vertex keys need their own scan because the
    // edge-list order ignores the base vertex.
    loop {
        let mut expand: Option<Path> = None;
        for k in acc.keys().filter(|k| k.is_empty()) {
            if acc.keys().any(|b| !b.is_empty() && b.range() == k.range()) {
                expand = Some(k.clone());
                break;
            }
        }
        if expand.is_none() {
            let keys: Vec<&Path> = acc.keys().filter(|k| !k.is_empty()).collect();
            for w in keys.windows(2) {
                if w[0].is_prefix_of(w[1]) {
                    expand = Some(w[0].clone());
                    break;
                }
            }
        }
        let Some(key) = expand else { break };
        let c = acc.remove(&key).expect("expansion key is stored");
        for &e in g.incoming(key.source()) {
            add_term(&mut acc, key.extend(e, g).expect("incoming edge composes"), c.clone());
        }
    }

    // Collapse: replace a complete sibling family with a single coefficient
    // by its parent, deepest families first so cascades resolve.
    loop {
        let mut families: BTreeMap<Path, Vec<(EdgeId, Scalar)>> = BTreeMap::new();
        for (k, c) in &acc {
            if !k.is_empty() {
                let last = *k.edges().last().expect("nonempty");
                families.entry(parent_of(k, g)).or_default().push((last, c.clone()));
            }
        }
        let mut parents: Vec<Path> = families.keys().cloned().collect();
        parents.sort_by_key(|p| std::cmp::Reverse(p.len()));
        let mut collapsed = false;
        for parent in parents {
            let fam = &families[&parent];
            if fam.len() != g.incoming(parent.source()).len() {
                continue;
            }
            if !fam.windows(2).all(|w| w[0].1 == w[1].1) {
                continue;
            }
            for (e, _) in fam {
                let child = parent.extend(*e, g).expect("family member composes");
                acc.remove(&child);
            }
            add_term(&mut acc, parent, fam[0].1.clone());
            collapsed = true;
            break;
        }
        if !collapsed {
            break;
        }
    }

    acc
}

impl CylinderFn {
    /// The zero function.
    pub fn zero(graph: Arc<Graph>) -> CylinderFn {
        CylinderFn { graph, terms: BTreeMap::new(), canonical: true }
    }

    /// The indicator `chi(Z(alpha))`.
    pub fn indicator(graph: Arc<Graph>, alpha: Path) -> Result<CylinderFn> {
        graph.require_valid()?;
        let mut terms = BTreeMap::new();
        terms.insert(alpha, Scalar::one());
        Ok(CylinderFn { graph, terms, canonical: true })
    }

    /// The fiber unit `chi(Z(v))`.
    pub fn vertex_unit(graph: Arc<Graph>, v: VertexId) -> Result<CylinderFn> {
        CylinderFn::indicator(graph, Path::vertex(v))
    }

    /// Builds from an arbitrary term list, canonicalizing.
    pub fn from_terms(graph: Arc<Graph>, terms: Vec<(Path, Scalar)>) -> Result<CylinderFn> {
        graph.require_valid()?;
        let map = canonical_map(&graph, terms);
        Ok(CylinderFn { graph, terms: map, canonical: true })
    }

    pub fn graph(&self) -> &Arc<Graph> {
        &self.graph
    }

    /// Current representation; canonical unless produced by [`refine`](Self::refine).
    pub fn terms(&self) -> &BTreeMap<Path, Scalar> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        if self.canonical {
            self.terms.is_empty()
        } else {
            self.canonical_terms().is_empty()
        }
    }

    fn canonical_terms(&self) -> BTreeMap<Path, Scalar> {
        if self.canonical {
            self.terms.clone()
        } else {
            canonical_map(&self.graph, self.terms.clone())
        }
    }

    /// Returns the canonical representative.
    pub fn canonicalize(&self) -> CylinderFn {
        CylinderFn { graph: self.graph.clone(), terms: self.canonical_terms(), canonical: true }
    }

    fn same_graph(&self, other: &CylinderFn) -> Result<()> {
        if Arc::ptr_eq(&self.graph, &other.graph) {
            Ok(())
        } else {
            Err(Error::GraphMismatch)
        }
    }

    pub fn max_key_len(&self) -> usize {
        self.terms.keys().map(Path::len).max().unwrap_or(0)
    }

    /// True when every key has range `v`, i.e. the function lives on the
    /// fiber of infinite paths with range `v`.
    pub fn supported_on(&self, v: VertexId) -> bool {
        self.terms.keys().all(|k| k.range() == v)
    }

    pub fn add(&self, other: &CylinderFn) -> Result<CylinderFn> {
        self.same_graph(other)?;
        let mut terms: Vec<(Path, Scalar)> =
            self.terms.iter().map(|(k, c)| (k.clone(), c.clone())).collect();
        terms.extend(other.terms.iter().map(|(k, c)| (k.clone(), c.clone())));
        CylinderFn::from_terms(self.graph.clone(), terms)
    }

    pub fn sub(&self, other: &CylinderFn) -> Result<CylinderFn> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> CylinderFn {
        let terms = self.terms.iter().map(|(k, c)| (k.clone(), -c.clone())).collect();
        CylinderFn { graph: self.graph.clone(), terms, canonical: self.canonical }
    }

    pub fn scale(&self, c: &Scalar) -> CylinderFn {
        if c.is_zero() {
            return CylinderFn::zero(self.graph.clone());
        }
        let terms = self.terms.iter().map(|(k, v)| (k.clone(), c.clone() * v.clone())).collect();
        CylinderFn { graph: self.graph.clone(), terms, canonical: self.canonical }
    }

    /// Pointwise product. Exact for any representation: cylinders are nested
    /// or disjoint, so each pair of keys contributes the longer key or nothing.
    pub fn mul(&self, other: &CylinderFn) -> Result<CylinderFn> {
        self.same_graph(other)?;
        let mut out = Vec::new();
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                if a.is_prefix_of(b) {
                    out.push((b.clone(), ca.clone() * cb.clone()));
                } else if b.is_prefix_of(a) {
                    out.push((a.clone(), ca.clone() * cb.clone()));
                }
            }
        }
        CylinderFn::from_terms(self.graph.clone(), out)
    }

    /// Pointwise complex conjugate.
    pub fn conjugate(&self) -> CylinderFn {
        let terms = self.terms.iter().map(|(k, c)| (k.clone(), sc_conj(c))).collect();
        CylinderFn { graph: self.graph.clone(), terms, canonical: self.canonical }
    }

    /// Rewrites every key at length exactly `n`; same function, uniform keys.
    pub fn refine(&self, n: usize) -> Result<CylinderFn> {
        let present = self.max_key_len();
        if n < present {
            return Err(Error::RefineDepth { requested: n, present });
        }
        let mut out: BTreeMap<Path, Scalar> = BTreeMap::new();
        for (k, c) in &self.terms {
            let mut level = vec![k.clone()];
            for _ in k.len()..n {
                let mut next = Vec::new();
                for p in &level {
                    for &e in self.graph.incoming(p.source()) {
                        next.push(p.extend(e, &self.graph).expect("incoming edge composes"));
                    }
                }
                level = next;
            }
            for p in level {
                add_term(&mut out, p, c.clone());
            }
        }
        Ok(CylinderFn { graph: self.graph.clone(), terms: out, canonical: false })
    }

    /// The composition `f o phi`, where `phi` prepends edge `e`: keys keep
    /// their coefficient and lose the leading `e`; the vertex key at `r(e)`
    /// becomes the vertex key at `s(e)`; everything else dies.
    pub fn pullback_shift(&self, e: EdgeId) -> CylinderFn {
        let g = &self.graph;
        let single = Path::single(e, g);
        let mut out = Vec::new();
        for (k, c) in &self.terms {
            if k.is_empty() {
                if k.range() == g.range(e) {
                    out.push((Path::vertex(g.source(e)), c.clone()));
                }
            } else if k.first() == Some(e) {
                let rest = single.strip_prefix_of(k, g).expect("leading edge matches");
                out.push((rest, c.clone()));
            }
        }
        CylinderFn::from_terms(self.graph.clone(), out).expect("graph already validated")
    }

    /// Value at any infinite path extending `alpha`; requires `alpha` at
    /// least as long as every key so the value is well defined.
    pub fn evaluate(&self, alpha: &Path) -> Result<Scalar> {
        let needed = self.max_key_len();
        if alpha.len() < needed {
            return Err(Error::EvalDepth { given: alpha.len(), needed });
        }
        let mut total = Scalar::zero();
        for (k, c) in &self.terms {
            if k.is_prefix_of(alpha) {
                total += c.clone();
            }
        }
        Ok(total)
    }

    /// Renders as a sum of `chi(...)` terms in key order.
    pub fn format(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        for (k, c) in &self.terms {
            let key = format!("chi({})", k.format(&self.graph));
            let coeff = format_scalar(c);
            if coeff == "1" {
                parts.push(key);
            } else if c.im.is_zero() {
                parts.push(format!("{coeff}*{key}"));
            } else {
                parts.push(format!("({coeff})*{key}"));
            }
        }
        parts.join(" + ")
    }
}

impl PartialEq for CylinderFn {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.graph, &other.graph)
            && self.canonical_terms() == other.canonical_terms()
    }
}

impl Eq for CylinderFn {}
