//! Directed graphs and finite-path combinatorics.
//!
//! A graph is a finite set of vertices and a finite set of edges, each edge
//! carrying a range vertex `r(e)` and a source vertex `s(e)`. Paths compose
//! like the generators they index: `e1 e2 ... en` is a path when
//! `s(e_i) = r(e_{i+1})`, the range of the path is `r(e1)` and the source is
//! `s(en)`. Vertices double as paths of length zero.
//!
//! Everything downstream assumes the row-finite no-source hypothesis: every
//! vertex receives at least one and finitely many edges. Construction accepts
//! arbitrary finite graphs and records violations in a [`ValidationReport`];
//! operations that need the hypothesis call [`Graph::require_valid`].

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

/// Index of a vertex in lexicographic id order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub(crate) u32);

/// Index of an edge in lexicographic id order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId(pub(crate) u32);

impl VertexId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl EdgeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Outcome of a structural validation pass.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub ok: bool,
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn passing() -> Self {
        ValidationReport { ok: true, violations: Vec::new() }
    }
}

/// Immutable directed graph with string ids.
///
/// Vertices and edges are stored sorted by id, so the numeric order of
/// [`VertexId`]/[`EdgeId`] coincides with lexicographic id order. All
/// tie-breaking (canonical extensions, report ordering) uses this order.
#[derive(Debug)]
pub struct Graph {
    vertex_names: Vec<String>,
    edge_names: Vec<String>,
    edge_range: Vec<VertexId>,
    edge_source: Vec<VertexId>,
    incoming: Vec<Vec<EdgeId>>,
    outgoing: Vec<Vec<EdgeId>>,
    report: ValidationReport,
}

impl Graph {
    /// Builds a graph from vertex ids and `(id, range, source)` edge triples.
    ///
    /// Fails on duplicate ids and on edges naming unknown vertices. The
    /// no-source check is recorded in the validation report instead, so that
    /// invalid graphs can still be loaded and reported on.
    pub fn new(vertices: &[&str], edges: &[(&str, &str, &str)]) -> Result<Graph> {
        let mut vertex_names: Vec<String> = vertices.iter().map(|s| s.to_string()).collect();
        vertex_names.sort();
        for w in vertex_names.windows(2) {
            if w[0] == w[1] {
                return Err(Error::DuplicateId(w[0].clone()));
            }
        }
        let vertex_index: BTreeMap<&str, VertexId> = vertex_names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.as_str(), VertexId(i as u32)))
            .collect();

        let mut sorted_edges: Vec<&(&str, &str, &str)> = edges.iter().collect();
        sorted_edges.sort_by_key(|t| t.0);
        for w in sorted_edges.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::DuplicateId(w[0].0.to_string()));
            }
        }

        let mut edge_names = Vec::with_capacity(sorted_edges.len());
        let mut edge_range = Vec::with_capacity(sorted_edges.len());
        let mut edge_source = Vec::with_capacity(sorted_edges.len());
        for (id, range, source) in sorted_edges.iter().copied() {
            if vertex_index.contains_key(id) {
                return Err(Error::DuplicateId(id.to_string()));
            }
            let r = *vertex_index
                .get(range)
                .ok_or_else(|| Error::UnknownVertex(range.to_string()))?;
            let s = *vertex_index
                .get(source)
                .ok_or_else(|| Error::UnknownVertex(source.to_string()))?;
            edge_names.push(id.to_string());
            edge_range.push(r);
            edge_source.push(s);
        }

        let mut incoming = vec![Vec::new(); vertex_names.len()];
        let mut outgoing = vec![Vec::new(); vertex_names.len()];
        for i in 0..edge_names.len() {
            let e = EdgeId(i as u32);
            incoming[edge_range[i].index()].push(e);
            outgoing[edge_source[i].index()].push(e);
        }

        let mut violations = Vec::new();
        for (v, inc) in incoming.iter().enumerate() {
            if inc.is_empty() {
                violations.push(format!("vertex `{}` is a source: it receives no edge", vertex_names[v]));
            }
        }
        let report = ValidationReport { ok: violations.is_empty(), violations };

        Ok(Graph {
            vertex_names,
            edge_names,
            edge_range,
            edge_source,
            incoming,
            outgoing,
            report,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_names.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_names.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> {
        (0..self.vertex_names.len() as u32).map(VertexId)
    }

    pub fn edges(&self) -> impl Iterator<Item = EdgeId> {
        (0..self.edge_names.len() as u32).map(EdgeId)
    }

    pub fn vertex(&self, id: &str) -> Result<VertexId> {
        self.vertex_names
            .binary_search_by(|n| n.as_str().cmp(id))
            .map(|i| VertexId(i as u32))
            .map_err(|_| Error::UnknownVertex(id.to_string()))
    }

    pub fn edge(&self, id: &str) -> Result<EdgeId> {
        self.edge_names
            .binary_search_by(|n| n.as_str().cmp(id))
            .map(|i| EdgeId(i as u32))
            .map_err(|_| Error::UnknownEdge(id.to_string()))
    }

    pub fn vertex_name(&self, v: VertexId) -> &str {
        &self.vertex_names[v.index()]
    }

    pub fn edge_name(&self, e: EdgeId) -> &str {
        &self.edge_names[e.index()]
    }

    pub fn range(&self, e: EdgeId) -> VertexId {
        self.edge_range[e.index()]
    }

    pub fn source(&self, e: EdgeId) -> VertexId {
        self.edge_source[e.index()]
    }

    /// Edges with range `v`, sorted by id.
    pub fn incoming(&self, v: VertexId) -> &[EdgeId] {
        &self.incoming[v.index()]
    }

    /// Edges with source `v`, sorted by id.
    pub fn outgoing(&self, v: VertexId) -> &[EdgeId] {
        &self.outgoing[v.index()]
    }

    /// Exactly `{e : r(e) = u and s(e) = v}`, sorted by id.
    pub fn edges_between(&self, u: VertexId, v: VertexId) -> Vec<EdgeId> {
        self.incoming(u).iter().copied().filter(|&e| self.source(e) == v).collect()
    }

    /// The cached no-source validation report.
    pub fn validate(&self) -> &ValidationReport {
        &self.report
    }

    pub fn is_valid(&self) -> bool {
        self.report.ok
    }

    /// Fails unless every vertex receives at least one edge.
    pub fn require_valid(&self) -> Result<()> {
        if self.report.ok {
            Ok(())
        } else {
            Err(Error::InvalidGraph(self.report.violations.join("; ")))
        }
    }

    /// True when every vertex reaches every other along directed edges.
    ///
    /// An edge is traversed from its source to its range, matching path
    /// formation; connectivity is checked both ways, which is equivalent to
    /// a single sweep on the graph and its reverse.
    pub fn strongly_connected(&self) -> bool {
        let n = self.vertex_count();
        if n == 0 {
            return false;
        }
        let reach = |start: VertexId, forward: bool| -> usize {
            let mut seen = vec![false; n];
            let mut stack = vec![start];
            seen[start.index()] = true;
            let mut count = 1;
            while let Some(v) = stack.pop() {
                let next = if forward { self.outgoing(v) } else { self.incoming(v) };
                for &e in next {
                    let w = if forward { self.range(e) } else { self.source(e) };
                    if !seen[w.index()] {
                        seen[w.index()] = true;
                        count += 1;
                        stack.push(w);
                    }
                }
            }
            count
        };
        reach(VertexId(0), true) == n && reach(VertexId(0), false) == n
    }

    /// All paths of length `n` whose range is `v`, in lexicographic edge order.
    pub fn paths_with_range(&self, v: VertexId, n: usize) -> Vec<Path> {
        let mut level = vec![Path::vertex(v)];
        for _ in 0..n {
            let mut next = Vec::new();
            for p in &level {
                for &e in self.incoming(p.source()) {
                    next.push(p.extend(e, self).expect("incoming edge composes"));
                }
            }
            level = next;
        }
        level
    }

    /// All paths of length `n` whose source is `v`, in deterministic order.
    pub fn paths_with_source(&self, v: VertexId, n: usize) -> Vec<Path> {
        if n == 0 {
            return vec![Path::vertex(v)];
        }
        let mut out = Vec::new();
        for &e in self.outgoing(v) {
            for q in self.paths_with_source(self.range(e), n - 1) {
                out.push(q.concat(&Path::single(e, self), self).expect("sources chain"));
            }
        }
        out.sort();
        out
    }
}

impl fmt::Display for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "graph({} vertices, {} edges)", self.vertex_count(), self.edge_count())
    }
}

/// Finite path: a composable edge list, or a bare vertex when empty.
///
/// Ordering is lexicographic on the edge list (so a path precedes its proper
/// extensions) with the base vertex breaking ties among empty paths; this is
/// the canonical order used by all coefficient maps.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Path {
    edges: Vec<EdgeId>,
    range: VertexId,
    source: VertexId,
}

impl Path {
    /// Length-0 path at `v`.
    pub fn vertex(v: VertexId) -> Path {
        Path { edges: Vec::new(), range: v, source: v }
    }

    /// Length-1 path consisting of edge `e`.
    pub fn single(e: EdgeId, g: &Graph) -> Path {
        Path { edges: vec![e], range: g.range(e), source: g.source(e) }
    }

    /// Path from an explicit composable edge list.
    pub fn from_edges(edges: &[EdgeId], g: &Graph) -> Result<Path> {
        let Some((&first, rest)) = edges.split_first() else {
            return Err(Error::InvalidGraph("empty edge list needs a base vertex".into()));
        };
        let mut p = Path::single(first, g);
        for &e in rest {
            p = p.extend(e, g)?;
        }
        Ok(p)
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn edges(&self) -> &[EdgeId] {
        &self.edges
    }

    pub fn range(&self) -> VertexId {
        self.range
    }

    pub fn source(&self) -> VertexId {
        self.source
    }

    /// First edge, if any.
    pub fn first(&self) -> Option<EdgeId> {
        self.edges.first().copied()
    }

    /// `self` followed by `other`; requires `s(self) = r(other)`.
    pub fn concat(&self, other: &Path, g: &Graph) -> Result<Path> {
        if self.source != other.range {
            return Err(Error::NotComposable {
                left: g.vertex_name(self.source).to_string(),
                right: g.vertex_name(other.range).to_string(),
            });
        }
        let mut edges = self.edges.clone();
        edges.extend_from_slice(&other.edges);
        Ok(Path { edges, range: self.range, source: other.source })
    }

    /// Appends one edge at the source end; requires `r(e) = s(self)`.
    pub fn extend(&self, e: EdgeId, g: &Graph) -> Result<Path> {
        if g.range(e) != self.source {
            return Err(Error::NotComposable {
                left: g.vertex_name(self.source).to_string(),
                right: g.vertex_name(g.range(e)).to_string(),
            });
        }
        let mut edges = self.edges.clone();
        edges.push(e);
        Ok(Path { edges, range: self.range, source: g.source(e) })
    }

    /// Extends by `n` edges, always appending the smallest-id edge received
    /// by the running source. Never fails on a validated graph.
    pub fn extend_canonical(&self, n: usize, g: &Graph) -> Result<Path> {
        let mut p = self.clone();
        for _ in 0..n {
            let &e = g
                .incoming(p.source)
                .first()
                .ok_or_else(|| Error::NoIncomingEdge(g.vertex_name(p.source).to_string()))?;
            p = p.extend(e, g)?;
        }
        Ok(p)
    }

    /// True iff `other = concat(self, rest)` for some path `rest`.
    pub fn is_prefix_of(&self, other: &Path) -> bool {
        if self.is_empty() {
            return self.range == other.range;
        }
        other.edges.len() >= self.edges.len() && other.edges[..self.edges.len()] == self.edges[..]
    }

    /// The `rest` with `other = concat(self, rest)`, when it exists.
    pub fn strip_prefix_of(&self, other: &Path, g: &Graph) -> Option<Path> {
        if !self.is_prefix_of(other) {
            return None;
        }
        let rest = &other.edges[self.edges.len()..];
        if rest.is_empty() {
            Some(Path::vertex(other.source))
        } else {
            Some(Path::from_edges(rest, g).expect("suffix of a path composes"))
        }
    }

    /// Space-separated edge ids; the vertex id for length 0.
    pub fn format(&self, g: &Graph) -> String {
        if self.is_empty() {
            g.vertex_name(self.range).to_string()
        } else {
            self.edges
                .iter()
                .map(|&e| g.edge_name(e))
                .collect::<Vec<_>>()
                .join(" ")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single_loop() -> Graph {
        Graph::new(&["v"], &[("e", "v", "v")]).unwrap()
    }

    fn cantor() -> Graph {
        Graph::new(&["v"], &[("e1", "v", "v"), ("e2", "v", "v")]).unwrap()
    }

    #[test]
    fn single_loop_is_valid() {
        let g = single_loop();
        assert!(g.validate().ok);
        assert!(g.require_valid().is_ok());
    }

    #[test]
    fn source_vertex_is_flagged() {
        let g = Graph::new(&["u", "v"], &[("e", "u", "v")]).unwrap();
        let report = g.validate();
        assert!(!report.ok);
        assert_eq!(report.violations.len(), 1);
        assert!(report.violations[0].contains("`v`"));
        assert!(g.require_valid().is_err());
    }

    #[test]
    fn two_loops_are_valid() {
        assert!(cantor().validate().ok);
    }

    #[test]
    fn duplicate_ids_rejected() {
        assert!(matches!(
            Graph::new(&["v", "v"], &[]),
            Err(Error::DuplicateId(_))
        ));
        assert!(matches!(
            Graph::new(&["v"], &[("e", "v", "v"), ("e", "v", "v")]),
            Err(Error::DuplicateId(_))
        ));
        // Sharing an id between a vertex and an edge would make the
        // expression grammar ambiguous in path literals.
        assert!(matches!(
            Graph::new(&["v"], &[("v", "v", "v")]),
            Err(Error::DuplicateId(_))
        ));
    }

    #[test]
    fn unknown_vertex_rejected() {
        assert!(matches!(
            Graph::new(&["v"], &[("e", "v", "w")]),
            Err(Error::UnknownVertex(_))
        ));
    }

    #[test]
    fn edges_between_partitions_edge_set() {
        let g = Graph::new(
            &["u", "v"],
            &[("a", "u", "v"), ("b", "v", "u"), ("c", "u", "u"), ("d", "v", "v")],
        )
        .unwrap();
        let mut seen = Vec::new();
        for x in g.vertices() {
            for y in g.vertices() {
                seen.extend(g.edges_between(x, y));
            }
        }
        seen.sort();
        let all: Vec<EdgeId> = g.edges().collect();
        assert_eq!(seen, all);

        let v = g.vertex("v").unwrap();
        let u = g.vertex("u").unwrap();
        assert_eq!(g.edges_between(u, v), vec![g.edge("a").unwrap()]);
    }

    #[test]
    fn loop_edges_between() {
        let g = cantor();
        let v = g.vertex("v").unwrap();
        assert_eq!(g.edges_between(v, v).len(), 2);
    }

    #[test]
    fn concat_identity_and_composition() {
        let g = cantor();
        let v = g.vertex("v").unwrap();
        let e1 = Path::single(g.edge("e1").unwrap(), &g);
        let e2 = Path::single(g.edge("e2").unwrap(), &g);
        let id = Path::vertex(v);

        assert_eq!(id.concat(&e1, &g).unwrap(), e1);
        assert_eq!(e1.concat(&id, &g).unwrap(), e1);
        let p = e1.concat(&e2, &g).unwrap();
        assert_eq!(p.len(), 2);
        assert_eq!(p.format(&g), "e1 e2");
    }

    #[test]
    fn concat_requires_matching_vertices() {
        let g = Graph::new(&["u", "v"], &[("a", "u", "v"), ("b", "v", "u")]).unwrap();
        let a = Path::single(g.edge("a").unwrap(), &g);
        // s(a) = v = r(b), so a then b composes; a then a does not.
        let b = Path::single(g.edge("b").unwrap(), &g);
        assert!(a.concat(&b, &g).is_ok());
        assert!(matches!(a.concat(&a, &g), Err(Error::NotComposable { .. })));
    }

    #[test]
    fn concat_is_associative_and_length_additive() {
        let g = cantor();
        let e1 = Path::single(g.edge("e1").unwrap(), &g);
        let e2 = Path::single(g.edge("e2").unwrap(), &g);
        let left = e1.concat(&e2, &g).unwrap().concat(&e1, &g).unwrap();
        let right = e1.concat(&e2.concat(&e1, &g).unwrap(), &g).unwrap();
        assert_eq!(left, right);
        assert_eq!(left.len(), 3);
    }

    #[test]
    fn extend_canonical_follows_smallest_id() {
        let g = single_loop();
        let v = g.vertex("v").unwrap();
        let p = Path::vertex(v).extend_canonical(3, &g).unwrap();
        assert_eq!(p.format(&g), "e e e");

        let g = cantor();
        let v = g.vertex("v").unwrap();
        let p = Path::vertex(v).extend_canonical(2, &g).unwrap();
        assert_eq!(p.format(&g), "e1 e1");

        let q = p.extend_canonical(0, &g).unwrap();
        assert_eq!(q, p);
    }

    #[test]
    fn extend_canonical_fails_only_at_sources() {
        let g = Graph::new(&["u", "v"], &[("e", "u", "v")]).unwrap();
        let u = g.vertex("u").unwrap();
        // One step lands at v, which receives nothing.
        assert!(matches!(
            Path::vertex(u).extend_canonical(2, &g),
            Err(Error::NoIncomingEdge(_))
        ));
    }

    #[test]
    fn prefix_stripping() {
        let g = cantor();
        let v = g.vertex("v").unwrap();
        let e1 = Path::single(g.edge("e1").unwrap(), &g);
        let e2 = Path::single(g.edge("e2").unwrap(), &g);
        let p = e1.concat(&e2, &g).unwrap();

        assert!(e1.is_prefix_of(&p));
        assert!(!e2.is_prefix_of(&p));
        assert_eq!(e1.strip_prefix_of(&p, &g).unwrap(), e2);
        assert_eq!(p.strip_prefix_of(&p, &g).unwrap(), Path::vertex(v));
        assert_eq!(Path::vertex(v).strip_prefix_of(&p, &g).unwrap(), p);
        assert!(e2.strip_prefix_of(&p, &g).is_none());
    }

    #[test]
    fn path_enumeration_counts() {
        let g = cantor();
        let v = g.vertex("v").unwrap();
        assert_eq!(g.paths_with_range(v, 0).len(), 1);
        assert_eq!(g.paths_with_range(v, 3).len(), 8);
        assert_eq!(g.paths_with_source(v, 3).len(), 8);

        let two = Graph::new(&["u", "v"], &[("a", "u", "v"), ("b", "v", "u")]).unwrap();
        let u = two.vertex("u").unwrap();
        // Only one path of each length ends at each vertex in a 2-cycle.
        assert_eq!(two.paths_with_range(u, 4).len(), 1);
        assert_eq!(two.paths_with_source(u, 4).len(), 1);
        for p in two.paths_with_range(u, 4) {
            assert_eq!(p.range(), u);
        }
    }

    #[test]
    fn strong_connectivity() {
        assert!(cantor().strongly_connected());
        let chain = Graph::new(&["u", "v"], &[("a", "u", "v"), ("c", "u", "u"), ("d", "v", "v")]).unwrap();
        // v never receives from u's side... u reaches nothing but itself backwards.
        assert!(!chain.strongly_connected());
        let cycle = Graph::new(&["u", "v"], &[("a", "u", "v"), ("b", "v", "u")]).unwrap();
        assert!(cycle.strongly_connected());
    }

    #[test]
    fn path_ordering_is_lexicographic_on_edges() {
        let g = cantor();
        let v = g.vertex("v").unwrap();
        let e1 = Path::single(g.edge("e1").unwrap(), &g);
        let e2 = Path::single(g.edge("e2").unwrap(), &g);
        let e1e1 = e1.concat(&e1, &g).unwrap();
        let e1e2 = e1.concat(&e2, &g).unwrap();
        let mut v_paths = vec![e2.clone(), e1e2.clone(), Path::vertex(v), e1e1.clone(), e1.clone()];
        v_paths.sort();
        assert_eq!(v_paths, vec![Path::vertex(v), e1, e1e1, e1e2, e2]);
    }
}
