//! Graph-directed iterated function systems with similarity maps.
//!
//! A system attaches a compact axis-aligned box `T_v` (dimension 1 or 2) to
//! every vertex and a contracting similarity `phi_e: T_{s(e)} -> T_{r(e)}`
//! to every edge. The engine computes:
//!
//! * certified approximations of the invariant sets
//!   `K_u = union over r(e) = u of phi_e(K_{s(e)})`,
//! * the coding map sending a finite path to the image cell of the composed
//!   similarity, with an exact radius bound,
//! * equivariance and surjectivity checks at stated resolutions,
//! * the Hausdorff dimension as the root of the spectral-radius equation
//!   for the matrix `A(s)_{uv} = sum over edges u<-v of ratio^s`.
//!
//! All geometry here is floating point; exactness claims live in the
//! symbolic modules. Every certified bound accounts for the grid snapping
//! used to keep point sets small.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{EdgeId, Graph, Path, ValidationReport, VertexId};

/// Point in the plane; 1-dimensional systems keep the second coordinate 0.
pub type Point = [f64; 2];

pub fn dist(a: &Point, b: &Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Largest distance from a point of `from` to the set `to`.
fn directed_gap(from: &[Point], to: &[Point]) -> f64 {
    let mut worst: f64 = 0.0;
    for p in from {
        let mut best = f64::INFINITY;
        for q in to {
            let d = dist(p, q);
            if d < best {
                best = d;
            }
        }
        worst = worst.max(best);
    }
    worst
}

/// Symmetric Hausdorff distance between finite point sets.
pub fn hausdorff_distance(a: &[Point], b: &[Point]) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 0.0;
    }
    if a.is_empty() || b.is_empty() {
        return f64::INFINITY;
    }
    directed_gap(a, b).max(directed_gap(b, a))
}

/// Compact axis-aligned box; degenerate axes are allowed.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxRegion {
    pub min: Point,
    pub max: Point,
}

impl BoxRegion {
    pub fn new(min: Point, max: Point) -> Result<BoxRegion> {
        for i in 0..2 {
            if !min[i].is_finite() || !max[i].is_finite() {
                return Err(Error::InvalidSystem("box corners must be finite".into()));
            }
            if min[i] > max[i] {
                return Err(Error::InvalidSystem(format!(
                    "box min {} exceeds max {} on axis {i}",
                    min[i], max[i]
                )));
            }
        }
        Ok(BoxRegion { min, max })
    }

    pub fn center(&self) -> Point {
        [(self.min[0] + self.max[0]) / 2.0, (self.min[1] + self.max[1]) / 2.0]
    }

    pub fn corners(&self, dim: usize) -> Vec<Point> {
        if dim == 1 {
            vec![[self.min[0], 0.0], [self.max[0], 0.0]]
        } else {
            vec![
                [self.min[0], self.min[1]],
                [self.min[0], self.max[1]],
                [self.max[0], self.min[1]],
                [self.max[0], self.max[1]],
            ]
        }
    }

    /// Euclidean diameter.
    pub fn diam(&self) -> f64 {
        dist(&self.min, &self.max)
    }

    pub fn contains(&self, p: &Point, slack: f64) -> bool {
        (0..2).all(|i| p[i] >= self.min[i] - slack && p[i] <= self.max[i] + slack)
    }

    /// Grid of nodes with spacing at most `pitch`, always including both
    /// faces of every axis.
    pub fn mesh(&self, dim: usize, pitch: f64) -> Vec<Point> {
        let steps = |lo: f64, hi: f64| -> Vec<f64> {
            let extent = hi - lo;
            if extent <= 0.0 {
                return vec![lo];
            }
            let n = (extent / pitch).ceil() as usize;
            (0..=n).map(|i| (lo + i as f64 * pitch).min(hi)).collect()
        };
        let xs = steps(self.min[0], self.max[0]);
        if dim == 1 {
            xs.into_iter().map(|x| [x, 0.0]).collect()
        } else {
            let ys = steps(self.min[1], self.max[1]);
            let mut out = Vec::with_capacity(xs.len() * ys.len());
            for &x in &xs {
                for &y in &ys {
                    out.push([x, y]);
                }
            }
            out
        }
    }
}

/// Similarity transform `x -> ratio * R(angle) * F * x + translation`,
/// where `F` reflects when the flag is set. In dimension 1 the angle must
/// be 0 and reflection negates the coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct Similarity {
    pub ratio: f64,
    pub angle_degrees: f64,
    pub reflect: bool,
    pub translation: Point,
    linear: [[f64; 2]; 2],
}

/// Exact values on the axes keep corner arithmetic clean.
fn cos_sin_degrees(angle: f64) -> (f64, f64) {
    match angle.rem_euclid(360.0) {
        0.0 => (1.0, 0.0),
        90.0 => (0.0, 1.0),
        180.0 => (-1.0, 0.0),
        270.0 => (0.0, -1.0),
        a => (a.to_radians().cos(), a.to_radians().sin()),
    }
}

impl Similarity {
    pub fn new(
        dim: usize,
        ratio: f64,
        angle_degrees: f64,
        reflect: bool,
        translation: Point,
    ) -> Result<Similarity> {
        if !(ratio.is_finite() && ratio > 0.0) {
            return Err(Error::InvalidMap(format!("ratio {ratio} must be finite and positive")));
        }
        if !angle_degrees.is_finite() || !translation[0].is_finite() || !translation[1].is_finite() {
            return Err(Error::InvalidMap("angle and translation must be finite".into()));
        }
        let linear = if dim == 1 {
            if angle_degrees != 0.0 {
                return Err(Error::InvalidMap(
                    "1-dimensional maps take no rotation; use the reflect flag".into(),
                ));
            }
            let sign = if reflect { -1.0 } else { 1.0 };
            [[sign * ratio, 0.0], [0.0, ratio]]
        } else {
            let (c, s) = cos_sin_degrees(angle_degrees);
            let f = if reflect { -1.0 } else { 1.0 };
            // R(angle) * diag(1, f), scaled.
            [[ratio * c, -ratio * s * f], [ratio * s, ratio * c * f]]
        };
        Ok(Similarity { ratio, angle_degrees, reflect, translation, linear })
    }

    pub fn apply(&self, p: &Point) -> Point {
        [
            self.linear[0][0] * p[0] + self.linear[0][1] * p[1] + self.translation[0],
            self.linear[1][0] * p[0] + self.linear[1][1] * p[1] + self.translation[1],
        ]
    }
}

/// Seed choice for the attractor iteration; any nonempty subset of the boxes
/// certifies the same radius.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeedSet {
    Corners,
    Centers,
}

/// Certified finite approximation of the invariant sets.
#[derive(Debug, Clone)]
pub struct AttractorApprox {
    pub dim: usize,
    /// Per-vertex point clouds, indexed like the graph's vertices.
    pub points: Vec<Vec<Point>>,
    /// Hausdorff distance bound to the true invariant sets.
    pub radius: f64,
    pub levels: usize,
    pub pitch: f64,
}

impl AttractorApprox {
    pub fn total_points(&self) -> usize {
        self.points.iter().map(Vec::len).sum()
    }
}

/// Result of the equivariance sampling check.
#[derive(Debug, Clone)]
pub struct EquivarianceReport {
    pub samples: usize,
    pub comparisons: usize,
    pub depth: usize,
    pub max_discrepancy: f64,
    /// Tightest per-comparison allowance `2 * code radius + tol`.
    pub bound: f64,
    pub pass: bool,
}

/// Result of the surjectivity check at one resolution.
#[derive(Debug, Clone)]
pub struct SurjectivityReport {
    pub resolution: f64,
    pub attractor_radius: f64,
    /// Vertex name, pass flag, and largest mesh-to-attractor gap.
    pub per_vertex: Vec<(String, bool, f64)>,
    pub pass: bool,
}

pub const DEFAULT_POINT_CAP: usize = 4_000_000;

/// Mauldin-Williams datum over a validated graph.
#[derive(Debug)]
pub struct MwSystem {
    graph: Arc<Graph>,
    dim: usize,
    spaces: Vec<BoxRegion>,
    maps: Vec<Similarity>,
    point_cap: usize,
    report: ValidationReport,
}

impl MwSystem {
    /// Builds a system; `spaces` and `maps` follow the graph's vertex and
    /// edge order. Structural problems are hard errors; contraction and
    /// containment violations land in the validation report.
    pub fn new(
        graph: Arc<Graph>,
        dim: usize,
        spaces: Vec<BoxRegion>,
        maps: Vec<Similarity>,
    ) -> Result<MwSystem> {
        graph.require_valid()?;
        if dim != 1 && dim != 2 {
            return Err(Error::InvalidSystem(format!("dimension {dim} is not 1 or 2")));
        }
        if spaces.len() != graph.vertex_count() {
            return Err(Error::InvalidSystem(format!(
                "{} boxes for {} vertices",
                spaces.len(),
                graph.vertex_count()
            )));
        }
        if maps.len() != graph.edge_count() {
            return Err(Error::InvalidSystem(format!(
                "{} maps for {} edges",
                maps.len(),
                graph.edge_count()
            )));
        }
        if dim == 1 {
            for (i, b) in spaces.iter().enumerate() {
                if b.min[1] != 0.0 || b.max[1] != 0.0 {
                    return Err(Error::InvalidSystem(format!(
                        "box for vertex `{}` uses the second axis in dimension 1",
                        graph.vertex_name(VertexId(i as u32))
                    )));
                }
            }
        }

        let mut violations = Vec::new();
        let scale: f64 = spaces
            .iter()
            .flat_map(|b| [b.min[0].abs(), b.min[1].abs(), b.max[0].abs(), b.max[1].abs()])
            .fold(1.0, f64::max);
        let slack = 1e-9 * scale;
        for e in graph.edges() {
            let m = &maps[e.index()];
            if m.ratio >= 1.0 {
                violations.push(format!(
                    "edge `{}` is not a contraction: ratio {}",
                    graph.edge_name(e),
                    m.ratio
                ));
            }
            let target = &spaces[graph.range(e).index()];
            for corner in spaces[graph.source(e).index()].corners(dim) {
                let img = m.apply(&corner);
                if !target.contains(&img, slack) {
                    violations.push(format!(
                        "edge `{}` breaks containment: corner ({}, {}) maps to ({}, {}) outside the range box",
                        graph.edge_name(e),
                        corner[0], corner[1], img[0], img[1]
                    ));
                    break;
                }
            }
        }
        let report = ValidationReport { ok: violations.is_empty(), violations };
        Ok(MwSystem { graph, dim, spaces, maps, point_cap: DEFAULT_POINT_CAP, report })
    }

    pub fn with_point_cap(mut self, cap: usize) -> MwSystem {
        self.point_cap = cap.max(1);
        self
    }

    pub fn graph(&self) -> &Arc<Graph> {
        &self.graph
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn space(&self, v: VertexId) -> &BoxRegion {
        &self.spaces[v.index()]
    }

    pub fn map(&self, e: EdgeId) -> &Similarity {
        &self.maps[e.index()]
    }

    pub fn validate(&self) -> &ValidationReport {
        &self.report
    }

    pub fn require_valid(&self) -> Result<()> {
        if self.report.ok {
            Ok(())
        } else {
            Err(Error::InvalidSystem(self.report.violations.join("; ")))
        }
    }

    pub fn max_ratio(&self) -> f64 {
        self.maps.iter().map(|m| m.ratio).fold(0.0, f64::max)
    }

    pub fn max_diam(&self) -> f64 {
        self.spaces.iter().map(BoxRegion::diam).fold(0.0, f64::max)
    }

    /// Applies the composed similarity of `path` (innermost edge last).
    pub fn apply_path(&self, path: &Path, p: &Point) -> Point {
        let mut q = *p;
        for &e in path.edges().iter().rev() {
            q = self.maps[e.index()].apply(&q);
        }
        q
    }

    /// Product of the ratios along `path`.
    pub fn path_ratio(&self, path: &Path) -> f64 {
        path.edges().iter().map(|&e| self.maps[e.index()].ratio).product()
    }

    /// Address of the cylinder at `path`, canonically extended to depth `n`:
    /// the image of the source-box center under the composed map, plus the
    /// exact image-diameter radius. Every infinite path extending the
    /// depth-`n` prefix codes to a point within `radius` of `point`.
    pub fn code(&self, path: &Path, n: usize) -> Result<(Point, f64)> {
        self.require_valid()?;
        if n < path.len() {
            return Err(Error::CodeDepth { requested: n, length: path.len() });
        }
        let full = path.extend_canonical(n - path.len(), &self.graph)?;
        let source_box = self.space(full.source());
        let point = self.apply_path(&full, &source_box.center());
        let radius = self.path_ratio(&full) * source_box.diam() / 2.0;
        Ok((point, radius))
    }

    fn random_path_of_depth(&self, rng: &mut impl Rng, n: usize) -> Path {
        let v = VertexId(rng.random_range(0..self.graph.vertex_count() as u32));
        let mut p = Path::vertex(v);
        for _ in 0..n {
            let inc = self.graph.incoming(p.source());
            let e = inc[rng.random_range(0..inc.len())];
            p = p.extend(e, &self.graph).expect("incoming edge composes");
        }
        p
    }

    /// Samples `samples` depth-`n` paths and checks, for every edge `e`
    /// composable in front, that coding the extended path agrees with
    /// mapping the code of the original path through `phi_e`, within twice
    /// the code radius plus `tol`.
    pub fn check_equivariance(
        &self,
        samples: usize,
        n: usize,
        tol: f64,
        rng: &mut impl Rng,
    ) -> Result<EquivarianceReport> {
        self.equivariance_inner(samples, n, tol, rng, None)
    }

    fn equivariance_inner(
        &self,
        samples: usize,
        n: usize,
        tol: f64,
        rng: &mut impl Rng,
        corrupt: Option<(EdgeId, f64)>,
    ) -> Result<EquivarianceReport> {
        self.require_valid()?;
        let mut max_discrepancy: f64 = 0.0;
        let mut bound = f64::INFINITY;
        let mut comparisons = 0;
        let mut pass = true;
        for _ in 0..samples {
            let alpha = self.random_path_of_depth(rng, n);
            let (base, _) = self.code(&alpha, n)?;
            for &e in self.graph.outgoing(alpha.range()) {
                // r(alpha) = s(e), so e can be prepended.
                let extended = Path::single(e, &self.graph).concat(&alpha, &self.graph)?;
                let (left, radius) = self.code(&extended, n + 1)?;
                let mut right = self.maps[e.index()].apply(&base);
                if let Some((bad, shift)) = corrupt {
                    if bad == e {
                        right[0] += shift;
                    }
                }
                let d = dist(&left, &right);
                let allowance = 2.0 * radius + tol;
                if d > allowance {
                    pass = false;
                }
                max_discrepancy = max_discrepancy.max(d);
                bound = bound.min(allowance);
                comparisons += 1;
            }
        }
        if comparisons == 0 {
            bound = tol;
        }
        Ok(EquivarianceReport { samples, comparisons, depth: n, max_discrepancy, bound, pass })
    }

    /// Deterministic attractor iteration seeded from box corners.
    pub fn attractor(&self, eps: f64) -> Result<AttractorApprox> {
        self.attractor_seeded(eps, SeedSet::Corners)
    }

    /// Iterates `K_u <- union of phi_e(K_{s(e)})` from the chosen seeds,
    /// snapping to a grid whose pitch is budgeted so the certified radius
    /// stays at most `eps`. Deduplication keeps the lexicographically least
    /// exact point per cell, making the result order-independent.
    pub fn attractor_seeded(&self, eps: f64, seeds: SeedSet) -> Result<AttractorApprox> {
        self.require_valid()?;
        if !(eps.is_finite() && eps > 0.0) {
            return Err(Error::Config(format!("attractor tolerance {eps} must be positive")));
        }
        let nv = self.graph.vertex_count();
        let seed_points = |v: usize| -> Vec<Point> {
            match seeds {
                SeedSet::Corners => self.spaces[v].corners(self.dim),
                SeedSet::Centers => vec![self.spaces[v].center()],
            }
        };
        let max_diam = self.max_diam();
        if eps >= max_diam {
            return Ok(AttractorApprox {
                dim: self.dim,
                points: (0..nv).map(seed_points).collect(),
                radius: max_diam,
                levels: 0,
                pitch: 0.0,
            });
        }

        let rho = self.max_ratio();
        let sd = (self.dim as f64).sqrt();
        let pitch = eps * (1.0 - rho) / 4.0;
        let budget = eps * (1.0 - sd / 4.0);
        let mut levels = 0usize;
        let mut iter_err = max_diam;
        while iter_err > budget {
            iter_err *= rho;
            levels += 1;
        }

        // Grid keys must stay well inside i64 to keep snapping meaningful.
        let coord_scale: f64 = self
            .spaces
            .iter()
            .flat_map(|b| [b.min[0].abs(), b.min[1].abs(), b.max[0].abs(), b.max[1].abs()])
            .fold(1.0, f64::max);
        if coord_scale / pitch > 1e15 {
            return Err(Error::ResourceExceeded { needed: usize::MAX, cap: self.point_cap });
        }

        let key_of = |p: &Point| -> (i64, i64) {
            ((p[0] / pitch).floor() as i64, (p[1] / pitch).floor() as i64)
        };
        let insert = |set: &mut BTreeMap<(i64, i64), Point>, p: Point| {
            let k = key_of(&p);
            match set.get_mut(&k) {
                Some(q) => {
                    if (p[0], p[1]) < (q[0], q[1]) {
                        *q = p;
                    }
                }
                None => {
                    set.insert(k, p);
                }
            }
        };

        let mut sets: Vec<BTreeMap<(i64, i64), Point>> = (0..nv)
            .map(|v| {
                let mut m = BTreeMap::new();
                for p in seed_points(v) {
                    insert(&mut m, p);
                }
                m
            })
            .collect();

        for _ in 0..levels {
            let mut next: Vec<BTreeMap<(i64, i64), Point>> = vec![BTreeMap::new(); nv];
            let mut candidates = 0usize;
            for e in self.graph.edges() {
                let src = &sets[self.graph.source(e).index()];
                candidates = candidates.saturating_add(src.len());
                if candidates > self.point_cap {
                    return Err(Error::ResourceExceeded { needed: candidates, cap: self.point_cap });
                }
                let m = &self.maps[e.index()];
                let dst = &mut next[self.graph.range(e).index()];
                for p in src.values() {
                    insert(dst, m.apply(p));
                }
            }
            let total: usize = next.iter().map(BTreeMap::len).sum();
            if total > self.point_cap {
                return Err(Error::ResourceExceeded { needed: total, cap: self.point_cap });
            }
            sets = next;
        }

        let radius = iter_err + sd * pitch / (1.0 - rho);
        Ok(AttractorApprox {
            dim: self.dim,
            points: sets.into_iter().map(|m| m.into_values().collect()).collect(),
            radius,
            levels,
            pitch,
        })
    }

    /// Largest defect of the fixed-point identity on an approximation:
    /// `max over u of d_H(K_u, union of phi_e(K_{s(e)}))`. Bounded by twice
    /// the certified radius.
    pub fn self_similarity_defect(&self, attr: &AttractorApprox) -> f64 {
        let mut worst: f64 = 0.0;
        for u in self.graph.vertices() {
            let mut image = Vec::new();
            for &e in self.graph.incoming(u) {
                let m = &self.maps[e.index()];
                image.extend(attr.points[self.graph.source(e).index()].iter().map(|p| m.apply(p)));
            }
            worst = worst.max(hausdorff_distance(&attr.points[u.index()], &image));
        }
        worst
    }

    /// A vertex passes when every node of a pitch-`eps` mesh of its box lies
    /// within `2 * eps` of the attractor approximation there.
    pub fn check_surjectivity(&self, eps: f64) -> Result<SurjectivityReport> {
        self.require_valid()?;
        if !(eps.is_finite() && eps > 0.0) {
            return Err(Error::Config(format!("resolution {eps} must be positive")));
        }
        let attr = self.attractor(eps)?;
        let mut per_vertex = Vec::new();
        let mut pass = true;
        for v in self.graph.vertices() {
            let mesh = self.spaces[v.index()].mesh(self.dim, eps);
            let gap = directed_gap(&mesh, &attr.points[v.index()]);
            let ok = gap <= 2.0 * eps;
            pass &= ok;
            per_vertex.push((self.graph.vertex_name(v).to_string(), ok, gap));
        }
        Ok(SurjectivityReport { resolution: eps, attractor_radius: attr.radius, per_vertex, pass })
    }

    /// Entries of the Mauldin matrix at exponent `s`.
    pub fn mauldin_matrix(&self, s: f64) -> Vec<Vec<f64>> {
        let n = self.graph.vertex_count();
        let mut m = vec![vec![0.0; n]; n];
        for e in self.graph.edges() {
            let u = self.graph.range(e).index();
            let v = self.graph.source(e).index();
            m[u][v] += self.maps[e.index()].ratio.powf(s);
        }
        m
    }

    /// Spectral radius of the Mauldin matrix at `s`, by power iteration on
    /// `A(s) + I` with Collatz-Wielandt bracketing.
    pub fn spectral_radius_at(&self, s: f64, threshold: f64) -> f64 {
        let m = self.mauldin_matrix(s);
        let n = m.len();
        let mut x = vec![1.0f64; n];
        let mut value = 1.0;
        for _ in 0..100_000 {
            let mut y = x.clone();
            for i in 0..n {
                for j in 0..n {
                    y[i] += m[i][j] * x[j];
                }
            }
            let mut lo = f64::INFINITY;
            let mut hi = 0.0f64;
            for i in 0..n {
                let q = y[i] / x[i];
                lo = lo.min(q);
                hi = hi.max(q);
            }
            value = (lo + hi) / 2.0;
            let norm = y.iter().fold(0.0f64, |a, &b| a.max(b));
            for t in &mut y {
                *t /= norm;
            }
            x = y;
            if hi - lo <= threshold {
                break;
            }
        }
        value - 1.0
    }

    /// The Hausdorff dimension: the unique `s` with spectral radius 1.
    /// Requires strong connectivity so the root is unique.
    pub fn dimension(&self, tol: f64) -> Result<f64> {
        self.require_valid()?;
        if !self.graph.strongly_connected() {
            return Err(Error::NotStronglyConnected);
        }
        let tol = if tol.is_finite() && tol > 0.0 { tol } else { 1e-12 };
        let threshold = tol / 10.0;
        let mut lo = 0.0f64;
        let mut hi = self.dim as f64 + 1.0;
        let mut guard = 0;
        while self.spectral_radius_at(hi, threshold) > 1.0 {
            hi *= 2.0;
            guard += 1;
            if guard > 20 {
                return Err(Error::InvalidSystem(
                    "spectral radius stays above 1; ratios do not contract enough".into(),
                ));
            }
        }
        while hi - lo > tol.max(1e-15) {
            let mid = 0.5 * (lo + hi);
            if self.spectral_radius_at(mid, threshold) >= 1.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    #[cfg(test)]
    pub(crate) fn equivariance_corrupted(
        &self,
        samples: usize,
        n: usize,
        tol: f64,
        rng: &mut impl Rng,
        edge: EdgeId,
        shift: f64,
    ) -> Result<EquivarianceReport> {
        self.equivariance_inner(samples, n, tol, rng, Some((edge, shift)))
    }
}
