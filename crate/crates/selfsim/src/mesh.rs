//! Sampled complex functions on a box, for the geometric model.
//!
//! A `MeshFn` stores values on a regular grid over a `BoxRegion` and
//! evaluates anywhere by clamped multilinear interpolation. Affine
//! functions are reproduced exactly (up to float rounding), which is what
//! keeps geometric residuals decaying at the contraction rate instead of
//! stalling at the grid resolution.

use num::complex::Complex64;
use num::Zero;

use crate::error::{Error, Result};
use crate::mwifs::{BoxRegion, Point};

/// Complex function sampled on a regular grid over a box.
#[derive(Debug, Clone, PartialEq)]
pub struct MeshFn {
    region: BoxRegion,
    dim: usize,
    /// Nodes per axis; a degenerate axis (or the unused second axis in
    /// dimension 1) has a single node.
    nodes: [usize; 2],
    /// Row-major: index = ix * nodes[1] + iy.
    values: Vec<Complex64>,
}

fn axis_nodes(dim: usize, axis: usize, region: &BoxRegion, requested: usize) -> usize {
    if axis >= dim || region.max[axis] == region.min[axis] {
        1
    } else {
        requested.max(2)
    }
}

impl MeshFn {
    /// Constant function on `nodes_per_axis` samples per nondegenerate axis.
    pub fn constant(
        region: BoxRegion,
        dim: usize,
        nodes_per_axis: usize,
        value: Complex64,
    ) -> MeshFn {
        let nodes = [
            axis_nodes(dim, 0, &region, nodes_per_axis),
            axis_nodes(dim, 1, &region, nodes_per_axis),
        ];
        let values = vec![value; nodes[0] * nodes[1]];
        MeshFn { region, dim, nodes, values }
    }

    pub fn zero(region: BoxRegion, dim: usize, nodes_per_axis: usize) -> MeshFn {
        MeshFn::constant(region, dim, nodes_per_axis, Complex64::zero())
    }

    /// Samples `f` at every grid node.
    pub fn sample(
        region: BoxRegion,
        dim: usize,
        nodes_per_axis: usize,
        f: impl Fn(&Point) -> Complex64,
    ) -> MeshFn {
        let mut m = MeshFn::zero(region, dim, nodes_per_axis);
        for ix in 0..m.nodes[0] {
            for iy in 0..m.nodes[1] {
                let p = m.node_point(ix, iy);
                m.values[ix * m.nodes[1] + iy] = f(&p);
            }
        }
        m
    }

    pub fn region(&self) -> &BoxRegion {
        &self.region
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    fn node_coord(&self, axis: usize, i: usize) -> f64 {
        if self.nodes[axis] == 1 {
            if axis >= self.dim { 0.0 } else { self.region.min[axis] }
        } else {
            let step = (self.region.max[axis] - self.region.min[axis])
                / (self.nodes[axis] - 1) as f64;
            self.region.min[axis] + i as f64 * step
        }
    }

    pub fn node_point(&self, ix: usize, iy: usize) -> Point {
        [self.node_coord(0, ix), self.node_coord(1, iy)]
    }

    fn same_shape(&self, other: &MeshFn) -> Result<()> {
        if self.region == other.region && self.dim == other.dim && self.nodes == other.nodes {
            Ok(())
        } else {
            Err(Error::ModelMismatch("mesh functions sampled on different grids".into()))
        }
    }

    pub fn add(&self, other: &MeshFn) -> Result<MeshFn> {
        self.same_shape(other)?;
        let mut out = self.clone();
        for (v, w) in out.values.iter_mut().zip(&other.values) {
            *v += w;
        }
        Ok(out)
    }

    /// Pointwise product at the nodes.
    pub fn mul(&self, other: &MeshFn) -> Result<MeshFn> {
        self.same_shape(other)?;
        let mut out = self.clone();
        for (v, w) in out.values.iter_mut().zip(&other.values) {
            *v *= w;
        }
        Ok(out)
    }

    pub fn conj(&self) -> MeshFn {
        let mut out = self.clone();
        for v in &mut out.values {
            *v = v.conj();
        }
        out
    }

    pub fn scale(&self, c: Complex64) -> MeshFn {
        let mut out = self.clone();
        for v in &mut out.values {
            *v *= c;
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.is_zero())
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Fractional grid position of `x` along `axis`, clamped to the box.
    fn locate(&self, axis: usize, x: f64) -> (usize, f64) {
        let n = self.nodes[axis];
        if n == 1 {
            return (0, 0.0);
        }
        let step =
            (self.region.max[axis] - self.region.min[axis]) / (n - 1) as f64;
        let t = ((x - self.region.min[axis]) / step).clamp(0.0, (n - 1) as f64);
        let i = (t.floor() as usize).min(n - 2);
        (i, t - i as f64)
    }

    /// Clamped multilinear interpolation; exact at nodes and for affine data.
    pub fn eval(&self, p: &Point) -> Complex64 {
        let (ix, fx) = self.locate(0, p[0]);
        let (iy, fy) = self.locate(1, p[1]);
        let ny = self.nodes[1];
        let at = |i: usize, j: usize| self.values[i * ny + j];
        let ix1 = (ix + 1).min(self.nodes[0] - 1);
        let iy1 = (iy + 1).min(ny - 1);
        at(ix, iy) * (1.0 - fx) * (1.0 - fy)
            + at(ix1, iy) * fx * (1.0 - fy)
            + at(ix, iy1) * (1.0 - fx) * fy
            + at(ix1, iy1) * fx * fy
    }
}
