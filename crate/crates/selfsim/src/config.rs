//! Declarative system configuration.
//!
//! One TOML file specifies a reproducible experiment: the graph, an
//! optional geometry section turning it into a Mauldin-Williams system,
//! and options for seeds, tolerances, and resource caps. Parsing is
//! strict: unknown keys, missing geometry entries, and dimension
//! mismatches are configuration errors, while graph-theoretic and metric
//! violations surface through the usual validation reports.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::mwifs::{BoxRegion, MwSystem, Point, Similarity};

/// Fixed default seed for randomized suites.
pub const DEFAULT_SEED: u64 = 7;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    graph: GraphSection,
    geometry: Option<GeometrySection>,
    #[serde(default)]
    options: OptionsSection,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphSection {
    vertices: Vec<String>,
    edges: Vec<EdgeSection>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeSection {
    id: String,
    range: String,
    source: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GeometrySection {
    dimension: usize,
    spaces: BTreeMap<String, SpaceSection>,
    maps: BTreeMap<String, MapSection>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpaceSection {
    min: Vec<f64>,
    max: Vec<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MapSection {
    ratio: f64,
    #[serde(default)]
    angle_degrees: f64,
    #[serde(default)]
    reflect: bool,
    translation: Vec<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct OptionsSection {
    seed: Option<u64>,
    tol: Option<f64>,
    point_cap: Option<usize>,
}

/// Pads a configured coordinate vector to a plane point.
fn to_point(coords: &[f64], dim: usize, what: &str) -> Result<Point> {
    if coords.len() != dim {
        return Err(Error::Config(format!(
            "{what} has {} coordinates; dimension is {dim}",
            coords.len()
        )));
    }
    Ok([coords[0], if dim == 2 { coords[1] } else { 0.0 }])
}

impl SystemConfig {
    /// Parses config text; syntax errors keep the TOML line/column info.
    pub fn parse(text: &str) -> Result<SystemConfig> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string().trim().replace('\n', " ")))
    }

    pub fn seed(&self) -> u64 {
        self.options.seed.unwrap_or(DEFAULT_SEED)
    }

    pub fn tol(&self) -> Option<f64> {
        self.options.tol
    }

    pub fn point_cap(&self) -> Option<usize> {
        self.options.point_cap
    }

    pub fn has_geometry(&self) -> bool {
        self.geometry.is_some()
    }

    /// Builds the graph. The result carries its own validation report;
    /// structural problems (duplicate ids, unknown endpoints) error here.
    pub fn build_graph(&self) -> Result<Arc<Graph>> {
        let vertices: Vec<&str> = self.graph.vertices.iter().map(String::as_str).collect();
        let edges: Vec<(&str, &str, &str)> = self
            .graph
            .edges
            .iter()
            .map(|e| (e.id.as_str(), e.range.as_str(), e.source.as_str()))
            .collect();
        Ok(Arc::new(Graph::new(&vertices, &edges)?))
    }

    /// Builds the Mauldin-Williams system, or `GeometryRequired` when the
    /// config has no geometry section.
    pub fn build_system(&self) -> Result<Arc<MwSystem>> {
        let geo = self.geometry.as_ref().ok_or(Error::GeometryRequired)?;
        let graph = self.build_graph()?;
        graph.require_valid()?;
        if geo.dimension != 1 && geo.dimension != 2 {
            return Err(Error::Config(format!(
                "geometry.dimension is {}; only 1 and 2 are supported",
                geo.dimension
            )));
        }

        for name in geo.spaces.keys() {
            graph.vertex(name).map_err(|_| {
                Error::Config(format!("geometry.spaces mentions unknown vertex `{name}`"))
            })?;
        }
        for name in geo.maps.keys() {
            graph.edge(name).map_err(|_| {
                Error::Config(format!("geometry.maps mentions unknown edge `{name}`"))
            })?;
        }

        let mut spaces = Vec::with_capacity(graph.vertex_count());
        for v in graph.vertices() {
            let name = graph.vertex_name(v);
            let s = geo.spaces.get(name).ok_or_else(|| {
                Error::Config(format!("geometry.spaces is missing vertex `{name}`"))
            })?;
            let min = to_point(&s.min, geo.dimension, &format!("spaces.{name}.min"))?;
            let max = to_point(&s.max, geo.dimension, &format!("spaces.{name}.max"))?;
            spaces.push(BoxRegion::new(min, max)?);
        }

        let mut maps = Vec::with_capacity(graph.edge_count());
        for e in graph.edges() {
            let name = graph.edge_name(e);
            let m = geo.maps.get(name).ok_or_else(|| {
                Error::Config(format!("geometry.maps is missing edge `{name}`"))
            })?;
            let translation =
                to_point(&m.translation, geo.dimension, &format!("maps.{name}.translation"))?;
            maps.push(Similarity::new(
                geo.dimension,
                m.ratio,
                m.angle_degrees,
                m.reflect,
                translation,
            )?);
        }

        let mut system = MwSystem::new(graph, geo.dimension, spaces, maps)?;
        if let Some(cap) = self.options.point_cap {
            system = system.with_point_cap(cap);
        }
        Ok(Arc::new(system))
    }
}
