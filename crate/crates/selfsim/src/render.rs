//! Attractor rendering: binary PPM, SVG, and plain point-cloud text.
//!
//! All three renderers are pure functions from a system plus an attractor
//! approximation to bytes, so they are testable without touching the
//! filesystem. The pixel transform is exposed for containment checks:
//! every plotted pixel must map back into the configured boxes.

use std::fmt::Write as _;

use crate::graph::Graph;
use crate::mwifs::{AttractorApprox, MwSystem, Point};

/// Binary P6 image, white background with black attractor points.
pub struct PpmImage {
    pub width: usize,
    pub height: usize,
    /// RGB triples, row-major from the top-left pixel.
    pub pixels: Vec<u8>,
    world_min: Point,
    scale: f64,
    offset: [f64; 2],
}

/// Union of the vertex boxes, padded so degenerate axes get visible extent.
fn world_bounds(sys: &MwSystem) -> (Point, Point) {
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for v in sys.graph().vertices() {
        let b = sys.space(v);
        for i in 0..2 {
            lo[i] = lo[i].min(b.min[i]);
            hi[i] = hi[i].max(b.max[i]);
        }
    }
    let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-9);
    for i in 0..2 {
        if hi[i] - lo[i] < span / 20.0 {
            let pad = span / 40.0;
            lo[i] -= pad;
            hi[i] += pad;
        }
    }
    (lo, hi)
}

impl PpmImage {
    /// World coordinate at the center of pixel (col, row).
    pub fn pixel_to_world(&self, col: usize, row: usize) -> Point {
        [
            self.world_min[0] + (col as f64 - self.offset[0]) / self.scale,
            self.world_min[1] + ((self.height - 1 - row) as f64 - self.offset[1]) / self.scale,
        ]
    }

    fn world_to_pixel(&self, p: &Point) -> (usize, usize) {
        let col = ((p[0] - self.world_min[0]) * self.scale + self.offset[0]).round();
        let y = ((p[1] - self.world_min[1]) * self.scale + self.offset[1]).round();
        let col = (col.max(0.0) as usize).min(self.width - 1);
        let row = self.height - 1 - (y.max(0.0) as usize).min(self.height - 1);
        (col, row)
    }

    /// Half a pixel in world units; containment checks need this slack.
    pub fn half_pixel(&self) -> f64 {
        0.5 / self.scale
    }

    /// Serializes the image as binary P6.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = format!("P6\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend_from_slice(&self.pixels);
        out
    }
}

/// Renders the attractor point clouds; aspect ratio is preserved and the
/// image is centered.
pub fn render_ppm(
    sys: &MwSystem,
    attr: &AttractorApprox,
    width: usize,
    height: usize,
) -> PpmImage {
    let width = width.max(8);
    let height = height.max(8);
    let (lo, hi) = world_bounds(sys);
    let ext = [(hi[0] - lo[0]).max(1e-12), (hi[1] - lo[1]).max(1e-12)];
    let scale = ((width - 1) as f64 / ext[0]).min((height - 1) as f64 / ext[1]);
    let offset = [
        ((width - 1) as f64 - ext[0] * scale) / 2.0,
        ((height - 1) as f64 - ext[1] * scale) / 2.0,
    ];
    let mut img = PpmImage {
        width,
        height,
        pixels: vec![255; width * height * 3],
        world_min: lo,
        scale,
        offset,
    };
    for cloud in &attr.points {
        for p in cloud {
            let (col, row) = img.world_to_pixel(p);
            let base = (row * width + col) * 3;
            img.pixels[base] = 0;
            img.pixels[base + 1] = 0;
            img.pixels[base + 2] = 0;
        }
    }
    img
}

/// SVG rendering: one dot per point, y axis pointing up.
pub fn render_svg(sys: &MwSystem, attr: &AttractorApprox) -> String {
    let (lo, hi) = world_bounds(sys);
    let ext = [(hi[0] - lo[0]).max(1e-12), (hi[1] - lo[1]).max(1e-12)];
    let r = ext[0].max(ext[1]) / 400.0;
    let mut s = String::new();
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{} {} {} {}\">",
        lo[0] - r,
        -(hi[1] + r),
        ext[0] + 2.0 * r,
        ext[1] + 2.0 * r,
    );
    s.push_str("<rect x=\"-1e9\" y=\"-1e9\" width=\"2e9\" height=\"2e9\" fill=\"white\"/>\n");
    for cloud in &attr.points {
        for p in cloud {
            let _ = writeln!(
                s,
                "<circle cx=\"{}\" cy=\"{}\" r=\"{r}\" fill=\"black\"/>",
                p[0], -p[1]
            );
        }
    }
    s.push_str("</svg>\n");
    s
}

/// Plain text cloud: one `vertex x y` line per point, in vertex order.
pub fn format_points(graph: &Graph, attr: &AttractorApprox) -> String {
    let mut s = String::new();
    for v in graph.vertices() {
        for p in &attr.points[v.index()] {
            let _ = writeln!(s, "{} {} {}", graph.vertex_name(v), p[0], p[1]);
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use crate::mwifs::{BoxRegion, Similarity};
    use std::sync::Arc;

    fn cantor() -> MwSystem {
        let g = Arc::new(Graph::new(&["v"], &[("e1", "v", "v"), ("e2", "v", "v")]).unwrap());
        let b = BoxRegion::new([0.0, 0.0], [1.0, 0.0]).unwrap();
        let m = |t: f64| Similarity::new(1, 1.0 / 3.0, 0.0, false, [t, 0.0]).unwrap();
        MwSystem::new(g, 1, vec![b], vec![m(0.0), m(2.0 / 3.0)]).unwrap()
    }

    fn sierpinski() -> MwSystem {
        let g = Arc::new(
            Graph::new(&["v"], &[("e1", "v", "v"), ("e2", "v", "v"), ("e3", "v", "v")]).unwrap(),
        );
        let b = BoxRegion::new([0.0, 0.0], [1.0, 1.0]).unwrap();
        let m = |tx: f64, ty: f64| Similarity::new(2, 0.5, 0.0, false, [tx, ty]).unwrap();
        MwSystem::new(g, 2, vec![b], vec![m(0.0, 0.0), m(0.5, 0.0), m(0.0, 0.5)]).unwrap()
    }

    #[test]
    fn ppm_pixels_stay_inside_the_boxes() {
        for sys in [cantor(), sierpinski()] {
            let attr = sys.attractor(0.02).unwrap();
            let img = render_ppm(&sys, &attr, 200, 150);
            let slack = img.half_pixel() + 1e-9;
            let mut dark = 0usize;
            for row in 0..img.height {
                for col in 0..img.width {
                    if img.pixels[(row * img.width + col) * 3] == 255 {
                        continue;
                    }
                    dark += 1;
                    let w = img.pixel_to_world(col, row);
                    let inside = sys
                        .graph()
                        .vertices()
                        .any(|v| sys.space(v).contains(&w, slack));
                    assert!(inside, "dark pixel at ({col},{row}) maps to {w:?}");
                }
            }
            assert!(dark > 10, "expected a visible point cloud");
        }
    }

    #[test]
    fn ppm_bytes_have_p6_header() {
        let sys = cantor();
        let attr = sys.attractor(0.05).unwrap();
        let bytes = render_ppm(&sys, &attr, 64, 32).to_bytes();
        assert!(bytes.starts_with(b"P6\n64 32\n255\n"));
        assert_eq!(bytes.len(), "P6\n64 32\n255\n".len() + 64 * 32 * 3);
    }

    #[test]
    fn svg_and_text_outputs_enumerate_points() {
        let sys = cantor();
        let attr = sys.attractor(0.1).unwrap();
        let n: usize = attr.points.iter().map(Vec::len).sum();
        let svg = render_svg(&sys, &attr);
        assert_eq!(svg.matches("<circle").count(), n);
        assert!(svg.starts_with("<svg"));
        let text = format_points(sys.graph(), &attr);
        assert_eq!(text.lines().count(), n);
        assert!(text.lines().all(|l| l.starts_with("v ")));
    }

    #[test]
    fn rendering_is_deterministic() {
        let sys = cantor();
        let attr = sys.attractor(0.02).unwrap();
        let a = render_ppm(&sys, &attr, 120, 80).to_bytes();
        let b = render_ppm(&sys, &attr, 120, 80).to_bytes();
        assert_eq!(a, b);
    }
}
