use serde::{Deserialize, Serialize};

use crate::geometry::volume::{ball_box_volume, ball_volume, cylinder_box_volume, cylinder_volume};
use crate::geometry::{Aabb, Segment};
use crate::graph::{Graph, NodeId};
use crate::layout::Layout3D;
use crate::rng;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FillOptions {
    /// Monte-Carlo samples per edge cylinder that crosses the view boundary.
    pub samples: usize,
    pub seed: u64,
    /// Count only the parts of elements inside the view.
    pub clip: bool,
}

impl Default for FillOptions {
    fn default() -> Self {
        Self { samples: 100_000, seed: 0, clip: true }
    }
}

/// Per-element volumes (m³) inside a view box.
///
/// Nodes are spheres of the layout's node radius, edges lateral cylinders of
/// the edge radius between node centers. Overlapping elements each count
/// their full volume.
#[derive(Clone, Debug, PartialEq)]
pub struct ElementVolumes {
    pub nodes: Vec<f64>,
    pub edges: Vec<f64>,
    pub view_volume: f64,
}

impl ElementVolumes {
    pub fn new(layout: &Layout3D, g: &Graph, view: &Aabb, opts: &FillOptions) -> Self {
        let p = &layout.positions;
        let nodes = p
            .iter()
            .map(|c| if opts.clip { ball_box_volume(c, layout.node_radius, view) } else { ball_volume(layout.node_radius) })
            .collect();
        let indexed: Vec<(usize, (NodeId, NodeId))> = g.edges().iter().copied().enumerate().collect();
        let edges = crate::par_map(&indexed, |&(i, (a, b))| {
            let seg = Segment::new(p[a], p[b]);
            if opts.clip {
                cylinder_box_volume(&seg, layout.edge_radius, view, opts.samples, rng::derive(opts.seed, i as u64))
            } else {
                cylinder_volume(&seg, layout.edge_radius)
            }
        });
        Self { nodes, edges, view_volume: view.volume() }
    }

    pub fn total(&self) -> f64 {
        self.nodes.iter().sum::<f64>() + self.edges.iter().sum::<f64>()
    }

    pub fn fill_ratio(&self) -> f64 {
        ratio(self.total(), self.view_volume)
    }

    /// Fill ratio of a subset of nodes and edges (by edge index).
    pub fn subset_fill_ratio(&self, nodes: impl IntoIterator<Item = NodeId>, edges: impl IntoIterator<Item = usize>) -> f64 {
        let v = nodes.into_iter().map(|i| self.nodes[i]).sum::<f64>() + edges.into_iter().map(|i| self.edges[i]).sum::<f64>();
        ratio(v, self.view_volume)
    }
}

fn ratio(volume: f64, view_volume: f64) -> f64 {
    if volume <= 0.0 || view_volume <= 0.0 {
        0.0
    } else {
        (volume / view_volume).cbrt()
    }
}

/// Fill ratio: cube root of the summed element volume over the view volume.
///
/// An empty graph has fill ratio 0.
pub fn fill_ratio(layout: &Layout3D, g: &Graph, view: &Aabb, opts: &FillOptions) -> f64 {
    if g.node_count() == 0 {
        return 0.0;
    }
    ElementVolumes::new(layout, g, view, opts).fill_ratio()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Point3;

    #[test]
    fn empty_graph_is_zero() {
        let g = Graph::new(0, []).unwrap();
        let l = Layout3D::new(vec![], 0.01, 0.002).unwrap();
        assert_eq!(fill_ratio(&l, &g, &Aabb::cube(Point3::zeros(), 1.0), &FillOptions::default()), 0.0);
    }

    #[test]
    fn node_filling_the_view_gives_one() {
        let g = Graph::new(1, []).unwrap();
        // Sphere volume equal to a unit cube, unclipped.
        let r = (3.0 / (4.0 * std::f64::consts::PI)).cbrt();
        let l = Layout3D::new(vec![Point3::zeros()], r, 0.001).unwrap();
        let view = Aabb::cube(Point3::zeros(), 1.0);
        let unclipped = FillOptions { clip: false, ..FillOptions::default() };
        assert!((fill_ratio(&l, &g, &view, &unclipped) - 1.0).abs() < 1e-12);
        // A sphere covering the whole cube, clipped to it, also fills it.
        let big = Layout3D::new(vec![Point3::zeros()], 1.0, 0.001).unwrap();
        assert!((fill_ratio(&big, &g, &view, &FillOptions::default()) - 1.0).abs() < 1e-9);
    }
}
