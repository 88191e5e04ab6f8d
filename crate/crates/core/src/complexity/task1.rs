//! Common-neighbor task.

use super::{census, ComplexityConfig, NoiseCensus};
use crate::geometry::{Region, Sphere3};
use crate::graph::{Graph, NodeId, NodePair};
use crate::layout::Layout3D;
use crate::{Error, Result};

/// `Σ_{w ∈ N_uv} (dist(w,u) + dist(w,v) - dist(u,v))²`, in m².
///
/// Common neighbors on the segment `uv` cost nothing; the cost grows with
/// the detour through `w`. Zero when `u` and `v` share no neighbor.
pub fn task1_signal(layout: &Layout3D, g: &Graph, u: NodeId, v: NodeId) -> Result<f64> {
    layout.check_covers(g)?;
    let p = &layout.positions;
    let duv = (p[u] - p[v]).norm();
    Ok(g.common_neighbors(u, v)?
        .into_iter()
        .map(|w| {
            let detour = (p[w] - p[u]).norm() + (p[w] - p[v]).norm() - duv;
            detour * detour
        })
        .sum())
}

/// Sphere centered at the midpoint of `uv` whose radius reaches the
/// farthest neighbor of the lower-degree node.
pub fn task1_region(layout: &Layout3D, g: &Graph, u: NodeId, v: NodeId) -> Result<Sphere3> {
    layout.check_covers(g)?;
    let pair = NodePair::ordered(g, u, v)?;
    let p = &layout.positions;
    let o = (p[pair.u] + p[pair.v]) / 2.0;
    let radius = g
        .neighbors(pair.u)
        .iter()
        .map(|&n| (p[n] - o).norm())
        .reduce(f64::max)
        .ok_or_else(|| Error::InvalidArgument(format!("node {} has no neighbors", pair.u)))?;
    Sphere3::new(o, radius)
}

/// Elements inside the CN region other than `u`, `v`, their common
/// neighbors, and the edges joining a common neighbor to `u` or `v`.
pub fn task1_noise_census(
    layout: &Layout3D,
    g: &Graph,
    u: NodeId,
    v: NodeId,
    cfg: &ComplexityConfig,
) -> Result<NoiseCensus> {
    let sphere = task1_region(layout, g, u, v)?;
    let common = g.common_neighbors(u, v)?;
    let mut excluded_edges: Vec<usize> = common
        .iter()
        .flat_map(|&w| [g.edge_index(w, u), g.edge_index(w, v)])
        .map(|e| e.expect("common neighbor edge exists"))
        .collect();
    excluded_edges.sort_unstable();
    census(
        layout,
        g,
        &Region::Sphere(sphere),
        |x| x == u || x == v || common.binary_search(&x).is_ok(),
        |e| excluded_edges.binary_search(&e).is_ok(),
        cfg,
    )
}

pub fn task1_noise(layout: &Layout3D, g: &Graph, u: NodeId, v: NodeId, cfg: &ComplexityConfig) -> Result<f64> {
    Ok(task1_noise_census(layout, g, u, v, cfg)?.total)
}
