//! Shortest-path task.

use super::{census, ComplexityConfig, NoiseCensus, SignalMode};
use crate::geometry::{mvee, node_angle, Ellipsoid3, Region};
use crate::graph::{Graph, NodeId, NodePair};
use crate::layout::Layout3D;
use crate::{Error, Point3, Result};

/// Angle-weighted remaining distance along one drawn path (first point is
/// the start node, last the target).
///
/// Each node `w` contributes `½ (1 - cos(180° - θ_w)) · dist(w, v)`, where
/// `θ_w` is the node angle between the incoming and outgoing edge and is 0
/// at the two ends. The start node therefore contributes `dist(u, v)` in
/// full, straight continuations contribute nothing, and sharp bends
/// contribute almost their whole remaining distance.
pub fn path_signal(points: &[Point3], mode: SignalMode) -> Result<f64> {
    let (Some(first), Some(target)) = (points.first(), points.last()) else {
        return Err(Error::InvalidArgument("empty path".into()));
    };
    let unit = match mode {
        SignalMode::Absolute => 1.0,
        SignalMode::Relative => {
            let d = (first - target).norm();
            if d == 0.0 {
                return Err(Error::Degenerate("relative signal with coincident endpoints".into()));
            }
            d
        }
    };
    let last = points.len() - 1;
    let mut total = 0.0;
    for (i, w) in points.iter().enumerate() {
        let theta = if i == 0 || i == last { 0.0 } else { node_angle(&points[i - 1], w, &points[i + 1])? };
        let weight = 0.5 * (1.0 - (180.0 - theta).to_radians().cos());
        total += weight * (w - target).norm() / unit;
    }
    Ok(total)
}

fn shortest_paths(g: &Graph, u: NodeId, v: NodeId, cap: usize) -> Result<(NodePair, Vec<Vec<NodeId>>)> {
    let pair = NodePair::ordered(g, u, v)?;
    let paths = g.enumerate_shortest_paths(pair.u, pair.v, cap)?.into_paths(pair.u, pair.v, cap)?;
    Ok((pair, paths))
}

/// Maximum of [`path_signal`] over all shortest paths from the lower-degree
/// node to the other.
pub fn task2_signal(layout: &Layout3D, g: &Graph, u: NodeId, v: NodeId, mode: SignalMode, cap: usize) -> Result<f64> {
    layout.check_covers(g)?;
    let (_, paths) = shortest_paths(g, u, v, cap)?;
    let mut best = f64::NEG_INFINITY;
    for path in &paths {
        let pts: Vec<Point3> = path.iter().map(|&w| layout.positions[w]).collect();
        best = best.max(path_signal(&pts, mode)?);
    }
    Ok(best)
}

/// Enclosing ellipsoid of one path's node positions.
pub fn path_region(layout: &Layout3D, path: &[NodeId], cfg: &ComplexityConfig) -> Result<Ellipsoid3> {
    let pts: Vec<Point3> = path.iter().map(|&w| layout.positions[w]).collect();
    mvee(&pts, &cfg.mvee_options(layout))
}

/// Noise for the shortest path whose ellipsoid collects the least noise,
/// together with that path and its ellipsoid.
pub fn task2_noise_census(
    layout: &Layout3D,
    g: &Graph,
    u: NodeId,
    v: NodeId,
    cfg: &ComplexityConfig,
) -> Result<(NoiseCensus, Vec<NodeId>, Ellipsoid3)> {
    layout.check_covers(g)?;
    let (_, paths) = shortest_paths(g, u, v, cfg.path_cap)?;
    let mut best: Option<(NoiseCensus, Vec<NodeId>, Ellipsoid3)> = None;
    for path in paths {
        let ellipsoid = path_region(layout, &path, cfg)?;
        let mut on_path: Vec<NodeId> = path.clone();
        on_path.sort_unstable();
        let mut path_edges: Vec<usize> =
            path.windows(2).map(|w| g.edge_index(w[0], w[1]).expect("path edge exists")).collect();
        path_edges.sort_unstable();
        let c = census(
            layout,
            g,
            &Region::Ellipsoid(ellipsoid),
            |x| on_path.binary_search(&x).is_ok(),
            |e| path_edges.binary_search(&e).is_ok(),
            cfg,
        )?;
        if best.as_ref().is_none_or(|b| c.total < b.0.total) {
            best = Some((c, path, ellipsoid));
        }
    }
    Ok(best.expect("connected pair has at least one shortest path"))
}

pub fn task2_noise(layout: &Layout3D, g: &Graph, u: NodeId, v: NodeId, cfg: &ComplexityConfig) -> Result<f64> {
    Ok(task2_noise_census(layout, g, u, v, cfg)?.0.total)
}
