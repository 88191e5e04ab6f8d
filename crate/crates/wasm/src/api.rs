use serde_json::{json, Value};

use tic_core::complexity::{combined, score_instance, task1_noise_census, task1_region, task2_noise_census, ComplexityConfig};
use tic_core::geometry::{mvee, Ellipsoid3, MveeOptions};
use tic_core::graph::io::parse_auto;
use tic_core::graph::{Graph, Task};
use tic_core::layout::{normalize_to_view, stress_layout, Layout3D, StressConfig, DEFAULT_BARYCENTER_HEIGHT};
use tic_core::synth::spatial_graph;
use tic_core::Point3;

type Out = Result<String, String>;

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn xyz(p: &Point3) -> [f64; 3] {
    [p.x, p.y, p.z]
}

pub fn sample_graph(nodes: usize, density: f64, seed: u64) -> String {
    let g = spatial_graph(nodes, density, seed);
    g.edges().iter().map(|(a, b)| format!("{a} {b}\n")).collect()
}

/// The largest component of the parsed graph; the layout and all node ids
/// refer to it.
fn graph(text: &str) -> Result<Graph, String> {
    let ing = parse_auto(text).map_err(err)?;
    Ok(ing.graph.largest_component().0)
}

pub fn layout_graph(text: &str, seed: u64, restarts: usize) -> Out {
    let g = graph(text)?;
    if g.node_count() < 2 {
        return Err("the graph needs at least one edge".into());
    }
    let cfg = StressConfig { seed, restarts: restarts.max(1), ..StressConfig::default() };
    let (raw, report) = stress_layout(&g, &cfg).map_err(err)?;
    let l = normalize_to_view(&raw, 1.0, DEFAULT_BARYCENTER_HEIGHT).map_err(err)?;
    Ok(json!({
        "labels": g.labels(),
        "edges": g.edges(),
        "positions": l.positions.iter().map(xyz).collect::<Vec<_>>(),
        "node_radius": l.node_radius,
        "edge_radius": l.edge_radius,
        "stress": report.stress,
        "iterations": report.iterations,
    })
    .to_string())
}

fn parse_layout(text: &str, g: &Graph) -> Result<Layout3D, String> {
    let v: Value = serde_json::from_str(text).map_err(err)?;
    let positions: Vec<[f64; 3]> = serde_json::from_value(v["positions"].clone()).map_err(err)?;
    let radius = |key: &str| v[key].as_f64().ok_or_else(|| format!("layout lacks {key}"));
    let l = Layout3D::new(positions.iter().map(|p| Point3::new(p[0], p[1], p[2])).collect(), radius("node_radius")?, radius("edge_radius")?)
        .map_err(err)?;
    if l.len() != g.node_count() {
        return Err(format!("layout has {} positions for {} nodes", l.len(), g.node_count()));
    }
    Ok(l)
}

fn ellipsoid_json(e: &Ellipsoid3) -> Value {
    let (semi, dirs) = e.axes();
    let axes: Vec<[f64; 3]> = (0..3).map(|k| [dirs[(0, k)], dirs[(1, k)], dirs[(2, k)]]).collect();
    json!({ "kind": "ellipsoid", "center": xyz(&e.center), "semi_axes": semi, "axes": axes, "volume": e.volume() })
}

pub fn score_pair(text: &str, layout: &str, u: usize, v: usize, task: &str) -> Out {
    let g = graph(text)?;
    let l = parse_layout(layout, &g)?;
    let task: Task = task.parse().map_err(err)?;
    if u == v {
        return Err("select two different nodes".into());
    }
    let cfg = ComplexityConfig::default();
    // Scoring validates the node ids before they index anything below.
    let score = score_instance(&l, &g, task, u, v, &cfg).map_err(err)?;
    let answer = match task {
        Task::CommonNeighbors => g.common_neighbors(u, v).map_err(err)?.len(),
        Task::ShortestPath => g.all_pairs_distances()[u][v],
    };
    let (census, region) = match task {
        Task::CommonNeighbors => {
            let s = task1_region(&l, &g, u, v).map_err(err)?;
            let c = task1_noise_census(&l, &g, u, v, &cfg).map_err(err)?;
            (c, json!({ "kind": "sphere", "center": xyz(&s.center), "radius": s.radius }))
        }
        Task::ShortestPath => {
            let (c, path, e) = task2_noise_census(&l, &g, u, v, &cfg).map_err(err)?;
            let mut r = ellipsoid_json(&e);
            r["path"] = json!(path);
            (c, r)
        }
    };
    Ok(json!({
        "task": task.code(),
        "answer": answer,
        "signal": score.signal,
        "noise": score.noise,
        "combined": combined(score.signal, score.noise),
        "noise_nodes": census.nodes,
        "noise_edges": census.edges,
        "region": region,
    })
    .to_string())
}

pub fn enclose(points: &str) -> Out {
    let pts: Vec<[f64; 3]> = serde_json::from_str(points).map_err(err)?;
    let pts: Vec<Point3> = pts.iter().map(|p| Point3::new(p[0], p[1], p[2])).collect();
    let e = mvee(&pts, &MveeOptions::default()).map_err(err)?;
    Ok(ellipsoid_json(&e).to_string())
}
