use serde::{Deserialize, Serialize};

use super::{betweenness_centrality, Graph, NodeId, NodePairCandidate};
use crate::complexity::{ElementVolumes, FillOptions};
use crate::layout::Layout3D;
use crate::{Error, Result};

/// Controlled properties of a node pair's 1-neighborhood subgraph.
///
/// The subgraph is the union of the ego networks of `u` and `v`: both
/// nodes, all their neighbors, and every edge incident to `u` or `v`. Edges
/// between two neighbors are not part of it, so it is generally not induced.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalProperties {
    pub local_density: f64,
    /// Mean Watts–Strogatz clustering coefficient over subgraph nodes.
    pub local_clustering: f64,
    /// `deg / (n - 1)` averaged over `u` and `v`.
    pub degree_centrality: f64,
    /// Mean normalized betweenness over the interior nodes of the
    /// lexicographically first shortest `u`–`v` path (0 for adjacent pairs).
    pub path_betweenness: f64,
    /// Layout distance between `u` and `v`, meters.
    pub euclidean_node_distance: f64,
    /// Fill ratio of the subgraph's elements in the layout's view.
    pub fill_ratio: f64,
}

impl LocalProperties {
    pub const NAMES: [&'static str; 6] = [
        "local_density",
        "local_clustering",
        "degree_centrality",
        "path_betweenness",
        "euclidean_node_distance",
        "fill_ratio",
    ];

    pub fn values(&self) -> [f64; 6] {
        [
            self.local_density,
            self.local_clustering,
            self.degree_centrality,
            self.path_betweenness,
            self.euclidean_node_distance,
            self.fill_ratio,
        ]
    }
}

/// Per-graph data shared by all local property queries on one layout.
pub struct PropertyContext<'a> {
    graph: &'a Graph,
    layout: &'a Layout3D,
    betweenness: Vec<f64>,
    distances: Vec<Vec<usize>>,
    volumes: ElementVolumes,
}

impl<'a> PropertyContext<'a> {
    pub fn new(graph: &'a Graph, layout: &'a Layout3D, fill: &FillOptions) -> Result<Self> {
        layout.check_covers(graph)?;
        Ok(Self {
            graph,
            layout,
            betweenness: betweenness_centrality(graph),
            distances: graph.all_pairs_distances(),
            volumes: ElementVolumes::new(layout, graph, &layout.view, fill),
        })
    }

    pub fn distances(&self) -> &[Vec<usize>] {
        &self.distances
    }

    pub fn properties(&self, cand: &NodePairCandidate) -> Result<LocalProperties> {
        let g = self.graph;
        let (u, v) = (cand.u, cand.v);
        g.check_pair(u, v)?;
        let n = g.node_count();

        let mut nodes: Vec<NodeId> = g.neighbors(u).iter().chain(g.neighbors(v)).copied().chain([u, v]).collect();
        nodes.sort_unstable();
        nodes.dedup();
        let mut edges: Vec<(NodeId, NodeId)> = [u, v]
            .iter()
            .flat_map(|&x| g.neighbors(x).iter().map(move |&y| (x.min(y), x.max(y))))
            .collect();
        edges.sort_unstable();
        edges.dedup();

        let k = nodes.len();
        let local_density = if k > 1 { 2.0 * edges.len() as f64 / (k * (k - 1)) as f64 } else { 0.0 };
        let local_clustering = mean_clustering(&nodes, &edges);
        let degree_centrality = if n > 1 { (g.degree(u) + g.degree(v)) as f64 / (2.0 * (n - 1) as f64) } else { 0.0 };

        let path = g.first_shortest_path(u, v, &self.distances[v])?;
        let interior = &path[1..path.len() - 1];
        let path_betweenness = if interior.is_empty() {
            0.0
        } else {
            interior.iter().map(|&w| self.betweenness[w]).sum::<f64>() / interior.len() as f64
        };

        let p = &self.layout.positions;
        let euclidean_node_distance = (p[u] - p[v]).norm();
        let edge_ids = edges.iter().map(|&(a, b)| g.edge_index(a, b).expect("subgraph edge exists"));
        let fill_ratio = self.volumes.subset_fill_ratio(nodes.iter().copied(), edge_ids);

        Ok(LocalProperties {
            local_density,
            local_clustering,
            degree_centrality,
            path_betweenness,
            euclidean_node_distance,
            fill_ratio,
        })
    }
}

fn mean_clustering(nodes: &[NodeId], edges: &[(NodeId, NodeId)]) -> f64 {
    if nodes.is_empty() {
        return 0.0;
    }
    let index = |x: NodeId| nodes.binary_search(&x).expect("edge endpoint in node set");
    let mut adj = vec![Vec::new(); nodes.len()];
    for &(a, b) in edges {
        adj[index(a)].push(index(b));
        adj[index(b)].push(index(a));
    }
    adj.iter_mut().for_each(|l| l.sort_unstable());
    let total: f64 = adj
        .iter()
        .map(|nb| {
            let d = nb.len();
            if d < 2 {
                return 0.0;
            }
            let links = nb
                .iter()
                .enumerate()
                .map(|(i, &a)| nb[i + 1..].iter().filter(|&&b| adj[a].binary_search(&b).is_ok()).count())
                .sum::<usize>();
            2.0 * links as f64 / (d * (d - 1)) as f64
        })
        .sum();
    total / nodes.len() as f64
}

/// Convenience wrapper building a one-off [`PropertyContext`].
pub fn local_properties(
    g: &Graph,
    layout: &Layout3D,
    cand: &NodePairCandidate,
    fill: &FillOptions,
) -> Result<LocalProperties> {
    PropertyContext::new(g, layout, fill)?.properties(cand)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GlobalProperties {
    pub size: usize,
    pub density: f64,
}

/// Node count and edge density `2|E| / (|V|(|V|-1))`.
pub fn global_properties(g: &Graph) -> Result<GlobalProperties> {
    let n = g.node_count();
    if n < 2 {
        return Err(Error::TooFewNodes { needed: 2, found: n });
    }
    Ok(GlobalProperties { size: n, density: 2.0 * g.edge_count() as f64 / (n * (n - 1)) as f64 })
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::super::Task;
    use super::*;
    use crate::layout::{stress_layout, StressConfig};
    use crate::Point3;

    fn unit_layout(g: &Graph) -> Layout3D {
        let positions = (0..g.node_count()).map(|i| Point3::new(i as f64, (i * i) as f64 * 0.1, 0.0)).collect();
        Layout3D::new(positions, 0.01, 0.002).unwrap()
    }

    #[test]
    fn global_small_graphs() {
        assert_eq!(global_properties(&complete(4)).unwrap(), GlobalProperties { size: 4, density: 1.0 });
        assert_eq!(global_properties(&cycle(5)).unwrap(), GlobalProperties { size: 5, density: 0.5 });
        assert!(global_properties(&Graph::new(1, []).unwrap()).is_err());
    }

    #[test]
    fn density_drops_when_an_edge_is_removed() {
        let g = crate::synth::spatial_graph(30, 0.2, 3);
        let d0 = global_properties(&g).unwrap().density;
        let h = Graph::new(g.node_count(), g.edges()[1..].iter().copied()).unwrap();
        assert!(global_properties(&h).unwrap().density < d0);
    }

    #[test]
    fn clustering_of_complete_and_star() {
        let k3 = complete(3);
        let cand = NodePairCandidate::new(&k3, 0, 1, Task::CommonNeighbors).unwrap();
        let props = local_properties(&k3, &unit_layout(&k3), &cand, &FillOptions::default()).unwrap();
        assert_eq!(props.local_clustering, 1.0);
        assert_eq!(props.local_density, 1.0);
        assert_eq!(props.degree_centrality, 1.0);

        let s = star(4);
        let cand = NodePairCandidate::new(&s, 1, 2, Task::CommonNeighbors).unwrap();
        let props = local_properties(&s, &unit_layout(&s), &cand, &FillOptions::default()).unwrap();
        assert_eq!(props.local_clustering, 0.0);
        assert_eq!(props.path_betweenness, 1.0);
    }

    /// Naive recomputation from the definitions, with set-based subgraph construction.
    fn naive(g: &Graph, layout: &Layout3D, u: NodeId, v: NodeId) -> (f64, f64, f64, f64, f64) {
        use std::collections::BTreeSet;
        let n = g.node_count();
        let mut nodes = BTreeSet::from([u, v]);
        let mut edges = BTreeSet::new();
        for x in [u, v] {
            for y in 0..n {
                if g.has_edge(x, y) {
                    nodes.insert(y);
                    edges.insert((x.min(y), x.max(y)));
                }
            }
        }
        let k = nodes.len() as f64;
        let density = 2.0 * edges.len() as f64 / (k * (k - 1.0));
        let linked = |a: usize, b: usize| edges.contains(&(a.min(b), a.max(b)));
        let mut clustering = 0.0;
        for &x in &nodes {
            let nb: Vec<_> = nodes.iter().copied().filter(|&y| y != x && linked(x, y)).collect();
            if nb.len() >= 2 {
                let mut t = 0;
                for i in 0..nb.len() {
                    for j in i + 1..nb.len() {
                        t += usize::from(linked(nb[i], nb[j]));
                    }
                }
                clustering += 2.0 * t as f64 / (nb.len() * (nb.len() - 1)) as f64;
            }
        }
        clustering /= k;
        let deg = |x: usize| (0..n).filter(|&y| g.has_edge(x, y)).count() as f64;
        let centrality = (deg(u) + deg(v)) / 2.0 / (n as f64 - 1.0);
        let dist = (layout.positions[u] - layout.positions[v]).norm();
        (density, clustering, centrality, dist, k)
    }

    #[test]
    fn study_scale_properties_match_naive_recount() {
        let g = crate::synth::spatial_graph(149, 0.05, 21);
        let cfg = StressConfig { max_iter: 200, ..StressConfig::default() };
        let (layout, _) = stress_layout(&g, &cfg).unwrap();
        let ctx = PropertyContext::new(&g, &layout, &FillOptions { samples: 2_000, ..FillOptions::default() }).unwrap();
        let n = g.node_count();
        for (a, b) in [(0, 1), (3, n - 1), (10, 20), (n / 2, n / 3)] {
            let cand = NodePairCandidate::new(&g, a, b, Task::ShortestPath).unwrap();
            let p = ctx.properties(&cand).unwrap();
            let (density, clustering, centrality, dist, _) = naive(&g, &layout, cand.u, cand.v);
            assert!((p.local_density - density).abs() < 1e-12);
            assert!((p.local_clustering - clustering).abs() < 1e-12);
            assert!((p.degree_centrality - centrality).abs() < 1e-12);
            assert!((p.euclidean_node_distance - dist).abs() < 1e-12);
            assert!(p.values().iter().all(|x| x.is_finite() && *x >= 0.0));
            assert!(p.local_clustering <= 1.0 && p.degree_centrality <= 1.0);
            assert!(p.fill_ratio > 0.0 && p.fill_ratio < 1.0);
        }
    }
}
