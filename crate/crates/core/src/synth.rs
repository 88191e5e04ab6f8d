//! Synthetic spatial graphs resembling sparse animal contact networks.
//!
//! Nodes are random points in the unit square. A Euclidean minimum spanning
//! tree keeps the graph connected, and the closest remaining pairs fill it up
//! to the requested density, which yields the high clustering and long paths
//! of proximity networks.

use rand::Rng as _;
use rand_distr::{Distribution, Normal};

use crate::graph::Graph;
use crate::{rng, Error, Result};

/// Connected spatial graph with exactly `n` nodes and
/// `max(n - 1, round(density · n(n-1)/2))` edges.
pub fn spatial_graph(n: usize, density: f64, seed: u64) -> Graph {
    let mut rng = rng::stream(seed, 0);
    let pts: Vec<(f64, f64)> = (0..n).map(|_| (rng.random(), rng.random())).collect();
    let d2 = |a: usize, b: usize| {
        let (dx, dy) = (pts[a].0 - pts[b].0, pts[a].1 - pts[b].1);
        dx * dx + dy * dy
    };

    // Prim on the complete Euclidean graph.
    let mut in_tree = vec![false; n];
    let mut best = vec![(f64::INFINITY, 0usize); n];
    let mut tree = Vec::with_capacity(n.saturating_sub(1));
    if n > 0 {
        in_tree[0] = true;
        for v in 1..n {
            best[v] = (d2(0, v), 0);
        }
    }
    for _ in 1..n {
        let v = (0..n).filter(|&v| !in_tree[v]).min_by(|&a, &b| best[a].0.total_cmp(&best[b].0)).unwrap();
        in_tree[v] = true;
        tree.push((best[v].1.min(v), best[v].1.max(v)));
        for w in 0..n {
            if !in_tree[w] && d2(v, w) < best[w].0 {
                best[w] = (d2(v, w), v);
            }
        }
    }

    let total = n * n.saturating_sub(1) / 2;
    let k = ((density.clamp(0.0, 1.0) * total as f64).round() as usize).clamp(tree.len(), total);
    let in_mst: std::collections::HashSet<(usize, usize)> = tree.iter().copied().collect();
    let mut rest: Vec<(f64, usize, usize)> = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .filter(|p| !in_mst.contains(p))
        .map(|(a, b)| (d2(a, b), a, b))
        .collect();
    let extra = k - tree.len();
    if extra > 0 && extra < rest.len() {
        rest.select_nth_unstable_by(extra - 1, |x, y| x.0.total_cmp(&y.0));
    }
    let edges = tree.into_iter().chain(rest[..extra].iter().map(|&(_, a, b)| (a, b)));
    Graph::new(n, edges).expect("distinct pairs form a simple graph")
}

/// Size and density distribution of a synthetic corpus.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct CorpusSpec {
    pub graphs: usize,
    pub size_mean: f64,
    pub size_sd: f64,
    pub density_mean: f64,
    pub density_sd: f64,
    /// Sizes and densities are clamped to at least these values.
    pub min_size: usize,
    pub min_density: f64,
}

impl Default for CorpusSpec {
    fn default() -> Self {
        Self {
            graphs: 34,
            size_mean: 149.0,
            size_sd: 40.0,
            density_mean: 0.05,
            density_sd: 0.01,
            min_size: 30,
            min_density: 0.02,
        }
    }
}

/// Draws `spec.graphs` spatial graphs; graph `i` uses seed `derive(seed, i)`.
pub fn corpus(spec: &CorpusSpec, seed: u64) -> Result<Vec<Graph>> {
    let size = Normal::new(spec.size_mean, spec.size_sd).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let density =
        Normal::new(spec.density_mean, spec.density_sd).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let mut rng = rng::stream(seed, 0);
    Ok((0..spec.graphs)
        .map(|i| {
            let n = (size.sample(&mut rng).round().max(spec.min_size as f64)) as usize;
            let d = density.sample(&mut rng).max(spec.min_density);
            spatial_graph(n, d, rng::derive(seed, i as u64))
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn connected_and_deterministic() {
        let g = spatial_graph(149, 0.05, 3);
        assert!(g.is_connected());
        assert_eq!(g.node_count(), 149);
        assert_eq!(g, spatial_graph(149, 0.05, 3));
        assert_ne!(g, spatial_graph(149, 0.05, 4));
    }

    #[test]
    fn edge_count_matches_density() {
        assert_eq!(spatial_graph(60, 1.0, 1).edge_count(), 60 * 59 / 2);
        let g = spatial_graph(100, 0.08, 2);
        assert_eq!(g.edge_count(), (0.08f64 * 4950.0).round() as usize);
        assert!(g.is_connected());
        // Too sparse for the target: the spanning tree wins.
        let g = spatial_graph(50, 0.001, 5);
        assert_eq!(g.edge_count(), 49);
        assert!(g.is_connected());
    }

    #[test]
    fn corpus_statistics_are_near_target() {
        let gs = corpus(&CorpusSpec::default(), 7).unwrap();
        assert_eq!(gs.len(), 34);
        let mean_n = gs.iter().map(|g| g.node_count() as f64).sum::<f64>() / 34.0;
        let mean_d = gs
            .iter()
            .map(|g| {
                let n = g.node_count() as f64;
                2.0 * g.edge_count() as f64 / (n * (n - 1.0))
            })
            .sum::<f64>()
            / 34.0;
        assert!((mean_n - 149.0).abs() < 25.0, "{mean_n}");
        assert!((mean_d - 0.05).abs() < 0.01, "{mean_d}");
    }
}
