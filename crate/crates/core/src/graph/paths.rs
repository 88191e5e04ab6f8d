use std::collections::VecDeque;

use super::{Graph, NodeId};
use crate::{Error, Result};

/// Default limit on the number of enumerated shortest paths per pair.
pub const DEFAULT_PATH_CAP: usize = 64;

/// Outcome of enumerating all shortest paths between two nodes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PathEnumeration {
    /// Every shortest path from `u` to `v`, in lexicographic order.
    Paths(Vec<Vec<NodeId>>),
    /// More paths than the cap allowed.
    Exceeded,
}

impl PathEnumeration {
    pub fn into_paths(self, u: NodeId, v: NodeId, cap: usize) -> Result<Vec<Vec<NodeId>>> {
        match self {
            PathEnumeration::Paths(p) => Ok(p),
            PathEnumeration::Exceeded => Err(Error::PathCapExceeded { u, v, cap }),
        }
    }
}

impl Graph {
    /// Hop distances from `source`; `None` for unreachable nodes.
    pub fn bfs_distances(&self, source: NodeId) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.node_count()];
        dist[source] = Some(0);
        let mut queue = VecDeque::from([source]);
        while let Some(x) = queue.pop_front() {
            let d = dist[x].unwrap() + 1;
            for &y in self.neighbors(x) {
                if dist[y].is_none() {
                    dist[y] = Some(d);
                    queue.push_back(y);
                }
            }
        }
        dist
    }

    /// Number of shortest paths from `source` to every node (saturating), with distances.
    pub fn shortest_path_counts(&self, source: NodeId) -> (Vec<Option<usize>>, Vec<u64>) {
        let n = self.node_count();
        let mut dist = vec![None; n];
        let mut sigma = vec![0u64; n];
        dist[source] = Some(0);
        sigma[source] = 1;
        let mut queue = VecDeque::from([source]);
        while let Some(x) = queue.pop_front() {
            let d = dist[x].unwrap() + 1;
            for &y in self.neighbors(x) {
                match dist[y] {
                    None => {
                        dist[y] = Some(d);
                        sigma[y] = sigma[x];
                        queue.push_back(y);
                    }
                    Some(dy) if dy == d => sigma[y] = sigma[y].saturating_add(sigma[x]),
                    _ => {}
                }
            }
        }
        (dist, sigma)
    }

    /// All-pairs hop distances; `usize::MAX` marks unreachable pairs.
    pub fn all_pairs_distances(&self) -> Vec<Vec<usize>> {
        (0..self.node_count())
            .map(|s| self.bfs_distances(s).into_iter().map(|d| d.unwrap_or(usize::MAX)).collect())
            .collect()
    }

    pub fn shortest_path_length(&self, u: NodeId, v: NodeId) -> Result<usize> {
        self.check_node(u)?;
        self.check_node(v)?;
        self.bfs_distances(u)[v].ok_or(Error::Unreachable { u, v })
    }

    /// Enumerates every shortest `u`–`v` path by backtracking over the BFS
    /// predecessor DAG rooted at `u`. Returns [`PathEnumeration::Exceeded`]
    /// when there are more than `cap` paths; the count is checked before any
    /// path is materialized.
    pub fn enumerate_shortest_paths(&self, u: NodeId, v: NodeId, cap: usize) -> Result<PathEnumeration> {
        if cap == 0 {
            return Err(Error::InvalidArgument("path cap must be at least 1".into()));
        }
        self.check_node(u)?;
        self.check_node(v)?;
        let (dist, sigma) = self.shortest_path_counts(u);
        let Some(length) = dist[v] else {
            return Err(Error::Unreachable { u, v });
        };
        if sigma[v] > cap as u64 {
            return Ok(PathEnumeration::Exceeded);
        }
        // Walk backwards from v through predecessors (dist one less), which
        // yields each path reversed; sort afterwards for a stable order.
        let mut paths = Vec::with_capacity(sigma[v] as usize);
        let mut stack = vec![v];
        self.backtrack(&dist, &mut stack, &mut paths);
        for p in &mut paths {
            p.reverse();
            debug_assert_eq!(p.len(), length + 1);
        }
        paths.sort();
        Ok(PathEnumeration::Paths(paths))
    }

    fn backtrack(&self, dist: &[Option<usize>], stack: &mut Vec<NodeId>, out: &mut Vec<Vec<NodeId>>) {
        let x = *stack.last().unwrap();
        let dx = dist[x].unwrap();
        if dx == 0 {
            out.push(stack.clone());
            return;
        }
        for &p in self.neighbors(x) {
            if dist[p] == Some(dx - 1) {
                stack.push(p);
                self.backtrack(dist, stack, out);
                stack.pop();
            }
        }
    }

    /// The lexicographically smallest shortest path from `u` to `v`, given
    /// hop distances to `v` for every node.
    pub(crate) fn first_shortest_path(&self, u: NodeId, v: NodeId, dist_to_v: &[usize]) -> Result<Vec<NodeId>> {
        if dist_to_v[u] == usize::MAX {
            return Err(Error::Unreachable { u, v });
        }
        let mut path = vec![u];
        let mut x = u;
        while x != v {
            let d = dist_to_v[x];
            x = *self
                .neighbors(x)
                .iter()
                .find(|&&y| dist_to_v[y] + 1 == d)
                .expect("BFS distances are consistent");
            path.push(x);
        }
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn path_lengths() {
        assert_eq!(cycle(6).shortest_path_length(0, 3).unwrap(), 3);
        assert_eq!(path(2).shortest_path_length(0, 1).unwrap(), 1);
        assert_eq!(path(5).shortest_path_length(0, 4).unwrap(), 4);
        let g = Graph::new(4, [(0, 1), (2, 3)]).unwrap();
        assert!(matches!(g.shortest_path_length(0, 3), Err(Error::Unreachable { u: 0, v: 3 })));
    }

    #[test]
    fn enumeration_small_cases() {
        let c4 = cycle(4).enumerate_shortest_paths(0, 2, 64).unwrap();
        assert_eq!(c4, PathEnumeration::Paths(vec![vec![0, 1, 2], vec![0, 3, 2]]));
        assert_eq!(
            path(5).enumerate_shortest_paths(0, 4, 64).unwrap(),
            PathEnumeration::Paths(vec![vec![0, 1, 2, 3, 4]])
        );
        assert_eq!(complete(4).enumerate_shortest_paths(1, 3, 64).unwrap(), PathEnumeration::Paths(vec![vec![1, 3]]));
        assert_eq!(cycle(4).enumerate_shortest_paths(0, 2, 1).unwrap(), PathEnumeration::Exceeded);
        assert!(cycle(4).enumerate_shortest_paths(0, 2, 0).is_err());
    }

    #[test]
    fn grid_path_count_is_binomial() {
        // 4x4 grid, corner to corner: C(6, 3) = 20 monotone lattice paths.
        let idx = |r: usize, c: usize| r * 4 + c;
        let mut edges = Vec::new();
        for r in 0..4 {
            for c in 0..4 {
                if c + 1 < 4 {
                    edges.push((idx(r, c), idx(r, c + 1)));
                }
                if r + 1 < 4 {
                    edges.push((idx(r, c), idx(r + 1, c)));
                }
            }
        }
        let g = Graph::new(16, edges).unwrap();
        let PathEnumeration::Paths(p) = g.enumerate_shortest_paths(0, 15, 64).unwrap() else { panic!() };
        assert_eq!(p.len(), 20);
        assert_eq!(g.enumerate_shortest_paths(0, 15, 19).unwrap(), PathEnumeration::Exceeded);
    }

    fn random_graph(n: usize, p: f64, seed: u64) -> Graph {
        use rand::Rng;
        let mut rng = crate::rng::stream(seed, 0);
        let mut edges = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                if rng.random_bool(p) {
                    edges.push((a, b));
                }
            }
        }
        Graph::new(n, edges).unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn common_neighbors_match_adjacency_dot_product(n in 3usize..40, p in 0.05f64..0.6, seed in any::<u64>()) {
            let g = random_graph(n, p, seed);
            let row = |x: usize| (0..n).map(|y| u8::from(g.has_edge(x, y))).collect::<Vec<_>>();
            for a in 0..n {
                for b in a + 1..n {
                    let dot: usize = row(a).iter().zip(row(b)).map(|(&x, y)| (x * y) as usize).sum();
                    let cn = g.common_neighbors(a, b).unwrap();
                    prop_assert_eq!(cn.len(), dot);
                    prop_assert_eq!(&cn, &g.common_neighbors(b, a).unwrap());
                }
            }
        }

        #[test]
        fn distances_obey_triangle_inequality(n in 2usize..50, p in 0.05f64..0.5, seed in any::<u64>()) {
            let g = random_graph(n, p, seed);
            let d = g.all_pairs_distances();
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        if d[a][c] != usize::MAX && d[c][b] != usize::MAX {
                            prop_assert!(d[a][b] <= d[a][c] + d[c][b]);
                        }
                    }
                }
            }
        }

        #[test]
        fn enumerated_paths_are_shortest_and_adjacent(n in 2usize..30, p in 0.1f64..0.5, seed in any::<u64>()) {
            let g = random_graph(n, p, seed);
            let d = g.all_pairs_distances();
            for a in 0..n {
                for b in 0..n {
                    if a == b || d[a][b] == usize::MAX {
                        continue;
                    }
                    if let PathEnumeration::Paths(paths) = g.enumerate_shortest_paths(a, b, 256).unwrap() {
                        let (_, sigma) = g.shortest_path_counts(a);
                        prop_assert_eq!(paths.len() as u64, sigma[b]);
                        for path in &paths {
                            prop_assert_eq!(path.len(), d[a][b] + 1);
                            prop_assert_eq!(path[0], a);
                            prop_assert_eq!(*path.last().unwrap(), b);
                            prop_assert!(path.windows(2).all(|w| g.has_edge(w[0], w[1])));
                        }
                        let mut dedup = paths.clone();
                        dedup.dedup();
                        prop_assert_eq!(dedup.len(), paths.len());
                    }
                }
            }
        }
    }
}
