//! Undirected simple graphs and the topology queries the tasks are built on.

mod centrality;
pub mod io;
mod paths;
mod properties;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub use centrality::betweenness_centrality;
pub use paths::{PathEnumeration, DEFAULT_PATH_CAP};
pub use properties::{global_properties, local_properties, GlobalProperties, LocalProperties, PropertyContext};

pub type NodeId = usize;

/// The two graph-analysis tasks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Task {
    /// Count the common neighbors of two selected nodes.
    #[serde(rename = "CN")]
    CommonNeighbors,
    /// Determine the shortest-path length between two selected nodes.
    #[serde(rename = "SP")]
    ShortestPath,
}

impl Task {
    pub const ALL: [Task; 2] = [Task::CommonNeighbors, Task::ShortestPath];

    pub fn code(self) -> &'static str {
        match self {
            Task::CommonNeighbors => "CN",
            Task::ShortestPath => "SP",
        }
    }

    pub fn other(self) -> Task {
        match self {
            Task::CommonNeighbors => Task::ShortestPath,
            Task::ShortestPath => Task::CommonNeighbors,
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl std::str::FromStr for Task {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "CN" | "T1" | "COMMON-NEIGHBORS" => Ok(Task::CommonNeighbors),
            "SP" | "T2" | "SHORTEST-PATH" => Ok(Task::ShortestPath),
            _ => Err(Error::InvalidArgument(format!("unknown task '{s}' (expected CN or SP)"))),
        }
    }
}

/// Undirected simple graph over dense node ids `0..node_count`.
///
/// Immutable after construction. Adjacency lists are sorted, edges are
/// stored once as `(a, b)` with `a < b` in lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    adjacency: Vec<Vec<NodeId>>,
    edges: Vec<(NodeId, NodeId)>,
    labels: Vec<String>,
}

impl Graph {
    /// Builds a graph, labelling node `i` with the string `i`.
    ///
    /// Self-loops, duplicate edges (in either orientation) and out-of-range
    /// ids are rejected.
    pub fn new(node_count: usize, edges: impl IntoIterator<Item = (NodeId, NodeId)>) -> Result<Self> {
        let labels = (0..node_count).map(|i| i.to_string()).collect();
        Self::with_labels(labels, edges)
    }

    pub fn with_labels(labels: Vec<String>, edges: impl IntoIterator<Item = (NodeId, NodeId)>) -> Result<Self> {
        let n = labels.len();
        let mut list = Vec::new();
        for (a, b) in edges {
            for node in [a, b] {
                if node >= n {
                    return Err(Error::InvalidNode { node, count: n });
                }
            }
            if a == b {
                return Err(Error::SelfLoop(a));
            }
            list.push((a.min(b), a.max(b)));
        }
        list.sort_unstable();
        if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateEdge(w[0].0, w[0].1));
        }
        let mut adjacency = vec![Vec::new(); n];
        for &(a, b) in &list {
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        for nbrs in &mut adjacency {
            nbrs.sort_unstable();
        }
        Ok(Self { adjacency, edges: list, labels })
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(NodeId, NodeId)] {
        &self.edges
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, node: NodeId) -> &str {
        &self.labels[node]
    }

    /// Sorted neighbor list. Panics on an invalid id; use [`Graph::check_node`] first
    /// where the id comes from user input.
    pub fn neighbors(&self, node: NodeId) -> &[NodeId] {
        &self.adjacency[node]
    }

    pub fn degree(&self, node: NodeId) -> usize {
        self.adjacency[node].len()
    }

    pub fn has_edge(&self, a: NodeId, b: NodeId) -> bool {
        a < self.node_count() && self.adjacency[a].binary_search(&b).is_ok()
    }

    /// Index of the edge `{a, b}` in [`Graph::edges`].
    pub fn edge_index(&self, a: NodeId, b: NodeId) -> Option<usize> {
        self.edges.binary_search(&(a.min(b), a.max(b))).ok()
    }

    pub fn check_node(&self, node: NodeId) -> Result<()> {
        if node < self.node_count() {
            Ok(())
        } else {
            Err(Error::InvalidNode { node, count: self.node_count() })
        }
    }

    pub(crate) fn check_pair(&self, u: NodeId, v: NodeId) -> Result<()> {
        self.check_node(u)?;
        self.check_node(v)?;
        if u == v {
            return Err(Error::SameNode(u));
        }
        Ok(())
    }

    /// `N_uv`: nodes adjacent to both `u` and `v`, ascending.
    pub fn common_neighbors(&self, u: NodeId, v: NodeId) -> Result<Vec<NodeId>> {
        self.check_pair(u, v)?;
        let (a, b) = (&self.adjacency[u], &self.adjacency[v]);
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    out.push(a[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        Ok(out)
    }

    /// Connected components as sorted node lists, largest first (ties by smallest member).
    pub fn components(&self) -> Vec<Vec<NodeId>> {
        let n = self.node_count();
        let mut seen = vec![false; n];
        let mut comps = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut stack = vec![start];
            let mut comp = Vec::new();
            while let Some(x) = stack.pop() {
                comp.push(x);
                for &y in &self.adjacency[x] {
                    if !seen[y] {
                        seen[y] = true;
                        stack.push(y);
                    }
                }
            }
            comp.sort_unstable();
            comps.push(comp);
        }
        comps.sort_by(|a, b| b.len().cmp(&a.len()).then(a[0].cmp(&b[0])));
        comps
    }

    pub fn is_connected(&self) -> bool {
        self.node_count() > 0 && self.components().len() == 1
    }

    pub(crate) fn require_connected(&self) -> Result<()> {
        if self.node_count() == 0 {
            return Err(Error::TooFewNodes { needed: 1, found: 0 });
        }
        let components = self.components().len();
        if components != 1 {
            return Err(Error::Disconnected { components });
        }
        Ok(())
    }

    /// Keeps only the largest connected component, relabelling nodes densely.
    ///
    /// Returns the new graph and, for each new id, the id it had in `self`.
    /// Labels travel with their nodes.
    pub fn largest_component(&self) -> (Graph, Vec<NodeId>) {
        let Some(keep) = self.components().into_iter().next() else {
            return (self.clone(), Vec::new());
        };
        self.induced(&keep)
    }

    /// Subgraph induced by `nodes` (sorted, distinct), relabelled densely.
    pub(crate) fn induced(&self, nodes: &[NodeId]) -> (Graph, Vec<NodeId>) {
        let mut new_id = vec![usize::MAX; self.node_count()];
        for (i, &x) in nodes.iter().enumerate() {
            new_id[x] = i;
        }
        let edges: Vec<_> = self
            .edges
            .iter()
            .filter(|&&(a, b)| new_id[a] != usize::MAX && new_id[b] != usize::MAX)
            .map(|&(a, b)| (new_id[a], new_id[b]))
            .collect();
        let labels = nodes.iter().map(|&x| self.labels[x].clone()).collect();
        let graph = Graph::with_labels(labels, edges).expect("induced subgraph of a simple graph is simple");
        (graph, nodes.to_vec())
    }

    /// Largest BFS eccentricity. Zero for graphs with fewer than two nodes.
    pub fn diameter(&self) -> Result<usize> {
        self.require_connected()?;
        Ok((0..self.node_count())
            .map(|s| self.bfs_distances(s).into_iter().flatten().max().unwrap_or(0))
            .max()
            .unwrap_or(0))
    }
}

/// A selected node pair, stored with `deg(u) <= deg(v)` (ties: smaller id first).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NodePair {
    pub u: NodeId,
    pub v: NodeId,
}

impl NodePair {
    pub fn ordered(g: &Graph, a: NodeId, b: NodeId) -> Result<Self> {
        g.check_pair(a, b)?;
        let key = |x: NodeId| (g.degree(x), x);
        Ok(if key(a) <= key(b) { Self { u: a, v: b } } else { Self { u: b, v: a } })
    }
}

/// A node pair eligible for a task, with the correct answer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodePairCandidate {
    pub u: NodeId,
    pub v: NodeId,
    pub task: Task,
    /// Common-neighbor count (CN) or shortest-path length in edges (SP).
    pub answer: usize,
}

impl NodePairCandidate {
    /// Orders the pair by degree and computes the answer. Errors when the
    /// answer would be zero (no common neighbor for CN).
    pub fn new(g: &Graph, a: NodeId, b: NodeId, task: Task) -> Result<Self> {
        let NodePair { u, v } = NodePair::ordered(g, a, b)?;
        let answer = match task {
            Task::CommonNeighbors => g.common_neighbors(u, v)?.len(),
            Task::ShortestPath => g.shortest_path_length(u, v)?,
        };
        if answer == 0 {
            return Err(Error::InvalidArgument(format!("pair ({u}, {v}) has no common neighbor")));
        }
        Ok(Self { u, v, task, answer })
    }

    pub fn pair(&self) -> NodePair {
        NodePair { u: self.u, v: self.v }
    }
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    #[test]
    fn rejects_malformed_edges() {
        assert!(matches!(Graph::new(3, [(0, 0)]), Err(Error::SelfLoop(0))));
        assert!(matches!(Graph::new(3, [(0, 1), (1, 0)]), Err(Error::DuplicateEdge(0, 1))));
        assert!(matches!(Graph::new(3, [(0, 3)]), Err(Error::InvalidNode { node: 3, count: 3 })));
    }

    #[test]
    fn common_neighbors_small_graphs() {
        assert_eq!(complete(3).common_neighbors(0, 1).unwrap(), vec![2]);
        assert_eq!(path(3).common_neighbors(0, 2).unwrap(), vec![1]);
        assert_eq!(star(4).common_neighbors(1, 2).unwrap(), vec![0]);
        assert!(matches!(path(3).common_neighbors(0, 7), Err(Error::InvalidNode { .. })));
        assert!(matches!(path(3).common_neighbors(1, 1), Err(Error::SameNode(1))));
    }

    #[test]
    fn pair_ordering_by_degree_then_id() {
        let g = star(4);
        assert_eq!(NodePair::ordered(&g, 0, 3).unwrap(), NodePair { u: 3, v: 0 });
        assert_eq!(NodePair::ordered(&g, 4, 2).unwrap(), NodePair { u: 2, v: 4 });
    }

    #[test]
    fn largest_component_keeps_labels() {
        let g = Graph::with_labels(
            ["a", "b", "c", "d", "e"].map(String::from).to_vec(),
            [(0, 1), (2, 3), (3, 4)],
        )
        .unwrap();
        let (h, map) = g.largest_component();
        assert_eq!(map, vec![2, 3, 4]);
        assert_eq!(h.labels(), ["c", "d", "e"]);
        assert_eq!(h.edges(), [(0, 1), (1, 2)]);
        assert!(h.is_connected());
        assert!(!g.is_connected());
    }

    #[test]
    fn candidate_answers() {
        let c = NodePairCandidate::new(&path(5), 4, 0, Task::ShortestPath).unwrap();
        assert_eq!((c.u, c.v, c.answer), (0, 4, 4));
        assert!(NodePairCandidate::new(&path(5), 0, 4, Task::CommonNeighbors).is_err());
    }
}
