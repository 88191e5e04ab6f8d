//! Task instance complexity: signal and noise measures per task, plus fill ratio.
//!
//! Signal estimates the lower-bound effort of an optimal solving strategy on
//! the drawing; noise sums the length of unrelated elements intruding into
//! the region a solver must inspect.
//!
//! | task | signal | region of inspection |
//! |------|--------|----------------------|
//! | CN   | squared detour of each common neighbor, `Σ (|wu| + |wv| - |uv|)²` | sphere at the midpoint of `uv` reaching the farthest neighbor of `u` |
//! | SP   | angle-weighted remaining distance along the path, max over shortest paths | minimum-volume ellipsoid around the path nodes, min over shortest paths |

mod fill;
mod task1;
mod task2;

use serde::{Deserialize, Serialize};

use crate::geometry::{element_in_region, clipped_length, Element, MveeOptions, NodeTest, Region, Segment};
use crate::graph::{Graph, NodeId, Task, DEFAULT_PATH_CAP};
use crate::layout::Layout3D;
use crate::Result;

pub use fill::{fill_ratio, ElementVolumes, FillOptions};
pub use task1::{task1_noise, task1_noise_census, task1_region, task1_signal};
pub use task2::{path_signal, task2_noise, task2_noise_census, task2_signal};

/// Measure of a node counted as noise.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MuNode {
    /// Node diameter, `2 * node_radius`.
    #[default]
    Diameter,
    Zero,
}

/// Measure of an edge counted as noise.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EdgeNoise {
    /// Whole edge length whenever any part of the edge is inside.
    #[default]
    Full,
    /// Only the length inside the region.
    Clipped,
}

/// Units of the shortest-path signal.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SignalMode {
    /// Meters.
    #[default]
    Absolute,
    /// Distances divided by `dist(u, v)`; dimensionless and scale-invariant.
    Relative,
}

macro_rules! kebab_from_str {
    ($t:ty, $($s:literal => $v:expr),+) => {
        impl std::str::FromStr for $t {
            type Err = crate::Error;
            fn from_str(s: &str) -> crate::Result<Self> {
                match s {
                    $($s => Ok($v),)+
                    _ => Err(crate::Error::InvalidArgument(format!("unknown value '{s}'"))),
                }
            }
        }
        impl $t {
            pub fn as_str(&self) -> &'static str {
                match self {
                    $(x if *x == $v => $s,)+
                    _ => unreachable!(),
                }
            }
        }
    };
}

kebab_from_str!(MuNode, "diameter" => MuNode::Diameter, "zero" => MuNode::Zero);
kebab_from_str!(EdgeNoise, "full" => EdgeNoise::Full, "clipped" => EdgeNoise::Clipped);
kebab_from_str!(SignalMode, "absolute" => SignalMode::Absolute, "relative" => SignalMode::Relative);

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ComplexityConfig {
    pub mu_node: MuNode,
    pub edge_noise: EdgeNoise,
    pub node_test: NodeTest,
    pub mode: SignalMode,
    pub path_cap: usize,
    pub mvee_eps: f64,
    pub mvee_max_iter: usize,
}

impl Default for ComplexityConfig {
    fn default() -> Self {
        let m = MveeOptions::default();
        Self {
            mu_node: MuNode::default(),
            edge_noise: EdgeNoise::default(),
            node_test: NodeTest::default(),
            mode: SignalMode::default(),
            path_cap: DEFAULT_PATH_CAP,
            mvee_eps: m.eps,
            mvee_max_iter: m.max_iter,
        }
    }
}

impl ComplexityConfig {
    /// Ellipsoid options; the minimum thickness is the layout's edge radius.
    pub fn mvee_options(&self, layout: &Layout3D) -> MveeOptions {
        MveeOptions { eps: self.mvee_eps, max_iter: self.mvee_max_iter, min_thickness: layout.edge_radius }
    }
}

/// Signal and noise of one task instance.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexityScore {
    pub signal: f64,
    pub noise: f64,
}

impl ComplexityScore {
    /// `signal + ln(noise)`; `None` for noise-free instances.
    pub fn combined(&self) -> Option<f64> {
        combined(self.signal, self.noise)
    }

    pub fn is_noise_free(&self) -> bool {
        self.noise <= 0.0
    }
}

pub fn combined(signal: f64, noise: f64) -> Option<f64> {
    (noise > 0.0).then(|| signal + noise.ln())
}

/// Sums over the instances a participant sees.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TotalComplexity {
    pub total_signal: f64,
    pub total_noise: f64,
    /// Sum of combined scores; `None` if any instance is noise-free.
    pub total_combined: Option<f64>,
    pub instances: usize,
}

impl TotalComplexity {
    pub fn from_scores<'a>(scores: impl IntoIterator<Item = &'a ComplexityScore>) -> Self {
        let mut t = TotalComplexity { total_combined: Some(0.0), ..Default::default() };
        for s in scores {
            t.total_signal += s.signal;
            t.total_noise += s.noise;
            t.total_combined = t.total_combined.zip(s.combined()).map(|(a, b)| a + b);
            t.instances += 1;
        }
        t
    }
}

/// Elements of the drawing counted as noise for one region.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct NoiseCensus {
    pub nodes: Vec<NodeId>,
    /// Indices into [`Graph::edges`].
    pub edges: Vec<usize>,
    pub total: f64,
}

/// Sums `mu` over every node and edge intersecting `region`, skipping the
/// excluded ones.
pub(crate) fn census(
    layout: &Layout3D,
    g: &Graph,
    region: &Region,
    skip_node: impl Fn(NodeId) -> bool,
    skip_edge: impl Fn(usize) -> bool,
    cfg: &ComplexityConfig,
) -> Result<NoiseCensus> {
    let p = &layout.positions;
    let mut out = NoiseCensus::default();
    for (i, c) in p.iter().enumerate() {
        if skip_node(i) {
            continue;
        }
        let node = Element::Node { center: *c, radius: layout.node_radius };
        if element_in_region(&node, region, cfg.node_test)? {
            out.nodes.push(i);
            out.total += match cfg.mu_node {
                MuNode::Diameter => 2.0 * layout.node_radius,
                MuNode::Zero => 0.0,
            };
        }
    }
    for (i, &(a, b)) in g.edges().iter().enumerate() {
        if skip_edge(i) {
            continue;
        }
        let seg = Segment::new(p[a], p[b]);
        if element_in_region(&Element::Edge(seg), region, cfg.node_test)? {
            out.edges.push(i);
            out.total += match cfg.edge_noise {
                EdgeNoise::Full => seg.length(),
                EdgeNoise::Clipped => clipped_length(&seg, region),
            };
        }
    }
    Ok(out)
}

/// Signal and noise for one instance under `cfg`.
pub fn score_instance(
    layout: &Layout3D,
    g: &Graph,
    task: Task,
    u: NodeId,
    v: NodeId,
    cfg: &ComplexityConfig,
) -> Result<ComplexityScore> {
    layout.check_covers(g)?;
    Ok(match task {
        Task::CommonNeighbors => {
            ComplexityScore { signal: task1_signal(layout, g, u, v)?, noise: task1_noise(layout, g, u, v, cfg)? }
        }
        Task::ShortestPath => ComplexityScore {
            signal: task2_signal(layout, g, u, v, cfg.mode, cfg.path_cap)?,
            noise: task2_noise(layout, g, u, v, cfg)?,
        },
    })
}

/// One line of the batch complexity CSV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexityRow {
    pub instance_id: String,
    pub task: Task,
    pub u: NodeId,
    pub v: NodeId,
    pub answer: usize,
    pub signal: f64,
    pub noise: f64,
    pub combined: Option<f64>,
    pub mu_node_mode: MuNode,
    pub clip_mode: EdgeNoise,
}
