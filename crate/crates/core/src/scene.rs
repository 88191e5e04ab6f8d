//! Renderer-neutral scene description of one task instance.
//!
//! JSON document, units in meters, Y up:
//!
//! ```json
//! {
//!   "format": "tic-scene/1", "units": "m", "up": "+y",
//!   "instance_id": "g01:SP:3-17", "task": "SP",
//!   "node_radius": 0.01, "edge_radius": 0.002,
//!   "nodes": [{"label": "1", "position": [x, y, z]}, ...],
//!   "edges": [[0, 1], ...],
//!   "selected": [3, 17],
//!   "colors": {"graph": "#56B4E9", "selection": "#D55E00"},
//!   "view": {"center": [x, y, z], "side": 1.0},
//!   "barycenter_height": 1.45,
//!   "seed": 0, "config_hash": "..."
//! }
//! ```

use serde::{Deserialize, Serialize};

use crate::geometry::Aabb;
use crate::graph::{Graph, NodeId, Task};
use crate::layout::{Layout3D, DEFAULT_BARYCENTER_HEIGHT};
use crate::{Error, Point3, Result};

pub const SCENE_FORMAT: &str = "tic-scene/1";

/// Scene colors as `#RRGGBB`. Defaults are the sky blue and vermilion of
/// the Okabe–Ito palette.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct SceneColors {
    pub graph: String,
    pub selection: String,
}

impl Default for SceneColors {
    fn default() -> Self {
        Self { graph: "#56B4E9".into(), selection: "#D55E00".into() }
    }
}

impl SceneColors {
    fn validate(&self) -> Result<()> {
        for c in [&self.graph, &self.selection] {
            let ok = c.len() == 7 && c.starts_with('#') && c[1..].chars().all(|ch| ch.is_ascii_hexdigit());
            if !ok {
                return Err(Error::InvalidArgument(format!("color '{c}' is not #RRGGBB")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SceneNode {
    pub label: String,
    pub position: [f64; 3],
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ViewCube {
    pub center: [f64; 3],
    pub side: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SceneDescription {
    pub format: String,
    pub units: String,
    pub up: String,
    pub instance_id: Option<String>,
    pub task: Option<Task>,
    pub node_radius: f64,
    pub edge_radius: f64,
    pub nodes: Vec<SceneNode>,
    pub edges: Vec<[NodeId; 2]>,
    pub selected: [NodeId; 2],
    pub colors: SceneColors,
    pub view: ViewCube,
    pub barycenter_height: f64,
    pub seed: u64,
    pub config_hash: String,
}

impl SceneDescription {
    pub fn new(g: &Graph, layout: &Layout3D, selected: [NodeId; 2], colors: SceneColors) -> Result<Self> {
        if layout.len() != g.node_count() {
            return Err(Error::InvalidArgument(format!(
                "layout has {} positions for {} nodes",
                layout.len(),
                g.node_count()
            )));
        }
        let c = layout.view.center();
        let scene = Self {
            format: SCENE_FORMAT.into(),
            units: "m".into(),
            up: "+y".into(),
            instance_id: None,
            task: None,
            node_radius: layout.node_radius,
            edge_radius: layout.edge_radius,
            nodes: layout
                .positions
                .iter()
                .enumerate()
                .map(|(i, p)| SceneNode { label: g.label(i).to_string(), position: [p.x, p.y, p.z] })
                .collect(),
            edges: g.edges().iter().map(|&(a, b)| [a, b]).collect(),
            selected,
            colors,
            view: ViewCube { center: [c.x, c.y, c.z], side: layout.view.max_extent() },
            barycenter_height: DEFAULT_BARYCENTER_HEIGHT,
            seed: 0,
            config_hash: String::new(),
        };
        scene.validate()?;
        Ok(scene)
    }

    pub fn validate(&self) -> Result<()> {
        if self.format != SCENE_FORMAT {
            return Err(Error::InvalidArgument(format!("unsupported scene format '{}'", self.format)));
        }
        let n = self.nodes.len();
        let [a, b] = self.selected;
        if a == b || a >= n || b >= n {
            return Err(Error::InvalidArgument(format!("selection must be two distinct nodes, got [{a}, {b}]")));
        }
        if let Some(e) = self.edges.iter().find(|e| e[0] >= n || e[1] >= n || e[0] == e[1]) {
            return Err(Error::InvalidArgument(format!("bad edge [{}, {}]", e[0], e[1])));
        }
        self.colors.validate()?;
        let view = Aabb::cube(Point3::from(self.view.center), self.view.side);
        let slack = 1e-9 * self.view.side.max(1.0);
        if let Some(i) = self.nodes.iter().position(|nd| !view.inflated(slack).contains(&Point3::from(nd.position))) {
            return Err(Error::InvalidArgument(format!("node {i} lies outside the view cube")));
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let scene: Self = serde_json::from_str(text)?;
        scene.validate()?;
        Ok(scene)
    }

    pub fn positions(&self) -> Vec<Point3> {
        self.nodes.iter().map(|n| Point3::from(n.position)).collect()
    }
}
