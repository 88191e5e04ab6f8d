//! Pipeline configuration file (TOML).
//!
//! ```toml
//! seed = 7
//! graphs = ["graphs/g01.txt", "graphs/g02.txt"]   # relative to this file
//!
//! [corpus]            # synthetic graphs, used when `graphs` is empty
//! graphs = 10
//!
//! [layout]
//! max_iter = 20000
//! restarts = 20              # independent starts; lowest stress wins
//! tol = 1e-7
//! cube_side = 1.0
//! node_radius = 0.01
//! edge_radius = 0.002
//! barycenter_height = 1.45
//!
//! [session]           # plan shape, answer ranges, complexity options
//! instances_per_task = 12
//! groups = 2
//! units_per_group = 2
//!
//! [session.complexity]
//! mu_node = "diameter"      # diameter | zero
//! edge_noise = "full"       # full | clipped
//! mode = "absolute"         # absolute | relative
//!
//! [scene.colors]
//! graph = "#56B4E9"
//! selection = "#D55E00"
//!
//! [evaluation]
//! simulate = true           # synthesize responses when no file is given
//! responses = "responses.csv"
//! replicates = 10000
//! group_types = ["ad_hoc_pair", "nominal_pair"]
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use tic_core::evaluation::GroupType;
use tic_core::instances::SessionConfig;
use tic_core::layout::{StressConfig, DEFAULT_BARYCENTER_HEIGHT, DEFAULT_CUBE_SIDE, DEFAULT_EDGE_RADIUS, DEFAULT_NODE_RADIUS};
use tic_core::scene::SceneColors;
use tic_core::synth::CorpusSpec;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub seed: u64,
    pub graphs: Vec<PathBuf>,
    pub corpus: Option<CorpusSpec>,
    pub layout: LayoutSection,
    pub session: SessionConfig,
    pub scene: SceneSection,
    pub evaluation: EvaluationSection,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LayoutSection {
    pub max_iter: usize,
    pub tol: f64,
    pub restarts: usize,
    pub cube_side: f64,
    pub node_radius: f64,
    pub edge_radius: f64,
    pub barycenter_height: f64,
}

impl Default for LayoutSection {
    fn default() -> Self {
        let s = StressConfig::default();
        Self {
            max_iter: s.max_iter,
            tol: s.tol,
            restarts: s.restarts,
            cube_side: DEFAULT_CUBE_SIDE,
            node_radius: DEFAULT_NODE_RADIUS,
            edge_radius: DEFAULT_EDGE_RADIUS,
            barycenter_height: DEFAULT_BARYCENTER_HEIGHT,
        }
    }
}

impl LayoutSection {
    pub fn stress(&self, seed: u64) -> StressConfig {
        StressConfig {
            seed,
            max_iter: self.max_iter,
            tol: self.tol,
            restarts: self.restarts,
            cube_side: self.cube_side,
            node_radius: self.node_radius,
            edge_radius: self.edge_radius,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SceneSection {
    pub colors: SceneColors,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvaluationSection {
    pub responses: Option<PathBuf>,
    pub simulate: bool,
    pub replicates: usize,
    /// Group type of each unit position within a pairing group.
    pub group_types: Vec<GroupType>,
}

impl Default for EvaluationSection {
    fn default() -> Self {
        Self {
            responses: None,
            simulate: false,
            replicates: 10_000,
            group_types: vec![GroupType::AdHocPair, GroupType::NominalPair],
        }
    }
}

impl PipelineConfig {
    pub fn from_toml(text: &str) -> anyhow::Result<Self> {
        Ok(toml::from_str(text)?)
    }

    /// Resolves relative input paths against `base`.
    pub fn resolve_paths(&mut self, base: &Path) {
        for g in &mut self.graphs {
            if g.is_relative() {
                *g = base.join(&*g);
            }
        }
        if let Some(r) = &mut self.evaluation.responses {
            if r.is_relative() {
                *r = base.join(&*r);
            }
        }
    }

    /// SHA-256 of the canonical JSON form, with input paths reduced to file
    /// names so the hash does not depend on the working directory.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        let name = |p: &PathBuf| PathBuf::from(p.file_name().unwrap_or_default());
        c.graphs = c.graphs.iter().map(name).collect();
        c.evaluation.responses = c.evaluation.responses.as_ref().map(name);
        let json = serde_json::to_vec(&c).expect("config serializes");
        hex::encode(Sha256::digest(&json))
    }
}
