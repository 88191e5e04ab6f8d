//! 3-D stress majorization and normalization into the view cube.

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::geometry::Aabb;
use crate::graph::Graph;
use crate::{rng, Error, Point3, Result};

pub const DEFAULT_NODE_RADIUS: f64 = 0.01;
pub const DEFAULT_EDGE_RADIUS: f64 = 0.002;
pub const DEFAULT_CUBE_SIDE: f64 = 1.0;
pub const DEFAULT_BARYCENTER_HEIGHT: f64 = 1.45;

/// Node positions in meters plus the visual sizes of nodes and edges.
#[derive(Clone, Debug, PartialEq)]
pub struct Layout3D {
    pub positions: Vec<Point3>,
    pub node_radius: f64,
    pub edge_radius: f64,
    /// Axis-aligned view cube: centered on the tight bounding box of the
    /// positions, with side equal to the largest extent.
    pub view: Aabb,
}

impl Layout3D {
    pub fn new(positions: Vec<Point3>, node_radius: f64, edge_radius: f64) -> Result<Self> {
        if !(node_radius > 0.0 && edge_radius > 0.0) {
            return Err(Error::InvalidArgument("node and edge radii must be positive".into()));
        }
        if positions.iter().any(|p| !p.iter().all(|c| c.is_finite())) {
            return Err(Error::InvalidArgument("non-finite node position".into()));
        }
        let bbox = Aabb::around(&positions);
        let view = Aabb::cube(bbox.center(), bbox.max_extent());
        Ok(Self { positions, node_radius, edge_radius, view })
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn bounding_box(&self) -> Aabb {
        Aabb::around(&self.positions)
    }

    pub fn barycenter(&self) -> Point3 {
        let n = self.positions.len().max(1) as f64;
        self.positions.iter().sum::<Point3>() / n
    }

    pub(crate) fn check_covers(&self, g: &Graph) -> Result<()> {
        if self.positions.len() != g.node_count() {
            return Err(Error::InvalidArgument(format!(
                "layout has {} positions for a graph with {} nodes",
                self.positions.len(),
                g.node_count()
            )));
        }
        Ok(())
    }

    /// Applies `x -> scale * x + shift` to every position.
    pub fn transformed(&self, scale: f64, shift: Point3) -> Result<Self> {
        let positions = self.positions.iter().map(|p| p * scale + shift).collect();
        Self::new(positions, self.node_radius, self.edge_radius)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StressConfig {
    pub seed: u64,
    pub max_iter: usize,
    /// Stop once the relative stress decrease of an iteration drops below this.
    pub tol: f64,
    /// Independent random starts; the run with the lowest final stress is kept.
    pub restarts: usize,
    /// Target view side; the ideal edge length is `cube_side / diameter`.
    pub cube_side: f64,
    pub node_radius: f64,
    pub edge_radius: f64,
}

impl Default for StressConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            max_iter: 20_000,
            tol: 1e-7,
            restarts: 20,
            cube_side: DEFAULT_CUBE_SIDE,
            node_radius: DEFAULT_NODE_RADIUS,
            edge_radius: DEFAULT_EDGE_RADIUS,
        }
    }
}

/// Provenance of a computed layout.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LayoutReport {
    pub seed: u64,
    pub stress: f64,
    pub iterations: usize,
    pub ideal_edge_length: f64,
    /// Stress of the initial placement followed by the stress after each iteration.
    #[serde(skip)]
    pub history: Vec<f64>,
}

/// Weighted stress `sum_{i<j} w_ij (|p_i - p_j| - d_ij)^2` with `w_ij = d_ij^-2`,
/// where `d_ij` is the hop distance times `ideal_edge_length`.
pub fn stress(positions: &[Point3], hops: &[Vec<usize>], ideal_edge_length: f64) -> f64 {
    let n = positions.len();
    let mut s = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let d = hops[i][j] as f64 * ideal_edge_length;
            let r = (positions[i] - positions[j]).norm() - d;
            s += r * r / (d * d);
        }
    }
    s
}

/// Stress-majorization (SMACOF) layout from seeded uniform placements in the unit cube.
///
/// Each iteration applies the weighted Guttman transform `X <- V^+ B(X) X`,
/// which never increases stress. Of `restarts` runs the lowest final stress
/// wins; the report's history belongs to that run.
pub fn stress_layout(g: &Graph, cfg: &StressConfig) -> Result<(Layout3D, LayoutReport)> {
    if cfg.max_iter == 0 || !(cfg.tol > 0.0) || !(cfg.cube_side > 0.0) {
        return Err(Error::InvalidArgument("max_iter >= 1, tol > 0 and cube_side > 0 are required".into()));
    }
    g.require_connected()?;
    let n = g.node_count();
    let hops = g.all_pairs_distances();
    let diameter = hops.iter().flatten().copied().max().unwrap_or(0).max(1);
    let ideal = cfg.cube_side / diameter as f64;

    let target = |i: usize, j: usize| hops[i][j] as f64 * ideal;
    let vplus = weighted_laplacian_pinv(n, |i, j| 1.0 / (target(i, j) * target(i, j)));
    let positions = |x: &DMatrix<f64>| (0..n).map(|i| Point3::new(x[(i, 0)], x[(i, 1)], x[(i, 2)])).collect::<Vec<_>>();

    let mut best: Option<(DMatrix<f64>, Vec<f64>, usize)> = None;
    for start in 0..cfg.restarts.max(1) {
        let (x, history, iterations) = smacof_run(n, &hops, ideal, &vplus, cfg, start as u64);
        if best.as_ref().is_none_or(|b| history.last() < b.1.last()) {
            best = Some((x, history, iterations));
        }
    }
    let (x, history, iterations) = best.expect("at least one start");

    let layout = Layout3D::new(positions(&x), cfg.node_radius, cfg.edge_radius)?;
    let report = LayoutReport {
        seed: cfg.seed,
        stress: *history.last().unwrap(),
        iterations,
        ideal_edge_length: ideal,
        history,
    };
    Ok((layout, report))
}

/// One majorization run from the placement drawn from stream `start` of the seed.
fn smacof_run(
    n: usize,
    hops: &[Vec<usize>],
    ideal: f64,
    vplus: &DMatrix<f64>,
    cfg: &StressConfig,
    start: u64,
) -> (DMatrix<f64>, Vec<f64>, usize) {
    let mut rng = rng::stream(cfg.seed, start);
    let mut x = DMatrix::<f64>::from_fn(n, 3, |_, _| rng.random::<f64>());
    let inv_target: Vec<f64> = (0..n * n).map(|k| 1.0 / (hops[k / n][k % n] as f64 * ideal)).collect();
    let mut bx = DMatrix::<f64>::zeros(n, 3);
    let mut history = Vec::new();
    let mut iterations = 0;
    loop {
        // One pass yields both the stress of `x` and `B(x) x`, where
        // (B x)_i = sum_j (x_i - x_j) / (d_ij |x_i - x_j|).
        bx.fill(0.0);
        let mut s = 0.0;
        for i in 0..n {
            let xi = [x[(i, 0)], x[(i, 1)], x[(i, 2)]];
            for j in i + 1..n {
                let diff = [xi[0] - x[(j, 0)], xi[1] - x[(j, 1)], xi[2] - x[(j, 2)]];
                let dist = (diff[0] * diff[0] + diff[1] * diff[1] + diff[2] * diff[2]).sqrt();
                let inv = inv_target[i * n + j];
                let r = dist * inv - 1.0;
                s += r * r;
                if dist > 0.0 {
                    let c = inv / dist;
                    for k in 0..3 {
                        bx[(i, k)] += c * diff[k];
                        bx[(j, k)] -= c * diff[k];
                    }
                }
            }
        }
        if let Some(&prev) = history.last() {
            history.push(s);
            if prev <= 0.0 || (prev - s) / prev < cfg.tol {
                break;
            }
        } else {
            history.push(s);
        }
        if iterations == cfg.max_iter || n < 2 {
            break;
        }
        x = vplus * &bx;
        iterations += 1;
    }
    (x, history, iterations)
}

/// Moore–Penrose inverse of the weighted graph Laplacian, via `(V + J/n)^-1 - J/n`.
fn weighted_laplacian_pinv(n: usize, weight: impl Fn(usize, usize) -> f64) -> DMatrix<f64> {
    let mut v = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            let w = weight(i, j);
            v[(i, j)] = -w;
            v[(j, i)] = -w;
            v[(i, i)] += w;
            v[(j, j)] += w;
        }
    }
    let j = 1.0 / n as f64;
    v.add_scalar_mut(j);
    let mut inv = v.cholesky().expect("shifted Laplacian of a connected graph is positive definite").inverse();
    inv.add_scalar_mut(-j);
    inv
}

/// Uniformly scales the layout so its largest extent equals `cube_side` and
/// moves the barycenter to `(0, barycenter_height, 0)`.
pub fn normalize_to_view(layout: &Layout3D, cube_side: f64, barycenter_height: f64) -> Result<Layout3D> {
    if !(cube_side > 0.0) {
        return Err(Error::InvalidArgument("cube side must be positive".into()));
    }
    let extent = layout.bounding_box().max_extent();
    if layout.is_empty() || !(extent > 0.0) {
        return Err(Error::Degenerate("all nodes coincide; cannot normalize".into()));
    }
    let scale = cube_side / extent;
    let bary = layout.barycenter();
    let target = Point3::new(0.0, barycenter_height, 0.0);
    let positions: Vec<Point3> = layout.positions.iter().map(|p| (p - bary) * scale + target).collect();
    let mut out = Layout3D::new(positions, layout.node_radius, layout.edge_radius)?;
    // Fix the side exactly; the recomputed extent may differ in the last ulp.
    out.view = Aabb::cube(out.view.center(), cube_side);
    Ok(out)
}

/// On-disk layout: `{meta: {...}, positions: [[x, y, z], ...]}` in meters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LayoutFile {
    pub meta: LayoutMeta,
    pub positions: Vec<[f64; 3]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LayoutMeta {
    pub seed: u64,
    pub stress: f64,
    pub iterations: usize,
    pub ideal_edge_length: f64,
    #[serde(default = "default_node_radius")]
    pub node_radius: f64,
    #[serde(default = "default_edge_radius")]
    pub edge_radius: f64,
    #[serde(default)]
    pub view_side: Option<f64>,
}

fn default_node_radius() -> f64 {
    DEFAULT_NODE_RADIUS
}

fn default_edge_radius() -> f64 {
    DEFAULT_EDGE_RADIUS
}

impl LayoutFile {
    pub fn new(layout: &Layout3D, report: &LayoutReport) -> Self {
        Self {
            meta: LayoutMeta {
                seed: report.seed,
                stress: report.stress,
                iterations: report.iterations,
                ideal_edge_length: report.ideal_edge_length,
                node_radius: layout.node_radius,
                edge_radius: layout.edge_radius,
                view_side: Some(layout.view.max_extent()),
            },
            positions: layout.positions.iter().map(|p| [p.x, p.y, p.z]).collect(),
        }
    }

    pub fn to_layout(&self) -> Result<Layout3D> {
        let positions = self.positions.iter().map(|&[x, y, z]| Point3::new(x, y, z)).collect();
        let mut layout = Layout3D::new(positions, self.meta.node_radius, self.meta.edge_radius)?;
        if let Some(side) = self.meta.view_side {
            layout.view = Aabb::cube(layout.view.center(), side);
        }
        Ok(layout)
    }
}
