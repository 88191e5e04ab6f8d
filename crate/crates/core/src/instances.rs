//! Task instance candidates, outlier filtering and session planning.
//!
//! A session plan fixes, for every pairing group of between-subject units,
//! the ordered task instances its members solve. Instances are drawn per
//! task by round-robin over answer values, so every answer in the allowed
//! range is represented as evenly as the candidate pool permits.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet, HashSet};

use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::complexity::{score_instance, ComplexityConfig, ComplexityScore, FillOptions};
use crate::graph::{Graph, LocalProperties, NodeId, NodePair, NodePairCandidate, PropertyContext, Task};
use crate::layout::Layout3D;
use crate::{rng, Error, Result};

/// A connected graph with its normalized layout.
#[derive(Clone, Debug)]
pub struct PreparedGraph {
    pub id: String,
    pub graph: Graph,
    pub layout: Layout3D,
}

/// A node pair eligible for a task, with its controlled properties.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    #[serde(flatten)]
    pub pair: NodePairCandidate,
    pub properties: LocalProperties,
}

/// All node pairs with a non-zero answer for `task`.
///
/// SP pairs with more than `path_cap` shortest paths are dropped, since
/// their complexity cannot be evaluated.
pub fn enumerate_candidates(
    g: &Graph,
    layout: &Layout3D,
    task: Task,
    fill: &FillOptions,
    path_cap: usize,
) -> Result<Vec<Candidate>> {
    g.require_connected()?;
    let ctx = PropertyContext::new(g, layout, fill)?;
    let sources: Vec<NodeId> = (0..g.node_count()).collect();
    let per_source = crate::par_map(&sources, |&a| -> Result<Vec<Candidate>> {
        let sigma = match task {
            Task::ShortestPath => g.shortest_path_counts(a).1,
            Task::CommonNeighbors => Vec::new(),
        };
        let mut out = Vec::new();
        for b in a + 1..g.node_count() {
            let answer = match task {
                Task::CommonNeighbors => g.common_neighbors(a, b)?.len(),
                Task::ShortestPath => {
                    if sigma[b] > path_cap as u64 {
                        continue;
                    }
                    ctx.distances()[a][b]
                }
            };
            if answer == 0 {
                continue;
            }
            let NodePair { u, v } = NodePair::ordered(g, a, b)?;
            let pair = NodePairCandidate { u, v, task, answer };
            out.push(Candidate { pair, properties: ctx.properties(&pair)? });
        }
        Ok(out)
    });
    let mut all = Vec::new();
    for chunk in per_source {
        all.extend(chunk?);
    }
    Ok(all)
}

/// Properties skipped during outlier filtering because they had no variance.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FilterReport {
    pub input: usize,
    pub kept: usize,
    pub zero_variance: Vec<String>,
}

/// Drops candidates whose z-score on any controlled property is at least
/// `z_threshold` in magnitude.
///
/// Z-scores use the population mean and standard deviation of the
/// candidates passed in, separately per task. Properties with zero variance
/// are skipped and reported.
pub fn filter_outliers(cands: Vec<Candidate>, z_threshold: f64) -> Result<(Vec<Candidate>, FilterReport)> {
    let mut report = FilterReport { input: cands.len(), ..Default::default() };
    let mut keep = vec![true; cands.len()];
    for task in Task::ALL {
        let idx: Vec<usize> = (0..cands.len()).filter(|&i| cands[i].pair.task == task).collect();
        if idx.is_empty() {
            continue;
        }
        if idx.len() < 3 {
            return Err(Error::InvalidArgument(format!(
                "{task} outlier filtering needs at least 3 candidates, got {}",
                idx.len()
            )));
        }
        for (k, name) in LocalProperties::NAMES.iter().enumerate() {
            let xs: Vec<f64> = idx.iter().map(|&i| cands[i].properties.values()[k]).collect();
            let n = xs.len() as f64;
            let mean = xs.iter().sum::<f64>() / n;
            let sd = (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n).sqrt();
            if sd <= 1e-12 * mean.abs().max(1.0) {
                log::info!("{task}: property {name} has zero variance, skipped");
                report.zero_variance.push(format!("{task}:{name}"));
                continue;
            }
            for (&i, x) in idx.iter().zip(&xs) {
                if ((x - mean) / sd).abs() >= z_threshold {
                    keep[i] = false;
                }
            }
        }
    }
    let kept: Vec<Candidate> = cands.into_iter().zip(keep).filter_map(|(c, k)| k.then_some(c)).collect();
    report.kept = kept.len();
    Ok((kept, report))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SessionConfig {
    /// Pairing groups; all units of a group solve the same sequence. Must be
    /// even so that task order is exactly counterbalanced.
    pub groups: usize,
    pub units_per_group: usize,
    pub instances_per_task: usize,
    /// Inclusive answer range for common-neighbor instances.
    pub cn_answers: [usize; 2],
    /// Inclusive answer range for shortest-path instances.
    pub sp_answers: [usize; 2],
    pub outlier_z: f64,
    pub complexity: ComplexityConfig,
    pub fill: FillOptions,
}

impl Default for SessionConfig {
    fn default() -> Self {
        Self {
            groups: 2,
            units_per_group: 2,
            instances_per_task: 12,
            cn_answers: [2, 11],
            sp_answers: [3, 16],
            outlier_z: 2.0,
            complexity: ComplexityConfig::default(),
            fill: FillOptions::default(),
        }
    }
}

impl SessionConfig {
    pub fn answer_range(&self, task: Task) -> [usize; 2] {
        match task {
            Task::CommonNeighbors => self.cn_answers,
            Task::ShortestPath => self.sp_answers,
        }
    }

    /// SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(&json))
    }

    fn validate(&self) -> Result<()> {
        if self.groups == 0 || self.groups % 2 != 0 {
            return Err(Error::InvalidArgument(format!(
                "groups must be a positive even number for exact counterbalancing, got {}",
                self.groups
            )));
        }
        if self.units_per_group == 0 || self.instances_per_task == 0 {
            return Err(Error::InvalidArgument("units_per_group and instances_per_task must be positive".into()));
        }
        for task in Task::ALL {
            let [lo, hi] = self.answer_range(task);
            if lo == 0 || lo > hi {
                return Err(Error::InvalidArgument(format!("bad {task} answer range [{lo}, {hi}]")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TaskInstance {
    pub instance_id: String,
    pub graph_id: String,
    pub task: Task,
    pub u: NodeId,
    pub v: NodeId,
    pub answer: usize,
    /// Warm-up instance, excluded from analysis.
    pub control: bool,
    pub score: ComplexityScore,
    pub combined: Option<f64>,
    pub properties: LocalProperties,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub task: Task,
    pub instances: Vec<TaskInstance>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanGroup {
    pub group: usize,
    /// Units sharing this sequence.
    pub units: Vec<String>,
    pub task_order: [Task; 2],
    pub series: Vec<Series>,
    /// Drawn instances per answer value, per task.
    pub stratum_counts: BTreeMap<Task, BTreeMap<usize, usize>>,
}

impl PlanGroup {
    pub fn sequence(&self) -> impl Iterator<Item = &TaskInstance> {
        self.series.iter().flat_map(|s| &s.instances)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SessionPlan {
    pub seed: u64,
    pub config_hash: String,
    pub config: SessionConfig,
    pub stratification: String,
    pub graph_ids: Vec<String>,
    pub candidates: BTreeMap<Task, FilterReport>,
    pub controls: BTreeMap<Task, TaskInstance>,
    pub groups: Vec<PlanGroup>,
}

/// One line of the plan CSV summary.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanRow {
    pub group: usize,
    pub units: String,
    pub position: usize,
    pub instance_id: String,
    pub graph_id: String,
    pub task: Task,
    pub u: NodeId,
    pub v: NodeId,
    pub answer: usize,
    pub control: bool,
    pub signal: f64,
    pub noise: f64,
    pub combined: Option<f64>,
}

impl SessionPlan {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Sequence solved by `unit_id`.
    pub fn unit_sequence(&self, unit_id: &str) -> Option<Vec<&TaskInstance>> {
        let g = self.groups.iter().find(|g| g.units.iter().any(|u| u == unit_id))?;
        Some(g.sequence().collect())
    }

    /// Every distinct instance in the plan, by id.
    pub fn instances(&self) -> BTreeMap<&str, &TaskInstance> {
        self.groups.iter().flat_map(|g| g.sequence()).map(|t| (t.instance_id.as_str(), t)).collect()
    }

    pub fn rows(&self) -> Vec<PlanRow> {
        let mut rows = Vec::new();
        for g in &self.groups {
            for (position, t) in g.sequence().enumerate() {
                rows.push(PlanRow {
                    group: g.group,
                    units: g.units.join(" "),
                    position,
                    instance_id: t.instance_id.clone(),
                    graph_id: t.graph_id.clone(),
                    task: t.task,
                    u: t.u,
                    v: t.v,
                    answer: t.answer,
                    control: t.control,
                    signal: t.score.signal,
                    noise: t.score.noise,
                    combined: t.combined,
                });
            }
        }
        rows
    }
}

pub fn instance_id(graph_id: &str, task: Task, u: NodeId, v: NodeId) -> String {
    format!("{graph_id}:{}:{u}-{v}", task.code())
}

/// A filtered candidate of one graph.
#[derive(Clone, Copy, Debug)]
struct Pooled {
    graph: usize,
    cand: Candidate,
}

/// Enumerates and filters candidates for every graph, then draws the plan.
pub fn sample_plan(graphs: &[PreparedGraph], cfg: &SessionConfig, seed: u64) -> Result<SessionPlan> {
    cfg.validate()?;
    let enumerated = crate::par_map(graphs, |pg| -> Result<Vec<(Task, Vec<Candidate>, FilterReport)>> {
        Task::ALL
            .iter()
            .map(|&task| {
                let all = enumerate_candidates(&pg.graph, &pg.layout, task, &cfg.fill, cfg.complexity.path_cap)?;
                let (kept, report) = filter_outliers(all, cfg.outlier_z)
                    .map_err(|e| Error::InvalidArgument(format!("graph {}: {e}", pg.id)))?;
                Ok((task, kept, report))
            })
            .collect()
    });
    let mut pool = Vec::new();
    let mut reports: BTreeMap<Task, FilterReport> = BTreeMap::new();
    for (graph, res) in enumerated.into_iter().enumerate() {
        for (task, kept, report) in res? {
            let total = reports.entry(task).or_default();
            total.input += report.input;
            total.kept += report.kept;
            total.zero_variance.extend(report.zero_variance.into_iter().map(|p| format!("{}:{p}", graphs[graph].id)));
            let [lo, hi] = cfg.answer_range(task);
            pool.extend(
                kept.into_iter().filter(|c| (lo..=hi).contains(&c.pair.answer)).map(|cand| Pooled { graph, cand }),
            );
        }
    }
    let mut plan = draw_plan(graphs, &pool, cfg, seed)?;
    plan.candidates = reports;
    Ok(plan)
}

fn make_instance(graphs: &[PreparedGraph], p: &Pooled, control: bool, cfg: &ComplexityConfig) -> Result<TaskInstance> {
    let pg = &graphs[p.graph];
    let c = p.cand.pair;
    let score = score_instance(&pg.layout, &pg.graph, c.task, c.u, c.v, cfg)?;
    Ok(TaskInstance {
        instance_id: instance_id(&pg.id, c.task, c.u, c.v),
        graph_id: pg.id.clone(),
        task: c.task,
        u: c.u,
        v: c.v,
        answer: c.answer,
        control,
        score,
        combined: score.combined(),
        properties: p.cand.properties,
    })
}

/// Least complex candidate in the lowest populated answer stratum.
///
/// Noise-free candidates rank first (their combined score is unbounded
/// below); ties fall back to signal, then to pool order.
fn select_control(graphs: &[PreparedGraph], pool: &[Pooled], task: Task, cfg: &SessionConfig) -> Result<TaskInstance> {
    let [lo, hi] = cfg.answer_range(task);
    let easiest = pool
        .iter()
        .filter(|p| p.cand.pair.task == task)
        .map(|p| p.cand.pair.answer)
        .min()
        .ok_or_else(|| Error::Infeasible(format!("{task}: no candidates with answers in [{lo}, {hi}]")))?;
    let stratum: Vec<&Pooled> =
        pool.iter().filter(|p| p.cand.pair.task == task && p.cand.pair.answer == easiest).collect();
    let scored = crate::par_map(&stratum, |p| make_instance(graphs, p, true, &cfg.complexity));
    let mut best: Option<TaskInstance> = None;
    for t in scored {
        let t = t?;
        let key = |x: &TaskInstance| (x.combined.unwrap_or(f64::NEG_INFINITY), x.score.signal);
        if best.as_ref().is_none_or(|b| key(&t).0 < key(b).0 || (key(&t).0 == key(b).0 && key(&t).1 < key(b).1)) {
            best = Some(t);
        }
    }
    Ok(best.expect("stratum is non-empty"))
}

fn draw_plan(graphs: &[PreparedGraph], pool: &[Pooled], cfg: &SessionConfig, seed: u64) -> Result<SessionPlan> {
    cfg.validate()?;
    let mut controls = BTreeMap::new();
    for task in Task::ALL {
        controls.insert(task, select_control(graphs, pool, task, cfg)?);
    }
    let control_graphs: BTreeSet<&str> = controls.values().map(|c| c.graph_id.as_str()).collect();

    // Strata per task: answer value -> pool indices, in pool order.
    let mut strata: BTreeMap<Task, BTreeMap<usize, Vec<usize>>> = BTreeMap::new();
    for (i, p) in pool.iter().enumerate() {
        if control_graphs.contains(graphs[p.graph].id.as_str()) {
            continue;
        }
        strata.entry(p.cand.pair.task).or_default().entry(p.cand.pair.answer).or_default().push(i);
    }

    let used_instances: RefCell<HashSet<usize>> = RefCell::new(HashSet::new());
    let mut groups = Vec::with_capacity(cfg.groups);
    for group in 0..cfg.groups {
        let mut rng = rng::stream(rng::derive(seed, group as u64), 0);
        let task_order =
            if group % 2 == 0 { [Task::CommonNeighbors, Task::ShortestPath] } else { [Task::ShortestPath, Task::CommonNeighbors] };
        let control = controls[&task_order[0]].clone();
        let used_graphs: RefCell<HashSet<usize>> = RefCell::new(HashSet::new());
        let mut series = Vec::new();
        let mut stratum_counts = BTreeMap::new();
        for (k, &task) in task_order.iter().enumerate() {
            let empty = BTreeMap::new();
            let task_strata = strata.get(&task).unwrap_or(&empty);
            let eligible =
                |i: usize| !used_instances.borrow().contains(&i) && !used_graphs.borrow().contains(&pool[i].graph);
            let take = |i: usize| {
                used_instances.borrow_mut().insert(i);
                used_graphs.borrow_mut().insert(pool[i].graph);
            };
            let [lo, hi] = cfg.answer_range(task);
            let drawn = round_robin(task_strata, cfg.instances_per_task, &mut rng, eligible, take).map_err(|strata| {
                Error::Infeasible(format!(
                    "{task} series of group {group}: needs {} instances but answer strata {strata} are exhausted \
                     (range [{lo}, {hi}])",
                    cfg.instances_per_task
                ))
            })?;
            let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
            for &i in &drawn {
                *counts.entry(pool[i].cand.pair.answer).or_default() += 1;
            }
            log::debug!("group {group} {task} stratum counts {counts:?}");
            stratum_counts.insert(task, counts);
            let mut instances = drawn
                .iter()
                .map(|&i| make_instance(graphs, &pool[i], false, &cfg.complexity))
                .collect::<Result<Vec<_>>>()?;
            instances.shuffle(&mut rng);
            if k == 0 {
                instances.insert(0, control.clone());
            }
            series.push(Series { task, instances });
        }
        let units =
            (0..cfg.units_per_group).map(|m| format!("U{:03}", group * cfg.units_per_group + m + 1)).collect();
        groups.push(PlanGroup { group, units, task_order, series, stratum_counts });
    }

    Ok(SessionPlan {
        seed,
        config_hash: cfg.hash(),
        config: *cfg,
        stratification: "round-robin over ascending answer values, exhausted values skipped".into(),
        graph_ids: graphs.iter().map(|g| g.id.clone()).collect(),
        candidates: BTreeMap::new(),
        controls,
        groups,
    })
}

/// Draws `k` items cycling through strata in ascending order, one uniform
/// pick per stratum per round. On failure returns the exhausted strata.
fn round_robin(
    strata: &BTreeMap<usize, Vec<usize>>,
    k: usize,
    rng: &mut rng::Rng,
    eligible: impl Fn(usize) -> bool,
    mut take: impl FnMut(usize),
) -> std::result::Result<Vec<usize>, String> {
    let mut drawn = Vec::with_capacity(k);
    let mut exhausted: BTreeSet<usize> = BTreeSet::new();
    while drawn.len() < k {
        let mut progressed = false;
        for (&answer, members) in strata {
            if drawn.len() == k {
                break;
            }
            if exhausted.contains(&answer) {
                continue;
            }
            let open: Vec<usize> = members.iter().copied().filter(|&i| eligible(i)).collect();
            if open.is_empty() {
                log::info!("answer stratum {answer} exhausted after {} draws", drawn.len());
                exhausted.insert(answer);
                continue;
            }
            let pick = open[rng.random_range(0..open.len())];
            take(pick);
            drawn.push(pick);
            progressed = true;
        }
        if !progressed {
            let names: Vec<String> = exhausted.iter().map(|a| a.to_string()).collect();
            return Err(if names.is_empty() { "(none populated)".into() } else { names.join(", ") });
        }
    }
    Ok(drawn)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::{complete, path};
    use crate::layout::{stress_layout, StressConfig};

    fn layout_of(g: &Graph) -> Layout3D {
        stress_layout(g, &StressConfig { max_iter: 300, ..Default::default() }).unwrap().0
    }

    fn fast_fill() -> FillOptions {
        FillOptions { samples: 500, ..Default::default() }
    }

    #[test]
    fn triangle_and_path_candidates() {
        let k3 = complete(3);
        let c = enumerate_candidates(&k3, &layout_of(&k3), Task::CommonNeighbors, &fast_fill(), 64).unwrap();
        assert_eq!(c.len(), 3);
        assert!(c.iter().all(|c| c.pair.answer == 1));

        let p5 = path(5);
        let c = enumerate_candidates(&p5, &layout_of(&p5), Task::ShortestPath, &fast_fill(), 64).unwrap();
        assert_eq!(c.len(), 10);
        let ends = c.iter().find(|c| c.pair.pair() == NodePair { u: 0, v: 4 }).unwrap();
        assert_eq!(ends.pair.answer, 4);
    }

    #[test]
    fn candidate_count_matches_nested_loops() {
        let g = crate::synth::spatial_graph(60, 0.1, 5);
        let l = layout_of(&g);
        let n = g.node_count();
        let cn = enumerate_candidates(&g, &l, Task::CommonNeighbors, &fast_fill(), 64).unwrap();
        let mut naive = 0;
        for a in 0..n {
            for b in a + 1..n {
                if (0..n).any(|w| g.has_edge(a, w) && g.has_edge(b, w)) {
                    naive += 1;
                }
            }
        }
        assert_eq!(cn.len(), naive);
        let sp = enumerate_candidates(&g, &l, Task::ShortestPath, &fast_fill(), usize::MAX).unwrap();
        assert_eq!(sp.len(), n * (n - 1) / 2);
        let capped = enumerate_candidates(&g, &l, Task::ShortestPath, &fast_fill(), 1).unwrap();
        assert!(capped.iter().all(|c| g.enumerate_shortest_paths(c.pair.u, c.pair.v, 1).unwrap().into_paths(c.pair.u, c.pair.v, 1).is_ok()));
    }

    fn fake(values: [f64; 6]) -> Candidate {
        Candidate {
            pair: NodePairCandidate { u: 0, v: 1, task: Task::CommonNeighbors, answer: 2 },
            properties: LocalProperties {
                local_density: values[0],
                local_clustering: values[1],
                degree_centrality: values[2],
                path_betweenness: values[3],
                euclidean_node_distance: values[4],
                fill_ratio: values[5],
            },
        }
    }

    #[test]
    fn identical_population_is_untouched() {
        let cands = vec![fake([0.5; 6]); 10];
        let (kept, report) = filter_outliers(cands, 2.0).unwrap();
        assert_eq!(kept.len(), 10);
        assert_eq!(report.zero_variance.len(), 6);
    }

    #[test]
    fn far_candidate_is_removed() {
        let mut cands: Vec<Candidate> = (0..20).map(|i| fake([0.1 + 0.001 * (i % 5) as f64, 0.2, 0.3, 0.0, 0.5, 0.1])).collect();
        cands.push(fake([0.9, 0.2, 0.3, 0.0, 0.5, 0.1]));
        let (kept, _) = filter_outliers(cands, 2.0).unwrap();
        assert_eq!(kept.len(), 20);
        assert!(kept.iter().all(|c| c.properties.local_density < 0.5));
        assert!(filter_outliers(vec![fake([0.0; 6]); 2], 2.0).is_err());
    }

    fn draw(strata: &BTreeMap<usize, Vec<usize>>, k: usize) -> std::result::Result<Vec<usize>, String> {
        let used = std::cell::RefCell::new(HashSet::new());
        round_robin(strata, k, &mut rng::stream(0, 0), |i| !used.borrow().contains(&i), |i| {
            used.borrow_mut().insert(i);
        })
    }

    #[test]
    fn round_robin_spreads_over_strata() {
        let strata: BTreeMap<usize, Vec<usize>> = [(2, vec![0, 1, 2, 3, 4]), (3, vec![5]), (4, vec![6, 7])].into();
        let drawn = draw(&strata, 6).unwrap();
        let count = |lo: usize, hi: usize| drawn.iter().filter(|&&i| (lo..=hi).contains(&i)).count();
        assert_eq!((count(0, 4), count(5, 5), count(6, 7)), (3, 1, 2));
        let mut sorted = drawn.clone();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(sorted.len(), 6);
    }

    #[test]
    fn round_robin_reports_exhaustion() {
        let strata: BTreeMap<usize, Vec<usize>> = [(2, vec![0]), (3, vec![1])].into();
        assert_eq!(draw(&strata, 3).unwrap_err(), "2, 3");
        assert_eq!(draw(&BTreeMap::new(), 1).unwrap_err(), "(none populated)");
    }

    #[test]
    fn odd_group_count_is_rejected() {
        let cfg = SessionConfig { groups: 3, ..Default::default() };
        assert!(sample_plan(&[], &cfg, 0).is_err());
    }
}
