//! End-to-end pipeline and the stage functions shared with single commands.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context};
use serde::{Deserialize, Serialize};
use tic_core::complexity::{ComplexityConfig, ComplexityRow, TotalComplexity};
use tic_core::evaluation::{
    harmonize, nominal_member_as_individual, pair_outcomes, Comparison, EvaluationReport, GroupType, Outcome,
    ResponseRow, SessionRecord,
};
use tic_core::graph::io::{parse_auto, to_json};
use tic_core::graph::Graph;
use tic_core::instances::{sample_plan, PreparedGraph, SessionPlan, TaskInstance};
use tic_core::layout::{normalize_to_view, stress_layout, LayoutFile};
use tic_core::scene::SceneDescription;
use tic_core::{rng, synth};

use crate::config::{LayoutSection, PipelineConfig};
use crate::io::{csv_bytes, read_input, to_json_pretty, OutDir, Stamped};
use crate::plot::{render, PlotPoint};
use crate::simulate::simulate_responses;

/// Runs `f`, tagging any error with the stage name.
pub fn stage<T>(name: &str, f: impl FnOnce() -> anyhow::Result<T>) -> anyhow::Result<T> {
    log::info!("stage {name}");
    f().with_context(|| format!("stage {name}"))
}

/// Reads a graph file and keeps its largest connected component.
pub fn load_graph(path: &Path) -> anyhow::Result<Graph> {
    let text = read_input(path)?;
    let ing = parse_auto(&text).with_context(|| format!("parsing {}", path.display()))?;
    let (g, kept) = ing.graph.largest_component();
    if kept.len() < ing.graph.node_count() {
        log::warn!(
            "{}: kept the largest component ({} of {} nodes)",
            path.display(),
            kept.len(),
            ing.graph.node_count()
        );
    }
    Ok(g)
}

pub fn load_layout(path: &Path) -> anyhow::Result<tic_core::layout::Layout3D> {
    let file: LayoutFile = serde_json::from_str(&read_input(path)?).with_context(|| format!("parsing {}", path.display()))?;
    Ok(file.to_layout()?)
}

/// Stress layout normalized into the view cube.
pub fn make_layout(g: &Graph, cfg: &LayoutSection, seed: u64) -> anyhow::Result<LayoutFile> {
    let (raw, report) = stress_layout(g, &cfg.stress(seed))?;
    let layout = normalize_to_view(&raw, cfg.cube_side, cfg.barycenter_height)?;
    Ok(LayoutFile::new(&layout, &report))
}

pub fn ingest(cfg: &PipelineConfig, seed: u64) -> anyhow::Result<Vec<(String, Graph)>> {
    if !cfg.graphs.is_empty() {
        let mut out = Vec::new();
        let mut seen = BTreeSet::new();
        for p in &cfg.graphs {
            let id = p.file_stem().and_then(|s| s.to_str()).ok_or_else(|| anyhow!("bad graph path {}", p.display()))?;
            if !seen.insert(id.to_string()) {
                bail!("two graph files share the id '{id}'");
            }
            out.push((id.to_string(), load_graph(p)?));
        }
        return Ok(out);
    }
    let spec = cfg.corpus.ok_or_else(|| anyhow!("config lists no graphs and no [corpus] section"))?;
    let gs = synth::corpus(&spec, seed)?;
    Ok(gs.into_iter().enumerate().map(|(i, g)| (format!("g{:02}", i + 1), g)).collect())
}

pub fn complexity_rows(plan: &SessionPlan, cfg: &ComplexityConfig) -> Vec<ComplexityRow> {
    plan.instances().values().map(|t| complexity_row(t, cfg)).collect()
}

pub fn complexity_row(t: &TaskInstance, cfg: &ComplexityConfig) -> ComplexityRow {
    ComplexityRow {
        instance_id: t.instance_id.clone(),
        task: t.task,
        u: t.u,
        v: t.v,
        answer: t.answer,
        signal: t.score.signal,
        noise: t.score.noise,
        combined: t.combined,
        mu_node_mode: cfg.mu_node,
        clip_mode: cfg.edge_noise,
    }
}

#[derive(Serialize)]
struct Totals {
    groups: Vec<GroupTotals>,
}

#[derive(Serialize)]
struct GroupTotals {
    group: usize,
    units: Vec<String>,
    totals: TotalComplexity,
}

pub fn read_responses(path: &Path) -> anyhow::Result<Vec<ResponseRow>> {
    let text = read_input(path)?;
    parse_responses(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn parse_responses(text: &str) -> anyhow::Result<Vec<ResponseRow>> {
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for rec in r.deserialize() {
        rows.push(rec?);
    }
    Ok(rows)
}

/// Harmonized outcomes per unit plus paired comparisons between the unit
/// positions of every pairing group.
pub fn evaluate(plan: &SessionPlan, rows: &[ResponseRow], replicates: usize, seed: u64) -> anyhow::Result<EvaluationReport> {
    let instances = plan.instances();
    let correct: BTreeMap<String, i64> = instances.iter().map(|(id, t)| (id.to_string(), t.answer as i64)).collect();
    let controls: BTreeSet<String> =
        instances.values().filter(|t| t.control).map(|t| t.instance_id.clone()).collect();
    let records = SessionRecord::from_rows(rows)?;
    let mut by_unit: BTreeMap<String, (GroupType, SessionRecord)> = BTreeMap::new();
    let mut outcomes: BTreeMap<String, Vec<Outcome>> = BTreeMap::new();
    for rec in records {
        outcomes.insert(rec.unit_id.clone(), harmonize(&rec, &correct)?);
        by_unit.insert(rec.unit_id.clone(), (rec.group_type, rec));
    }
    if let Some(u) = by_unit.keys().find(|u| plan.unit_sequence(u).is_none()) {
        bail!("unit {u} does not appear in the plan");
    }

    // Per position pair (p, q): group types and per-group paired values.
    let positions = plan.groups.iter().map(|g| g.units.len()).max().unwrap_or(0);
    let mut comparisons = Vec::new();
    let type_at = |pos: usize| -> Option<GroupType> {
        plan.groups.iter().filter_map(|g| g.units.get(pos)).find_map(|u| by_unit.get(u).map(|x| x.0))
    };
    let mut sides: Vec<(String, usize, Option<u64>)> = Vec::new();
    for p in 0..positions {
        if let Some(t) = type_at(p) {
            sides.push((t.as_str().to_string(), p, None));
            if t == GroupType::NominalPair {
                sides.push(("individual_from_nominal".to_string(), p, Some(rng::derive(seed, 99))));
            }
        }
    }
    let side_outcomes = |group: usize, side: &(String, usize, Option<u64>)| -> anyhow::Result<Option<Vec<Outcome>>> {
        let Some(unit) = plan.groups[group].units.get(side.1) else { return Ok(None) };
        let Some((_, rec)) = by_unit.get(unit) else { return Ok(None) };
        Ok(Some(match side.2 {
            None => outcomes[unit].clone(),
            Some(s) => harmonize(&nominal_member_as_individual(rec, s)?, &correct)?,
        }))
    };
    for i in 0..sides.len() {
        for j in i + 1..sides.len() {
            if sides[i].1 == sides[j].1 {
                continue;
            }
            let (x, y) = (&sides[i], &sides[j]);
            let mut acc = Vec::new();
            let mut logt = Vec::new();
            for g in 0..plan.groups.len() {
                if let (Some(a), Some(b)) = (side_outcomes(g, x)?, side_outcomes(g, y)?) {
                    let pa = pair_outcomes(&a, &b, &controls, |o| o.accuracy);
                    let pt = pair_outcomes(&a, &b, &controls, |o| o.time_s.ln());
                    if !pa.is_empty() {
                        acc.push(pa);
                        logt.push(pt);
                    }
                }
            }
            if acc.len() < 2 {
                log::warn!("{} vs {}: fewer than two pairing groups with data, skipped", y.0, x.0);
                continue;
            }
            let name = format!("{} - {}", y.0, x.0);
            let s = rng::derive(seed, comparisons.len() as u64);
            comparisons.push(Comparison::run(&name, "accuracy", &acc, replicates, s)?);
            let s = rng::derive(seed, comparisons.len() as u64);
            comparisons.push(Comparison::run(&name, "log_time", &logt, replicates, s)?);
        }
    }
    Ok(EvaluationReport { seed, replicates, config_hash: plan.config_hash.clone(), outcomes, comparisons })
}

/// Complexity CSV row as read back for plotting.
#[derive(Deserialize)]
struct ComplexityIn {
    instance_id: String,
    answer: usize,
    signal: f64,
    noise: f64,
}

/// Joins responses with complexity rows on instance id.
pub fn plot_points(complexity_csv: &str, rows: &[ResponseRow]) -> anyhow::Result<Vec<PlotPoint>> {
    let mut r = csv::Reader::from_reader(complexity_csv.as_bytes());
    let mut by_id: BTreeMap<String, ComplexityIn> = BTreeMap::new();
    for rec in r.deserialize() {
        let c: ComplexityIn = rec?;
        by_id.insert(c.instance_id.clone(), c);
    }
    let orphans: BTreeSet<&str> =
        rows.iter().map(|r| r.instance_id.as_str()).filter(|id| !by_id.contains_key(*id)).collect();
    if !orphans.is_empty() {
        bail!("responses refer to instances missing from the complexity table: {}", orphans.into_iter().collect::<Vec<_>>().join(", "));
    }
    let correct: BTreeMap<String, i64> = by_id.iter().map(|(k, c)| (k.clone(), c.answer as i64)).collect();
    let mut points = Vec::new();
    for rec in SessionRecord::from_rows(rows)? {
        for o in harmonize(&rec, &correct)? {
            let c = &by_id[&o.instance_id];
            points.push(PlotPoint {
                group_type: rec.group_type,
                signal: c.signal,
                noise: c.noise,
                accuracy: o.accuracy,
                time_s: o.time_s,
            });
        }
    }
    Ok(points)
}

pub fn scene_file_name(instance_id: &str) -> String {
    let safe: String = instance_id.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' { c } else { '_' }).collect();
    format!("scenes/{safe}.json")
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    seed: u64,
    config_hash: &'a str,
    graphs: Vec<GraphEntry>,
    stages: Vec<&'static str>,
    decisions: Vec<&'static str>,
    files: &'a BTreeMap<String, String>,
}

#[derive(Serialize)]
struct GraphEntry {
    id: String,
    nodes: usize,
    edges: usize,
    layout_seed: u64,
    stress: f64,
    iterations: usize,
}

pub const DECISIONS: [&str; 8] = [
    "layout: stress majorization from seeded uniform starts, lowest final stress kept, normalized so the largest extent equals the cube side and the barycenter sits at the configured height",
    "view: cube of the configured side centered on the layout bounding box",
    "outliers: per graph and task, |z| >= 2 on any controlled property with population standard deviation; zero-variance properties skipped",
    "sampling: round-robin over ascending answer values, exhausted values skipped; graphs of control instances excluded from regular draws",
    "control: least combined complexity in the lowest populated answer value, placed first in the first series of each unit",
    "counterbalancing: task order alternates by pairing group; the group count must be even",
    "region membership: (x-c)^T A (x-c) <= 1 + 1e-9",
    "evaluation: pairing groups are the resampling units; controls excluded; times log-transformed",
];

pub fn run_pipeline(cfg: &PipelineConfig, seed: u64, out: &Path) -> anyhow::Result<(PathBuf, String)> {
    let hash = cfg.hash();
    let mut dir = OutDir::create(out)?;
    let mut stages = Vec::new();

    let graphs = stage("ingest", || ingest(cfg, seed))?;
    stages.push("ingest");

    let mut prepared = Vec::new();
    let mut entries = Vec::new();
    stage("layout", || {
        for (i, (id, g)) in graphs.iter().enumerate() {
            let layout_seed = rng::derive(seed, i as u64);
            let file = make_layout(g, &cfg.layout, layout_seed).with_context(|| format!("graph {id}"))?;
            dir.write(&format!("graphs/{id}.json"), format!("{}\n", to_json(g)?).as_bytes())?;
            let stamped = Stamped { seed, config_hash: hash.clone(), body: &file };
            dir.write(&format!("layouts/{id}.json"), &to_json_pretty(&stamped)?)?;
            entries.push(GraphEntry {
                id: id.clone(),
                nodes: g.node_count(),
                edges: g.edge_count(),
                layout_seed,
                stress: file.meta.stress,
                iterations: file.meta.iterations,
            });
            prepared.push(PreparedGraph { id: id.clone(), graph: g.clone(), layout: file.to_layout()? });
        }
        Ok(())
    })?;
    stages.push("layout");

    let plan = stage("plan", || {
        let plan = sample_plan(&prepared, &cfg.session, seed)?;
        // The plan carries its own seed and session hash.
        dir.write("plan.json", format!("{}\n", plan.to_json()?).as_bytes())?;
        dir.write("plan.csv", &csv_bytes(&plan.rows(), seed, &hash)?)?;
        Ok(plan)
    })?;
    stages.push("enumerate");
    stages.push("sample");

    stage("complexity", || {
        let rows = complexity_rows(&plan, &cfg.session.complexity);
        dir.write("complexity.csv", &csv_bytes(&rows, seed, &hash)?)?;
        let groups: Vec<GroupTotals> = plan
            .groups
            .iter()
            .map(|g| GroupTotals {
                group: g.group,
                units: g.units.clone(),
                totals: TotalComplexity::from_scores(g.sequence().filter(|t| !t.control).map(|t| &t.score)),
            })
            .collect();
        dir.write("complexity_totals.json", &to_json_pretty(&Stamped { seed, config_hash: hash.clone(), body: Totals { groups } })?)?;
        Ok(())
    })?;
    stages.push("score");

    stage("scene", || {
        let by_id: BTreeMap<&str, &PreparedGraph> = prepared.iter().map(|p| (p.id.as_str(), p)).collect();
        for t in plan.instances().values() {
            let pg = by_id[t.graph_id.as_str()];
            let mut scene = SceneDescription::new(&pg.graph, &pg.layout, [t.u, t.v], cfg.scene.colors.clone())?;
            scene.instance_id = Some(t.instance_id.clone());
            scene.task = Some(t.task);
            scene.barycenter_height = cfg.layout.barycenter_height;
            scene.seed = seed;
            scene.config_hash = hash.clone();
            dir.write(&scene_file_name(&t.instance_id), format!("{}\n", scene.to_json()?).as_bytes())?;
        }
        Ok(())
    })?;
    stages.push("scene");

    let responses = stage("evaluate", || {
        let rows = match (&cfg.evaluation.responses, cfg.evaluation.simulate) {
            (Some(p), _) => Some(read_responses(p)?),
            (None, true) => {
                let rows = simulate_responses(&plan, &cfg.evaluation.group_types, rng::derive(seed, 0x5157))?;
                dir.write("responses.csv", &csv_bytes(&rows, seed, &hash)?)?;
                Some(rows)
            }
            (None, false) => None,
        };
        if let Some(rows) = &rows {
            let mut report = evaluate(&plan, rows, cfg.evaluation.replicates, seed)?;
            report.config_hash = hash.clone();
            dir.write("report.json", &to_json_pretty(&report)?)?;
        }
        Ok(rows)
    })?;
    if responses.is_some() {
        stages.push("evaluate");
        stage("plot", || {
            let complexity = csv_bytes(&complexity_rows(&plan, &cfg.session.complexity), seed, &hash)?;
            let points = plot_points(std::str::from_utf8(&complexity)?, responses.as_deref().unwrap_or(&[]))?;
            dir.write("plot.svg", render(&points, &format!("seed {seed} config {hash}")).as_bytes())?;
            Ok(())
        })?;
        stages.push("plot");
    }

    let manifest = Manifest {
        tool: "tic",
        version: env!("CARGO_PKG_VERSION"),
        seed,
        config_hash: &hash,
        graphs: entries,
        stages,
        decisions: DECISIONS.to_vec(),
        files: dir.files(),
    };
    let bytes = to_json_pretty(&manifest)?;
    let path = out.join("manifest.json");
    std::fs::write(&path, &bytes)?;
    Ok((path, crate::io::sha256_hex(&bytes)))
}
