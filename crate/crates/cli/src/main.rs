//! `tic`: task-instance complexity for 3-D graph drawings.
//!
//! Every flag can also be set through an environment variable with the
//! `TIC_` prefix (`TIC_SEED`, `TIC_CONFIG`, `TIC_OUT`, `TIC_MU_NODE`,
//! `TIC_EDGE_NOISE`, `TIC_MODE`). Exit codes: 0 success, 1 any other error
//! (including usage errors), 2 missing input file.

mod config;
mod io;
mod pipeline;
mod plot;
mod simulate;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand};
use serde::Serialize;
use tic_core::complexity::{score_instance, EdgeNoise, MuNode, SignalMode};
use tic_core::graph::io::write_edge_list;
use tic_core::graph::{NodeId, NodePairCandidate, Task};
use tic_core::instances::{enumerate_candidates, filter_outliers, instance_id, sample_plan, PreparedGraph, SessionPlan};
use tic_core::scene::SceneDescription;
use tic_core::{rng, synth};

use crate::config::PipelineConfig;
use crate::io::{csv_bytes, emit, read_input, to_json_pretty, MissingInput, Stamped};
use crate::pipeline::{load_graph, load_layout, make_layout, stage};

#[derive(Parser)]
#[command(name = "tic", version, about = "Task-instance complexity for 3-D graph drawings")]
struct Cli {
    /// Master seed; overrides the config file.
    #[arg(long, global = true, env = "TIC_SEED")]
    seed: Option<u64>,
    /// Pipeline configuration (TOML).
    #[arg(long, global = true, env = "TIC_CONFIG")]
    config: Option<PathBuf>,
    /// Output file, or output directory for `pipeline` and `generate`.
    #[arg(long, global = true, env = "TIC_OUT")]
    out: Option<PathBuf>,
    /// Node contribution to region noise: diameter | zero.
    #[arg(long, global = true, env = "TIC_MU_NODE")]
    mu_node: Option<MuNode>,
    /// Edge contribution to region noise: full | clipped.
    #[arg(long, global = true, env = "TIC_EDGE_NOISE")]
    edge_noise: Option<EdgeNoise>,
    /// Shortest-path signal distances: absolute | relative.
    #[arg(long, global = true, env = "TIC_MODE")]
    mode: Option<SignalMode>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Stress layout of a graph, normalized into the view cube.
    Layout { graph: PathBuf },
    /// Eligible node pairs for a task with their controlled properties (CSV).
    Candidates {
        graph: PathBuf,
        layout: PathBuf,
        #[arg(long)]
        task: Task,
        /// Keep property outliers.
        #[arg(long)]
        no_filter: bool,
    },
    /// Signal and noise of node pairs (CSV). Scores all eligible pairs when no
    /// `--pair` is given.
    Complexity {
        graph: PathBuf,
        layout: PathBuf,
        #[arg(long)]
        task: Task,
        /// Node pair as `a,b` (repeatable).
        #[arg(long = "pair", value_parser = parse_pair)]
        pairs: Vec<(NodeId, NodeId)>,
    },
    /// Session plan for the graphs of the config file (JSON).
    Plan,
    /// Harmonized outcomes and paired comparisons (JSON).
    Evaluate {
        plan: PathBuf,
        responses: PathBuf,
        #[arg(long)]
        replicates: Option<usize>,
    },
    /// Scene description of one task instance (JSON).
    Scene {
        graph: PathBuf,
        layout: PathBuf,
        #[arg(long)]
        u: NodeId,
        #[arg(long)]
        v: NodeId,
        #[arg(long)]
        instance_id: Option<String>,
    },
    /// Scatter plots of responses against complexity (SVG).
    Plot { complexity: PathBuf, responses: PathBuf },
    /// All stages end to end into `--out`.
    Pipeline,
    /// Synthetic spatial graphs as edge lists into `--out`.
    Generate {
        #[arg(long, default_value_t = 10)]
        count: usize,
        #[arg(long, default_value_t = 70)]
        nodes: usize,
        #[arg(long, default_value_t = 0.08)]
        density: f64,
    },
}

fn parse_pair(s: &str) -> Result<(NodeId, NodeId), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected a,b, got '{s}'"))?;
    let n = |t: &str| t.trim().parse::<NodeId>().map_err(|e| format!("bad node id '{t}': {e}"));
    Ok((n(a)?, n(b)?))
}

fn settings(cli: &Cli) -> anyhow::Result<PipelineConfig> {
    let mut cfg = match &cli.config {
        Some(p) => {
            let mut c = PipelineConfig::from_toml(&read_input(p)?).with_context(|| format!("parsing {}", p.display()))?;
            c.resolve_paths(p.parent().unwrap_or(Path::new(".")));
            c
        }
        None => PipelineConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    let cx = &mut cfg.session.complexity;
    if let Some(m) = cli.mu_node {
        cx.mu_node = m;
    }
    if let Some(e) = cli.edge_noise {
        cx.edge_noise = e;
    }
    if let Some(m) = cli.mode {
        cx.mode = m;
    }
    Ok(cfg)
}

fn graph_id(path: &Path) -> String {
    path.file_stem().and_then(|s| s.to_str()).unwrap_or("graph").to_string()
}

#[derive(Serialize)]
struct CandidateRow {
    u: NodeId,
    v: NodeId,
    task: Task,
    answer: usize,
    local_density: f64,
    local_clustering: f64,
    degree_centrality: f64,
    path_betweenness: f64,
    euclidean_node_distance: f64,
    fill_ratio: f64,
}

fn run(cli: &Cli) -> anyhow::Result<()> {
    let cfg = settings(cli)?;
    let seed = cfg.seed;
    let hash = cfg.hash();
    let out = cli.out.as_deref();
    match &cli.cmd {
        Cmd::Layout { graph } => stage("layout", || {
            let g = load_graph(graph)?;
            let file = make_layout(&g, &cfg.layout, seed)?;
            emit(out, &to_json_pretty(&Stamped { seed, config_hash: hash.clone(), body: file })?)
        }),
        Cmd::Candidates { graph, layout, task, no_filter } => stage("candidates", || {
            let g = load_graph(graph)?;
            let l = load_layout(layout)?;
            let cands = enumerate_candidates(&g, &l, *task, &cfg.session.fill, cfg.session.complexity.path_cap)?;
            let cands = if *no_filter {
                cands
            } else {
                let (kept, report) = filter_outliers(cands, cfg.session.outlier_z)?;
                log::info!("kept {} of {} candidates", report.kept, report.input);
                kept
            };
            let rows: Vec<CandidateRow> = cands
                .iter()
                .map(|c| {
                    let p = &c.properties;
                    CandidateRow {
                        u: c.pair.u,
                        v: c.pair.v,
                        task: c.pair.task,
                        answer: c.pair.answer,
                        local_density: p.local_density,
                        local_clustering: p.local_clustering,
                        degree_centrality: p.degree_centrality,
                        path_betweenness: p.path_betweenness,
                        euclidean_node_distance: p.euclidean_node_distance,
                        fill_ratio: p.fill_ratio,
                    }
                })
                .collect();
            emit(out, &csv_bytes(&rows, seed, &hash)?)
        }),
        Cmd::Complexity { graph, layout, task, pairs } => stage("complexity", || {
            let g = load_graph(graph)?;
            let l = load_layout(layout)?;
            let cx = &cfg.session.complexity;
            let pairs: Vec<NodePairCandidate> = if pairs.is_empty() {
                enumerate_candidates(&g, &l, *task, &cfg.session.fill, cx.path_cap)?.into_iter().map(|c| c.pair).collect()
            } else {
                pairs.iter().map(|&(a, b)| NodePairCandidate::new(&g, a, b, *task)).collect::<Result<_, _>>()?
            };
            let gid = graph_id(graph);
            let mut rows = Vec::new();
            for p in pairs {
                let score = score_instance(&l, &g, p.task, p.u, p.v, cx)?;
                rows.push(tic_core::complexity::ComplexityRow {
                    instance_id: instance_id(&gid, p.task, p.u, p.v),
                    task: p.task,
                    u: p.u,
                    v: p.v,
                    answer: p.answer,
                    signal: score.signal,
                    noise: score.noise,
                    combined: score.combined(),
                    mu_node_mode: cx.mu_node,
                    clip_mode: cx.edge_noise,
                });
            }
            emit(out, &csv_bytes(&rows, seed, &hash)?)
        }),
        Cmd::Plan => {
            let graphs = stage("ingest", || pipeline::ingest(&cfg, seed))?;
            let prepared = stage("layout", || {
                graphs
                    .into_iter()
                    .enumerate()
                    .map(|(i, (id, graph))| {
                        let layout = make_layout(&graph, &cfg.layout, rng::derive(seed, i as u64))?.to_layout()?;
                        Ok(PreparedGraph { id, graph, layout })
                    })
                    .collect::<anyhow::Result<Vec<_>>>()
            })?;
            stage("plan", || {
                let plan = sample_plan(&prepared, &cfg.session, seed)?;
                emit(out, format!("{}\n", plan.to_json()?).as_bytes())
            })
        }
        Cmd::Evaluate { plan, responses, replicates } => stage("evaluate", || {
            let plan = SessionPlan::from_json(&read_input(plan)?).with_context(|| format!("parsing {}", plan.display()))?;
            let rows = pipeline::read_responses(responses)?;
            let mut report = pipeline::evaluate(&plan, &rows, replicates.unwrap_or(cfg.evaluation.replicates), seed)?;
            report.config_hash = hash.clone();
            emit(out, &to_json_pretty(&report)?)
        }),
        Cmd::Scene { graph, layout, u, v, instance_id } => stage("scene", || {
            let g = load_graph(graph)?;
            let l = load_layout(layout)?;
            let mut scene = SceneDescription::new(&g, &l, [*u, *v], cfg.scene.colors.clone())?;
            scene.instance_id = instance_id.clone();
            scene.barycenter_height = cfg.layout.barycenter_height;
            scene.seed = seed;
            scene.config_hash = hash.clone();
            emit(out, format!("{}\n", scene.to_json()?).as_bytes())
        }),
        Cmd::Plot { complexity, responses } => stage("plot", || {
            let table = read_input(complexity)?;
            let rows = pipeline::read_responses(responses)?;
            let points = pipeline::plot_points(&table, &rows)?;
            emit(out, plot::render(&points, &format!("seed {seed} config {hash}")).as_bytes())
        }),
        Cmd::Pipeline => {
            let out = out.ok_or_else(|| anyhow!("pipeline needs --out <dir>"))?;
            if cli.config.is_none() {
                bail!("pipeline needs --config <file>");
            }
            let (path, sha) = pipeline::run_pipeline(&cfg, seed, out)?;
            println!("{}  {}", sha, path.display());
            Ok(())
        }
        Cmd::Generate { count, nodes, density } => stage("generate", || {
            let out = out.ok_or_else(|| anyhow!("generate needs --out <dir>"))?;
            std::fs::create_dir_all(out)?;
            for i in 0..*count {
                let g = synth::spatial_graph(*nodes, *density, rng::derive(seed, i as u64));
                let path = out.join(format!("g{:02}.txt", i + 1));
                let header = format!("# synthetic spatial graph, seed {seed}, index {i}\n");
                std::fs::write(&path, header + &write_edge_list(&g))?;
            }
            Ok(())
        }),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    // Usage errors exit with 1 so that 2 always means a missing input file.
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.chain().any(|c| c.downcast_ref::<MissingInput>().is_some()) {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
