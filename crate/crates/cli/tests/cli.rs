use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tic_core::layout::LayoutFile;
use tic_core::scene::SceneDescription;

fn tic() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_tic"));
    for var in ["TIC_SEED", "TIC_CONFIG", "TIC_OUT", "TIC_MU_NODE", "TIC_EDGE_NOISE", "TIC_MODE"] {
        c.env_remove(var);
    }
    c
}

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn run(cmd: &mut Command) -> Output {
    let out = cmd.output().expect("binary runs");
    if !out.status.success() {
        eprintln!("stderr: {}", String::from_utf8_lossy(&out.stderr));
    }
    out
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn missing_input_exits_with_two_and_names_the_path() {
    let o = run(tic().args(["layout", "/definitely/not/here.txt"]));
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("/definitely/not/here.txt"));

    let o = run(tic().args(["--config", "/no/such/config.toml", "--out", "/tmp/unused", "pipeline"]));
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("/no/such/config.toml"));
}

#[test]
fn missing_graph_listed_in_config_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    std::fs::write(&cfg, "graphs = [\"gone.txt\"]\n").unwrap();
    let o = run(tic().arg("--config").arg(&cfg).arg("--out").arg(dir.path().join("o")).arg("pipeline"));
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("gone.txt"));
}

#[test]
fn stage_errors_are_tagged() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.txt"), "0 1 2\n").unwrap();
    let cfg = dir.path().join("c.toml");
    std::fs::write(&cfg, "graphs = [\"bad.txt\"]\n").unwrap();
    let o = run(tic().arg("--config").arg(&cfg).arg("--out").arg(dir.path().join("o")).arg("pipeline"));
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("stage ingest"), "{}", stderr(&o));
}

#[test]
fn usage_errors_are_not_confused_with_missing_input() {
    let o = run(tic().args(["--mu-node", "sideways", "plan"]));
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn pipeline_stamps_every_file_and_reruns_identically() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = fixtures().join("pipeline.toml");
    let mut hashes = Vec::new();
    for name in ["a", "b"] {
        let out = dir.path().join(name);
        let o = run(tic().arg("--config").arg(&cfg).arg("--out").arg(&out).arg("pipeline"));
        assert!(o.status.success());
        hashes.push(std::fs::read(out.join("manifest.json")).unwrap());
    }
    assert_eq!(hashes[0], hashes[1]);

    let out = dir.path().join("a");
    let manifest: serde_json::Value = serde_json::from_slice(&hashes[0]).unwrap();
    let seed = manifest["seed"].as_u64().unwrap();
    let config_hash = manifest["config_hash"].as_str().unwrap().to_string();
    let files = manifest["files"].as_object().unwrap();
    for want in ["plan.json", "plan.csv", "complexity.csv", "responses.csv", "report.json", "plot.svg", "layouts/g01.json"] {
        assert!(files.contains_key(want), "{want} missing from manifest");
    }
    assert!(files.keys().any(|k| k.starts_with("scenes/")));
    let manifest_text = String::from_utf8(hashes[0].clone()).unwrap();
    assert!(!manifest_text.contains(dir.path().to_str().unwrap()), "manifest leaks absolute paths");

    for rel in files.keys() {
        let text = std::fs::read_to_string(out.join(rel)).unwrap();
        if rel.ends_with(".csv") {
            let mut r = csv::Reader::from_reader(text.as_bytes());
            let h = r.headers().unwrap().clone();
            let (si, hi) = (h.iter().position(|c| c == "seed").unwrap(), h.iter().position(|c| c == "config_hash").unwrap());
            for rec in r.records() {
                let rec = rec.unwrap();
                assert_eq!(rec[si].parse::<u64>().unwrap(), seed, "{rel}");
                assert!(!rec[hi].is_empty(), "{rel}");
            }
        } else if rel.starts_with("graphs/") {
            // Plain graph exports; the graph id is the file name.
            continue;
        } else if rel.ends_with(".json") {
            let v: serde_json::Value = serde_json::from_str(&text).unwrap();
            assert_eq!(v["seed"].as_u64(), Some(seed), "{rel}");
            assert!(v["config_hash"].as_str().is_some_and(|h| !h.is_empty()), "{rel}");
        } else if rel.ends_with(".svg") {
            assert!(text.contains(&format!("seed {seed} config {config_hash}")), "{rel}");
        }
    }
}

#[test]
fn scene_round_trips_layout_positions() {
    let dir = tempfile::tempdir().unwrap();
    let graph = fixtures().join("graphs/g03.txt");
    let layout = dir.path().join("g03.json");
    assert!(run(tic().args(["--seed", "4", "layout"]).arg(&graph).arg("--out").arg(&layout)).status.success());
    let scene = dir.path().join("scene.json");
    let o = run(tic().args(["--seed", "4", "scene"]).arg(&graph).arg(&layout).args(["--u", "1", "--v", "5", "--out"]).arg(&scene));
    assert!(o.status.success());

    let lf: LayoutFile = serde_json::from_str(&std::fs::read_to_string(&layout).unwrap()).unwrap();
    let s = SceneDescription::from_json(&std::fs::read_to_string(&scene).unwrap()).unwrap();
    assert_eq!(s.selected, [1, 5]);
    assert_eq!(s.seed, 4);
    assert_eq!(lf.positions.len(), s.nodes.len());
    for (p, n) in lf.positions.iter().zip(&s.nodes) {
        for k in 0..3 {
            assert!((p[k] - n.position[k]).abs() <= 1e-9);
        }
    }
    let again = SceneDescription::from_json(&s.to_json().unwrap()).unwrap();
    assert_eq!(again, s);
}

#[test]
fn env_variables_mirror_flags() {
    let graph = fixtures().join("graphs/g02.txt");
    let by_flag = run(tic().args(["--seed", "9", "layout"]).arg(&graph));
    let by_env = run(tic().env("TIC_SEED", "9").arg("layout").arg(&graph));
    let other = run(tic().env("TIC_SEED", "10").arg("layout").arg(&graph));
    assert!(by_flag.status.success() && by_env.status.success() && other.status.success());
    assert_eq!(by_flag.stdout, by_env.stdout);
    assert_ne!(by_flag.stdout, other.stdout);
}

#[test]
fn complexity_flags_change_the_noise() {
    let dir = tempfile::tempdir().unwrap();
    let graph = fixtures().join("graphs/g01.txt");
    let layout = dir.path().join("l.json");
    assert!(run(tic().arg("layout").arg(&graph).arg("--out").arg(&layout)).status.success());
    let score = |extra: &[&str]| {
        let o = run(tic().args(extra).arg("complexity").arg(&graph).arg(&layout).args(["--task", "SP", "--pair", "0,20"]));
        assert!(o.status.success());
        let mut r = csv::Reader::from_reader(o.stdout.as_slice());
        let h = r.headers().unwrap().clone();
        let rec = r.records().next().unwrap().unwrap();
        let col = |n: &str| rec[h.iter().position(|c| c == n).unwrap()].to_string();
        (col("noise").parse::<f64>().unwrap(), col("mu_node_mode"), col("clip_mode"))
    };
    let (full, mu, clip) = score(&[]);
    assert_eq!((mu.as_str(), clip.as_str()), ("diameter", "full"));
    let (zero, mu, _) = score(&["--mu-node", "zero"]);
    assert_eq!(mu, "zero");
    assert!(zero <= full);
    let (clipped, _, clip) = score(&["--edge-noise", "clipped"]);
    assert_eq!(clip, "clipped");
    assert!(clipped <= full);
}

#[test]
fn plot_handles_empty_and_orphan_responses() {
    let dir = tempfile::tempdir().unwrap();
    let complexity = dir.path().join("c.csv");
    std::fs::write(&complexity, "instance_id,task,u,v,answer,signal,noise,combined,mu_node_mode,clip_mode\ng:CN:1-2,CN,1,2,3,0.5,2.0,1.19,diameter,full\n").unwrap();
    let empty = dir.path().join("r0.csv");
    std::fs::write(&empty, "unit_id,group_type,instance_id,member,answer,time_s\n").unwrap();
    let o = run(tic().arg("plot").arg(&complexity).arg(&empty));
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stdout).contains("no responses to plot"));

    let orphan = dir.path().join("r1.csv");
    std::fs::write(&orphan, "unit_id,group_type,instance_id,member,answer,time_s\nU1,individual,g:SP:7-9,1,3,12.0\n").unwrap();
    let o = run(tic().arg("plot").arg(&complexity).arg(&orphan));
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("g:SP:7-9"));
}

/// Tick labels of the noise panels must bracket the natural log of the noise
/// values, and the signal panels their raw values.
#[test]
fn plot_axes_cover_the_data() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = run(tic().arg("--config").arg(fixtures().join("pipeline.toml")).arg("--out").arg(&out).arg("pipeline"));
    assert!(o.status.success());
    let svg = std::fs::read_to_string(out.join("plot.svg")).unwrap();

    let mut r = csv::Reader::from_path(out.join("complexity.csv")).unwrap();
    let h = r.headers().unwrap().clone();
    let (si, ni) = (h.iter().position(|c| c == "signal").unwrap(), h.iter().position(|c| c == "noise").unwrap());
    let (mut ln_lo, mut ln_hi, mut s_lo, mut s_hi) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for rec in r.records() {
        let rec = rec.unwrap();
        let (s, n): (f64, f64) = (rec[si].parse().unwrap(), rec[ni].parse().unwrap());
        s_lo = s_lo.min(s);
        s_hi = s_hi.max(s);
        if n > 0.0 {
            ln_lo = ln_lo.min(n.ln());
            ln_hi = ln_hi.max(n.ln());
        }
    }
    for (class, lo, hi) in [("time-noise", ln_lo, ln_hi), ("time-signal", s_lo, s_hi)] {
        let start = svg.find(&format!("class=\"panel {class}\"")).unwrap();
        let end = start + svg[start..].find("</g>").unwrap();
        let ticks: Vec<f64> = svg[start..end]
            .split("class=\"tick-x\" data-value=\"")
            .skip(1)
            .map(|s| s[..s.find('"').unwrap()].parse().unwrap())
            .collect();
        assert!(ticks.len() >= 2, "{class}");
        assert!(ticks[0] <= lo && *ticks.last().unwrap() >= hi, "{class}: {ticks:?} vs [{lo}, {hi}]");
        let span = ticks.last().unwrap() - ticks[0];
        assert!(span <= 4.0 * (hi - lo).max(1e-6) + 1e-9, "{class}: ticks far wider than data");
    }
}

#[test]
fn evaluate_and_plan_commands_match_the_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = fixtures().join("pipeline.toml");
    let out = dir.path().join("run");
    assert!(run(tic().arg("--config").arg(&cfg).arg("--out").arg(&out).arg("pipeline")).status.success());
    let plan = run(tic().arg("--config").arg(&cfg).arg("plan"));
    assert!(plan.status.success());
    assert_eq!(plan.stdout, std::fs::read(out.join("plan.json")).unwrap());

    let report = run(tic().arg("--config").arg(&cfg).arg("evaluate").arg(out.join("plan.json")).arg(out.join("responses.csv")));
    assert!(report.status.success());
    assert_eq!(report.stdout, std::fs::read(out.join("report.json")).unwrap());
}
