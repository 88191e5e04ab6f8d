//! Graph ingestion and export.
//!
//! Two formats are supported:
//!
//! * Edge lists: UTF-8 text, one whitespace-separated `a b` pair per line.
//!   Text after `#` is ignored. Node tokens are arbitrary and are remapped
//!   to dense ids in order of first appearance.
//! * JSON: `{"nodes": [...], "edges": [[a, b], ...]}` where edge endpoints
//!   refer to entries of `nodes` by value (numbers or strings).
//!
//! Self-loops and repeated edges are dropped with a warning. Original tokens
//! become node labels.

use std::collections::HashMap;

use log::warn;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{Graph, NodeId};
use crate::{Error, Result};

/// A parsed graph plus the original token of every dense node id.
#[derive(Clone, Debug)]
pub struct Ingested {
    pub graph: Graph,
    pub original_ids: Vec<String>,
    pub dropped_self_loops: usize,
    pub dropped_duplicates: usize,
}

#[derive(Default)]
struct Builder {
    index: HashMap<String, NodeId>,
    tokens: Vec<String>,
    edges: Vec<(NodeId, NodeId)>,
}

impl Builder {
    fn node(&mut self, token: &str) -> NodeId {
        if let Some(&id) = self.index.get(token) {
            return id;
        }
        let id = self.tokens.len();
        self.index.insert(token.to_owned(), id);
        self.tokens.push(token.to_owned());
        id
    }

    fn finish(self) -> Result<Ingested> {
        let mut loops = 0;
        let mut edges: Vec<_> = self
            .edges
            .into_iter()
            .filter(|&(a, b)| {
                loops += usize::from(a == b);
                a != b
            })
            .map(|(a, b)| (a.min(b), a.max(b)))
            .collect();
        let before = edges.len();
        edges.sort_unstable();
        edges.dedup();
        let duplicates = before - edges.len();
        if loops > 0 {
            warn!("dropped {loops} self-loop(s)");
        }
        if duplicates > 0 {
            warn!("dropped {duplicates} repeated edge(s)");
        }
        let graph = Graph::with_labels(self.tokens.clone(), edges)?;
        Ok(Ingested { graph, original_ids: self.tokens, dropped_self_loops: loops, dropped_duplicates: duplicates })
    }
}

pub fn parse_edge_list(text: &str) -> Result<Ingested> {
    let mut b = Builder::default();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        match (parts.next(), parts.next(), parts.next()) {
            (Some(x), Some(y), None) => {
                let (a, c) = (b.node(x), b.node(y));
                b.edges.push((a, c));
            }
            _ => {
                return Err(Error::Parse { line: i + 1, message: format!("expected two node ids, got '{line}'") });
            }
        }
    }
    b.finish()
}

pub fn write_edge_list(g: &Graph) -> String {
    let mut out = String::new();
    for &(a, b) in g.edges() {
        out.push_str(g.label(a));
        out.push(' ');
        out.push_str(g.label(b));
        out.push('\n');
    }
    out
}

#[derive(Serialize, Deserialize)]
struct JsonGraph {
    nodes: Vec<Value>,
    edges: Vec<[Value; 2]>,
}

fn token(v: &Value) -> Result<String> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) => Ok(n.to_string()),
        other => Err(Error::InvalidArgument(format!("node id must be a number or string, got {other}"))),
    }
}

pub fn parse_json(text: &str) -> Result<Ingested> {
    let doc: JsonGraph = serde_json::from_str(text)?;
    let mut b = Builder::default();
    for node in &doc.nodes {
        let t = token(node)?;
        if b.index.contains_key(&t) {
            return Err(Error::InvalidArgument(format!("node '{t}' listed twice")));
        }
        b.node(&t);
    }
    for [x, y] in &doc.edges {
        let (x, y) = (token(x)?, token(y)?);
        let lookup = |t: &str| {
            b.index
                .get(t)
                .copied()
                .ok_or_else(|| Error::InvalidArgument(format!("edge refers to unknown node '{t}'")))
        };
        let pair = (lookup(&x)?, lookup(&y)?);
        b.edges.push(pair);
    }
    b.finish()
}

/// JSON export; numeric labels are written as numbers.
pub fn to_json(g: &Graph) -> Result<String> {
    let mut seen = HashMap::new();
    for (i, l) in g.labels().iter().enumerate() {
        if let Some(j) = seen.insert(l.as_str(), i) {
            return Err(Error::InvalidArgument(format!("label '{l}' shared by nodes {j} and {i}")));
        }
    }
    let value = |i: NodeId| {
        let l = g.label(i);
        l.parse::<u64>().map(Value::from).unwrap_or_else(|_| Value::from(l))
    };
    let doc = JsonGraph {
        nodes: (0..g.node_count()).map(value).collect(),
        edges: g.edges().iter().map(|&(a, b)| [value(a), value(b)]).collect(),
    };
    Ok(serde_json::to_string(&doc)?)
}

/// Picks the format from the first non-blank character.
pub fn parse_auto(text: &str) -> Result<Ingested> {
    if text.trim_start().starts_with('{') {
        parse_json(text)
    } else {
        parse_edge_list(text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edge_list_remaps_and_cleans() {
        let text = "# header\n10 20\n20 30 # trailing\n\n30 10\n20 10\n40 40\n";
        let ing = parse_edge_list(text).unwrap();
        assert_eq!(ing.original_ids, ["10", "20", "30", "40"]);
        assert_eq!(ing.graph.edges(), [(0, 1), (0, 2), (1, 2)]);
        assert_eq!((ing.dropped_self_loops, ing.dropped_duplicates), (1, 1));
        assert_eq!(ing.graph.label(2), "30");
    }

    #[test]
    fn edge_list_reports_bad_line() {
        let err = parse_edge_list("1 2\n3\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
    }

    #[test]
    fn json_round_trip() {
        let text = r#"{"nodes": [5, "x", 7], "edges": [[5, "x"], ["x", 7]]}"#;
        let ing = parse_json(text).unwrap();
        assert_eq!(ing.graph.edges(), [(0, 1), (1, 2)]);
        let again = parse_json(&to_json(&ing.graph).unwrap()).unwrap();
        assert_eq!(again.graph, ing.graph);
        assert!(parse_json(r#"{"nodes": [1], "edges": [[1, 2]]}"#).is_err());
        assert_eq!(parse_auto(&write_edge_list(&ing.graph)).unwrap().graph.edge_count(), 2);
    }
}
