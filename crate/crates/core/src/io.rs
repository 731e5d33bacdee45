//! Text formats: edge lists, JSON graphs, partition CSV, trajectory CSV.
//!
//! Edge list: one edge per line, whitespace- or comma-separated
//! `src dst [weight]` with a default weight of 1.0. Lines starting with `#`
//! are ignored; a line with a single token declares an isolated node.

use crate::dynamics::Trajectory;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::partition::Partition;
use crate::real::Real;
use serde::Deserialize;

pub fn parse_edge_list<T: Real>(text: &str) -> Result<Graph<T>> {
    let mut nodes: Vec<String> = Vec::new();
    let mut edges: Vec<(String, String, T)> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = line
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .collect();
        match tokens.len() {
            1 => nodes.push(tokens[0].to_string()),
            2 | 3 => {
                let w = if tokens.len() == 3 {
                    parse_weight(tokens[2], lineno + 1)?
                } else {
                    T::one()
                };
                edges.push((tokens[0].to_string(), tokens[1].to_string(), w));
            }
            _ => {
                return Err(Error::Parse {
                    line: lineno + 1,
                    msg: format!("expected `src dst [weight]`, got {:?}", line),
                })
            }
        }
    }
    Graph::from_named_edges(&nodes, &edges)
}

fn parse_weight<T: Real>(token: &str, line: usize) -> Result<T> {
    // U+2212 minus sign appears in some exported data
    let cleaned = token.replace('\u{2212}', "-");
    let value: f64 = cleaned.parse().map_err(|_| Error::Parse {
        line,
        msg: format!("bad weight {:?}", token),
    })?;
    Ok(T::cast(value))
}

#[derive(Deserialize)]
struct JsonGraph {
    nodes: Vec<String>,
    edges: Vec<JsonEdge>,
}

#[derive(Deserialize)]
struct JsonEdge {
    source: String,
    target: String,
    #[serde(default = "default_weight")]
    weight: f64,
}

fn default_weight() -> f64 {
    1.0
}

/// JSON graph: `{"nodes": [string], "edges": [{"source", "target", "weight"}]}`.
/// Edges must reference listed nodes.
pub fn parse_json_graph<T: Real>(text: &str) -> Result<Graph<T>> {
    let parsed: JsonGraph = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        msg: e.to_string(),
    })?;
    let index: std::collections::HashMap<&str, usize> = parsed
        .nodes
        .iter()
        .enumerate()
        .map(|(i, n)| (n.as_str(), i))
        .collect();
    let mut edges = Vec::with_capacity(parsed.edges.len());
    for e in &parsed.edges {
        let i = *index
            .get(e.source.as_str())
            .ok_or_else(|| Error::UnknownNode(e.source.clone()))?;
        let j = *index
            .get(e.target.as_str())
            .ok_or_else(|| Error::UnknownNode(e.target.clone()))?;
        edges.push((i, j, T::cast(e.weight)));
    }
    Graph::new(parsed.nodes, edges)
}

/// Loads a graph from a file path or the name of a bundled dataset.
pub fn load_graph<T: Real>(source: &str) -> Result<Graph<T>> {
    if source == "karate" {
        return Ok(crate::datasets::karate());
    }
    let text = std::fs::read_to_string(source).map_err(|e| Error::Parse {
        line: 0,
        msg: format!("cannot read {:?}: {}", source, e),
    })?;
    if source.ends_with(".json") {
        parse_json_graph(&text)
    } else {
        parse_edge_list(&text)
    }
}

/// Partition CSV with header `node,cell`, one row per node.
pub fn parse_partition_csv<T: Real>(text: &str, graph: &Graph<T>) -> Result<Partition> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| {
        let t = l.trim();
        !t.is_empty() && !t.starts_with('#')
    });
    match lines.next() {
        Some((_, header)) if header.trim() == "node,cell" => {}
        Some((lineno, header)) => {
            return Err(Error::Parse {
                line: lineno + 1,
                msg: format!("expected header `node,cell`, got {:?}", header.trim()),
            })
        }
        None => {
            return Err(Error::Parse {
                line: 1,
                msg: "empty partition file".into(),
            })
        }
    }
    let mut labels: Vec<Option<String>> = vec![None; graph.n()];
    for (lineno, line) in lines {
        let parts: Vec<&str> = line.trim().split(',').collect();
        if parts.len() != 2 {
            return Err(Error::Parse {
                line: lineno + 1,
                msg: format!("expected `node,cell`, got {:?}", line.trim()),
            });
        }
        let idx = graph
            .index_of(parts[0].trim())
            .ok_or_else(|| Error::UnknownNode(parts[0].trim().to_string()))?;
        labels[idx] = Some(parts[1].trim().to_string());
    }
    if let Some(missing) = labels.iter().position(|l| l.is_none()) {
        return Err(Error::InvalidPartition(format!(
            "node {:?} has no cell assignment",
            graph.node_names()[missing]
        )));
    }
    let labels: Vec<String> = labels.into_iter().map(|l| l.unwrap()).collect();
    Partition::from_labels(&labels)
}

pub fn partition_to_csv<T: Real>(p: &Partition, graph: &Graph<T>) -> String {
    let mut out = String::from("node,cell\n");
    for (i, name) in graph.node_names().iter().enumerate() {
        out.push_str(&format!("{},{}\n", name, p.cell_of(i)));
    }
    out
}

pub fn edge_list_to_string<T: Real>(graph: &Graph<T>) -> String {
    let names = graph.node_names();
    let mut out = String::new();
    let mut touched = vec![false; graph.n()];
    for e in graph.edges() {
        touched[e.i] = true;
        touched[e.j] = true;
        out.push_str(&format!("{} {} {}\n", names[e.i], names[e.j], e.weight));
    }
    for (i, t) in touched.iter().enumerate() {
        if !t {
            out.push_str(&format!("{}\n", names[i]));
        }
    }
    out
}

/// Trajectory CSV: header `t,<node ids...>`, one row per sample.
pub fn trajectory_to_csv<T: Real>(traj: &Trajectory<T>, names: &[String]) -> String {
    let mut out = String::from("t");
    for name in names {
        out.push(',');
        out.push_str(name);
    }
    out.push('\n');
    for (row, &t) in traj.times().iter().enumerate() {
        out.push_str(&format!("{}", t.as_f64()));
        for col in 0..traj.states().ncols() {
            out.push_str(&format!(",{}", traj.states()[(row, col)].as_f64()));
        }
        out.push('\n');
    }
    out
}
