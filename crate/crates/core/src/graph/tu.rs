//! Reader for the TU graph-classification text layout.
//!
//! `<name>_A.txt` holds one `u, v` line per directed edge with 1-based global
//! node ids, `<name>_graph_indicator.txt` one 1-based graph id per node, and
//! `<name>_graph_labels.txt` one class value per graph. Node labels and
//! attributes are optional.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use ndarray::Array2;

use super::{Dataset, Graph};
use crate::error::{Error, Result};

fn read_required(dir: &Path, name: &str, suffix: &str) -> Result<String> {
    let path = dir.join(format!("{name}_{suffix}.txt"));
    if !path.is_file() {
        return Err(Error::MissingFile(path));
    }
    Ok(fs::read_to_string(path)?)
}

fn read_optional(dir: &Path, name: &str, suffix: &str) -> Result<Option<String>> {
    let path = dir.join(format!("{name}_{suffix}.txt"));
    if path.is_file() {
        Ok(Some(fs::read_to_string(path)?))
    } else {
        Ok(None)
    }
}

fn corrupt(name: &str, reason: impl Into<String>) -> Error {
    Error::CorruptDataset {
        dataset: name.to_string(),
        reason: reason.into(),
    }
}

fn parse_ints(name: &str, file: &str, text: &str) -> Result<Vec<i64>> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .enumerate()
        .map(|(i, l)| {
            l.parse::<i64>()
                .map_err(|_| corrupt(name, format!("{file} line {}: bad integer {l:?}", i + 1)))
        })
        .collect()
}

/// Loads `<root>/<name>/<name>_*.txt`, falling back to `<root>/<name>_*.txt`
/// when no per-dataset subdirectory exists.
pub fn load_tu_dataset(root: &Path, name: &str) -> Result<Dataset> {
    let nested = root.join(name);
    let dir = if nested.is_dir() { nested } else { root.to_path_buf() };

    let a_txt = read_required(&dir, name, "A")?;
    let indicator_txt = read_required(&dir, name, "graph_indicator")?;
    let labels_txt = read_required(&dir, name, "graph_labels")?;
    let node_labels_txt = read_optional(&dir, name, "node_labels")?;
    let attrs_txt = read_optional(&dir, name, "node_attributes")?;

    let indicator = parse_ints(name, "graph_indicator", &indicator_txt)?;
    let graph_labels = parse_ints(name, "graph_labels", &labels_txt)?;
    let num_graphs = graph_labels.len();
    let total_nodes = indicator.len();

    // Per-graph node ranges; TU files list nodes grouped by graph.
    let mut graph_of = Vec::with_capacity(total_nodes);
    let mut local_index = Vec::with_capacity(total_nodes);
    let mut counts = vec![0usize; num_graphs];
    for (node, &gid) in indicator.iter().enumerate() {
        if gid < 1 || gid as usize > num_graphs {
            return Err(corrupt(
                name,
                format!("node {} assigned to graph {gid} of {num_graphs}", node + 1),
            ));
        }
        let g = gid as usize - 1;
        graph_of.push(g);
        local_index.push(counts[g]);
        counts[g] += 1;
    }

    let mut edge_sets: Vec<BTreeSet<(usize, usize)>> = vec![BTreeSet::new(); num_graphs];
    for (i, line) in a_txt.lines().map(str::trim).filter(|l| !l.is_empty()).enumerate() {
        let mut parts = line.split(',').map(str::trim);
        let (Some(a), Some(b), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(corrupt(name, format!("A line {}: expected `u, v`", i + 1)));
        };
        let parse = |s: &str| -> Result<usize> {
            s.parse::<usize>()
                .map_err(|_| corrupt(name, format!("A line {}: bad node id {s:?}", i + 1)))
        };
        let (u, v) = (parse(a)?, parse(b)?);
        if u == 0 || v == 0 || u > total_nodes || v > total_nodes {
            return Err(corrupt(
                name,
                format!("A line {}: node index out of range 1..={total_nodes}", i + 1),
            ));
        }
        let (u, v) = (u - 1, v - 1);
        if graph_of[u] != graph_of[v] {
            return Err(corrupt(name, format!("A line {}: edge crosses graphs", i + 1)));
        }
        if u == v {
            continue;
        }
        let (lu, lv) = (local_index[u], local_index[v]);
        edge_sets[graph_of[u]].insert((lu.min(lv), lu.max(lv)));
    }

    let node_labels = match &node_labels_txt {
        Some(t) => {
            let v = parse_ints(name, "node_labels", t)?;
            if v.len() != total_nodes {
                return Err(corrupt(name, "node_labels length differs from node count"));
            }
            Some(v)
        }
        None => None,
    };
    let attrs = match &attrs_txt {
        Some(t) => Some(parse_attributes(name, t, total_nodes)?),
        None => None,
    };

    let label_vocab: Vec<i64> = node_labels
        .as_ref()
        .map(|v| v.iter().copied().collect::<BTreeSet<_>>().into_iter().collect())
        .unwrap_or_default();
    let attr_dim = attrs.as_ref().map_or(0, |a| a[0].len());
    let feat_dim = match (attrs.is_some(), node_labels.is_some()) {
        (false, false) => 1,
        _ => attr_dim + label_vocab.len(),
    };

    let mut features: Vec<Array2<f64>> =
        counts.iter().map(|&n| Array2::zeros((n, feat_dim))).collect();
    for node in 0..total_nodes {
        let mut row = features[graph_of[node]].row_mut(local_index[node]);
        if let Some(a) = &attrs {
            for (k, &x) in a[node].iter().enumerate() {
                row[k] = x;
            }
        }
        if let Some(l) = &node_labels {
            let k = label_vocab.binary_search(&l[node]).expect("label in vocabulary");
            row[attr_dim + k] = 1.0;
        }
        if attrs.is_none() && node_labels.is_none() {
            row[0] = 1.0;
        }
    }

    let class_vocab: Vec<i64> = graph_labels
        .iter()
        .copied()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let mut graphs = Vec::with_capacity(num_graphs);
    for (g, (edges, feats)) in edge_sets.into_iter().zip(features).enumerate() {
        let label = class_vocab.binary_search(&graph_labels[g]).expect("class in vocabulary");
        let graph = Graph::new(counts[g], edges.into_iter().collect(), feats, label)
            .map_err(|e| corrupt(name, format!("graph {}: {e}", g + 1)))?;
        graphs.push(graph);
    }
    Dataset::new(name, graphs, class_vocab.len().max(2))
}

fn parse_attributes(name: &str, text: &str, total_nodes: usize) -> Result<Vec<Vec<f64>>> {
    let rows: Vec<Vec<f64>> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .enumerate()
        .map(|(i, l)| {
            l.split(',')
                .map(|s| {
                    s.trim().parse::<f64>().map_err(|_| {
                        corrupt(name, format!("node_attributes line {}: bad value {s:?}", i + 1))
                    })
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;
    if rows.len() != total_nodes {
        return Err(corrupt(name, "node_attributes length differs from node count"));
    }
    let dim = rows[0].len();
    if rows.iter().any(|r| r.len() != dim) {
        return Err(corrupt(name, "ragged node_attributes rows"));
    }
    Ok(rows)
}
