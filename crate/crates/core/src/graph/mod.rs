//! Labeled graph samples, datasets and structural statistics.

mod properties;
mod random;
mod significance;
mod tu;

use std::collections::HashSet;

use ndarray::Array2;

use crate::error::{arg_err, Result};

pub use properties::{
    avg_clustering_coefficient, avg_shortest_path, degree_kurtosis, largest_component_fraction,
};
pub use random::{erdos_renyi_gnm, erdos_renyi_gnp};
pub use significance::{
    property_significance, property_significance_with, welch_t_test, Property, PropertyReport,
    PropertyRow,
};
pub use tu::load_tu_dataset;

/// One graph-classification sample: undirected structure, node features and
/// a class label.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    num_nodes: usize,
    edges: Vec<(usize, usize)>,
    features: Array2<f64>,
    label: usize,
}

impl Graph {
    /// Builds a graph, rejecting self-loops, duplicate edges and out-of-range
    /// endpoints. Edges are stored with the smaller endpoint first.
    pub fn new(
        num_nodes: usize,
        edges: Vec<(usize, usize)>,
        features: Array2<f64>,
        label: usize,
    ) -> Result<Self> {
        if features.nrows() != num_nodes {
            return arg_err(format!(
                "feature matrix has {} rows for {} nodes",
                features.nrows(),
                num_nodes
            ));
        }
        if features.ncols() == 0 {
            return arg_err("feature dimension must be at least 1");
        }
        let mut seen = HashSet::with_capacity(edges.len());
        let mut canon = Vec::with_capacity(edges.len());
        for (u, v) in edges {
            if u >= num_nodes || v >= num_nodes {
                return arg_err(format!("edge ({u}, {v}) out of range for {num_nodes} nodes"));
            }
            if u == v {
                return arg_err(format!("self-loop on node {u}"));
            }
            let e = (u.min(v), u.max(v));
            if !seen.insert(e) {
                return arg_err(format!("duplicate edge ({}, {})", e.0, e.1));
            }
            canon.push(e);
        }
        Ok(Self {
            num_nodes,
            edges: canon,
            features,
            label,
        })
    }

    /// Graph with a single all-ones feature column.
    pub fn unfeatured(num_nodes: usize, edges: Vec<(usize, usize)>, label: usize) -> Result<Self> {
        Self::new(num_nodes, edges, Array2::ones((num_nodes, 1)), label)
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn features(&self) -> &Array2<f64> {
        &self.features
    }

    pub fn feat_dim(&self) -> usize {
        self.features.ncols()
    }

    pub fn label(&self) -> usize {
        self.label
    }

    pub fn with_features(&self, features: Array2<f64>) -> Result<Self> {
        Self::new(self.num_nodes, self.edges.clone(), features, self.label)
    }

    pub fn with_label(mut self, label: usize) -> Self {
        self.label = label;
        self
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.num_nodes];
        for &(u, v) in &self.edges {
            deg[u] += 1;
            deg[v] += 1;
        }
        deg
    }

    /// Adjacency lists, neighbors in edge-list order.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.num_nodes];
        for &(u, v) in &self.edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        adj
    }

    /// Relabels nodes so that old node `i` becomes `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.num_nodes {
            return arg_err("permutation length differs from node count");
        }
        let mut features = Array2::zeros(self.features.raw_dim());
        for (old, &new) in perm.iter().enumerate() {
            features.row_mut(new).assign(&self.features.row(old));
        }
        let edges = self.edges.iter().map(|&(u, v)| (perm[u], perm[v])).collect();
        Self::new(self.num_nodes, edges, features, self.label)
    }
}

/// A named collection of graphs sharing one feature space.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub name: String,
    pub graphs: Vec<Graph>,
    pub feat_dim: usize,
    pub num_classes: usize,
}

impl Dataset {
    pub fn new(name: impl Into<String>, graphs: Vec<Graph>, num_classes: usize) -> Result<Self> {
        let name = name.into();
        let feat_dim = graphs.first().map_or(1, Graph::feat_dim);
        if num_classes < 2 {
            return arg_err(format!("{name}: need at least 2 classes, got {num_classes}"));
        }
        for (i, g) in graphs.iter().enumerate() {
            if g.feat_dim() != feat_dim {
                return arg_err(format!("{name}: graph {i} has feature dim {}", g.feat_dim()));
            }
            if g.label() >= num_classes {
                return arg_err(format!("{name}: graph {i} label {} out of range", g.label()));
            }
        }
        Ok(Self {
            name,
            graphs,
            feat_dim,
            num_classes,
        })
    }

    pub fn len(&self) -> usize {
        self.graphs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graphs.is_empty()
    }

    pub fn avg_nodes(&self) -> f64 {
        self.graphs.iter().map(|g| g.num_nodes() as f64).sum::<f64>() / self.len() as f64
    }
}
