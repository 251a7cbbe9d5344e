use ndarray::Array2;

use crate::error::{arg_err, Result};
use crate::graph::Graph;

/// Replaces node features with one-hot degrees of width `max_degree + 1`;
/// higher degrees share the top bucket.
pub fn one_hot_degree_features(graph: &Graph, max_degree: usize) -> Result<Graph> {
    if max_degree == 0 {
        return arg_err("max_degree must be at least 1");
    }
    let mut x = Array2::zeros((graph.num_nodes(), max_degree + 1));
    for (v, d) in graph.degrees().into_iter().enumerate() {
        x[[v, d.min(max_degree)]] = 1.0;
    }
    graph.with_features(x)
}
