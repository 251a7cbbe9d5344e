//! Simple Graph Convolution: `softmax(L^K X Theta)` with the symmetrically
//! normalized, self-looped adjacency `L = D^-1/2 (A + I) D^-1/2`.

use ndarray::{Array2, Axis};
use rand::Rng as _;

use super::loss::softmax_cross_entropy;
use crate::error::{arg_err, Result};
use crate::graph::Graph;
use crate::rng;

#[derive(Debug, Clone, PartialEq)]
pub struct SgcModel {
    pub hops: usize,
    pub theta: Array2<f64>,
}

/// Dense `D^-1/2 (A + I) D^-1/2`.
pub fn normalized_adjacency(graph: &Graph) -> Array2<f64> {
    let n = graph.num_nodes();
    let mut a = Array2::<f64>::eye(n);
    for &(u, v) in graph.edges() {
        a[[u, v]] = 1.0;
        a[[v, u]] = 1.0;
    }
    let inv_sqrt: Vec<f64> = a.sum_axis(Axis(1)).iter().map(|d| 1.0 / d.sqrt()).collect();
    for ((i, j), x) in a.indexed_iter_mut() {
        *x *= inv_sqrt[i] * inv_sqrt[j];
    }
    a
}

/// `L^K X`.
pub fn propagate(graph: &Graph, hops: usize) -> Array2<f64> {
    let l = normalized_adjacency(graph);
    let mut x = graph.features().clone();
    for _ in 0..hops {
        x = l.dot(&x);
    }
    x
}

fn check_labels(n: usize, labels: &[usize]) -> Result<usize> {
    if n == 0 {
        return arg_err("SGC needs a nonempty graph");
    }
    if labels.len() != n {
        return arg_err(format!("{} node labels for {n} nodes", labels.len()));
    }
    Ok(labels.iter().copied().max().unwrap_or(0) + 1)
}

/// Multinomial logistic regression on the rows of `x` by full-batch gradient
/// descent from a seeded uniform init. Returns the weights and per-step losses.
pub fn logistic_regression(
    x: &Array2<f64>,
    labels: &[usize],
    num_classes: usize,
    steps: usize,
    lr: f64,
    seed: u64,
) -> (Array2<f64>, Vec<f64>) {
    let (n, f) = x.dim();
    let mut r = rng::derive(seed, rng::stream::SGC, 0);
    let bound = 1.0 / (f as f64).sqrt();
    let mut theta = Array2::from_shape_fn((f, num_classes), |_| r.random_range(-bound..bound));
    let mut losses = Vec::with_capacity(steps);
    for _ in 0..steps {
        let logits = x.dot(&theta);
        let mut dlogits = Array2::zeros((n, num_classes));
        let mut loss = 0.0;
        for (i, &y) in labels.iter().enumerate() {
            let (l, p) = softmax_cross_entropy(&logits.row(i).to_vec(), y);
            loss += l;
            for (k, pk) in p.into_iter().enumerate() {
                dlogits[[i, k]] = (pk - if k == y { 1.0 } else { 0.0 }) / n as f64;
            }
        }
        losses.push(loss / n as f64);
        theta.scaled_add(-lr, &x.t().dot(&dlogits));
    }
    (theta, losses)
}

/// Fits `Theta` on node labels of `graph`; deterministic under `seed`.
pub fn sgc_train(
    graph: &Graph,
    node_labels: &[usize],
    hops: usize,
    steps: usize,
    lr: f64,
    seed: u64,
) -> Result<SgcModel> {
    let classes = check_labels(graph.num_nodes(), node_labels)?.max(2);
    let x = propagate(graph, hops);
    let (theta, _) = logistic_regression(&x, node_labels, classes, steps, lr, seed);
    Ok(SgcModel { hops, theta })
}

impl SgcModel {
    /// Row-wise class probabilities on `graph`.
    pub fn predict_proba(&self, graph: &Graph) -> Array2<f64> {
        let logits = propagate(graph, self.hops).dot(&self.theta);
        let mut out = logits.clone();
        for (mut row, src) in out.rows_mut().into_iter().zip(logits.rows()) {
            let (_, p) = softmax_cross_entropy(&src.to_vec(), 0);
            row.assign(&ndarray::Array1::from(p));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalized_adjacency_of_an_edge() {
        let g = Graph::unfeatured(2, vec![(0, 1)], 0).unwrap();
        let l = normalized_adjacency(&g);
        for x in l.iter() {
            assert!((x - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn isolated_node_keeps_its_self_loop() {
        let g = Graph::unfeatured(3, vec![(0, 1)], 0).unwrap();
        let l = normalized_adjacency(&g);
        assert_eq!(l[[2, 2]], 1.0);
        assert_eq!(l[[2, 0]], 0.0);
    }

    #[test]
    fn deterministic() {
        let g = Graph::new(
            4,
            vec![(0, 1), (1, 2), (2, 3)],
            ndarray::array![[1.0, 0.0], [0.5, 0.5], [0.0, 1.0], [0.2, 0.9]],
            0,
        )
        .unwrap();
        let labels = [0, 0, 1, 1];
        let a = sgc_train(&g, &labels, 2, 50, 0.5, 9).unwrap();
        let b = sgc_train(&g, &labels, 2, 50, 0.5, 9).unwrap();
        assert_eq!(a, b);
        let p = a.predict_proba(&g);
        for row in p.rows() {
            assert!((row.sum() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn label_count_checked() {
        let g = Graph::unfeatured(3, vec![(0, 1)], 0).unwrap();
        assert!(sgc_train(&g, &[0, 1], 1, 1, 0.1, 0).is_err());
    }
}
