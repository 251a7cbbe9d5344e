#![allow(dead_code)]

pub mod oracle;

use std::path::PathBuf;

use gcfl_core::graph::Graph;
use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random simple graph on `n` nodes with edge probability `p` and uniform
/// features in [-1, 1).
pub fn random_graph(r: &mut ChaCha8Rng, n: usize, p: f64, feat_dim: usize, label: usize) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if r.random_bool(p) {
                edges.push((u, v));
            }
        }
    }
    let x = Array2::from_shape_fn((n, feat_dim), |_| r.random_range(-1.0..1.0));
    Graph::new(n, edges, x, label).unwrap()
}

pub fn data_root() -> PathBuf {
    std::env::var_os("GCFL_DATA_ROOT")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data"))
}

pub const FD_RTOL: f64 = 1e-4;
pub const FD_ATOL: f64 = 1e-8;

/// Coordinates where `analytic` and central differences of `f` (step 1e-5)
/// disagree beyond `|a - n| <= FD_ATOL + FD_RTOL * |n|`, as
/// `(index, analytic, numeric)`.
pub fn fd_violations(params: &[f64], analytic: &[f64], mut f: impl FnMut(&[f64]) -> f64) -> Vec<(usize, f64, f64)> {
    let h = 1e-5;
    let mut p = params.to_vec();
    let mut bad = Vec::new();
    for k in 0..p.len() {
        let orig = p[k];
        p[k] = orig + h;
        let up = f(&p);
        p[k] = orig - h;
        let down = f(&p);
        p[k] = orig;
        let numeric = (up - down) / (2.0 * h);
        if (analytic[k] - numeric).abs() > FD_ATOL + FD_RTOL * numeric.abs() {
            bad.push((k, analytic[k], numeric));
        }
    }
    bad
}

/// A random GIN instance: model, and a batch of 2 or 3 graphs.
pub fn random_gin_instance(r: &mut ChaCha8Rng) -> (gcfl_core::gnn::GinModel, Vec<Graph>) {
    use gcfl_core::gnn::{GinModel, GinShape};
    let shape = GinShape::new(r.random_range(1..4), r.random_range(2..6), r.random_range(1..4), r.random_range(2..4));
    let params: Vec<f64> = (0..shape.num_params()).map(|_| r.random_range(-0.7..0.7)).collect();
    let model = GinModel::from_flat(shape, params).unwrap();
    let count = r.random_range(2..4);
    let graphs = (0..count)
        .map(|_| {
            let n = r.random_range(2..7);
            let label = r.random_range(0..shape.output_dim);
            random_graph(r, n, 0.5, shape.input_dim, label)
        })
        .collect();
    (model, graphs)
}

/// `n` clients of random labelled graphs (3 features, 2 classes) with a
/// shared initialisation; labels follow the sign of the first feature sum.
pub fn toy_federation(
    seed: u64,
    n: usize,
    graphs: usize,
) -> (Vec<gcfl_core::fed::ClientState>, Vec<f64>) {
    use gcfl_core::gnn::AdamConfig;
    use gcfl_core::harness::{build_clients, ClientData};
    let mut r = rng(seed);
    let data: Vec<ClientData> = (0..n)
        .map(|i| {
            let mut all: Vec<Graph> = (0..graphs)
                .map(|_| {
                    let nodes = r.random_range(3..9);
                    let g = random_graph(&mut r, nodes, 0.4, 3, 0);
                    let label = usize::from(g.features().column(0).sum() > 0.0);
                    g.with_label(label)
                })
                .collect();
            let test = all.split_off(graphs - graphs / 4);
            ClientData { name: format!("c{i}"), train: all, test, num_classes: 2 }
        })
        .collect();
    build_clients(&data, 8, 2, AdamConfig::default(), seed).unwrap()
}

/// Everything a run reports, flattened for bitwise comparison.
pub fn trajectory(out: &gcfl_core::fed::RunOutput) -> Vec<u64> {
    let mut v = Vec::new();
    for r in &out.reports {
        for c in &r.clients {
            for x in [c.train_loss, c.test_loss, c.test_acc, c.grad_norm] {
                v.push(x.to_bits());
            }
        }
    }
    for c in &out.clusters {
        v.extend(c.model.iter().map(|x| x.to_bits()));
    }
    v
}
