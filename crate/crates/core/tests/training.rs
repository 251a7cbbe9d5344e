//! End-to-end trainability, data loading and feature padding.

mod common;

use gcfl_core::gnn::{evaluate, gin_forward, AdamConfig, AdamState, Batch, GinModel, GinShape};
use gcfl_core::graph::{load_tu_dataset, Graph};
use gcfl_core::harness::{unify_feature_space, ClientData};
use gcfl_core::rng;
use ndarray::Array2;
use rand::Rng;

/// Class is which of two feature columns is hot on every node.
fn separable_toy(seed: u64) -> Vec<Graph> {
    let mut r = common::rng(seed);
    (0..20)
        .map(|i| {
            let label = i % 2;
            let n = r.random_range(4..9);
            let g = common::random_graph(&mut r, n, 0.4, 2, label);
            let mut x = Array2::zeros((n, 2));
            x.column_mut(label).fill(1.0);
            g.with_features(x).unwrap()
        })
        .collect()
}

#[test]
fn gin_fits_a_separable_toy_set() {
    let graphs = separable_toy(41);
    let refs: Vec<&Graph> = graphs.iter().collect();
    let batch = Batch::new(&refs).unwrap();
    let shape = GinShape::new(2, 16, 3, 2);
    let mut model = GinModel::init(shape, &mut rng::derive(41, rng::stream::INIT, 0));
    let mut adam = AdamState::new(shape.num_params(), AdamConfig::default());
    let mut grad = vec![0.0; shape.num_params()];
    let mut reached = None;
    for epoch in 0..200 {
        model.loss_and_grad(&batch, &mut grad).unwrap();
        adam.step(model.params_mut(), &grad).unwrap();
        if evaluate(&model, &graphs).unwrap().1 == 1.0 {
            reached = Some(epoch);
            break;
        }
    }
    assert!(reached.is_some(), "train accuracy never reached 100%");
}

#[test]
fn mutag_statistics() {
    let ds = load_tu_dataset(&common::data_root(), "MUTAG").unwrap();
    assert_eq!(ds.len(), 188);
    assert!((ds.avg_nodes() - 17.93).abs() < 0.005, "{}", ds.avg_nodes());
    assert_eq!(ds.num_classes, 2);
    let ones = ds.graphs.iter().filter(|g| g.label() == 1).count();
    assert_eq!((188 - ones, ones), (63, 125));
}

#[test]
fn padded_forward_matches_unpadded() {
    let mut r = common::rng(42);
    for _ in 0..10 {
        let (d, pad) = (r.random_range(1..4), r.random_range(1..4));
        let (h, layers, out) = (r.random_range(2..6), r.random_range(1..4), r.random_range(2..4));
        let small = GinShape::new(d, h, layers, out);
        let params: Vec<f64> = (0..small.num_params()).map(|_| r.random_range(-0.6..0.6)).collect();
        let model = GinModel::from_flat(small, params.clone()).unwrap();

        // first-layer weights follow eps; padded input rows get zero weights
        let mut wide_params = params[..1 + d * h].to_vec();
        wide_params.extend(std::iter::repeat_n(0.0, pad * h));
        wide_params.extend_from_slice(&params[1 + d * h..]);
        let wide = GinModel::from_flat(GinShape::new(d + pad, h, layers, out), wide_params).unwrap();

        let g = common::random_graph(&mut r, 7, 0.4, d, 0);
        let mut clients = vec![
            ClientData { name: "narrow".into(), train: vec![g.clone()], test: vec![], num_classes: out },
            ClientData {
                name: "wide".into(),
                train: vec![common::random_graph(&mut r, 3, 0.5, d + pad, 0)],
                test: vec![],
                num_classes: out,
            },
        ];
        assert_eq!(unify_feature_space(&mut clients).unwrap(), (d + pad, out));
        let padded = &clients[0].train[0];
        assert_eq!(padded.feat_dim(), d + pad);
        let a = gin_forward(&model, &g).unwrap();
        let b = gin_forward(&wide, padded).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() <= 1e-12 * (1.0 + x.abs()));
        }
    }
}
