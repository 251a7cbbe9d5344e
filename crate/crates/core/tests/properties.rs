//! Randomized invariants.

mod common;

use gcfl_core::fed::fedavg_aggregate;
use gcfl_core::gcfl::{cosine_matrix, split_check, ClusterConfig};
use gcfl_core::gcfl_plus::dtw_distance;
use gcfl_core::gnn::{gin_backward, gin_forward, GinModel, GinShape};
use gcfl_core::graph::{erdos_renyi_gnm, Graph};
use gcfl_core::hetero::{awe_distribution, feature_sim_histogram, js_distance, AweMode};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

fn graph_strategy() -> impl Strategy<Value = Graph> {
    (2usize..9, 0.2f64..0.8, 1usize..4, any::<u64>()).prop_map(|(n, p, d, seed)| {
        common::random_graph(&mut common::rng(seed), n, p, d, 0)
    })
}

fn permutation(n: usize, seed: u64) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut common::rng(seed));
    perm
}

fn distribution(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..1.0, len).prop_map(|mut v| {
        v[0] += 1e-3;
        let s: f64 = v.iter().sum();
        v.iter_mut().for_each(|x| *x /= s);
        v
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn awe_is_relabeling_invariant(g in graph_strategy(), seed in any::<u64>()) {
        prop_assume!(g.num_edges() > 0);
        let h = g.permuted(&permutation(g.num_nodes(), seed)).unwrap();
        for len in 2..=4 {
            let a = awe_distribution(&g, len, AweMode::Exact).unwrap();
            let b = awe_distribution(&h, len, AweMode::Exact).unwrap();
            for (x, y) in a.probs.iter().zip(&b.probs) {
                prop_assert!((x - y).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn js_distance_is_a_metric(p in distribution(6), q in distribution(6), r in distribution(6)) {
        let pq = js_distance(&p, &q).unwrap();
        prop_assert!(pq >= 0.0);
        prop_assert_eq!(pq, js_distance(&q, &p).unwrap());
        prop_assert!(js_distance(&p, &p).unwrap().abs() < 1e-12);
        let pr = js_distance(&p, &r).unwrap();
        let rq = js_distance(&r, &q).unwrap();
        prop_assert!(pq <= pr + rq + 1e-9);
        if p != q {
            prop_assert!(pq > 0.0);
        }
    }

    #[test]
    fn feature_histogram_ignores_positive_scaling(g in graph_strategy(), c in 0.01f64..100.0) {
        prop_assume!(g.num_edges() > 0);
        let scaled = g.with_features(g.features() * c).unwrap();
        let a = feature_sim_histogram(&g, 20).unwrap();
        let b = feature_sim_histogram(&scaled, 20).unwrap();
        for (x, y) in a.mass.iter().zip(&b.mass) {
            prop_assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn gin_ignores_node_and_edge_order(g in graph_strategy(), seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let shape = GinShape::new(g.feat_dim(), 4, 2, 3);
        let params: Vec<f64> = (0..shape.num_params()).map(|_| r.random_range(-0.5..0.5)).collect();
        let model = GinModel::from_flat(shape, params.clone()).unwrap();
        let base = gin_forward(&model, &g).unwrap();
        let permuted = g.permuted(&permutation(g.num_nodes(), seed ^ 1)).unwrap();
        let mut edges = g.edges().to_vec();
        edges.reverse();
        let flipped: Vec<(usize, usize)> = edges.iter().map(|&(u, v)| (v, u)).collect();
        let reordered = Graph::new(g.num_nodes(), flipped, g.features().clone(), 0).unwrap();
        for other in [&permuted, &reordered] {
            let out = gin_forward(&model, other).unwrap();
            for (x, y) in base.iter().zip(&out) {
                prop_assert!((x - y).abs() <= 1e-10 * (1.0 + x.abs()));
            }
        }
        prop_assert_eq!(model.clone().into_flat(), params);
        prop_assert_eq!(gin_backward(&model, &[&g]).unwrap().len(), shape.num_params());
    }

    #[test]
    fn cosine_matrix_shape_and_scaling(seed in any::<u64>(), n in 2usize..6, c in 0.1f64..10.0) {
        let mut r = common::rng(seed);
        let vs: Vec<Vec<f64>> = (0..n).map(|_| (0..5).map(|_| r.random_range(-1.0..1.0)).collect()).collect();
        let refs: Vec<&[f64]> = vs.iter().map(Vec::as_slice).collect();
        let a = cosine_matrix(&refs).unwrap();
        let mut scaled = vs.clone();
        scaled[0].iter_mut().for_each(|x| *x *= c);
        let srefs: Vec<&[f64]> = scaled.iter().map(Vec::as_slice).collect();
        let b = cosine_matrix(&srefs).unwrap();
        for i in 0..n {
            prop_assert!((a[[i, i]] - 1.0).abs() < 1e-12);
            for j in 0..n {
                prop_assert_eq!(a[[i, j]], a[[j, i]]);
                prop_assert!((a[[i, j]] - b[[i, j]]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn split_check_ignores_member_order(seed in any::<u64>(), n in 3usize..8) {
        let mut r = common::rng(seed);
        let vs: Vec<Vec<f64>> = (0..n).map(|_| (0..6).map(|_| r.random_range(-1.0..1.0)).collect()).collect();
        let sizes: Vec<usize> = (0..n).map(|_| r.random_range(1..50)).collect();
        let cfg = ClusterConfig { warmup_rounds: 0, ..ClusterConfig::new(0.8, 1.2).unwrap() };
        let perm = permutation(n, seed);
        let refs: Vec<&[f64]> = vs.iter().map(Vec::as_slice).collect();
        let prefs: Vec<&[f64]> = perm.iter().map(|&i| vs[i].as_slice()).collect();
        let psizes: Vec<usize> = perm.iter().map(|&i| sizes[i]).collect();
        let a = split_check(&refs, &sizes, &cfg, 5).unwrap();
        let b = split_check(&prefs, &psizes, &cfg, 5).unwrap();
        prop_assert!((a.delta_mean - b.delta_mean).abs() < 1e-12);
        prop_assert_eq!(a.delta_max, b.delta_max);
        if (a.delta_mean - cfg.eps1).abs() > 1e-9 {
            prop_assert_eq!(a.should_split, b.should_split);
        }
    }

    #[test]
    fn fedavg_ignores_client_order(seed in any::<u64>(), n in 1usize..7) {
        let mut r = common::rng(seed);
        let base: Vec<f64> = (0..8).map(|_| r.random_range(-1.0..1.0)).collect();
        let vs: Vec<Vec<f64>> = (0..n).map(|_| (0..8).map(|_| r.random_range(-1.0..1.0)).collect()).collect();
        let sizes: Vec<usize> = (0..n).map(|_| r.random_range(1..100)).collect();
        let perm = permutation(n, seed);
        let refs: Vec<&[f64]> = vs.iter().map(Vec::as_slice).collect();
        let prefs: Vec<&[f64]> = perm.iter().map(|&i| vs[i].as_slice()).collect();
        let psizes: Vec<usize> = perm.iter().map(|&i| sizes[i]).collect();
        let a = fedavg_aggregate(&refs, &sizes, &base).unwrap();
        let b = fedavg_aggregate(&prefs, &psizes, &base).unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn dtw_symmetric_and_zero_on_self(a in prop::collection::vec(0.0f64..3.0, 1..15), b in prop::collection::vec(0.0f64..3.0, 1..15)) {
        prop_assert_eq!(dtw_distance(&a, &b).unwrap(), dtw_distance(&b, &a).unwrap());
        prop_assert_eq!(dtw_distance(&a, &a).unwrap(), 0.0);
        prop_assert!(dtw_distance(&a, &b).unwrap() >= 0.0);
    }

    #[test]
    fn gnm_has_exact_edge_count(n in 2usize..30, frac in 0.0f64..1.0, seed in any::<u64>()) {
        let m = (frac * (n * (n - 1) / 2) as f64) as usize;
        let g = erdos_renyi_gnm(n, m, seed).unwrap();
        prop_assert_eq!(g.num_edges(), m);
        let again = erdos_renyi_gnm(n, m, seed).unwrap();
        prop_assert_eq!(g.edges(), again.edges());
    }
}
