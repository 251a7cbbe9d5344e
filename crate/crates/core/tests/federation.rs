//! Round-loop identities, invariants and determinism.

mod common;

use gcfl_core::fed::{run_federation, Algorithm, FedConfig};
use gcfl_core::gcfl::ClusterConfig;
use gcfl_core::linalg::norm;

fn cfg(rounds: usize) -> FedConfig {
    FedConfig { rounds, batch_size: 8, ..FedConfig::default() }
}

fn run(seed: u64, n: usize, alg: Algorithm, cfg: &FedConfig) -> gcfl_core::fed::RunOutput {
    let (mut clients, init) = common::toy_federation(seed, n, 24);
    run_federation(&mut clients, alg, &init, cfg).unwrap()
}

#[test]
fn unsplit_clustering_equals_fedavg_bitwise() {
    let c = cfg(15);
    let base = common::trajectory(&run(51, 4, Algorithm::FedAvg, &c));
    for alg in [Algorithm::Gcfl, Algorithm::GcflPlus] {
        let out = run(51, 4, alg, &c);
        assert!(out.splits.is_empty());
        assert_eq!(common::trajectory(&out), base, "{alg}");
    }
}

#[test]
fn fedprox_without_penalty_equals_fedavg() {
    let c = FedConfig { prox_mu: 0.0, ..cfg(15) };
    let a = common::trajectory(&run(52, 3, Algorithm::FedAvg, &c));
    let b = common::trajectory(&run(52, 3, Algorithm::FedProx, &c));
    assert_eq!(a, b);
    let c = FedConfig { prox_mu: 0.5, ..cfg(15) };
    assert_ne!(a, common::trajectory(&run(52, 3, Algorithm::FedProx, &c)));
}

#[test]
fn single_client_self_train_equals_fedavg() {
    let c = cfg(15);
    let a = common::trajectory(&run(53, 1, Algorithm::SelfTrain, &c));
    let b = common::trajectory(&run(53, 1, Algorithm::FedAvg, &c));
    assert_eq!(a, b);
}

#[test]
fn identical_clients_stay_identical() {
    let (mut clients, init) = common::toy_federation(54, 1, 24);
    let twin = clients[0].clone();
    clients.push(gcfl_core::fed::ClientState::new(
        1,
        "twin",
        twin.train.clone(),
        twin.test.clone(),
        twin.shape(),
        twin.optimizer.config,
        54,
    ));
    // one batch per epoch, so only the summation order can differ
    let c = FedConfig { rounds: 10, batch_size: 128, ..FedConfig::default() };
    let out = run_federation(&mut clients, Algorithm::FedAvg, &init, &c).unwrap();
    let a = clients[0].model.params();
    let b = clients[1].model.params();
    for (x, y) in a.iter().zip(b) {
        assert!((x - y).abs() <= 1e-12 * (1.0 + x.abs()));
    }
    for r in &out.reports {
        let d = (r.clients[0].grad_norm - r.clients[1].grad_norm).abs();
        assert!(d <= 1e-12);
    }
}

#[test]
fn reported_norms_match_transmitted_updates() {
    let (mut clients, init) = common::toy_federation(55, 3, 24);
    let out = run_federation(&mut clients, Algorithm::FedAvg, &init, &cfg(5)).unwrap();
    let last = out.reports.last().unwrap();
    for (c, row) in clients.iter().zip(&last.clients) {
        assert_eq!(norm(&c.last_delta), row.grad_norm);
    }
}

#[test]
fn clusters_partition_clients_every_round() {
    let cl = ClusterConfig { warmup_rounds: 2, ..ClusterConfig::new(10.0, 1e-9).unwrap() };
    let c = FedConfig { cluster: cl, ..cfg(12) };
    for alg in [Algorithm::Gcfl, Algorithm::GcflPlus] {
        let out = run(56, 6, alg, &c);
        assert!(!out.splits.is_empty(), "{alg} never split");
        assert_eq!(out.splits[0].round, 2);
        for snap in &out.assignments {
            let mut all: Vec<usize> = snap.clusters.iter().flat_map(|(_, m)| m.clone()).collect();
            all.sort_unstable();
            assert_eq!(all, (0..6).collect::<Vec<_>>(), "round {}", snap.round);
            assert!(snap.clusters.iter().all(|(_, m)| !m.is_empty()));
        }
        // eventually every cluster is below min_split_size
        assert!(out.clusters.iter().all(|c| c.members.len() < 3));
    }
}

#[test]
fn runs_are_deterministic() {
    let cl = ClusterConfig { warmup_rounds: 3, ..ClusterConfig::new(10.0, 1e-9).unwrap() };
    let c = FedConfig { cluster: cl, ..cfg(8) };
    for alg in Algorithm::ALL {
        let a = run(57, 4, alg, &c);
        let b = run(57, 4, alg, &c);
        assert_eq!(common::trajectory(&a), common::trajectory(&b), "{alg}");
        assert_eq!(a.assignments, b.assignments);
    }
}

#[test]
fn bad_inputs_are_rejected() {
    let (mut clients, init) = common::toy_federation(58, 2, 8);
    assert!(run_federation(&mut clients, Algorithm::FedAvg, &init[1..], &cfg(1)).is_err());
    let bad = FedConfig { cluster: ClusterConfig { eps1: -1.0, ..ClusterConfig::never_split() }, ..cfg(1) };
    assert!(run_federation(&mut clients, Algorithm::Gcfl, &init, &bad).is_err());
    assert!(run_federation(&mut [], Algorithm::FedAvg, &init, &cfg(1)).is_err());
}
