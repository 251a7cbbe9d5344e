//! A two-group federation with known ground truth.
//!
//! Group A clients hold sparse random graphs, group B clients dense ones.
//! Nodes carry one of two one-hot types; the groups differ in how strongly
//! one type dominates a graph. Labels follow opposite majority rules, so a
//! single model has to tell the groups apart by structure. Group B clients
//! also hold more graphs, which gives them more local steps per round.

use ndarray::Array2;
use rand::Rng as _;

use super::partition::ClientData;
use crate::error::{arg_err, Result};
use crate::fed::FedConfig;
use crate::gcfl::ClusterConfig;
use crate::graph::{erdos_renyi_gnp, Graph};
use crate::rng::{self, Rng};

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    pub clients_per_group: usize,
    pub graphs_per_client: usize,
    /// Graphs per group-B client; group A uses `graphs_per_client`.
    pub graphs_per_client_b: usize,
    pub nodes: usize,
    pub p_a: f64,
    pub p_b: f64,
    pub test_fraction: f64,
    /// Type-0 share of a graph's nodes, `mix` or `1 - mix` with equal odds,
    /// per group.
    pub mix_a: f64,
    pub mix_b: f64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            clients_per_group: 4,
            graphs_per_client: 50,
            graphs_per_client_b: 100,
            nodes: 30,
            p_a: 0.1,
            p_b: 0.5,
            test_fraction: 0.2,
            mix_a: 0.7,
            mix_b: 0.85,
        }
    }
}

const TYPES: usize = 2;

fn sample_graph(spec: &SyntheticSpec, group_b: bool, rng: &mut Rng) -> Result<Graph> {
    let n = spec.nodes;
    let p = if group_b { spec.p_b } else { spec.p_a };
    let base = erdos_renyi_gnp(n, p, rng)?;
    let mix = if group_b { spec.mix_b } else { spec.mix_a };
    let q = if rng.random_bool(0.5) { mix } else { 1.0 - mix };
    let mut x = Array2::zeros((n, TYPES));
    let mut first = 0;
    for v in 0..n {
        let is_first = rng.random_bool(q);
        first += usize::from(is_first);
        x[[v, usize::from(!is_first)]] = 1.0;
    }
    // A: label 1 when type 0 is the majority; B: the reverse.
    let majority = 2 * first >= n;
    let label = usize::from(majority != group_b);
    base.with_features(x).map(|g| g.with_label(label))
}

/// Builds `2 * clients_per_group` clients; the first half is group A.
/// Returns the clients and the ground-truth group of each.
pub fn two_group_federation(spec: &SyntheticSpec, seed: u64) -> Result<(Vec<ClientData>, Vec<usize>)> {
    if spec.clients_per_group == 0 || spec.graphs_per_client.min(spec.graphs_per_client_b) < 2 || spec.nodes < 2 {
        return arg_err("synthetic federation needs clients, at least 2 graphs and 2 nodes");
    }
    let total = 2 * spec.clients_per_group;
    let mut clients = Vec::with_capacity(total);
    let mut truth = Vec::with_capacity(total);
    for i in 0..total {
        let group_b = i >= spec.clients_per_group;
        let mut r = rng::derive(seed, rng::stream::SYNTHETIC, i as u64);
        let count = if group_b { spec.graphs_per_client_b } else { spec.graphs_per_client };
        let mut graphs = (0..count)
            .map(|_| sample_graph(spec, group_b, &mut r))
            .collect::<Result<Vec<_>>>()?;
        let t = ((spec.test_fraction * graphs.len() as f64).ceil() as usize).clamp(1, graphs.len() - 1);
        let test = graphs.split_off(graphs.len() - t);
        clients.push(ClientData {
            name: format!("{}-{i}", if group_b { "B" } else { "A" }),
            train: graphs,
            test,
            num_classes: 2,
        });
        truth.push(usize::from(group_b));
    }
    Ok((clients, truth))
}

/// Federation settings for the two-group scenario: 100 rounds, batch 10
/// (several local steps per round), eps1 = 0.08, eps2 = 0.25.
pub fn two_group_fed_config() -> FedConfig {
    FedConfig {
        rounds: 100,
        batch_size: 10,
        cluster: ClusterConfig::new(0.08, 0.25).expect("positive thresholds"),
        ..FedConfig::default()
    }
}

/// True when `clusters` is exactly the ground-truth grouping.
pub fn recovers_groups(clusters: &[(usize, Vec<usize>)], truth: &[usize]) -> bool {
    let groups = truth.iter().copied().max().map_or(0, |g| g + 1);
    if clusters.len() != groups {
        return false;
    }
    clusters.iter().all(|(_, members)| {
        let g = members.first().map(|&m| truth[m]);
        let want = truth.iter().filter(|&&t| Some(t) == g).count();
        members.iter().all(|&m| Some(truth[m]) == g) && members.len() == want
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes_and_labels() {
        let (clients, truth) = two_group_federation(&SyntheticSpec::default(), 5).unwrap();
        assert_eq!(clients.len(), 8);
        assert_eq!(clients[0].train.len(), 40);
        assert_eq!(clients[7].train.len(), 80);
        assert_eq!(truth, vec![0, 0, 0, 0, 1, 1, 1, 1]);
        for c in &clients {
            let n = c.train.len() + c.test.len();
            assert_eq!(c.test.len(), n / 5);
            let labels: usize = c.train.iter().map(Graph::label).sum();
            assert!(labels * 8 > c.train.len() && labels * 8 < 7 * c.train.len());
        }
        let dense = clients[5].train[0].num_edges();
        let sparse = clients[0].train[0].num_edges();
        assert!(dense > 2 * sparse);
    }

    #[test]
    fn recovery_check() {
        let truth = [0, 0, 1, 1];
        assert!(recovers_groups(&[(3, vec![2, 3]), (4, vec![0, 1])], &truth));
        assert!(!recovers_groups(&[(3, vec![1, 2, 3]), (4, vec![0])], &truth));
        assert!(!recovers_groups(&[(0, vec![0, 1, 2, 3])], &truth));
    }
}
