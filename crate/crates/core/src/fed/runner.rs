//! The round loop shared by every algorithm.
//!
//! Each round: broadcast cluster models, train every client locally, add the
//! size-weighted mean update to each cluster model, optionally split
//! clusters, then evaluate every client on its held-out graphs with the
//! model of the cluster it now belongs to.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use super::aggregate::fedavg_aggregate;
use super::client::{local_train, ClientState, LocalUpdate, Prox, DEFAULT_BATCH_SIZE};
use crate::error::{arg_err, Error, Result};
use crate::gcfl::{
    bipartition_cluster, cluster_aggregate, cosine_matrix, split_check, to_cut_weights,
    AssignmentSnapshot, ClusterConfig, ClusterState, SplitEvent,
};
use crate::gcfl_plus::{dtw_matrix, dtw_to_cut_weights, NormWindow};
use crate::gnn::{evaluate, GinModel};
use crate::linalg::norm;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    SelfTrain,
    FedAvg,
    FedProx,
    Gcfl,
    GcflPlus,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [
        Algorithm::SelfTrain,
        Algorithm::FedAvg,
        Algorithm::FedProx,
        Algorithm::Gcfl,
        Algorithm::GcflPlus,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::SelfTrain => "selftrain",
            Algorithm::FedAvg => "fedavg",
            Algorithm::FedProx => "fedprox",
            Algorithm::Gcfl => "gcfl",
            Algorithm::GcflPlus => "gcflplus",
        }
    }

    fn clusters_dynamically(self) -> bool {
        matches!(self, Algorithm::Gcfl | Algorithm::GcflPlus)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('+', "plus").replace(['-', '_'], "");
        Ok(match key.as_str() {
            "selftrain" => Algorithm::SelfTrain,
            "fedavg" => Algorithm::FedAvg,
            "fedprox" => Algorithm::FedProx,
            "gcfl" => Algorithm::Gcfl,
            "gcflplus" => Algorithm::GcflPlus,
            _ => return Err(Error::Config(format!("unknown algorithm {s:?}"))),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FedConfig {
    pub rounds: usize,
    pub local_epochs: usize,
    pub batch_size: usize,
    pub prox_mu: f64,
    pub cluster: ClusterConfig,
    /// Length of the per-client norm window.
    pub window: usize,
    pub standardize: bool,
}

impl Default for FedConfig {
    fn default() -> Self {
        Self {
            rounds: 200,
            local_epochs: 1,
            batch_size: DEFAULT_BATCH_SIZE,
            prox_mu: 0.01,
            cluster: ClusterConfig::never_split(),
            window: 10,
            standardize: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClientRound {
    pub client_id: usize,
    pub cluster_id: usize,
    pub train_loss: f64,
    pub test_loss: f64,
    pub test_acc: f64,
    pub grad_norm: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoundReport {
    pub round: usize,
    pub clients: Vec<ClientRound>,
}

/// Norm windows of a cluster at the moment it was split.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowDump {
    pub round: usize,
    pub parent: usize,
    pub members: Vec<usize>,
    pub window: NormWindow,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub algorithm: Algorithm,
    pub reports: Vec<RoundReport>,
    pub assignments: Vec<AssignmentSnapshot>,
    pub splits: Vec<SplitEvent>,
    pub window_dumps: Vec<WindowDump>,
    pub clusters: Vec<ClusterState>,
}

impl RunOutput {
    /// Test accuracy of every client after the last round.
    pub fn final_accuracies(&self) -> Vec<f64> {
        self.reports
            .last()
            .map(|r| r.clients.iter().map(|c| c.test_acc).collect())
            .unwrap_or_default()
    }

    /// Round of the first split, if any.
    pub fn first_split_round(&self) -> Option<usize> {
        self.splits.first().map(|s| s.round)
    }
}

/// Runs `cfg.rounds` rounds of `algorithm` from the shared initial
/// parameters `init`. Client `i` must have id `i`.
pub fn run_federation(
    clients: &mut [ClientState],
    algorithm: Algorithm,
    init: &[f64],
    cfg: &FedConfig,
) -> Result<RunOutput> {
    if clients.is_empty() {
        return arg_err("federation needs at least one client");
    }
    for (i, c) in clients.iter().enumerate() {
        if c.id != i {
            return arg_err(format!("client at position {i} has id {}", c.id));
        }
        if c.train.is_empty() {
            return Err(Error::EmptyClient(c.id));
        }
        if c.model.params().len() != init.len() {
            return arg_err(format!("client {i} model size differs from initial parameters"));
        }
    }
    if algorithm.clusters_dynamically() {
        cfg.cluster.validate()?;
    }
    let n = clients.len();
    let shape = clients[0].shape();
    let sizes: Vec<usize> = clients.iter().map(ClientState::data_size).collect();

    let mut clusters: Vec<ClusterState> = match algorithm {
        Algorithm::SelfTrain => (0..n).map(|i| ClusterState::new(i, vec![i], init.to_vec())).collect(),
        _ => vec![ClusterState::new(0, (0..n).collect(), init.to_vec())],
    };
    let mut next_id = clusters.len();
    let mut window = NormWindow::new(n, cfg.window.max(1))?;
    let mut out = RunOutput {
        algorithm,
        reports: Vec::with_capacity(cfg.rounds),
        assignments: Vec::with_capacity(cfg.rounds),
        splits: Vec::new(),
        window_dumps: Vec::new(),
        clusters: Vec::new(),
    };

    for round in 0..cfg.rounds {
        let mut cluster_of = vec![0usize; n];
        for (k, c) in clusters.iter().enumerate() {
            for &m in &c.members {
                cluster_of[m] = k;
            }
        }

        let updates: Vec<LocalUpdate> = clients
            .par_iter_mut()
            .map(|client| {
                let start = &clusters[cluster_of[client.id]].model;
                let prox = (algorithm == Algorithm::FedProx).then_some(Prox {
                    mu: cfg.prox_mu,
                    anchor: start,
                });
                local_train(client, start, cfg.local_epochs, cfg.batch_size, prox)
            })
            .collect::<Result<_>>()?;
        let norms: Vec<f64> = updates.iter().map(|u| norm(&u.delta)).collect();
        window.push_norms(&norms)?;

        for cluster in &mut clusters {
            let deltas: Vec<&[f64]> =
                cluster.members.iter().map(|&m| updates[m].delta.as_slice()).collect();
            let member_sizes: Vec<usize> = cluster.members.iter().map(|&m| sizes[m]).collect();
            match algorithm {
                Algorithm::FedAvg | Algorithm::FedProx => {
                    cluster.model = fedavg_aggregate(&deltas, &member_sizes, &cluster.model)?;
                }
                _ => cluster_aggregate(cluster, &deltas, &member_sizes)?,
            }
        }

        if algorithm.clusters_dynamically() {
            let mut next = Vec::with_capacity(clusters.len() + 1);
            for mut cluster in clusters.drain(..) {
                let deltas: Vec<&[f64]> =
                    cluster.members.iter().map(|&m| updates[m].delta.as_slice()).collect();
                let member_sizes: Vec<usize> = cluster.members.iter().map(|&m| sizes[m]).collect();
                let decision = split_check(&deltas, &member_sizes, &cfg.cluster, round)?;
                cluster.delta_mean = decision.delta_mean;
                cluster.delta_max = decision.delta_max;
                if decision.should_split {
                    let weights = if algorithm == Algorithm::Gcfl {
                        to_cut_weights(&cosine_matrix(&deltas)?)
                    } else {
                        dtw_to_cut_weights(&dtw_matrix(&window, &cluster.members, cfg.standardize)?)
                    };
                    if let Some(bp) = bipartition_cluster(&cluster, &weights, next_id, next_id + 1)? {
                        log::info!(
                            "{algorithm} round {round}: split cluster {} into {:?} / {:?}",
                            cluster.id,
                            bp.left.members,
                            bp.right.members
                        );
                        out.splits.push(SplitEvent {
                            round,
                            parent: cluster.id,
                            children: (next_id, next_id + 1),
                            delta_mean: decision.delta_mean,
                            delta_max: decision.delta_max,
                            cut_value: bp.cut_value,
                        });
                        if algorithm == Algorithm::GcflPlus {
                            out.window_dumps.push(WindowDump {
                                round,
                                parent: cluster.id,
                                members: cluster.members.clone(),
                                window: window.clone(),
                            });
                        }
                        next_id += 2;
                        next.push(bp.left);
                        next.push(bp.right);
                        continue;
                    }
                }
                next.push(cluster);
            }
            clusters = next;
            for (k, c) in clusters.iter().enumerate() {
                for &m in &c.members {
                    cluster_of[m] = k;
                }
            }
        }

        let evals: Vec<(f64, f64)> = clients
            .par_iter()
            .map(|client| {
                let model = GinModel::from_flat(shape, clusters[cluster_of[client.id]].model.clone())?;
                evaluate(&model, &client.test)
            })
            .collect::<Result<_>>()?;

        out.reports.push(RoundReport {
            round,
            clients: (0..n)
                .map(|i| ClientRound {
                    client_id: i,
                    cluster_id: clusters[cluster_of[i]].id,
                    train_loss: updates[i].train_loss,
                    test_loss: evals[i].0,
                    test_acc: evals[i].1,
                    grad_norm: norms[i],
                })
                .collect(),
        });
        out.assignments.push(AssignmentSnapshot {
            round,
            clusters: clusters.iter().map(|c| (c.id, c.members.clone())).collect(),
        });
    }
    out.clusters = clusters;
    Ok(out)
}
