//! Gradient-similarity clustering of federated clients.
//!
//! A cluster is split when its size-weighted mean update is small (the shared
//! model is near a stationary point) while some member's update is still
//! large. The split is the minimum cut of the members' gradient cosine
//! similarity graph.

mod mincut;

use std::io::Write;

use ndarray::Array2;

use crate::error::{arg_err, Error, Result};
use crate::linalg::{axpy, dot, norm, weighted_mean};

pub use mincut::{stoer_wagner_mincut, MinCut};

/// Weight floor keeping the similarity graph connected.
pub const CUT_WEIGHT_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClusterConfig {
    /// Split only when the weighted mean update norm is below this.
    pub eps1: f64,
    /// Split only when some member's update norm exceeds this.
    pub eps2: f64,
    pub min_split_size: usize,
    /// Rounds (0-based) before this index never split.
    pub warmup_rounds: usize,
}

impl ClusterConfig {
    pub fn new(eps1: f64, eps2: f64) -> Result<Self> {
        let c = Self {
            eps1,
            eps2,
            min_split_size: 3,
            warmup_rounds: 20,
        };
        c.validate()?;
        Ok(c)
    }

    /// A configuration whose split criteria can never fire.
    pub fn never_split() -> Self {
        Self {
            eps1: f64::MIN_POSITIVE,
            eps2: f64::INFINITY,
            min_split_size: usize::MAX,
            warmup_rounds: usize::MAX,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps1 > 0.0 && self.eps2 > 0.0) {
            return Err(Error::Config(format!(
                "eps1 and eps2 must be positive, got {} and {}",
                self.eps1, self.eps2
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterState {
    pub id: usize,
    pub members: Vec<usize>,
    pub model: Vec<f64>,
    pub delta_mean: f64,
    pub delta_max: f64,
}

impl ClusterState {
    pub fn new(id: usize, members: Vec<usize>, model: Vec<f64>) -> Self {
        Self {
            id,
            members,
            model,
            delta_mean: 0.0,
            delta_max: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitDecision {
    pub should_split: bool,
    pub delta_mean: f64,
    pub delta_max: f64,
}

/// Evaluates both split criteria for one cluster at round `round`.
pub fn split_check(
    deltas: &[&[f64]],
    sizes: &[usize],
    config: &ClusterConfig,
    round: usize,
) -> Result<SplitDecision> {
    if deltas.is_empty() || deltas.len() != sizes.len() {
        return arg_err("split check needs one size per delta and at least one member");
    }
    let delta_mean = norm(&weighted_mean(deltas, sizes));
    let delta_max = deltas.iter().map(|d| norm(d)).fold(0.0, f64::max);
    let should_split = delta_mean < config.eps1
        && delta_max > config.eps2
        && deltas.len() >= config.min_split_size
        && round >= config.warmup_rounds;
    Ok(SplitDecision {
        should_split,
        delta_mean,
        delta_max,
    })
}

/// Pairwise cosine similarity; rows of zero vectors are all zero.
pub fn cosine_matrix(deltas: &[&[f64]]) -> Result<Array2<f64>> {
    let n = deltas.len();
    if n < 2 {
        return arg_err("cosine matrix needs at least two vectors");
    }
    let norms: Vec<f64> = deltas.iter().map(|d| norm(d)).collect();
    if norms.iter().all(|&x| x == 0.0) {
        return arg_err("cosine matrix of all-zero vectors");
    }
    let mut a = Array2::zeros((n, n));
    for i in 0..n {
        if norms[i] == 0.0 {
            continue;
        }
        a[[i, i]] = 1.0;
        for j in i + 1..n {
            if norms[j] == 0.0 {
                continue;
            }
            let c = (dot(deltas[i], deltas[j]) / (norms[i] * norms[j])).clamp(-1.0, 1.0);
            a[[i, j]] = c;
            a[[j, i]] = c;
        }
    }
    Ok(a)
}

/// `max(0, alpha) + floor` off the diagonal, zero on it.
pub fn to_cut_weights(alpha: &Array2<f64>) -> Array2<f64> {
    Array2::from_shape_fn(alpha.raw_dim(), |(i, j)| {
        if i == j {
            0.0
        } else {
            alpha[[i, j]].max(0.0) + CUT_WEIGHT_FLOOR
        }
    })
}

/// Result of splitting one cluster.
#[derive(Debug, Clone, PartialEq)]
pub struct Bipartition {
    pub left: ClusterState,
    pub right: ClusterState,
    pub cut_value: f64,
}

/// Splits `cluster` along the minimum cut of `weights` (indexed like
/// `cluster.members`). Both children start from the parent model. Returns
/// `None` for singleton clusters.
pub fn bipartition_cluster(
    cluster: &ClusterState,
    weights: &Array2<f64>,
    left_id: usize,
    right_id: usize,
) -> Result<Option<Bipartition>> {
    if cluster.members.len() < 2 {
        return Ok(None);
    }
    if weights.nrows() != cluster.members.len() {
        return arg_err("weight matrix size differs from cluster size");
    }
    let cut = stoer_wagner_mincut(weights)?;
    let pick = |side: &[usize]| side.iter().map(|&i| cluster.members[i]).collect::<Vec<_>>();
    Ok(Some(Bipartition {
        left: ClusterState::new(left_id, pick(&cut.side_a), cluster.model.clone()),
        right: ClusterState::new(right_id, pick(&cut.side_b), cluster.model.clone()),
        cut_value: cut.value,
    }))
}

/// `theta_k += sum_i (size_i / total) delta_i`.
pub fn cluster_aggregate(
    cluster: &mut ClusterState,
    deltas: &[&[f64]],
    sizes: &[usize],
) -> Result<()> {
    if deltas.len() != cluster.members.len() || sizes.len() != deltas.len() {
        return arg_err(format!(
            "cluster {} has {} members but {} deltas",
            cluster.id,
            cluster.members.len(),
            deltas.len()
        ));
    }
    if sizes.iter().sum::<usize>() == 0 {
        return arg_err("cluster aggregation with zero total size");
    }
    let mean = weighted_mean(deltas, sizes);
    axpy(&mut cluster.model, 1.0, &mean);
    Ok(())
}

/// One cluster split, as logged to `splits.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitEvent {
    pub round: usize,
    pub parent: usize,
    pub children: (usize, usize),
    pub delta_mean: f64,
    pub delta_max: f64,
    pub cut_value: f64,
}

/// Cluster membership at the end of a round.
#[derive(Debug, Clone, PartialEq)]
pub struct AssignmentSnapshot {
    pub round: usize,
    pub clusters: Vec<(usize, Vec<usize>)>,
}

fn join_ids(ids: &[usize]) -> String {
    ids.iter().map(usize::to_string).collect::<Vec<_>>().join(" ")
}

/// `round,cluster_id,client_ids` with client ids space-separated.
pub fn write_clusters_csv<W: Write>(out: W, history: &[AssignmentSnapshot]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["round", "cluster_id", "client_ids"])?;
    for snap in history {
        for (id, members) in &snap.clusters {
            w.write_record([snap.round.to_string(), id.to_string(), join_ids(members)])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// `round,parent,children,delta_mean,delta_max,cut_value`.
pub fn write_splits_csv<W: Write>(out: W, events: &[SplitEvent]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["round", "parent", "children", "delta_mean", "delta_max", "cut_value"])?;
    for e in events {
        w.write_record([
            e.round.to_string(),
            e.parent.to_string(),
            format!("{} {}", e.children.0, e.children.1),
            e.delta_mean.to_string(),
            e.delta_max.to_string(),
            e.cut_value.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
