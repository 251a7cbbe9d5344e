use std::io::Write;

use crate::error::{arg_err, Result};
use crate::graph::Graph;
use crate::hetero::{pairwise_heterogeneity, HeteroParams, HeterogeneityReport};

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterHetero {
    pub cluster_id: usize,
    pub members: Vec<usize>,
    pub report: HeterogeneityReport,
}

/// Heterogeneity among all graphs of the federation and within each cluster.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterHeteroReport {
    pub global: HeterogeneityReport,
    pub clusters: Vec<ClusterHetero>,
}

fn pooled(client_graphs: &[Vec<Graph>], members: &[usize]) -> Result<Vec<Graph>> {
    let mut out = Vec::new();
    for &m in members {
        match client_graphs.get(m) {
            Some(g) => out.extend(g.iter().cloned()),
            None => return arg_err(format!("cluster member {m} is not a client")),
        }
    }
    Ok(out)
}

/// Average pairwise structure and feature heterogeneity among the graphs of
/// each cluster's members, plus the same over every client's graphs.
pub fn cluster_heterogeneity_report(
    clusters: &[(usize, Vec<usize>)],
    client_graphs: &[Vec<Graph>],
    params: &HeteroParams,
) -> Result<ClusterHeteroReport> {
    if clusters.is_empty() {
        return arg_err("heterogeneity report needs at least one cluster");
    }
    let everyone: Vec<usize> = (0..client_graphs.len()).collect();
    let global = pairwise_heterogeneity(&pooled(client_graphs, &everyone)?, None, params)?;
    let clusters = clusters
        .iter()
        .map(|(id, members)| {
            let report = if members.len() == client_graphs.len() {
                global
            } else {
                pairwise_heterogeneity(&pooled(client_graphs, members)?, None, params)?
            };
            Ok(ClusterHetero {
                cluster_id: *id,
                members: members.clone(),
                report,
            })
        })
        .collect::<Result<_>>()?;
    Ok(ClusterHeteroReport { global, clusters })
}

/// Rows `algorithm,cluster_id,client_ids,structure_mean,...`; the global
/// baseline uses cluster id `all`.
pub fn write_cluster_hetero_csv<W: Write>(out: W, rows: &[(String, ClusterHeteroReport)]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "algorithm",
        "cluster_id",
        "client_ids",
        "structure_mean",
        "structure_std",
        "feature_mean",
        "feature_std",
        "pairs",
    ])?;
    let mut line = |alg: &str, id: String, members: String, r: &HeterogeneityReport| {
        w.write_record([
            alg.to_string(),
            id,
            members,
            r.structure_mean.to_string(),
            r.structure_std.to_string(),
            r.feature_mean.to_string(),
            r.feature_std.to_string(),
            r.pairs.to_string(),
        ])
    };
    for (alg, rep) in rows {
        line(alg, "all".into(), String::new(), &rep.global)?;
        for c in &rep.clusters {
            let ids: Vec<String> = c.members.iter().map(usize::to_string).collect();
            line(alg, c.cluster_id.to_string(), ids.join(" "), &c.report)?;
        }
    }
    w.flush()?;
    Ok(())
}
