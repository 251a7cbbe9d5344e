use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use super::config::{ExperimentConfig, Setting};
use super::metrics::{compute_metrics, write_summary_csv, MetricsSummary};
use super::partition::{
    apply_feature_mode, build_clients, build_multi_dataset_group, load_named, partition_label_skew,
    partition_one_dataset, ClientData,
};
use super::report::{cluster_heterogeneity_report, write_cluster_hetero_csv, ClusterHeteroReport};
use crate::error::{Error, Result};
use crate::fed::{run_federation, Algorithm, FedConfig, RunOutput};
use crate::gcfl::ClusterConfig;
use crate::gcfl_plus::write_window_csv;
use crate::graph::Graph;

/// Client data for one seed of `cfg`.
pub fn build_federation(cfg: &ExperimentConfig, seed: u64) -> Result<Vec<ClientData>> {
    match cfg.setting {
        Setting::OneDs => {
            let name = cfg.dataset.as_deref().ok_or_else(|| Error::Config("missing dataset".into()))?;
            let ds = apply_feature_mode(load_named(&cfg.data_root, name)?, cfg.feature_mode)?;
            if cfg.label_skew > 0.0 {
                partition_label_skew(&ds, cfg.num_clients, cfg.per_client_graphs, cfg.test_fraction, cfg.label_skew, seed)
            } else {
                partition_one_dataset(&ds, cfg.num_clients, cfg.per_client_graphs, cfg.test_fraction, cfg.overlap, seed)
            }
        }
        Setting::MultiDs => {
            let group = cfg.group.ok_or_else(|| Error::Config("missing group".into()))?;
            build_multi_dataset_group(group, &cfg.data_root, cfg.test_fraction, seed)
        }
    }
}

/// Trains `algorithm` from scratch on `data`.
pub fn run_algorithm(
    data: &[ClientData],
    algorithm: Algorithm,
    cfg: &ExperimentConfig,
    fed: &FedConfig,
    seed: u64,
) -> Result<RunOutput> {
    let (mut clients, init) = build_clients(data, cfg.hidden, cfg.num_layers, cfg.adam(), seed)?;
    log::info!("{algorithm}: {} clients, {} parameters", clients.len(), init.len());
    run_federation(&mut clients, algorithm, &init, fed)
}

/// Results of one seed.
#[derive(Debug, Clone)]
pub struct SeedOutcome {
    pub seed: u64,
    pub runs: Vec<RunOutput>,
    pub summaries: Vec<(u64, Algorithm, MetricsSummary)>,
    pub hetero: Vec<(String, ClusterHeteroReport)>,
}

impl SeedOutcome {
    pub fn summary(&self, algorithm: Algorithm) -> Option<&MetricsSummary> {
        self.summaries.iter().find(|s| s.1 == algorithm).map(|s| &s.2)
    }
}

/// Self-training followed by every configured algorithm on one seed.
pub fn run_seed(cfg: &ExperimentConfig, seed: u64) -> Result<SeedOutcome> {
    let data = build_federation(cfg, seed)?;
    let fed = cfg.fed_config()?;
    let mut algorithms = vec![Algorithm::SelfTrain];
    algorithms.extend(cfg.algorithms.iter().copied().filter(|&a| a != Algorithm::SelfTrain));

    let mut runs = Vec::with_capacity(algorithms.len());
    for &alg in &algorithms {
        runs.push(run_algorithm(&data, alg, cfg, &fed, seed)?);
    }
    let base = runs[0].final_accuracies();
    let summaries = runs
        .iter()
        .map(|r| Ok((seed, r.algorithm, compute_metrics(&r.final_accuracies(), &base)?)))
        .collect::<Result<_>>()?;

    let graphs: Vec<Vec<Graph>> = data.iter().map(ClientData::all_graphs).collect();
    let params = cfg.hetero_params(seed);
    let hetero = runs
        .iter()
        .filter(|r| matches!(r.algorithm, Algorithm::Gcfl | Algorithm::GcflPlus))
        .map(|r| {
            let clusters: Vec<(usize, Vec<usize>)> =
                r.clusters.iter().map(|c| (c.id, c.members.clone())).collect();
            Ok((r.algorithm.to_string(), cluster_heterogeneity_report(&clusters, &graphs, &params)?))
        })
        .collect::<Result<_>>()?;
    Ok(SeedOutcome {
        seed,
        runs,
        summaries,
        hetero,
    })
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

/// `algorithm,round,client_id,cluster_id,train_loss,test_loss,test_acc,grad_norm`.
pub fn write_rounds_csv<W: Write>(out: W, runs: &[RunOutput]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "algorithm",
        "round",
        "client_id",
        "cluster_id",
        "train_loss",
        "test_loss",
        "test_acc",
        "grad_norm",
    ])?;
    for run in runs {
        for rep in &run.reports {
            for c in &rep.clients {
                w.write_record([
                    run.algorithm.to_string(),
                    rep.round.to_string(),
                    c.client_id.to_string(),
                    c.cluster_id.to_string(),
                    c.train_loss.to_string(),
                    c.test_loss.to_string(),
                    c.test_acc.to_string(),
                    c.grad_norm.to_string(),
                ])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// `algorithm,round,cluster_id,client_ids` for the clustered algorithms.
fn write_assignments<W: Write>(out: W, runs: &[RunOutput]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["algorithm", "round", "cluster_id", "client_ids"])?;
    for run in runs.iter().filter(|r| matches!(r.algorithm, Algorithm::Gcfl | Algorithm::GcflPlus)) {
        for snap in &run.assignments {
            for (id, members) in &snap.clusters {
                let ids: Vec<String> = members.iter().map(usize::to_string).collect();
                w.write_record([run.algorithm.to_string(), snap.round.to_string(), id.to_string(), ids.join(" ")])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// `algorithm,round,parent,children,delta_mean,delta_max,cut_value`.
fn write_splits<W: Write>(out: W, runs: &[RunOutput]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["algorithm", "round", "parent", "children", "delta_mean", "delta_max", "cut_value"])?;
    for run in runs {
        for e in &run.splits {
            w.write_record([
                run.algorithm.to_string(),
                e.round.to_string(),
                e.parent.to_string(),
                format!("{} {}", e.children.0, e.children.1),
                e.delta_mean.to_string(),
                e.delta_max.to_string(),
                e.cut_value.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Writes the CSVs of one seed into `dir`.
pub fn write_seed_outputs(dir: &Path, outcome: &SeedOutcome, dump_windows: bool) -> Result<()> {
    fs::create_dir_all(dir)?;
    write_rounds_csv(create(&dir.join("rounds.csv"))?, &outcome.runs)?;
    write_assignments(create(&dir.join("clusters.csv"))?, &outcome.runs)?;
    write_splits(create(&dir.join("splits.csv"))?, &outcome.runs)?;
    write_summary_csv(create(&dir.join("summary.csv"))?, &outcome.summaries)?;
    write_cluster_hetero_csv(create(&dir.join("hetero.csv"))?, &outcome.hetero)?;
    if dump_windows {
        for run in &outcome.runs {
            for d in &run.window_dumps {
                let name = format!("windows_{}_r{}_c{}.csv", run.algorithm, d.round, d.parent);
                write_window_csv(create(&dir.join(name))?, &d.window, &d.members)?;
            }
        }
    }
    Ok(())
}

pub fn seed_dir(cfg: &ExperimentConfig, seed: u64) -> PathBuf {
    cfg.output_dir.join(format!("seed{seed}"))
}

/// Runs every seed and writes `output_dir/seed<N>/*.csv`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<SeedOutcome>> {
    cfg.validate()?;
    cfg.seeds
        .iter()
        .map(|&seed| {
            let outcome = run_seed(cfg, seed)?;
            write_seed_outputs(&seed_dir(cfg, seed), &outcome, cfg.dump_windows)?;
            Ok(outcome)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationRow {
    pub algorithm: Algorithm,
    pub eps1: f64,
    pub eps2: f64,
    pub val_acc: f64,
    pub clusters: usize,
}

/// Moves the tail of each client's training graphs into a validation set,
/// which then plays the role of the test set.
pub fn validation_view(data: &[ClientData], fraction: f64) -> Result<Vec<ClientData>> {
    data.iter()
        .map(|c| {
            let mut train = c.train.clone();
            let v = ((fraction * train.len() as f64).ceil() as usize).max(1);
            if v >= train.len() {
                return Err(Error::Config(format!("client {} too small for a validation split", c.name)));
            }
            let val = train.split_off(train.len() - v);
            Ok(ClientData {
                name: c.name.clone(),
                train,
                test: val,
                num_classes: c.num_classes,
            })
        })
        .collect()
}

/// Grid search of `(eps1, eps2)` for GCFL and GCFL+ by mean final
/// validation accuracy after `calibrate_rounds` rounds on the first seed.
/// Rows come back in grid order; the best row per algorithm is the first
/// one with maximal accuracy.
pub fn calibrate(cfg: &ExperimentConfig) -> Result<(Vec<CalibrationRow>, Vec<CalibrationRow>)> {
    if cfg.eps1_grid.is_empty() || cfg.eps2_grid.is_empty() {
        return Err(Error::Config("empty eps grid".into()));
    }
    let seed = *cfg.seeds.first().ok_or_else(|| Error::Config("no seed".into()))?;
    let data = validation_view(&build_federation(cfg, seed)?, cfg.test_fraction)?;
    let mut rows = Vec::new();
    let mut best: Vec<CalibrationRow> = Vec::new();
    for alg in [Algorithm::Gcfl, Algorithm::GcflPlus] {
        let mut top: Option<CalibrationRow> = None;
        for &e1 in &cfg.eps1_grid {
            for &e2 in &cfg.eps2_grid {
                let mut cluster = ClusterConfig::new(e1, e2)?;
                cluster.min_split_size = cfg.min_split_size;
                cluster.warmup_rounds = cfg.warmup_rounds;
                let fed = FedConfig {
                    rounds: cfg.calibrate_rounds,
                    cluster,
                    ..cfg.fed_config_unclustered()
                };
                let out = run_algorithm(&data, alg, cfg, &fed, seed)?;
                let accs = out.final_accuracies();
                let row = CalibrationRow {
                    algorithm: alg,
                    eps1: e1,
                    eps2: e2,
                    val_acc: crate::linalg::mean(&accs),
                    clusters: out.clusters.len(),
                };
                if top.as_ref().is_none_or(|t| row.val_acc > t.val_acc) {
                    top = Some(row.clone());
                }
                rows.push(row);
            }
        }
        best.extend(top);
    }
    Ok((rows, best))
}

/// `algorithm,eps1,eps2,val_acc,clusters`.
pub fn write_calibration_csv<W: Write>(out: W, rows: &[CalibrationRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["algorithm", "eps1", "eps2", "val_acc", "clusters"])?;
    for r in rows {
        w.write_record([
            r.algorithm.to_string(),
            r.eps1.to_string(),
            r.eps2.to_string(),
            r.val_acc.to_string(),
            r.clusters.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
