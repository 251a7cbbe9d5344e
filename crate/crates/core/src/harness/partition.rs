use std::path::Path;

use ndarray::{s, Array2};
use rand::seq::{index, SliceRandom};

use super::config::{is_social, FeatureMode, Group};
use crate::error::{Error, Result};
use crate::fed::ClientState;
use crate::gnn::{one_hot_degree_features, AdamConfig, GinModel, GinShape};
use crate::graph::{load_tu_dataset, Dataset, Graph};
use crate::rng;

/// Graphs held by one client before any model is attached.
#[derive(Debug, Clone)]
pub struct ClientData {
    pub name: String,
    pub train: Vec<Graph>,
    pub test: Vec<Graph>,
    pub num_classes: usize,
}

impl ClientData {
    pub fn feat_dim(&self) -> usize {
        self.train
            .first()
            .or(self.test.first())
            .map_or(1, Graph::feat_dim)
    }

    pub fn all_graphs(&self) -> Vec<Graph> {
        self.train.iter().chain(&self.test).cloned().collect()
    }
}

fn test_count(n: usize, test_fraction: f64) -> Result<usize> {
    let t = (test_fraction * n as f64).ceil() as usize;
    if t >= n {
        return Err(Error::Config(format!(
            "test_fraction {test_fraction} leaves no training graphs out of {n}"
        )));
    }
    Ok(t)
}

fn split_tail(name: String, mut graphs: Vec<Graph>, num_classes: usize, test_fraction: f64) -> Result<ClientData> {
    let t = test_count(graphs.len(), test_fraction)?;
    let test = graphs.split_off(graphs.len() - t);
    Ok(ClientData {
        name,
        train: graphs,
        test,
        num_classes,
    })
}

/// Deals graphs of one dataset to `num_clients` clients. Without overlap the
/// clients receive disjoint contiguous slices of a seeded shuffle and any
/// remainder is dropped; with overlap each client samples its own distinct
/// graphs. The last `ceil(test_fraction * per_client)` graphs of each client
/// are held out.
pub fn partition_one_dataset(
    dataset: &Dataset,
    num_clients: usize,
    per_client: usize,
    test_fraction: f64,
    overlap: bool,
    seed: u64,
) -> Result<Vec<ClientData>> {
    if num_clients == 0 || per_client == 0 {
        return Err(Error::Config("num_clients and per_client must be positive".into()));
    }
    let n = dataset.len();
    let need = if overlap { per_client } else { num_clients * per_client };
    if need > n {
        return Err(Error::Config(format!(
            "{}: {} clients x {} graphs needs {need} graphs, dataset has {n}",
            dataset.name, num_clients, per_client
        )));
    }
    let slices: Vec<Vec<usize>> = if overlap {
        (0..num_clients)
            .map(|i| {
                let mut r = rng::derive(seed, rng::stream::PARTITION, i as u64 + 1);
                index::sample(&mut r, n, per_client).into_vec()
            })
            .collect()
    } else {
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng::derive(seed, rng::stream::PARTITION, 0));
        if n > need {
            log::info!("{}: {} graphs left unassigned", dataset.name, n - need);
        }
        order[..need].chunks(per_client).map(<[usize]>::to_vec).collect()
    };
    slices
        .into_iter()
        .enumerate()
        .map(|(i, idx)| {
            let graphs = idx.iter().map(|&k| dataset.graphs[k].clone()).collect();
            split_tail(format!("{}-{i}", dataset.name), graphs, dataset.num_classes, test_fraction)
        })
        .collect()
}

/// Non-overlapping partition where client `i` draws `round(skew *
/// per_client)` graphs from class `i mod C` and the rest round-robin from
/// the other classes. Each client's graphs are shuffled before the test tail
/// is cut.
pub fn partition_label_skew(
    dataset: &Dataset,
    num_clients: usize,
    per_client: usize,
    test_fraction: f64,
    skew: f64,
    seed: u64,
) -> Result<Vec<ClientData>> {
    if !(0.0..=1.0).contains(&skew) {
        return Err(Error::Config(format!("label skew {skew} outside [0, 1]")));
    }
    if num_clients == 0 || per_client == 0 {
        return Err(Error::Config("num_clients and per_client must be positive".into()));
    }
    let c = dataset.num_classes;
    let mut r = rng::derive(seed, rng::stream::PARTITION, 1 << 32);
    let mut pools: Vec<Vec<usize>> = vec![Vec::new(); c];
    for (k, g) in dataset.graphs.iter().enumerate() {
        pools[g.label()].push(k);
    }
    for p in &mut pools {
        p.shuffle(&mut r);
    }
    let dominant = ((skew * per_client as f64).round() as usize).min(per_client);
    let mut out = Vec::with_capacity(num_clients);
    for i in 0..num_clients {
        let d = i % c;
        let others: Vec<usize> = (0..c).filter(|&k| k != d).collect();
        let mut picks = Vec::with_capacity(per_client);
        for j in 0..per_client {
            let class = if j < dominant { d } else { others[(j - dominant) % others.len()] };
            let k = pools[class].pop().ok_or_else(|| {
                Error::Config(format!(
                    "{}: not enough graphs of class {class} for a skew of {skew}",
                    dataset.name
                ))
            })?;
            picks.push(k);
        }
        picks.shuffle(&mut r);
        let graphs = picks.iter().map(|&k| dataset.graphs[k].clone()).collect();
        out.push(split_tail(
            format!("{}-{i}", dataset.name),
            graphs,
            dataset.num_classes,
            test_fraction,
        )?);
    }
    Ok(out)
}

/// Replaces node features with one-hot degrees sized by the dataset's
/// largest degree.
pub fn with_degree_features(dataset: &Dataset) -> Result<Dataset> {
    let max_degree = dataset
        .graphs
        .iter()
        .flat_map(Graph::degrees)
        .max()
        .unwrap_or(0)
        .max(1);
    let graphs = dataset
        .graphs
        .iter()
        .map(|g| one_hot_degree_features(g, max_degree))
        .collect::<Result<_>>()?;
    Dataset::new(dataset.name.clone(), graphs, dataset.num_classes)
}

pub fn apply_feature_mode(dataset: Dataset, mode: FeatureMode) -> Result<Dataset> {
    match mode {
        FeatureMode::Original => Ok(dataset),
        FeatureMode::OnehotDegree => with_degree_features(&dataset),
    }
}

/// Loads a dataset, reporting a missing one as a configuration error.
pub fn load_named(data_root: &Path, name: &str) -> Result<Dataset> {
    load_tu_dataset(data_root, name).map_err(|e| match e {
        Error::MissingFile(p) => Error::Config(format!(
            "dataset {name} not found under {} ({} missing)",
            data_root.display(),
            p.display()
        )),
        other => other,
    })
}

/// One client per dataset of `group`, in the group's fixed order. Social
/// datasets switch to one-hot degree features; each client holds out
/// `ceil(test_fraction * |dataset|)` graphs of a seeded shuffle.
pub fn build_multi_dataset_group(
    group: Group,
    data_root: &Path,
    test_fraction: f64,
    seed: u64,
) -> Result<Vec<ClientData>> {
    group
        .datasets()
        .iter()
        .enumerate()
        .map(|(i, &name)| {
            let mut ds = load_named(data_root, name)?;
            if is_social(name) {
                ds = with_degree_features(&ds)?;
            }
            let mut graphs = ds.graphs;
            graphs.shuffle(&mut rng::derive(seed, rng::stream::PARTITION, i as u64));
            split_tail(name.to_string(), graphs, ds.num_classes, test_fraction)
        })
        .collect()
}

fn pad_graph(g: &Graph, dim: usize) -> Result<Graph> {
    if g.feat_dim() == dim {
        return Ok(g.clone());
    }
    let mut x = Array2::zeros((g.num_nodes(), dim));
    x.slice_mut(s![.., ..g.feat_dim()]).assign(g.features());
    g.with_features(x)
}

/// Zero-pads every client's node features on the right to the widest
/// feature dimension. Returns `(feat_dim, num_classes)` for the shared model.
pub fn unify_feature_space(clients: &mut [ClientData]) -> Result<(usize, usize)> {
    let dim = clients.iter().map(ClientData::feat_dim).max().unwrap_or(1);
    let classes = clients.iter().map(|c| c.num_classes).max().unwrap_or(2);
    for c in clients.iter_mut() {
        if c.feat_dim() == dim && c.train.iter().chain(&c.test).all(|g| g.feat_dim() == dim) {
            continue;
        }
        c.train = c.train.iter().map(|g| pad_graph(g, dim)).collect::<Result<_>>()?;
        c.test = c.test.iter().map(|g| pad_graph(g, dim)).collect::<Result<_>>()?;
    }
    Ok((dim, classes))
}

/// Attaches a GIN and optimizer to every client and draws the shared
/// initial parameters.
pub fn build_clients(
    data: &[ClientData],
    hidden: usize,
    num_layers: usize,
    adam: AdamConfig,
    seed: u64,
) -> Result<(Vec<ClientState>, Vec<f64>)> {
    let mut data = data.to_vec();
    let (dim, classes) = unify_feature_space(&mut data)?;
    let shape = GinShape::new(dim, hidden, num_layers, classes);
    let init = GinModel::init(shape, &mut rng::derive(seed, rng::stream::INIT, 0)).into_flat();
    let clients = data
        .into_iter()
        .enumerate()
        .map(|(i, d)| ClientState::new(i, d.name, d.train, d.test, shape, adam, seed))
        .collect();
    Ok((clients, init))
}
