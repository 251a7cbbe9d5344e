use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Deserializer};

use crate::error::{Error, Result};
use crate::fed::{Algorithm, FedConfig};
use crate::gcfl::ClusterConfig;
use crate::gnn::AdamConfig;
use crate::hetero::HeteroParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Setting {
    OneDs,
    MultiDs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureMode {
    Original,
    OnehotDegree,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Group {
    Molecules,
    Biochem,
    Mix,
}

impl Group {
    pub fn datasets(self) -> &'static [&'static str] {
        const ALL: [&str; 13] = [
            "MUTAG",
            "BZR",
            "COX2",
            "DHFR",
            "PTC_MR",
            "AIDS",
            "NCI1",
            "ENZYMES",
            "DD",
            "PROTEINS",
            "COLLAB",
            "IMDB-BINARY",
            "IMDB-MULTI",
        ];
        match self {
            Group::Molecules => &ALL[..7],
            Group::Biochem => &ALL[..10],
            Group::Mix => &ALL[..],
        }
    }
}

impl FromStr for Group {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "molecules" => Ok(Group::Molecules),
            "biochem" => Ok(Group::Biochem),
            "mix" => Ok(Group::Mix),
            _ => Err(Error::Config(format!("unknown dataset group {s:?}"))),
        }
    }
}

/// Datasets without informative node features; they get one-hot degrees.
pub fn is_social(name: &str) -> bool {
    matches!(name, "COLLAB" | "IMDB-BINARY" | "IMDB-MULTI")
}

fn algorithms<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Algorithm>, D::Error> {
    let names = Vec::<String>::deserialize(d)?;
    names
        .iter()
        .map(|s| s.parse().map_err(serde::de::Error::custom))
        .collect()
}

/// Everything one `run` invocation needs. Loaded from TOML; every key is
/// optional except where noted in [`ExperimentConfig::validate`].
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub setting: Setting,
    pub dataset: Option<String>,
    pub group: Option<Group>,
    pub data_root: PathBuf,
    pub output_dir: PathBuf,
    pub num_clients: usize,
    pub per_client_graphs: usize,
    pub test_fraction: f64,
    pub overlap: bool,
    /// Share of each client's graphs drawn from its dominant class; 0 turns
    /// label skew off.
    pub label_skew: f64,
    pub feature_mode: FeatureMode,
    #[serde(deserialize_with = "algorithms")]
    pub algorithms: Vec<Algorithm>,
    pub rounds: usize,
    pub local_epochs: usize,
    pub batch_size: usize,
    pub hidden: usize,
    pub num_layers: usize,
    pub lr: f64,
    pub weight_decay: f64,
    pub prox_mu: f64,
    pub seeds: Vec<u64>,
    pub eps1: Option<f64>,
    pub eps2: Option<f64>,
    pub min_split_size: usize,
    pub warmup_rounds: usize,
    pub window: usize,
    pub standardize: bool,
    pub hetero_awe_length: usize,
    pub hetero_pair_budget: usize,
    /// Dump per-client norm windows whenever a GCFL+ cluster splits.
    pub dump_windows: bool,
    pub calibrate_rounds: usize,
    pub eps1_grid: Vec<f64>,
    pub eps2_grid: Vec<f64>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            setting: Setting::OneDs,
            dataset: None,
            group: None,
            data_root: PathBuf::from("data"),
            output_dir: PathBuf::from("out"),
            num_clients: 10,
            per_client_graphs: 100,
            test_fraction: 0.1,
            overlap: false,
            label_skew: 0.0,
            feature_mode: FeatureMode::Original,
            algorithms: vec![Algorithm::FedAvg, Algorithm::FedProx, Algorithm::Gcfl, Algorithm::GcflPlus],
            rounds: 200,
            local_epochs: 1,
            batch_size: 128,
            hidden: 64,
            num_layers: 3,
            lr: 1e-3,
            weight_decay: 5e-4,
            prox_mu: 0.01,
            seeds: vec![0],
            eps1: None,
            eps2: None,
            min_split_size: 3,
            warmup_rounds: 20,
            window: 10,
            standardize: false,
            hetero_awe_length: 4,
            hetero_pair_budget: 2000,
            dump_windows: false,
            calibrate_rounds: 50,
            eps1_grid: vec![0.01, 0.02, 0.05, 0.1],
            eps2_grid: vec![0.05, 0.1, 0.2, 0.4],
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        if !path.exists() {
            return Err(Error::MissingFile(path.to_path_buf()));
        }
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if !(self.test_fraction > 0.0 && self.test_fraction < 1.0) {
            return bad(format!("test_fraction {} must lie in (0, 1)", self.test_fraction));
        }
        if self.num_clients == 0 {
            return bad("num_clients must be at least 1".into());
        }
        if !(0.0..=1.0).contains(&self.label_skew) {
            return bad(format!("label_skew {} must lie in [0, 1]", self.label_skew));
        }
        if self.label_skew > 0.0 && self.overlap {
            return bad("label_skew requires overlap = false".into());
        }
        match self.setting {
            Setting::OneDs if self.dataset.is_none() => return bad("one_ds needs `dataset`".into()),
            Setting::MultiDs if self.group.is_none() => return bad("multi_ds needs `group`".into()),
            _ => {}
        }
        if self.seeds.is_empty() {
            return bad("at least one seed is required".into());
        }
        if self.rounds == 0 || self.batch_size == 0 || self.hidden == 0 || self.num_layers == 0 {
            return bad("rounds, batch_size, hidden and num_layers must be positive".into());
        }
        if self.needs_clustering() {
            self.cluster_config()?;
        }
        Ok(())
    }

    fn needs_clustering(&self) -> bool {
        self.algorithms
            .iter()
            .any(|a| matches!(a, Algorithm::Gcfl | Algorithm::GcflPlus))
    }

    pub fn cluster_config(&self) -> Result<ClusterConfig> {
        match (self.eps1, self.eps2) {
            (Some(e1), Some(e2)) => {
                let mut c = ClusterConfig::new(e1, e2)?;
                c.min_split_size = self.min_split_size;
                c.warmup_rounds = self.warmup_rounds;
                c.validate()?;
                Ok(c)
            }
            _ => Err(Error::Config(
                "gcfl and gcflplus need eps1 and eps2 (see `calibrate`)".into(),
            )),
        }
    }

    pub fn adam(&self) -> AdamConfig {
        AdamConfig {
            lr: self.lr,
            weight_decay: self.weight_decay,
            ..AdamConfig::default()
        }
    }

    /// Federation settings with clustering disabled.
    pub fn fed_config_unclustered(&self) -> FedConfig {
        FedConfig {
            rounds: self.rounds,
            local_epochs: self.local_epochs,
            batch_size: self.batch_size,
            prox_mu: self.prox_mu,
            cluster: ClusterConfig::never_split(),
            window: self.window,
            standardize: self.standardize,
        }
    }

    pub fn fed_config(&self) -> Result<FedConfig> {
        let mut fed = self.fed_config_unclustered();
        if self.needs_clustering() {
            fed.cluster = self.cluster_config()?;
        }
        Ok(fed)
    }

    pub fn hetero_params(&self, seed: u64) -> HeteroParams {
        HeteroParams {
            awe_length: self.hetero_awe_length,
            pair_budget: self.hetero_pair_budget,
            seed,
            ..HeteroParams::default()
        }
    }
}
