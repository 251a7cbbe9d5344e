//! Experiment driver: partitioning, feature unification, metrics, reports
//! and the synthetic benchmark federation.

mod config;
mod experiment;
mod metrics;
mod partition;
mod report;
mod synthetic;

pub use config::{is_social, ExperimentConfig, FeatureMode, Group, Setting};
pub use experiment::{
    build_federation, calibrate, run_algorithm, run_experiment, run_seed, seed_dir,
    validation_view, write_calibration_csv, write_rounds_csv, write_seed_outputs, CalibrationRow,
    SeedOutcome,
};
pub use metrics::{compute_metrics, write_summary_csv, MetricsSummary};
pub use partition::{
    apply_feature_mode, build_clients, build_multi_dataset_group, load_named, partition_label_skew,
    partition_one_dataset, unify_feature_space, with_degree_features, ClientData,
};
pub use report::{
    cluster_heterogeneity_report, write_cluster_hetero_csv, ClusterHetero, ClusterHeteroReport,
};
pub use synthetic::{recovers_groups, two_group_federation, two_group_fed_config, SyntheticSpec};
