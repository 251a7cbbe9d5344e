//! Trainable models: GIN for federated experiments and SGC for the
//! perturbation-sensitivity checks. All arithmetic is 64-bit.

mod adam;
mod checkpoint;
mod features;
mod gin;
mod loss;
mod sgc;

pub use adam::{AdamConfig, AdamState};
pub use checkpoint::{read_checkpoint, write_checkpoint};
pub use features::one_hot_degree_features;
pub use gin::{evaluate, gin_backward, gin_forward, Batch, GinModel, GinShape};
pub use loss::cross_entropy;
pub use sgc::{logistic_regression, normalized_adjacency, propagate, sgc_train, SgcModel};
