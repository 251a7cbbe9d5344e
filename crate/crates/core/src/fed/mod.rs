//! Federated training: client state, local updates, aggregation and the
//! round loop.

mod aggregate;
mod client;
mod runner;

pub use aggregate::fedavg_aggregate;
pub use client::{local_objective, local_train, ClientState, LocalUpdate, Objective, Prox, DEFAULT_BATCH_SIZE};
pub use runner::{run_federation, Algorithm, ClientRound, FedConfig, RoundReport, RunOutput, WindowDump};
