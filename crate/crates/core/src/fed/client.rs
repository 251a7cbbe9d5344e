use rand::seq::SliceRandom;

use crate::error::{arg_err, Error, Result};
use crate::gnn::{AdamConfig, AdamState, Batch, GinModel, GinShape};
use crate::graph::Graph;
use crate::linalg::{dot, sub};
use crate::rng::{self, Rng};

pub const DEFAULT_BATCH_SIZE: usize = 128;

/// One participant: its local data, working model, optimizer state and last
/// transmitted update.
#[derive(Debug, Clone)]
pub struct ClientState {
    pub id: usize,
    pub name: String,
    pub train: Vec<Graph>,
    pub test: Vec<Graph>,
    pub model: GinModel,
    pub optimizer: AdamState,
    pub last_delta: Vec<f64>,
    shuffle: Rng,
}

impl ClientState {
    pub fn new(
        id: usize,
        name: impl Into<String>,
        train: Vec<Graph>,
        test: Vec<Graph>,
        shape: GinShape,
        adam: AdamConfig,
        seed: u64,
    ) -> Self {
        let n = shape.num_params();
        Self {
            id,
            name: name.into(),
            train,
            test,
            model: GinModel::zeros(shape),
            optimizer: AdamState::new(n, adam),
            last_delta: vec![0.0; n],
            shuffle: rng::derive(seed, rng::stream::CLIENT_SHUFFLE, id as u64),
        }
    }

    pub fn data_size(&self) -> usize {
        self.train.len()
    }

    pub fn shape(&self) -> GinShape {
        self.model.shape()
    }

    /// Rebuilds the model and optimizer for a new shape (after feature
    /// unification), keeping data and the shuffle stream.
    pub fn reshape(&mut self, shape: GinShape) {
        let cfg = self.optimizer.config;
        let n = shape.num_params();
        self.model = GinModel::zeros(shape);
        self.optimizer = AdamState::new(n, cfg);
        self.last_delta = vec![0.0; n];
    }
}

/// Proximal term `(mu / 2) ||theta - anchor||^2` added to every batch loss.
#[derive(Debug, Clone, Copy)]
pub struct Prox<'a> {
    pub mu: f64,
    pub anchor: &'a [f64],
}

/// Batch cross-entropy and the full local objective value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Objective {
    pub cross_entropy: f64,
    pub total: f64,
}

/// Loss and gradient of one batch, including the proximal term if present.
pub fn local_objective(
    model: &GinModel,
    batch: &Batch,
    prox: Option<Prox<'_>>,
    grad: &mut [f64],
) -> Result<Objective> {
    let ce = model.loss_and_grad(batch, grad)?;
    let mut total = ce;
    if let Some(Prox { mu, anchor }) = prox {
        let diff = sub(model.params(), anchor);
        total += 0.5 * mu * dot(&diff, &diff);
        for (g, d) in grad.iter_mut().zip(&diff) {
            *g += mu * d;
        }
    }
    Ok(Objective {
        cross_entropy: ce,
        total,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalUpdate {
    pub delta: Vec<f64>,
    /// Mean cross-entropy over the batches seen (proximal term excluded).
    pub train_loss: f64,
}

/// Loads `start`, runs `epochs` passes of shuffled mini-batch Adam and
/// returns the parameter change.
pub fn local_train(
    client: &mut ClientState,
    start: &[f64],
    epochs: usize,
    batch_size: usize,
    prox: Option<Prox<'_>>,
) -> Result<LocalUpdate> {
    if client.train.is_empty() {
        return Err(Error::EmptyClient(client.id));
    }
    if batch_size == 0 {
        return arg_err("batch size must be positive");
    }
    if let Some(p) = prox {
        if p.anchor.len() != start.len() {
            return arg_err("proximal anchor length mismatch");
        }
    }
    client.model.set_params(start)?;
    let mut grad = vec![0.0; start.len()];
    let mut order: Vec<usize> = (0..client.train.len()).collect();
    let (mut loss_sum, mut batches) = (0.0, 0usize);
    for _ in 0..epochs {
        order.shuffle(&mut client.shuffle);
        for chunk in order.chunks(batch_size) {
            let graphs: Vec<&Graph> = chunk.iter().map(|&i| &client.train[i]).collect();
            let batch = Batch::new(&graphs)?;
            let obj = local_objective(&client.model, &batch, prox, &mut grad)?;
            client.optimizer.step(client.model.params_mut(), &grad)?;
            loss_sum += obj.cross_entropy;
            batches += 1;
        }
    }
    let delta = sub(client.model.params(), start);
    client.last_delta.clone_from(&delta);
    Ok(LocalUpdate {
        delta,
        train_loss: if batches == 0 { 0.0 } else { loss_sum / batches as f64 },
    })
}
