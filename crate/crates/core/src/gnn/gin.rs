//! Graph Isomorphism Network with sum readout and manual gradients.
//!
//! Each layer computes `h' = relu(W2 relu(W1 z + b1) + b2)` with
//! `z = (1 + eps) h_v + sum_{u in N(v)} h_u`. Node states of the last layer
//! are summed per graph and mapped to class logits by one linear layer.
//!
//! Parameters live in one flat vector so that federated code can average,
//! subtract and transmit them without knowing the layout.

use ndarray::{Array2, ArrayView2, ArrayViewMut2, Axis};
use rand::Rng as _;

use super::loss::softmax_cross_entropy;
use crate::error::{arg_err, Result};
use crate::graph::Graph;
use crate::rng::Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GinShape {
    pub input_dim: usize,
    pub hidden: usize,
    pub num_layers: usize,
    pub output_dim: usize,
}

impl GinShape {
    pub fn new(input_dim: usize, hidden: usize, num_layers: usize, output_dim: usize) -> Self {
        Self {
            input_dim,
            hidden,
            num_layers,
            output_dim,
        }
    }

    fn layer_in(&self, l: usize) -> usize {
        if l == 0 {
            self.input_dim
        } else {
            self.hidden
        }
    }

    fn layer_len(&self, l: usize) -> usize {
        let (i, h) = (self.layer_in(l), self.hidden);
        1 + i * h + h + h * h + h
    }

    fn layer_offset(&self, l: usize) -> usize {
        (0..l).map(|k| self.layer_len(k)).sum()
    }

    fn classifier_offset(&self) -> usize {
        self.layer_offset(self.num_layers)
    }

    pub fn num_params(&self) -> usize {
        self.classifier_offset() + self.hidden * self.output_dim + self.output_dim
    }
}

/// Offsets of one layer's tensors inside the flat vector.
#[derive(Debug, Clone, Copy)]
struct LayerSlots {
    eps: usize,
    w1: usize,
    b1: usize,
    w2: usize,
    b2: usize,
    fan_in: usize,
}

impl GinShape {
    fn slots(&self, l: usize) -> LayerSlots {
        let (i, h) = (self.layer_in(l), self.hidden);
        let eps = self.layer_offset(l);
        let w1 = eps + 1;
        let b1 = w1 + i * h;
        let w2 = b1 + h;
        let b2 = w2 + h * h;
        LayerSlots {
            eps,
            w1,
            b1,
            w2,
            b2,
            fan_in: i,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GinModel {
    shape: GinShape,
    params: Vec<f64>,
}

fn view(p: &[f64], at: usize, rows: usize, cols: usize) -> ArrayView2<'_, f64> {
    ArrayView2::from_shape((rows, cols), &p[at..at + rows * cols]).expect("layout")
}

fn view_mut(p: &mut [f64], at: usize, rows: usize, cols: usize) -> ArrayViewMut2<'_, f64> {
    ArrayViewMut2::from_shape((rows, cols), &mut p[at..at + rows * cols]).expect("layout")
}

impl GinModel {
    pub fn zeros(shape: GinShape) -> Self {
        Self {
            shape,
            params: vec![0.0; shape.num_params()],
        }
    }

    /// Uniform ±1/sqrt(fan_in) weights and biases, eps = 0.
    pub fn init(shape: GinShape, rng: &mut Rng) -> Self {
        let mut params = vec![0.0; shape.num_params()];
        let mut fill = |range: std::ops::Range<usize>, fan_in: usize| {
            let bound = 1.0 / (fan_in as f64).sqrt();
            for x in &mut params[range] {
                *x = rng.random_range(-bound..bound);
            }
        };
        let h = shape.hidden;
        for l in 0..shape.num_layers {
            let s = shape.slots(l);
            fill(s.w1..s.w1 + s.fan_in * h + h, s.fan_in);
            fill(s.w2..s.w2 + h * h + h, h);
        }
        let c = shape.classifier_offset();
        fill(c..shape.num_params(), h);
        Self { shape, params }
    }

    pub fn from_flat(shape: GinShape, params: Vec<f64>) -> Result<Self> {
        if params.len() != shape.num_params() {
            return arg_err(format!(
                "flat vector has {} entries, shape needs {}",
                params.len(),
                shape.num_params()
            ));
        }
        Ok(Self { shape, params })
    }

    pub fn shape(&self) -> GinShape {
        self.shape
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    pub fn into_flat(self) -> Vec<f64> {
        self.params
    }

    pub fn set_params(&mut self, params: &[f64]) -> Result<()> {
        if params.len() != self.params.len() {
            return arg_err("parameter length mismatch");
        }
        self.params.copy_from_slice(params);
        Ok(())
    }

    pub fn eps(&self, l: usize) -> f64 {
        self.params[self.shape.slots(l).eps]
    }

    /// First-layer input weights, `input_dim x hidden`.
    pub fn first_layer_weights_mut(&mut self) -> ArrayViewMut2<'_, f64> {
        let s = self.shape.slots(0);
        view_mut(&mut self.params, s.w1, s.fan_in, self.shape.hidden)
    }
}

/// Disjoint union of several graphs, ready for one forward pass.
pub struct Batch {
    adj: Vec<Vec<usize>>,
    features: Array2<f64>,
    /// Node range of each graph.
    segments: Vec<(usize, usize)>,
    labels: Vec<usize>,
}

impl Batch {
    pub fn new(graphs: &[&Graph]) -> Result<Self> {
        if graphs.is_empty() {
            return arg_err("empty batch");
        }
        let dim = graphs[0].feat_dim();
        let total: usize = graphs.iter().map(|g| g.num_nodes()).sum();
        let mut features = Array2::zeros((total, dim));
        let mut adj = vec![Vec::new(); total];
        let mut segments = Vec::with_capacity(graphs.len());
        let mut labels = Vec::with_capacity(graphs.len());
        let mut off = 0;
        for g in graphs {
            if g.feat_dim() != dim {
                return arg_err("graphs in a batch have different feature dims");
            }
            let n = g.num_nodes();
            features.slice_mut(ndarray::s![off..off + n, ..]).assign(g.features());
            for &(u, v) in g.edges() {
                adj[off + u].push(off + v);
                adj[off + v].push(off + u);
            }
            segments.push((off, off + n));
            labels.push(g.label());
            off += n;
        }
        Ok(Self {
            adj,
            features,
            segments,
            labels,
        })
    }

    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// `(1 + eps) h + A h`
    fn aggregate(&self, h: &Array2<f64>, eps: f64) -> Array2<f64> {
        let mut out = h * (1.0 + eps);
        let cols = h.ncols();
        let hs = h.as_slice().expect("standard layout");
        let os = out.as_slice_mut().expect("standard layout");
        for (v, nbrs) in self.adj.iter().enumerate() {
            let dst = &mut os[v * cols..(v + 1) * cols];
            for &u in nbrs {
                for (d, s) in dst.iter_mut().zip(&hs[u * cols..(u + 1) * cols]) {
                    *d += s;
                }
            }
        }
        out
    }

    fn pool(&self, h: &Array2<f64>) -> Array2<f64> {
        let mut out = Array2::zeros((self.len(), h.ncols()));
        for (b, &(s, e)) in self.segments.iter().enumerate() {
            out.row_mut(b)
                .assign(&h.slice(ndarray::s![s..e, ..]).sum_axis(Axis(0)));
        }
        out
    }
}

struct LayerCache {
    input: Array2<f64>,
    agg: Array2<f64>,
    pre1: Array2<f64>,
    act1: Array2<f64>,
    pre2: Array2<f64>,
}

struct ForwardCache {
    layers: Vec<LayerCache>,
    pooled: Array2<f64>,
    logits: Array2<f64>,
}

fn relu(a: &Array2<f64>) -> Array2<f64> {
    a.mapv(|x| if x > 0.0 { x } else { 0.0 })
}

fn relu_mask(grad: &mut Array2<f64>, pre: &Array2<f64>) {
    grad.zip_mut_with(pre, |g, &p| {
        if p <= 0.0 {
            *g = 0.0
        }
    });
}

impl GinModel {
    fn check_batch(&self, batch: &Batch) -> Result<()> {
        if batch.features.ncols() != self.shape.input_dim {
            return arg_err(format!(
                "graph feature dim {} differs from model input dim {}",
                batch.features.ncols(),
                self.shape.input_dim
            ));
        }
        if let Some(&l) = batch.labels.iter().find(|&&l| l >= self.shape.output_dim) {
            return arg_err(format!("label {l} out of range for {} outputs", self.shape.output_dim));
        }
        Ok(())
    }

    fn forward_cached(&self, batch: &Batch) -> ForwardCache {
        let sh = self.shape;
        let p = &self.params;
        let mut h = batch.features.clone();
        let mut layers = Vec::with_capacity(sh.num_layers);
        for l in 0..sh.num_layers {
            let s = sh.slots(l);
            let agg = batch.aggregate(&h, p[s.eps]);
            let w1 = view(p, s.w1, s.fan_in, sh.hidden);
            let b1 = view(p, s.b1, 1, sh.hidden);
            let pre1 = agg.dot(&w1) + &b1;
            let act1 = relu(&pre1);
            let w2 = view(p, s.w2, sh.hidden, sh.hidden);
            let b2 = view(p, s.b2, 1, sh.hidden);
            let pre2 = act1.dot(&w2) + &b2;
            let out = relu(&pre2);
            layers.push(LayerCache {
                input: std::mem::replace(&mut h, out),
                agg,
                pre1,
                act1,
                pre2,
            });
        }
        let pooled = batch.pool(&h);
        let c = sh.classifier_offset();
        let wc = view(p, c, sh.hidden, sh.output_dim);
        let bc = view(p, c + sh.hidden * sh.output_dim, 1, sh.output_dim);
        let logits = pooled.dot(&wc) + &bc;
        ForwardCache {
            layers,
            pooled,
            logits,
        }
    }

    /// Logits for every graph in the batch, one row per graph.
    pub fn forward_batch(&self, batch: &Batch) -> Result<Array2<f64>> {
        if batch.features.ncols() != self.shape.input_dim {
            return arg_err(format!(
                "graph feature dim {} differs from model input dim {}",
                batch.features.ncols(),
                self.shape.input_dim
            ));
        }
        Ok(self.forward_cached(batch).logits)
    }

    /// Mean cross-entropy over the batch and its gradient, written into `grad`.
    pub fn loss_and_grad(&self, batch: &Batch, grad: &mut [f64]) -> Result<f64> {
        self.check_batch(batch)?;
        if grad.len() != self.params.len() {
            return arg_err("gradient buffer length mismatch");
        }
        let sh = self.shape;
        let p = &self.params;
        let cache = self.forward_cached(batch);
        let b = batch.len() as f64;

        let mut dlogits = Array2::zeros(cache.logits.raw_dim());
        let mut loss = 0.0;
        for (i, &y) in batch.labels.iter().enumerate() {
            let row = cache.logits.row(i).to_vec();
            let (l, probs) = softmax_cross_entropy(&row, y);
            loss += l;
            for (k, pk) in probs.into_iter().enumerate() {
                dlogits[[i, k]] = (pk - if k == y { 1.0 } else { 0.0 }) / b;
            }
        }
        loss /= b;

        grad.fill(0.0);
        let c = sh.classifier_offset();
        view_mut(grad, c, sh.hidden, sh.output_dim).assign(&cache.pooled.t().dot(&dlogits));
        view_mut(grad, c + sh.hidden * sh.output_dim, 1, sh.output_dim)
            .assign(&dlogits.sum_axis(Axis(0)).insert_axis(Axis(0)));
        let wc = view(p, c, sh.hidden, sh.output_dim);
        let dpooled = dlogits.dot(&wc.t());

        let total_nodes = batch.features.nrows();
        let mut dh = Array2::zeros((total_nodes, sh.hidden));
        for (g, &(s, e)) in batch.segments.iter().enumerate() {
            for v in s..e {
                dh.row_mut(v).assign(&dpooled.row(g));
            }
        }

        for l in (0..sh.num_layers).rev() {
            let s = sh.slots(l);
            let lc = &cache.layers[l];
            let mut d2 = dh;
            relu_mask(&mut d2, &lc.pre2);
            view_mut(grad, s.w2, sh.hidden, sh.hidden).assign(&lc.act1.t().dot(&d2));
            view_mut(grad, s.b2, 1, sh.hidden).assign(&d2.sum_axis(Axis(0)).insert_axis(Axis(0)));
            let w2 = view(p, s.w2, sh.hidden, sh.hidden);
            let mut d1 = d2.dot(&w2.t());
            relu_mask(&mut d1, &lc.pre1);
            view_mut(grad, s.w1, s.fan_in, sh.hidden).assign(&lc.agg.t().dot(&d1));
            view_mut(grad, s.b1, 1, sh.hidden).assign(&d1.sum_axis(Axis(0)).insert_axis(Axis(0)));
            let w1 = view(p, s.w1, s.fan_in, sh.hidden);
            let dagg = d1.dot(&w1.t());
            grad[s.eps] = (&dagg * &lc.input).sum();
            // A is symmetric, so the adjoint of aggregation is aggregation.
            dh = if l > 0 {
                batch.aggregate(&dagg, p[s.eps])
            } else {
                Array2::zeros((0, 0))
            };
        }
        Ok(loss)
    }
}

/// Logits of one graph.
pub fn gin_forward(model: &GinModel, graph: &Graph) -> Result<Vec<f64>> {
    let batch = Batch::new(&[graph])?;
    Ok(model.forward_batch(&batch)?.row(0).to_vec())
}

/// Gradient of the mean cross-entropy over `graphs` w.r.t. all parameters.
pub fn gin_backward(model: &GinModel, graphs: &[&Graph]) -> Result<Vec<f64>> {
    let batch = Batch::new(graphs)?;
    let mut grad = vec![0.0; model.params().len()];
    model.loss_and_grad(&batch, &mut grad)?;
    Ok(grad)
}

/// Mean loss and accuracy of `model` on `graphs`, evaluated in chunks.
pub fn evaluate(model: &GinModel, graphs: &[Graph]) -> Result<(f64, f64)> {
    if graphs.is_empty() {
        return Ok((0.0, 0.0));
    }
    let (mut loss, mut correct) = (0.0, 0usize);
    for chunk in graphs.chunks(256) {
        let refs: Vec<&Graph> = chunk.iter().collect();
        let batch = Batch::new(&refs)?;
        model.check_batch(&batch)?;
        let logits = model.forward_batch(&batch)?;
        for (row, &y) in logits.rows().into_iter().zip(&batch.labels) {
            let r = row.to_vec();
            loss += softmax_cross_entropy(&r, y).0;
            // first maximum wins ties
            let pred = r
                .iter()
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |best, (k, &x)| if x > best.1 { (k, x) } else { best })
                .0;
            if pred == y {
                correct += 1;
            }
        }
    }
    let n = graphs.len() as f64;
    Ok((loss / n, correct as f64 / n))
}
