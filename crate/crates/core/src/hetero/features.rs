use crate::error::{arg_err, Error, Result};
use crate::graph::Graph;

/// Histogram of endpoint feature cosine similarity over a graph's edges.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureSimHistogram {
    pub bins: usize,
    /// `bins + 1` boundaries from -1 to 1.
    pub edges: Vec<f64>,
    pub mass: Vec<f64>,
}

/// Cosine similarity with zero vectors mapped to 0.
pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let (mut ab, mut aa, mut bb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        ab += x * y;
        aa += x * x;
        bb += y * y;
    }
    if aa == 0.0 || bb == 0.0 {
        return 0.0;
    }
    (ab / (aa.sqrt() * bb.sqrt())).clamp(-1.0, 1.0)
}

/// Bin of `x` in `bins` equal-width bins over [-1, 1]; 1 lands in the last bin.
pub fn bin_of(x: f64, bins: usize) -> usize {
    let b = ((x + 1.0) / 2.0 * bins as f64).floor();
    (b.max(0.0) as usize).min(bins - 1)
}

pub fn feature_sim_histogram(graph: &Graph, bins: usize) -> Result<FeatureSimHistogram> {
    if bins == 0 {
        return arg_err("histogram needs at least one bin");
    }
    if graph.num_edges() == 0 {
        return Err(Error::UndefinedEmbedding(
            "feature similarity histogram of an edgeless graph".into(),
        ));
    }
    let x = graph.features();
    let mut counts = vec![0usize; bins];
    for &(u, v) in graph.edges() {
        let (ru, rv) = (x.row(u), x.row(v));
        let sim = match (ru.as_slice(), rv.as_slice()) {
            (Some(a), Some(b)) => cosine(a, b),
            _ => cosine(&ru.to_vec(), &rv.to_vec()),
        };
        counts[bin_of(sim, bins)] += 1;
    }
    let total = graph.num_edges() as f64;
    Ok(FeatureSimHistogram {
        bins,
        edges: (0..=bins).map(|i| -1.0 + 2.0 * i as f64 / bins as f64).collect(),
        mass: counts.into_iter().map(|c| c as f64 / total).collect(),
    })
}
