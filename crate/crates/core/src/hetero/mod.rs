//! Structure and feature heterogeneity between sets of graphs.
//!
//! Structure heterogeneity of a graph pair is the Jensen–Shannon distance
//! between their anonymous-walk distributions; feature heterogeneity is the
//! Jensen–Shannon divergence between their linked-node feature-similarity
//! histograms. Set-level values average over graph pairs.

mod awe;
mod divergence;
mod features;

use rand::seq::index;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::linalg::{mean, std_pop};
use crate::rng;

pub use awe::{
    awe_distribution, awe_distribution_indexed, enumerate_anonymous_walks, total_walks,
    AweDistribution, AweMode, PatternIndex, MAX_WALK_LENGTH,
};
pub use divergence::{js_distance, js_divergence};
pub use features::{bin_of, cosine, feature_sim_histogram, FeatureSimHistogram};

#[derive(Debug, Clone, PartialEq)]
pub struct HeteroParams {
    pub awe_length: usize,
    pub bins: usize,
    pub pair_budget: usize,
    /// Graphs with more walks than this are embedded by sampling.
    pub walk_budget: f64,
    pub fallback_samples: usize,
    pub seed: u64,
}

impl Default for HeteroParams {
    fn default() -> Self {
        Self {
            awe_length: 4,
            bins: 20,
            pair_budget: 2000,
            walk_budget: 1.0e6,
            fallback_samples: 20_000,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeterogeneityReport {
    pub structure_mean: f64,
    pub structure_std: f64,
    pub feature_mean: f64,
    pub feature_std: f64,
    pub pairs: usize,
}

/// Per-graph embeddings; `None` for graphs without edges.
struct Embedded {
    awe: Vec<Option<Vec<f64>>>,
    hist: Vec<Option<Vec<f64>>>,
    kept: Vec<usize>,
}

fn embed(graphs: &[Graph], index: &PatternIndex, params: &HeteroParams) -> Result<Embedded> {
    let results: Vec<Result<Option<(Vec<f64>, Vec<f64>)>>> = graphs
        .par_iter()
        .map(|g| {
            if g.num_edges() == 0 {
                return Ok(None);
            }
            let mode = if total_walks(g, params.awe_length) <= params.walk_budget {
                AweMode::Exact
            } else {
                AweMode::Sampled {
                    samples: params.fallback_samples,
                    seed: params.seed,
                }
            };
            let awe = awe_distribution_indexed(g, index, mode)?;
            let hist = feature_sim_histogram(g, params.bins)?;
            Ok(Some((awe.probs, hist.mass)))
        })
        .collect();
    let mut out = Embedded {
        awe: Vec::with_capacity(graphs.len()),
        hist: Vec::with_capacity(graphs.len()),
        kept: Vec::new(),
    };
    for (i, r) in results.into_iter().enumerate() {
        match r? {
            Some((a, h)) => {
                out.awe.push(Some(a));
                out.hist.push(Some(h));
                out.kept.push(i);
            }
            None => {
                out.awe.push(None);
                out.hist.push(None);
            }
        }
    }
    if graphs.is_empty() || 2 * out.kept.len() < graphs.len() {
        return Err(Error::UndefinedEmbedding(format!(
            "{} of {} graphs have no edges",
            graphs.len() - out.kept.len(),
            graphs.len()
        )));
    }
    Ok(out)
}

/// Decodes the k-th unordered distinct pair (i < j) of n items.
fn decode_unordered(n: usize, mut k: usize) -> (usize, usize) {
    let mut i = 0;
    loop {
        let row = n - 1 - i;
        if k < row {
            return (i, i + 1 + k);
        }
        k -= row;
        i += 1;
    }
}

/// Average pairwise heterogeneity between `set_a` and `set_b`, or among the
/// distinct pairs of `set_a` when `set_b` is `None`.
pub fn pairwise_heterogeneity(
    set_a: &[Graph],
    set_b: Option<&[Graph]>,
    params: &HeteroParams,
) -> Result<HeterogeneityReport> {
    let index = PatternIndex::new(params.awe_length)?;
    let ea = embed(set_a, &index, params)?;
    let eb = match set_b {
        Some(b) => Some(embed(b, &index, params)?),
        None => None,
    };

    let (na, nb) = (ea.kept.len(), eb.as_ref().map_or(0, |e| e.kept.len()));
    let total = match eb {
        Some(_) => na * nb,
        None if na < 2 => 1,
        None => na * (na - 1) / 2,
    };
    let decode = |k: usize| -> (usize, usize) {
        match eb {
            Some(_) => (ea.kept[k / nb], k % nb),
            None if na < 2 => (ea.kept[0], ea.kept[0]),
            None => {
                let (i, j) = decode_unordered(na, k);
                (ea.kept[i], ea.kept[j])
            }
        }
    };
    let picks: Vec<usize> = if total <= params.pair_budget {
        (0..total).collect()
    } else {
        let mut r = rng::derive(params.seed, rng::stream::PAIR_SAMPLING, 0);
        let mut v = index::sample(&mut r, total, params.pair_budget).into_vec();
        v.sort_unstable();
        v
    };

    let pairs: Vec<(f64, f64)> = picks
        .par_iter()
        .map(|&k| {
            let (i, j) = decode(k);
            let (awe_j, hist_j) = match &eb {
                Some(e) => {
                    let j = e.kept[j];
                    (&e.awe[j], &e.hist[j])
                }
                None => (&ea.awe[j], &ea.hist[j]),
            };
            let s = js_distance(
                ea.awe[i].as_deref().expect("kept"),
                awe_j.as_deref().expect("kept"),
            )?;
            let f = js_divergence(
                ea.hist[i].as_deref().expect("kept"),
                hist_j.as_deref().expect("kept"),
            )?;
            Ok((s, f))
        })
        .collect::<Result<_>>()?;
    let s: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let f: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    Ok(HeterogeneityReport {
        structure_mean: mean(&s),
        structure_std: std_pop(&s),
        feature_mean: mean(&f),
        feature_std: std_pop(&f),
        pairs: pairs.len(),
    })
}

/// Writes `setA,setB,structure_mean,structure_std,feature_mean,feature_std`.
pub fn write_hetero_csv<W: std::io::Write>(
    out: W,
    rows: &[(String, String, HeterogeneityReport)],
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "setA",
        "setB",
        "structure_mean",
        "structure_std",
        "feature_mean",
        "feature_std",
    ])?;
    for (a, b, r) in rows {
        w.write_record([
            a.clone(),
            b.clone(),
            r.structure_mean.to_string(),
            r.structure_std.to_string(),
            r.feature_mean.to_string(),
            r.feature_std.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::erdos_renyi_gnm;

    #[test]
    fn singleton_with_itself_is_zero() {
        let g = erdos_renyi_gnm(6, 8, 1).unwrap();
        let r = pairwise_heterogeneity(&[g], None, &HeteroParams::default()).unwrap();
        assert_eq!(r.structure_mean, 0.0);
        assert_eq!(r.feature_mean, 0.0);
        assert_eq!(r.pairs, 1);
    }

    #[test]
    fn mostly_edgeless_set_errors() {
        let e = Graph::unfeatured(3, vec![], 0).unwrap();
        let g = erdos_renyi_gnm(6, 8, 1).unwrap();
        let set = vec![e.clone(), e, g];
        assert!(pairwise_heterogeneity(&set, None, &HeteroParams::default()).is_err());
    }

    #[test]
    fn budget_caps_pairs() {
        let set: Vec<Graph> = (0..30).map(|s| erdos_renyi_gnm(8, 12, s).unwrap()).collect();
        let p = HeteroParams {
            pair_budget: 50,
            awe_length: 3,
            ..HeteroParams::default()
        };
        let r = pairwise_heterogeneity(&set, None, &p).unwrap();
        assert_eq!(r.pairs, 50);
        let cross = pairwise_heterogeneity(&set[..5], Some(&set[5..9]), &p).unwrap();
        assert_eq!(cross.pairs, 20);
    }

    #[test]
    fn unordered_decode() {
        let got: Vec<_> = (0..6).map(|k| decode_unordered(4, k)).collect();
        assert_eq!(got, vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
    }
}
