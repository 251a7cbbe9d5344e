//! Anonymous-walk distributions.
//!
//! An anonymous walk replaces each visited node by the order of its first
//! appearance, so `a b a c` becomes `0 1 0 2`. The distribution of these
//! patterns under a simple random walk summarizes graph structure
//! independently of node identities.

use std::collections::HashMap;

use rand::Rng as _;

use crate::error::{arg_err, Error, Result};
use crate::graph::Graph;
use crate::rng;

pub const MAX_WALK_LENGTH: usize = 8;

/// Packs a pattern into 4-bit digits. Patterns have at most 9 symbols, each
/// below 9, so this is injective for a fixed length.
fn pack(pattern: &[u8]) -> u64 {
    pattern.iter().fold(0u64, |acc, &s| (acc << 4) | s as u64)
}

/// All canonical anonymous walks with `length` steps, in lexicographic order.
pub fn enumerate_anonymous_walks(length: usize) -> Result<Vec<Vec<u8>>> {
    if !(1..=MAX_WALK_LENGTH).contains(&length) {
        return arg_err(format!("walk length {length} outside 1..={MAX_WALK_LENGTH}"));
    }
    let mut out = Vec::new();
    let mut cur = vec![0u8];
    fn grow(cur: &mut Vec<u8>, max: u8, target: usize, out: &mut Vec<Vec<u8>>) {
        if cur.len() == target {
            out.push(cur.clone());
            return;
        }
        let last = *cur.last().expect("nonempty");
        for s in 0..=max + 1 {
            if s == last {
                continue;
            }
            cur.push(s);
            grow(cur, max.max(s), target, out);
            cur.pop();
        }
    }
    grow(&mut cur, 0, length + 1, &mut out);
    Ok(out)
}

/// How walk probabilities are obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AweMode {
    /// Full enumeration of every walk with its probability.
    Exact,
    /// Empirical frequencies over independent sampled walks.
    Sampled { samples: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct AweDistribution {
    pub walk_length: usize,
    pub probs: Vec<f64>,
}

/// Pattern lookup table for one walk length.
#[derive(Debug, Clone)]
pub struct PatternIndex {
    length: usize,
    index: HashMap<u64, usize>,
    count: usize,
}

impl PatternIndex {
    pub fn new(length: usize) -> Result<Self> {
        let patterns = enumerate_anonymous_walks(length)?;
        let count = patterns.len();
        let index = patterns.iter().enumerate().map(|(i, p)| (pack(p), i)).collect();
        Ok(Self {
            length,
            index,
            count,
        })
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn length(&self) -> usize {
        self.length
    }
}

/// Anonymizes `walk` in place into `buf`.
fn anonymize(walk: &[usize], buf: &mut Vec<u8>) {
    buf.clear();
    let mut seen: Vec<usize> = Vec::with_capacity(walk.len());
    for &v in walk {
        let id = match seen.iter().position(|&s| s == v) {
            Some(i) => i,
            None => {
                seen.push(v);
                seen.len() - 1
            }
        };
        buf.push(id as u8);
    }
}

/// Number of walks of `length` steps started from every non-isolated node.
pub fn total_walks(graph: &Graph, length: usize) -> f64 {
    let adj = graph.adjacency();
    let mut counts: Vec<f64> = adj.iter().map(|_| 1.0).collect();
    for _ in 0..length {
        counts = adj.iter().map(|nb| nb.iter().map(|&u| counts[u]).sum()).collect();
    }
    counts.iter().sum()
}

pub fn awe_distribution(graph: &Graph, length: usize, mode: AweMode) -> Result<AweDistribution> {
    let index = PatternIndex::new(length)?;
    awe_distribution_indexed(graph, &index, mode)
}

pub fn awe_distribution_indexed(
    graph: &Graph,
    index: &PatternIndex,
    mode: AweMode,
) -> Result<AweDistribution> {
    if graph.num_edges() == 0 {
        return Err(Error::UndefinedEmbedding(
            "anonymous walks on an edgeless graph".into(),
        ));
    }
    let adj = graph.adjacency();
    let starts: Vec<usize> = (0..graph.num_nodes()).filter(|&v| !adj[v].is_empty()).collect();
    let mut probs = vec![0.0; index.len()];
    let length = index.length;

    match mode {
        AweMode::Exact => {
            let p0 = 1.0 / starts.len() as f64;
            let mut walk = Vec::with_capacity(length + 1);
            let mut buf = Vec::with_capacity(length + 1);
            for &s in &starts {
                walk.clear();
                walk.push(s);
                enumerate(&adj, &mut walk, p0, length, index, &mut buf, &mut probs);
            }
        }
        AweMode::Sampled { samples, seed } => {
            if samples == 0 {
                return arg_err("sampled walk mode needs at least one sample");
            }
            let mut rng = rng::derive(seed, rng::stream::AWE_SAMPLING, 0);
            let mut walk = Vec::with_capacity(length + 1);
            let mut buf = Vec::with_capacity(length + 1);
            let w = 1.0 / samples as f64;
            for _ in 0..samples {
                walk.clear();
                let mut v = starts[rng.random_range(0..starts.len())];
                walk.push(v);
                for _ in 0..length {
                    v = adj[v][rng.random_range(0..adj[v].len())];
                    walk.push(v);
                }
                anonymize(&walk, &mut buf);
                probs[index.index[&pack(&buf)]] += w;
            }
        }
    }
    Ok(AweDistribution {
        walk_length: length,
        probs,
    })
}

fn enumerate(
    adj: &[Vec<usize>],
    walk: &mut Vec<usize>,
    p: f64,
    length: usize,
    index: &PatternIndex,
    buf: &mut Vec<u8>,
    probs: &mut [f64],
) {
    if walk.len() == length + 1 {
        anonymize(walk, buf);
        probs[index.index[&pack(buf)]] += p;
        return;
    }
    let v = *walk.last().expect("nonempty walk");
    let step = p / adj[v].len() as f64;
    for &u in &adj[v] {
        walk.push(u);
        enumerate(adj, walk, step, length, index, buf, probs);
        walk.pop();
    }
}
