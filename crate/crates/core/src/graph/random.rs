use rand::seq::index;
use rand::Rng as _;

use super::Graph;
use crate::error::{arg_err, Result};
use crate::rng;

/// Maps a lexicographic pair index to `(u, v)` with `u < v`.
fn decode_pair(n: usize, mut k: usize) -> (usize, usize) {
    let mut u = 0;
    loop {
        let row = n - 1 - u;
        if k < row {
            return (u, u + 1 + k);
        }
        k -= row;
        u += 1;
    }
}

/// Uniform G(n, m) graph: exactly `m` distinct undirected edges, sampled
/// without replacement. Features are a single constant column.
pub fn erdos_renyi_gnm(n: usize, m: usize, seed: u64) -> Result<Graph> {
    let max = n * n.saturating_sub(1) / 2;
    if m > max {
        return arg_err(format!("G({n}, m): m = {m} exceeds {max} possible edges"));
    }
    let mut rng = rng::seeded(seed);
    let mut picks = index::sample(&mut rng, max, m).into_vec();
    picks.sort_unstable();
    let edges = picks.into_iter().map(|k| decode_pair(n, k)).collect();
    Graph::unfeatured(n, edges, 0)
}

/// G(n, p) graph: every pair is linked independently with probability `p`.
pub fn erdos_renyi_gnp(n: usize, p: f64, rng: &mut rng::Rng) -> Result<Graph> {
    if !(0.0..=1.0).contains(&p) {
        return arg_err(format!("G(n, p): p = {p} outside [0, 1]"));
    }
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.random_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::unfeatured(n, edges, 0)
}
