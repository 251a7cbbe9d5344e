//! Structural statistics of single graphs and datasets.

use std::collections::VecDeque;

use super::{Dataset, Graph};
use crate::error::{Error, Result};

/// Pearson (non-excess) kurtosis of a sample: m4 / m2^2.
pub(crate) fn pearson_kurtosis(xs: &[f64]) -> Result<f64> {
    if xs.is_empty() {
        return Err(Error::UndefinedStatistic("kurtosis of empty sample".into()));
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let (mut m2, mut m4) = (0.0, 0.0);
    for &x in xs {
        let d = (x - mean) * (x - mean);
        m2 += d;
        m4 += d * d;
    }
    m2 /= n;
    m4 /= n;
    if m2 <= 0.0 {
        return Err(Error::UndefinedStatistic(
            "kurtosis of a zero-variance degree sequence".into(),
        ));
    }
    Ok(m4 / (m2 * m2))
}

pub(crate) fn graph_degree_kurtosis(graph: &Graph) -> Result<f64> {
    let deg: Vec<f64> = graph.degrees().into_iter().map(|d| d as f64).collect();
    pearson_kurtosis(&deg)
}

/// Kurtosis of the degree sequence pooled over every graph of the dataset.
pub fn degree_kurtosis(dataset: &Dataset) -> Result<f64> {
    let pooled: Vec<f64> = dataset
        .graphs
        .iter()
        .flat_map(|g| g.degrees())
        .map(|d| d as f64)
        .collect();
    pearson_kurtosis(&pooled)
}

fn bfs(adj: &[Vec<usize>], src: usize, dist: &mut [usize], queue: &mut VecDeque<usize>) {
    dist.fill(usize::MAX);
    dist[src] = 0;
    queue.clear();
    queue.push_back(src);
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u] {
            if dist[v] == usize::MAX {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
}

/// Mean BFS distance over unordered connected node pairs. Disconnected pairs
/// are left out.
pub fn avg_shortest_path(graph: &Graph) -> Result<f64> {
    let n = graph.num_nodes();
    let adj = graph.adjacency();
    let mut dist = vec![usize::MAX; n];
    let mut queue = VecDeque::new();
    let (mut total, mut pairs) = (0u64, 0u64);
    for s in 0..n {
        bfs(&adj, s, &mut dist, &mut queue);
        for &d in &dist[s + 1..] {
            if d != usize::MAX {
                total += d as u64;
                pairs += 1;
            }
        }
    }
    if pairs == 0 {
        return Err(Error::UndefinedStatistic(
            "average shortest path of a graph with no connected pair".into(),
        ));
    }
    Ok(total as f64 / pairs as f64)
}

/// Size of the largest connected component as a percentage of all nodes.
pub fn largest_component_fraction(graph: &Graph) -> f64 {
    let n = graph.num_nodes();
    if n == 0 {
        return 0.0;
    }
    let adj = graph.adjacency();
    let mut seen = vec![false; n];
    let mut best = 0;
    let mut stack = Vec::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        stack.push(s);
        let mut size = 0;
        while let Some(u) = stack.pop() {
            size += 1;
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        best = best.max(size);
    }
    100.0 * best as f64 / n as f64
}

/// Mean local clustering coefficient; nodes of degree < 2 count as 0.
pub fn avg_clustering_coefficient(graph: &Graph) -> f64 {
    let n = graph.num_nodes();
    if n == 0 {
        return 0.0;
    }
    let adj = graph.adjacency();
    let mut mark = vec![false; n];
    let mut sum = 0.0;
    for u in 0..n {
        let k = adj[u].len();
        if k < 2 {
            continue;
        }
        for &v in &adj[u] {
            mark[v] = true;
        }
        let mut links = 0usize;
        for &v in &adj[u] {
            links += adj[v].iter().filter(|&&w| mark[w]).count();
        }
        for &v in &adj[u] {
            mark[v] = false;
        }
        // each triangle edge among neighbors was counted from both ends
        let triangles = links / 2;
        sum += triangles as f64 / (k * (k - 1) / 2) as f64;
    }
    sum / n as f64
}
