//! Slow, obviously-correct reference implementations.

use std::collections::HashMap;

use gcfl_core::gnn::GinModel;
use gcfl_core::graph::Graph;
use gcfl_core::hetero::PatternIndex;
use ndarray::Array2;

pub fn cut_value(w: &Array2<f64>, side: &[bool]) -> f64 {
    let n = w.nrows();
    let mut c = 0.0;
    for i in 0..n {
        for j in 0..n {
            if side[i] && !side[j] {
                c += w[[i, j]];
            }
        }
    }
    c
}

/// Minimum over every bipartition with vertex 0 on the first side.
pub fn brute_force_mincut(w: &Array2<f64>) -> f64 {
    let n = w.nrows();
    let mut best = f64::INFINITY;
    for mask in 0..(1u32 << (n - 1)) - 1 {
        // bit k set = vertex k+1 joins vertex 0; the all-ones mask is excluded
        let side: Vec<bool> = (0..n).map(|v| v == 0 || mask >> (v - 1) & 1 == 1).collect();
        best = best.min(cut_value(w, &side));
    }
    best
}

pub fn dtw_memo(a: &[f64], b: &[f64], i: usize, j: usize, memo: &mut HashMap<(usize, usize), f64>) -> f64 {
    if let Some(&v) = memo.get(&(i, j)) {
        return v;
    }
    let cost = (a[i] - b[j]).abs();
    let v = match (i, j) {
        (0, 0) => cost,
        (0, _) => cost + dtw_memo(a, b, 0, j - 1, memo),
        (_, 0) => cost + dtw_memo(a, b, i - 1, 0, memo),
        _ => {
            let best = dtw_memo(a, b, i - 1, j - 1, memo)
                .min(dtw_memo(a, b, i - 1, j, memo))
                .min(dtw_memo(a, b, i, j - 1, memo));
            cost + best
        }
    };
    memo.insert((i, j), v);
    v
}

pub fn dense_adjacency(g: &Graph) -> Vec<Vec<bool>> {
    let n = g.num_nodes();
    let mut a = vec![vec![false; n]; n];
    for &(u, v) in g.edges() {
        a[u][v] = true;
        a[v][u] = true;
    }
    a
}

pub fn floyd_warshall_avg(g: &Graph) -> Option<f64> {
    let n = g.num_nodes();
    let a = dense_adjacency(g);
    let inf = usize::MAX / 4;
    let mut d = vec![vec![inf; n]; n];
    for i in 0..n {
        d[i][i] = 0;
        for j in 0..n {
            if a[i][j] {
                d[i][j] = 1;
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                d[i][j] = d[i][j].min(d[i][k] + d[k][j]);
            }
        }
    }
    let (mut s, mut c) = (0usize, 0usize);
    for i in 0..n {
        for j in i + 1..n {
            if d[i][j] < inf {
                s += d[i][j];
                c += 1;
            }
        }
    }
    (c > 0).then(|| s as f64 / c as f64)
}

pub fn union_find_largest(g: &Graph) -> f64 {
    let n = g.num_nodes();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut Vec<usize>, x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        r
    }
    for &(u, v) in g.edges() {
        let (a, b) = (find(&mut parent, u), find(&mut parent, v));
        parent[a] = b;
    }
    let mut sizes = vec![0usize; n];
    for v in 0..n {
        let root = find(&mut parent, v);
        sizes[root] += 1;
    }
    100.0 * *sizes.iter().max().unwrap() as f64 / n as f64
}

pub fn triple_loop_clustering(g: &Graph) -> f64 {
    let n = g.num_nodes();
    let a = dense_adjacency(g);
    let mut total = 0.0;
    for v in 0..n {
        let nb: Vec<usize> = (0..n).filter(|&u| a[v][u]).collect();
        let k = nb.len();
        if k < 2 {
            continue;
        }
        let mut t = 0;
        for x in 0..k {
            for y in x + 1..k {
                if a[nb[x]][nb[y]] {
                    t += 1;
                }
            }
        }
        total += 2.0 * t as f64 / (k * (k - 1)) as f64;
    }
    total / n as f64
}

pub fn textbook_kurtosis(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let m2 = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / n;
    let m4 = xs.iter().map(|x| (x - m).powi(4)).sum::<f64>() / n;
    m4 / (m2 * m2)
}

/// GIN forward pass with explicit dense matrices and scalar loops.
pub fn dense_gin_logits(model: &GinModel, g: &Graph) -> Vec<f64> {
    let s = model.shape();
    let p = model.params();
    let n = g.num_nodes();
    let a = dense_adjacency(g);
    let mut h: Vec<Vec<f64>> = (0..n).map(|v| g.features().row(v).to_vec()).collect();
    let mut at = 0;
    for l in 0..s.num_layers {
        let din = if l == 0 { s.input_dim } else { s.hidden };
        let eps = p[at];
        let w1 = &p[at + 1..at + 1 + din * s.hidden];
        let b1 = &p[at + 1 + din * s.hidden..at + 1 + din * s.hidden + s.hidden];
        let o2 = at + 1 + din * s.hidden + s.hidden;
        let w2 = &p[o2..o2 + s.hidden * s.hidden];
        let b2 = &p[o2 + s.hidden * s.hidden..o2 + s.hidden * s.hidden + s.hidden];
        at = o2 + s.hidden * s.hidden + s.hidden;
        let mut next = vec![vec![0.0; s.hidden]; n];
        for v in 0..n {
            let mut z = vec![0.0; din];
            for k in 0..din {
                z[k] = (1.0 + eps) * h[v][k];
                for u in 0..n {
                    if a[v][u] {
                        z[k] += h[u][k];
                    }
                }
            }
            let mut mid = vec![0.0; s.hidden];
            for j in 0..s.hidden {
                let mut t = b1[j];
                for k in 0..din {
                    t += z[k] * w1[k * s.hidden + j];
                }
                mid[j] = t.max(0.0);
            }
            for j in 0..s.hidden {
                let mut t = b2[j];
                for k in 0..s.hidden {
                    t += mid[k] * w2[k * s.hidden + j];
                }
                next[v][j] = t.max(0.0);
            }
        }
        h = next;
    }
    let wc = &p[at..at + s.hidden * s.output_dim];
    let bc = &p[at + s.hidden * s.output_dim..];
    let pooled: Vec<f64> = (0..s.hidden).map(|j| h.iter().map(|row| row[j]).sum()).collect();
    (0..s.output_dim)
        .map(|c| bc[c] + (0..s.hidden).map(|j| pooled[j] * wc[j * s.output_dim + c]).sum::<f64>())
        .collect()
}

/// Walk distribution by explicit enumeration of every walk sequence.
pub fn brute_force_awe(g: &Graph, length: usize) -> Vec<f64> {
    let adj = g.adjacency();
    let index = PatternIndex::new(length).unwrap();
    let patterns = gcfl_core::hetero::enumerate_anonymous_walks(length).unwrap();
    let starts: Vec<usize> = (0..g.num_nodes()).filter(|&v| !adj[v].is_empty()).collect();
    let mut probs = vec![0.0; index.len()];
    let mut stack: Vec<(Vec<usize>, f64)> = starts.iter().map(|&s| (vec![s], 1.0 / starts.len() as f64)).collect();
    while let Some((walk, p)) = stack.pop() {
        if walk.len() == length + 1 {
            let mut first = Vec::new();
            let anon: Vec<u8> = walk
                .iter()
                .map(|v| match first.iter().position(|f| f == v) {
                    Some(i) => i as u8,
                    None => {
                        first.push(*v);
                        (first.len() - 1) as u8
                    }
                })
                .collect();
            let k = patterns.iter().position(|q| *q == anon).unwrap();
            probs[k] += p;
            continue;
        }
        let v = *walk.last().unwrap();
        for &u in &adj[v] {
            let mut w = walk.clone();
            w.push(u);
            stack.push((w, p / adj[v].len() as f64));
        }
    }
    probs
}
