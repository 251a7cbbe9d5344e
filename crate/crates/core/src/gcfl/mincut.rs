//! Stoer–Wagner global minimum cut on a dense weight matrix.

use std::cmp::Ordering;

use ndarray::Array2;

use crate::error::{arg_err, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct MinCut {
    /// Side containing vertex 0, sorted.
    pub side_a: Vec<usize>,
    /// Complement of `side_a`, sorted.
    pub side_b: Vec<usize>,
    pub value: f64,
}

pub(crate) fn validate_weights(w: &Array2<f64>) -> Result<()> {
    let n = w.nrows();
    if w.ncols() != n {
        return arg_err("weight matrix is not square");
    }
    if n < 2 {
        return arg_err("minimum cut needs at least two vertices");
    }
    for i in 0..n {
        for j in 0..n {
            let x = w[[i, j]];
            if !x.is_finite() || x < 0.0 {
                return arg_err(format!("weight ({i}, {j}) = {x} is negative or not finite"));
            }
            if x != w[[j, i]] {
                return arg_err(format!("weight matrix not symmetric at ({i}, {j})"));
            }
        }
    }
    Ok(())
}

fn normalize(side: &[usize], n: usize) -> (Vec<usize>, Vec<usize>) {
    let mut inside = vec![false; n];
    for &v in side {
        inside[v] = true;
    }
    let flip = !inside[0];
    let a: Vec<usize> = (0..n).filter(|&v| inside[v] != flip).collect();
    let b: Vec<usize> = (0..n).filter(|&v| inside[v] == flip).collect();
    (a, b)
}

/// Minimum-weight bipartition. Among equal-valued cuts found by the phases,
/// the one whose vertex-0 side is lexicographically smallest wins. The
/// diagonal is ignored.
pub fn stoer_wagner_mincut(weights: &Array2<f64>) -> Result<MinCut> {
    validate_weights(weights)?;
    let n = weights.nrows();
    let mut w = weights.clone();
    let mut groups: Vec<Vec<usize>> = (0..n).map(|v| vec![v]).collect();
    let mut active: Vec<usize> = (0..n).collect();
    let mut best: Option<MinCut> = None;

    while active.len() > 1 {
        let mut in_a = vec![false; n];
        let mut conn = vec![0.0; n];
        let start = active[0];
        in_a[start] = true;
        for &v in &active {
            if v != start {
                conn[v] = w[[start, v]];
            }
        }
        let (mut prev, mut last) = (start, start);
        for _ in 1..active.len() {
            let mut pick = None;
            for &v in &active {
                if in_a[v] {
                    continue;
                }
                pick = match pick {
                    Some(p) if conn[p] >= conn[v] => Some(p),
                    _ => Some(v),
                };
            }
            let v = pick.expect("an unvisited vertex remains");
            in_a[v] = true;
            prev = last;
            last = v;
            for &u in &active {
                if !in_a[u] {
                    conn[u] += w[[v, u]];
                }
            }
        }

        let cut_value = conn[last];
        let (side_a, side_b) = normalize(&groups[last], n);
        let better = match &best {
            None => true,
            Some(b) => match cut_value.partial_cmp(&b.value).expect("finite weights") {
                Ordering::Less => true,
                Ordering::Equal => side_a < b.side_a,
                Ordering::Greater => false,
            },
        };
        if better {
            best = Some(MinCut {
                side_a,
                side_b,
                value: cut_value,
            });
        }

        // merge `last` into `prev`
        let moved = std::mem::take(&mut groups[last]);
        groups[prev].extend(moved);
        for &u in &active {
            if u != prev && u != last {
                let x = w[[prev, u]] + w[[last, u]];
                w[[prev, u]] = x;
                w[[u, prev]] = x;
            }
        }
        active.retain(|&u| u != last);
    }
    Ok(best.expect("at least one phase ran"))
}
