//! Clustering on sequences of update norms.
//!
//! The coordinator keeps, per client, a sliding window of the last `d`
//! update norms. Clusters that meet the split criteria are bipartitioned by
//! minimum cut over a similarity graph derived from pairwise DTW distances
//! between those windows.

use std::collections::VecDeque;
use std::io::Write;

use ndarray::Array2;

use crate::error::{arg_err, Result};
use crate::gcfl::CUT_WEIGHT_FLOOR;

/// Per-client ring buffer of recent update norms.
#[derive(Debug, Clone, PartialEq)]
pub struct NormWindow {
    capacity: usize,
    buffers: Vec<VecDeque<f64>>,
}

impl NormWindow {
    pub fn new(num_clients: usize, capacity: usize) -> Result<Self> {
        if capacity == 0 {
            return arg_err("norm window length must be at least 1");
        }
        Ok(Self {
            capacity,
            buffers: vec![VecDeque::with_capacity(capacity); num_clients],
        })
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn num_clients(&self) -> usize {
        self.buffers.len()
    }

    /// Oldest-first copy of a client's buffer.
    pub fn history(&self, client: usize) -> Vec<f64> {
        self.buffers[client].iter().copied().collect()
    }

    pub fn fill(&self, client: usize) -> usize {
        self.buffers[client].len()
    }

    /// Appends one norm per client, evicting the oldest entry when full.
    pub fn push_norms(&mut self, norms: &[f64]) -> Result<()> {
        if norms.len() != self.buffers.len() {
            return arg_err(format!(
                "{} norms for {} clients",
                norms.len(),
                self.buffers.len()
            ));
        }
        if let Some((i, x)) = norms.iter().enumerate().find(|(_, x)| !(**x >= 0.0)) {
            return arg_err(format!("client {i} norm {x} is negative"));
        }
        for (buf, &x) in self.buffers.iter_mut().zip(norms) {
            if buf.len() == self.capacity {
                buf.pop_front();
            }
            buf.push_back(x);
        }
        Ok(())
    }
}

/// Divides a sequence by its population standard deviation. Near-constant
/// sequences are returned unchanged.
pub fn standardize_row(seq: &[f64]) -> Vec<f64> {
    if seq.len() < 2 {
        return seq.to_vec();
    }
    let sd = crate::linalg::std_pop(seq);
    if sd < 1e-12 {
        log::warn!("standardizing a constant norm sequence; left unchanged");
        return seq.to_vec();
    }
    seq.iter().map(|x| x / sd).collect()
}

/// Unbanded DTW with absolute-difference cost.
pub fn dtw_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return arg_err("DTW of an empty sequence");
    }
    let m = b.len();
    let mut prev = vec![f64::INFINITY; m + 1];
    let mut cur = vec![f64::INFINITY; m + 1];
    prev[0] = 0.0;
    for &x in a {
        cur[0] = f64::INFINITY;
        for j in 1..=m {
            let best = prev[j - 1].min(prev[j]).min(cur[j - 1]);
            cur[j] = (x - b[j - 1]).abs() + best;
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    Ok(prev[m])
}

/// Pairwise DTW distances between the (optionally standardized) windows of
/// `members`, indexed in member order.
pub fn dtw_matrix(window: &NormWindow, members: &[usize], standardize: bool) -> Result<Array2<f64>> {
    let rows: Vec<Vec<f64>> = members
        .iter()
        .map(|&c| {
            if c >= window.num_clients() {
                return arg_err(format!("client {c} not tracked by the norm window"));
            }
            let h = window.history(c);
            if h.is_empty() {
                return arg_err(format!("client {c} has no recorded norms"));
            }
            Ok(if standardize { standardize_row(&h) } else { h })
        })
        .collect::<Result<_>>()?;
    let n = rows.len();
    let mut beta = Array2::zeros((n, n));
    for i in 0..n {
        for j in i + 1..n {
            let d = dtw_distance(&rows[i], &rows[j])?;
            beta[[i, j]] = d;
            beta[[j, i]] = d;
        }
    }
    Ok(beta)
}

/// `max(beta) - beta + floor` off the diagonal, zero on it.
pub fn dtw_to_cut_weights(beta: &Array2<f64>) -> Array2<f64> {
    let max = beta.iter().copied().fold(0.0, f64::max);
    Array2::from_shape_fn(beta.raw_dim(), |(i, j)| {
        if i == j {
            0.0
        } else {
            max - beta[[i, j]] + CUT_WEIGHT_FLOOR
        }
    })
}

/// Dumps member windows as `client_id,n1,...,nd` (oldest first). Clients with
/// partial windows leave trailing cells empty.
pub fn write_window_csv<W: Write>(out: W, window: &NormWindow, members: &[usize]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["client_id".to_string()];
    header.extend((0..window.capacity()).map(|k| format!("t-{}", window.capacity() - 1 - k)));
    w.write_record(&header)?;
    for &c in members {
        let mut row = vec![c.to_string()];
        let h = window.history(c);
        row.extend(h.iter().map(f64::to_string));
        row.extend(std::iter::repeat_n(String::new(), window.capacity() - h.len()));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}
