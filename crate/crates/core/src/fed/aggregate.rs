use crate::error::{arg_err, Result};
use crate::linalg::{axpy, weighted_mean};

/// `base + sum_i (sizes_i / sum sizes) deltas_i`.
pub fn fedavg_aggregate(deltas: &[&[f64]], sizes: &[usize], base: &[f64]) -> Result<Vec<f64>> {
    if deltas.is_empty() || deltas.len() != sizes.len() {
        return arg_err(format!(
            "{} deltas with {} sizes",
            deltas.len(),
            sizes.len()
        ));
    }
    if let Some(d) = deltas.iter().find(|d| d.len() != base.len()) {
        return arg_err(format!("delta of length {} for base of length {}", d.len(), base.len()));
    }
    let total: usize = sizes.iter().sum();
    if total == 0 {
        return arg_err("aggregation with zero total data size");
    }
    debug_assert!(
        (sizes.iter().map(|&s| s as f64 / total as f64).sum::<f64>() - 1.0).abs() < 1e-12
    );
    let mut out = base.to_vec();
    axpy(&mut out, 1.0, &weighted_mean(deltas, sizes));
    Ok(out)
}
