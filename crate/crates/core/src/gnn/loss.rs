use crate::error::{arg_err, Result};

/// Loss and softmax probabilities, stabilized by subtracting the max logit.
pub(crate) fn softmax_cross_entropy(logits: &[f64], label: usize) -> (f64, Vec<f64>) {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|&z| (z - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    let loss = sum.ln() - (logits[label] - max);
    (loss, exps.into_iter().map(|e| e / sum).collect())
}

/// Negative log-softmax of `logits` at `label`.
pub fn cross_entropy(logits: &[f64], label: usize) -> Result<f64> {
    if label >= logits.len() {
        return arg_err(format!("label {label} out of range for {} logits", logits.len()));
    }
    Ok(softmax_cross_entropy(logits, label).0)
}
