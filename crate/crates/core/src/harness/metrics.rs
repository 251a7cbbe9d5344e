use std::io::Write;

use crate::error::{arg_err, Result};
use crate::fed::Algorithm;
use crate::linalg::mean;

/// Final-round accuracy summary of one algorithm against self-training.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsSummary {
    pub accuracies: Vec<f64>,
    pub average: f64,
    pub min_gain: f64,
    /// Fraction of clients strictly better than self-training.
    pub improved_ratio: f64,
    pub improved: usize,
}

pub fn compute_metrics(accuracies: &[f64], selftrain: &[f64]) -> Result<MetricsSummary> {
    if accuracies.len() != selftrain.len() || accuracies.is_empty() {
        return arg_err(format!(
            "{} accuracies against {} self-train accuracies",
            accuracies.len(),
            selftrain.len()
        ));
    }
    let gains: Vec<f64> = accuracies.iter().zip(selftrain).map(|(a, s)| a - s).collect();
    let improved = gains.iter().filter(|&&g| g > 0.0).count();
    Ok(MetricsSummary {
        accuracies: accuracies.to_vec(),
        average: mean(accuracies),
        min_gain: gains.iter().copied().fold(f64::INFINITY, f64::min),
        improved_ratio: improved as f64 / accuracies.len() as f64,
        improved,
    })
}

/// `seed,algorithm,average_acc,min_gain,improved,clients,improved_ratio,client_accs`.
pub fn write_summary_csv<W: Write>(out: W, rows: &[(u64, Algorithm, MetricsSummary)]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "seed",
        "algorithm",
        "average_acc",
        "min_gain",
        "improved",
        "clients",
        "improved_ratio",
        "client_accs",
    ])?;
    for (seed, alg, m) in rows {
        let accs: Vec<String> = m.accuracies.iter().map(f64::to_string).collect();
        w.write_record([
            seed.to_string(),
            alg.to_string(),
            m.average.to_string(),
            m.min_gain.to_string(),
            m.improved.to_string(),
            m.accuracies.len().to_string(),
            m.improved_ratio.to_string(),
            accs.join(" "),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic() {
        let m = compute_metrics(&[0.8, 0.6], &[0.7, 0.7]).unwrap();
        assert!((m.average - 0.7).abs() < 1e-15);
        assert!((m.min_gain + 0.1).abs() < 1e-12);
        assert_eq!(m.improved_ratio, 0.5);
    }

    #[test]
    fn ties_do_not_count() {
        let a = [0.5, 0.9, 0.7];
        let m = compute_metrics(&a, &a).unwrap();
        assert_eq!((m.min_gain, m.improved_ratio), (0.0, 0.0));
        assert!(compute_metrics(&a, &a[..2]).is_err());
    }
}
