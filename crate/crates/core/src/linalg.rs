//! Small helpers over flat parameter vectors.

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `dst += alpha * src`
pub fn axpy(dst: &mut [f64], alpha: f64, src: &[f64]) {
    debug_assert_eq!(dst.len(), src.len());
    for (d, s) in dst.iter_mut().zip(src) {
        *d += alpha * s;
    }
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Size-weighted mean of `vectors`, accumulated in list order.
///
/// Every aggregation path in the crate goes through this function so that
/// FedAvg and single-cluster runs share the exact same floating-point
/// operation sequence.
pub fn weighted_mean(vectors: &[&[f64]], sizes: &[usize]) -> Vec<f64> {
    let total: usize = sizes.iter().sum();
    let len = vectors.first().map_or(0, |v| v.len());
    let mut out = vec![0.0; len];
    for (v, &s) in vectors.iter().zip(sizes) {
        axpy(&mut out, s as f64 / total as f64, v);
    }
    out
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Population standard deviation.
pub fn std_pop(xs: &[f64]) -> f64 {
    let m = mean(xs);
    (xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / xs.len() as f64).sqrt()
}

/// Sample (n - 1) variance.
pub fn var_sample(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() as f64 - 1.0)
}
