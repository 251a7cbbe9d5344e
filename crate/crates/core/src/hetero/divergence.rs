use crate::error::{arg_err, Result};

fn check(p: &[f64], q: &[f64]) -> Result<()> {
    if p.len() != q.len() {
        return arg_err(format!("distribution lengths differ: {} vs {}", p.len(), q.len()));
    }
    for (name, v) in [("p", p), ("q", q)] {
        let s: f64 = v.iter().sum();
        if (s - 1.0).abs() > 1e-6 || v.iter().any(|&x| x < 0.0) {
            return arg_err(format!("{name} is not a probability vector (sum {s})"));
        }
    }
    Ok(())
}

/// `sum p log2(p / m)` with `0 log 0 = 0`.
fn kl_to_mixture(p: &[f64], m: &[f64]) -> f64 {
    p.iter()
        .zip(m)
        .filter(|(&pi, _)| pi > 0.0)
        .map(|(&pi, &mi)| pi * (pi / mi).log2())
        .sum()
}

/// Jensen–Shannon divergence in bits, in `[0, 1]`.
pub fn js_divergence(p: &[f64], q: &[f64]) -> Result<f64> {
    check(p, q)?;
    let m: Vec<f64> = p.iter().zip(q).map(|(a, b)| 0.5 * (a + b)).collect();
    let js = 0.5 * kl_to_mixture(p, &m) + 0.5 * kl_to_mixture(q, &m);
    Ok(js.clamp(0.0, 1.0))
}

/// Jensen–Shannon distance: square root of the base-2 divergence.
pub fn js_distance(p: &[f64], q: &[f64]) -> Result<f64> {
    js_divergence(p, q).map(f64::sqrt)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_and_disjoint() {
        assert_eq!(js_distance(&[0.3, 0.7], &[0.3, 0.7]).unwrap(), 0.0);
        assert_eq!(js_divergence(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 1.0);
        assert_eq!(js_distance(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 1.0);
    }

    #[test]
    fn point_mass_vs_uniform() {
        // m = [3/4, 1/4]; KL(p||m) = log2(4/3); KL(q||m) = 0.5 log2(2/3) + 0.5 log2(2)
        let kl_p = (4.0f64 / 3.0).log2();
        let kl_q = 0.5 * (0.5f64 / 0.75).log2() + 0.5 * (0.5f64 / 0.25).log2();
        let expected = 0.5 * kl_p + 0.5 * kl_q;
        let got = js_divergence(&[1.0, 0.0], &[0.5, 0.5]).unwrap();
        assert!((got - expected).abs() < 1e-15);
        assert!((got - 0.311_278_124_459_132_8).abs() < 1e-12);
        let d = js_distance(&[1.0, 0.0], &[0.5, 0.5]).unwrap();
        assert!((d - expected.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn length_mismatch() {
        assert!(js_distance(&[1.0], &[0.5, 0.5]).is_err());
    }
}
