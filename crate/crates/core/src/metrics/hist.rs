use serde::Serialize;

use crate::error::{validation, Result};

/// Shape statistics of one histogram.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HistSummary {
    /// Entropy divided by `ln(bins)`.
    pub norm_entropy: f64,
    pub gini: f64,
}

/// Per-histogram summaries plus pairwise divergence and correlation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HistStats {
    pub a: HistSummary,
    pub b: HistSummary,
    /// Jensen-Shannon divergence in nats.
    pub d_js: f64,
    /// Pearson correlation of the normalized histograms.
    pub rho: f64,
}

fn normalized(h: &[f64]) -> Result<Vec<f64>> {
    if h.iter().any(|&c| !c.is_finite() || c < 0.0) {
        return Err(validation("histogram counts must be finite and non-negative"));
    }
    let total: f64 = h.iter().sum();
    if total == 0.0 {
        return Err(validation("histogram has zero total mass"));
    }
    Ok(h.iter().map(|c| c / total).collect())
}

fn entropy(p: &[f64]) -> f64 {
    p.iter().filter(|&&v| v > 0.0).map(|&v| -v * v.ln()).sum()
}

/// Gini coefficient of the bin masses, ascending-sort form.
fn gini(p: &[f64]) -> f64 {
    let mut s = p.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    let weighted: f64 = s.iter().enumerate().map(|(i, v)| (2.0 * (i + 1) as f64 - n - 1.0) * v).sum();
    (weighted / n).max(0.0)
}

fn summary(p: &[f64]) -> HistSummary {
    HistSummary { norm_entropy: (entropy(p) / (p.len() as f64).ln()).clamp(0.0, 1.0), gini: gini(p) }
}

fn js_divergence(p: &[f64], q: &[f64]) -> f64 {
    let kl_to_mid = |x: &[f64]| -> f64 {
        x.iter()
            .zip(p.iter().zip(q))
            .filter(|(&v, _)| v > 0.0)
            .map(|(&v, (&a, &b))| v * (v / (0.5 * (a + b))).ln())
            .sum()
    };
    (0.5 * kl_to_mid(p) + 0.5 * kl_to_mid(q)).clamp(0.0, std::f64::consts::LN_2)
}

/// Pearson correlation; zero-variance inputs give 1 if equal, else 0.
fn pearson(p: &[f64], q: &[f64]) -> f64 {
    let n = p.len() as f64;
    let (mp, mq) = (p.iter().sum::<f64>() / n, q.iter().sum::<f64>() / n);
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in p.iter().zip(q) {
        sxy += (a - mp) * (b - mq);
        sxx += (a - mp) * (a - mp);
        syy += (b - mq) * (b - mq);
    }
    if sxx == 0.0 || syy == 0.0 {
        return if p == q { 1.0 } else { 0.0 };
    }
    (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0)
}

pub fn hist_stats(h_a: &[f64], h_b: &[f64]) -> Result<HistStats> {
    if h_a.len() != h_b.len() {
        return Err(validation(format!("histograms have {} and {} bins", h_a.len(), h_b.len())));
    }
    if h_a.len() < 2 {
        return Err(validation("histograms need at least two bins"));
    }
    let (p, q) = (normalized(h_a)?, normalized(h_b)?);
    Ok(HistStats { a: summary(&p), b: summary(&q), d_js: js_divergence(&p, &q), rho: pearson(&p, &q) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    #[test]
    fn uniform_histogram() {
        let s = hist_stats(&[5.0; 8], &[5.0; 8]).unwrap();
        assert!((s.a.norm_entropy - 1.0).abs() < 1e-12);
        assert!(s.a.gini.abs() < 1e-12);
        assert_eq!(s.d_js, 0.0);
        assert_eq!(s.rho, 1.0);
    }

    #[test]
    fn identical_histograms() {
        let h = [1.0, 4.0, 0.0, 9.0, 2.0];
        let s = hist_stats(&h, &h).unwrap();
        assert!(s.d_js.abs() < 1e-12);
        assert!((s.rho - 1.0).abs() < 1e-12);
    }

    #[test]
    fn disjoint_support_is_max_divergence() {
        let s = hist_stats(&[3.0, 1.0, 0.0, 0.0], &[0.0, 0.0, 2.0, 2.0]).unwrap();
        assert!((s.d_js - LN_2).abs() < 1e-12);
    }

    #[test]
    fn concentrated_mass_gini() {
        // One of n bins holds everything: G = (n - 1) / n.
        let s = hist_stats(&[0.0, 0.0, 0.0, 7.0], &[1.0; 4]).unwrap();
        assert!((s.a.gini - 0.75).abs() < 1e-12);
        assert_eq!(s.a.norm_entropy, 0.0);
    }

    #[test]
    fn divergence_is_symmetric() {
        let (a, b) = ([1.0, 2.0, 3.0, 4.0], [4.0, 1.0, 1.0, 0.5]);
        let ab = hist_stats(&a, &b).unwrap();
        let ba = hist_stats(&b, &a).unwrap();
        assert!((ab.d_js - ba.d_js).abs() < 1e-12);
        assert!((ab.rho - ba.rho).abs() < 1e-12);
    }

    #[test]
    fn bad_histograms_rejected() {
        assert!(hist_stats(&[0.0, 0.0], &[1.0, 1.0]).is_err());
        assert!(hist_stats(&[1.0, 1.0], &[1.0, 1.0, 1.0]).is_err());
        assert!(hist_stats(&[1.0], &[1.0]).is_err());
        assert!(hist_stats(&[-1.0, 2.0], &[1.0, 1.0]).is_err());
    }
}
