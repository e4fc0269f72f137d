use rand::Rng;

use crate::error::{validation, Result};

/// Largest number of variables accepted for full enumeration.
pub const MAX_VARS: usize = 12;
const MAX_OUTCOMES: usize = 1 << 24;

/// Exact joint distribution over `n_vars` discrete variables.
///
/// Outcome index is mixed-radix with variable 0 as the least significant digit.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDist {
    n_vars: usize,
    n_symbols: usize,
    probs: Vec<f64>,
}

impl JointDist {
    pub fn new(n_vars: usize, n_symbols: usize, probs: Vec<f64>) -> Result<Self> {
        if n_vars == 0 || n_vars > MAX_VARS {
            return Err(validation(format!("joint needs 1..={MAX_VARS} variables, got {n_vars}")));
        }
        if n_symbols < 2 {
            return Err(validation("joint variables need at least two symbols"));
        }
        let outcomes = n_symbols
            .checked_pow(n_vars as u32)
            .filter(|&n| n <= MAX_OUTCOMES)
            .ok_or_else(|| validation("joint is too large to enumerate"))?;
        if probs.len() != outcomes {
            return Err(validation(format!("joint table has {} entries, expected {outcomes}", probs.len())));
        }
        if probs.iter().any(|&p| !p.is_finite() || p < 0.0) {
            return Err(validation("joint probabilities must be finite and non-negative"));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(validation(format!("joint probabilities sum to {total}")));
        }
        Ok(Self { n_vars, n_symbols, probs })
    }

    /// Random joint with i.i.d. uniform weights, normalized.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, n_vars: usize, n_symbols: usize) -> Result<Self> {
        let outcomes = n_symbols.checked_pow(n_vars as u32).unwrap_or(usize::MAX).min(MAX_OUTCOMES + 1);
        let mut w: Vec<f64> = (0..outcomes).map(|_| rng.random::<f64>() + 1e-3).collect();
        let total: f64 = w.iter().sum();
        w.iter_mut().for_each(|p| *p /= total);
        Self::new(n_vars, n_symbols, w)
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn n_symbols(&self) -> usize {
        self.n_symbols
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Symbol of variable `var` in outcome `index`.
    pub fn symbol(&self, index: usize, var: usize) -> usize {
        index / self.n_symbols.pow(var as u32) % self.n_symbols
    }

    /// Entropy of the marginal over the variables set in `mask`.
    pub fn subset_entropy(&self, mask: u32) -> f64 {
        let vars: Vec<usize> = (0..self.n_vars).filter(|v| mask >> v & 1 == 1).collect();
        if vars.is_empty() {
            return 0.0;
        }
        let mut marginal = vec![0.0; self.n_symbols.pow(vars.len() as u32)];
        for (index, &p) in self.probs.iter().enumerate() {
            let key = vars.iter().rev().fold(0, |acc, &v| acc * self.n_symbols + self.symbol(index, v));
            marginal[key] += p;
        }
        entropy(&marginal)
    }

    pub fn entropy(&self) -> f64 {
        entropy(&self.probs)
    }
}

fn entropy(probs: &[f64]) -> f64 {
    probs.iter().filter(|&&p| p > 0.0).map(|&p| -p * p.ln()).sum()
}

fn check_order(joint: &JointDist, order: &[usize]) -> Result<()> {
    let mut seen = vec![false; joint.n_vars];
    if order.len() != joint.n_vars {
        return Err(validation(format!("order has {} entries for {} variables", order.len(), joint.n_vars)));
    }
    for &v in order {
        if v >= joint.n_vars || std::mem::replace(&mut seen[v], true) {
            return Err(validation("order is not a permutation of the joint's variables"));
        }
    }
    Ok(())
}

fn mask_of(vars: &[usize]) -> u32 {
    vars.iter().fold(0, |m, &v| m | 1 << v)
}

/// `H(v_n | v_<n)` for each step of `order`; the entries sum to the joint entropy.
pub fn exact_conditional_entropies(joint: &JointDist, order: &[usize]) -> Result<Vec<f64>> {
    check_order(joint, order)?;
    let mut out = Vec::with_capacity(order.len());
    let mut prefix = 0u32;
    let mut h_prefix = 0.0;
    for &v in order {
        let with = prefix | 1 << v;
        let h_with = joint.subset_entropy(with);
        out.push(h_with - h_prefix);
        prefix = with;
        h_prefix = h_with;
    }
    Ok(out)
}

/// Mean over steps of `H(v_n | last min(k, n) prefix variables)`.
pub fn limited_context_entropy(joint: &JointDist, order: &[usize], k: usize) -> Result<f64> {
    check_order(joint, order)?;
    let total: f64 = (0..order.len())
        .map(|n| {
            let context = mask_of(&order[n - k.min(n)..n]);
            joint.subset_entropy(context | 1 << order[n]) - joint.subset_entropy(context)
        })
        .sum();
    Ok(total / order.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeded_rng;
    use rand::seq::SliceRandom;
    use std::collections::HashMap;
    use std::f64::consts::LN_2;

    /// Conditional entropy of `target` given `context`, by grouping outcomes on
    /// the context assignment and summing `-p log p(target | context)`.
    fn direct_conditional(joint: &JointDist, context: &[usize], target: usize) -> f64 {
        let mut ctx_mass: HashMap<Vec<usize>, f64> = HashMap::new();
        let mut pair_mass: HashMap<(Vec<usize>, usize), f64> = HashMap::new();
        for (i, &p) in joint.probs().iter().enumerate() {
            let key: Vec<usize> = context.iter().map(|&v| joint.symbol(i, v)).collect();
            *ctx_mass.entry(key.clone()).or_default() += p;
            *pair_mass.entry((key, joint.symbol(i, target))).or_default() += p;
        }
        pair_mass
            .iter()
            .filter(|(_, &p)| p > 0.0)
            .map(|((key, _), &p)| -p * (p / ctx_mass[key]).ln())
            .sum()
    }

    fn independent_fair(n: usize) -> JointDist {
        let size = 1 << n;
        JointDist::new(n, 2, vec![1.0 / size as f64; size]).unwrap()
    }

    #[test]
    fn independent_bits() {
        let j = independent_fair(4);
        for h in exact_conditional_entropies(&j, &[2, 0, 3, 1]).unwrap() {
            assert!((h - LN_2).abs() < 1e-12);
        }
        for k in 0..4 {
            assert!((limited_context_entropy(&j, &[3, 1, 0, 2], k).unwrap() - LN_2).abs() < 1e-12);
        }
    }

    #[test]
    fn correlated_pair() {
        let j = JointDist::new(2, 2, vec![0.5, 0.0, 0.0, 0.5]).unwrap();
        for order in [[0, 1], [1, 0]] {
            let h = exact_conditional_entropies(&j, &order).unwrap();
            assert!((h[0] - LN_2).abs() < 1e-12);
            assert!(h[1].abs() < 1e-12);
        }
    }

    #[test]
    fn matches_direct_prefix_conditioning() {
        let mut rng = seeded_rng(11);
        for n in [3, 5] {
            let j = JointDist::random(&mut rng, n, 2).unwrap();
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(&mut rng);
            let fast = exact_conditional_entropies(&j, &order).unwrap();
            for (step, h) in fast.iter().enumerate() {
                let want = direct_conditional(&j, &order[..step], order[step]);
                assert!((h - want).abs() < 1e-12, "step {step}");
            }
            for k in 0..n {
                let want: f64 = (0..n)
                    .map(|s| direct_conditional(&j, &order[s - k.min(s)..s], order[s]))
                    .sum::<f64>()
                    / n as f64;
                assert!((limited_context_entropy(&j, &order, k).unwrap() - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn chain_rule_total_is_order_free() {
        let mut rng = seeded_rng(5);
        let j = JointDist::random(&mut rng, 3, 3).unwrap();
        let mut order = vec![0, 1, 2];
        for _ in 0..20 {
            order.shuffle(&mut rng);
            let total: f64 = exact_conditional_entropies(&j, &order).unwrap().iter().sum();
            assert!((total - j.entropy()).abs() < 1e-9);
        }
    }

    #[test]
    fn full_context_recovers_exact_mean() {
        let mut rng = seeded_rng(8);
        let j = JointDist::random(&mut rng, 4, 2).unwrap();
        let order = [1, 3, 0, 2];
        let exact: f64 = exact_conditional_entropies(&j, &order).unwrap().iter().sum::<f64>() / 4.0;
        for k in [3, 4, 10] {
            assert!((limited_context_entropy(&j, &order, k).unwrap() - exact).abs() < 1e-12);
        }
        assert!(limited_context_entropy(&j, &order, 1).unwrap() >= exact - 1e-9);
    }

    #[test]
    fn invalid_tables_rejected() {
        assert!(JointDist::new(2, 2, vec![0.25; 3]).is_err());
        assert!(JointDist::new(2, 2, vec![0.3; 4]).is_err());
        assert!(JointDist::new(2, 2, vec![1.5, -0.5, 0.0, 0.0]).is_err());
        assert!(JointDist::new(13, 2, vec![0.0; 1 << 13]).is_err());
        let j = independent_fair(2);
        assert!(exact_conditional_entropies(&j, &[0, 0]).is_err());
        assert!(exact_conditional_entropies(&j, &[0]).is_err());
    }
}
