use crate::error::{validation, Result};

/// Output unit for entropies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EntropyUnit {
    #[default]
    Nats,
    Bits,
}

impl EntropyUnit {
    pub fn from_nats(self, h: f64) -> f64 {
        match self {
            EntropyUnit::Nats => h,
            EntropyUnit::Bits => h / std::f64::consts::LN_2,
        }
    }
}

/// Shannon entropy of `softmax(logits)`, in nats, clamped to `[0, ln |C|]`.
pub fn step_entropy(logits: &[f64]) -> Result<f64> {
    if logits.is_empty() {
        return Err(validation("empty logit vector"));
    }
    if let Some(bad) = logits.iter().find(|z| !z.is_finite()) {
        return Err(validation(format!("non-finite logit {bad}")));
    }
    Ok(entropy_of_finite(logits.iter().copied(), logits.len()))
}

/// `H = ln Z - sum_c p_c (z_c - m)` with `m = max z` and `Z = sum_c exp(z_c - m)`.
pub(crate) fn entropy_of_finite(logits: impl Iterator<Item = f64> + Clone, vocab: usize) -> f64 {
    let m = logits.clone().fold(f64::NEG_INFINITY, f64::max);
    let (z, weighted) = logits.fold((0.0, 0.0), |(z, w), l| {
        let s = l - m;
        let e = s.exp();
        (z + e, w + e * s)
    });
    let h = z.ln() - weighted / z;
    h.clamp(0.0, (vocab as f64).ln())
}
