//! Logit traces, the LTR1 file format and trace-level statistics.
//!
//! LTR1 is little-endian: magic `LTR1`, `u32` step count, `u32` vocabulary
//! size, then `n_steps * vocab` `f32` logits, step-major. Step `n` of a trace
//! is the prediction for patch `order.perm()[n]`; the order travels in a
//! separate order file.

use std::fs;
use std::io::Write;
use std::path::Path;

use super::step::entropy_of_finite;
use crate::envmap::{RadioField, Unit};
use crate::error::{validation, Error, Result};
use crate::ordering::OrderPi;

pub const TRACE_MAGIC: [u8; 4] = *b"LTR1";
const TRACE_HEADER_LEN: usize = 12;

/// Logits as stored on disk, before pairing with an order.
#[derive(Debug, Clone, PartialEq)]
pub struct RawTrace {
    pub n_steps: usize,
    pub vocab: usize,
    pub logits: Vec<f32>,
}

pub fn encode_trace(trace: &RawTrace) -> Result<Vec<u8>> {
    if trace.n_steps * trace.vocab != trace.logits.len() {
        return Err(validation("trace dimensions do not match logit count"));
    }
    let n = u32::try_from(trace.n_steps).map_err(|_| validation("step count does not fit in u32"))?;
    let v = u32::try_from(trace.vocab).map_err(|_| validation("vocabulary does not fit in u32"))?;
    let mut out = Vec::with_capacity(TRACE_HEADER_LEN + 4 * trace.logits.len());
    out.extend_from_slice(&TRACE_MAGIC);
    out.extend_from_slice(&n.to_le_bytes());
    out.extend_from_slice(&v.to_le_bytes());
    for z in &trace.logits {
        out.extend_from_slice(&z.to_le_bytes());
    }
    Ok(out)
}

pub fn decode_trace(bytes: &[u8]) -> Result<RawTrace> {
    if bytes.len() < 4 || bytes[..4] != TRACE_MAGIC {
        return Err(Error::Format("missing LTR1 magic".into()));
    }
    if bytes.len() < TRACE_HEADER_LEN {
        return Err(Error::Format("truncated LTR1 header".into()));
    }
    let n_steps = u32::from_le_bytes(bytes[4..8].try_into().expect("4 bytes")) as usize;
    let vocab = u32::from_le_bytes(bytes[8..12].try_into().expect("4 bytes")) as usize;
    let expected = n_steps
        .checked_mul(vocab)
        .and_then(|c| c.checked_mul(4))
        .ok_or_else(|| Error::Format("trace dimensions overflow".into()))?;
    let payload = &bytes[TRACE_HEADER_LEN..];
    if payload.len() != expected {
        return Err(Error::Length { expected, found: payload.len() });
    }
    let logits = payload.chunks_exact(4).map(|c| f32::from_le_bytes(c.try_into().expect("4 bytes"))).collect();
    Ok(RawTrace { n_steps, vocab, logits })
}

pub fn save_trace(trace: &RawTrace, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, encode_trace(trace)?)?;
    Ok(())
}

pub fn load_trace(path: impl AsRef<Path>) -> Result<RawTrace> {
    decode_trace(&fs::read(path)?)
}

/// Per-step logits aligned with the generation order.
#[derive(Debug, Clone, PartialEq)]
pub struct LogitTrace {
    vocab: usize,
    logits: Vec<f32>,
    order: OrderPi,
}

impl LogitTrace {
    pub fn new(raw: RawTrace, order: OrderPi) -> Result<Self> {
        if raw.n_steps != order.len() {
            return Err(validation(format!("trace has {} steps but the order covers {} patches", raw.n_steps, order.len())));
        }
        if raw.vocab == 0 || raw.n_steps * raw.vocab != raw.logits.len() {
            return Err(validation("trace shape is inconsistent"));
        }
        if raw.logits.iter().any(|z| !z.is_finite()) {
            return Err(validation("trace contains non-finite logits"));
        }
        Ok(Self { vocab: raw.vocab, logits: raw.logits, order })
    }

    pub fn n_steps(&self) -> usize {
        self.order.len()
    }

    pub fn vocab(&self) -> usize {
        self.vocab
    }

    pub fn order(&self) -> &OrderPi {
        &self.order
    }

    pub fn step_logits(&self, n: usize) -> &[f32] {
        &self.logits[n * self.vocab..(n + 1) * self.vocab]
    }

    /// Entropy at every step, in nats.
    pub fn entropies(&self) -> Vec<f64> {
        (0..self.n_steps())
            .map(|n| entropy_of_finite(self.step_logits(n).iter().map(|&z| z as f64), self.vocab))
            .collect()
    }

    /// Step entropies scattered to patch indices.
    pub fn patch_entropies(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.n_steps()];
        for (h, &patch) in self.entropies().into_iter().zip(self.order.perm()) {
            out[patch] = h;
        }
        out
    }
}

/// Step-wise mean and spread of predictive entropy over a set of traces.
#[derive(Debug, Clone, PartialEq)]
pub struct EntropyProfile {
    pub mean: Vec<f64>,
    /// Population standard deviation across traces.
    pub std: Vec<f64>,
    /// Mean of `mean` over steps.
    pub overall: f64,
}

pub fn entropy_profile(traces: &[LogitTrace]) -> Result<EntropyProfile> {
    let first = traces.first().ok_or_else(|| validation("entropy profile needs at least one trace"))?;
    let (steps, vocab) = (first.n_steps(), first.vocab());
    if traces.iter().any(|t| t.n_steps() != steps || t.vocab() != vocab) {
        return Err(validation("traces differ in step count or vocabulary"));
    }
    let all: Vec<Vec<f64>> = traces.iter().map(LogitTrace::entropies).collect();
    let count = traces.len() as f64;
    let mut mean = vec![0.0; steps];
    let mut std = vec![0.0; steps];
    for n in 0..steps {
        let m = all.iter().map(|h| h[n]).sum::<f64>() / count;
        let var = all.iter().map(|h| (h[n] - m).powi(2)).sum::<f64>() / count;
        mean[n] = m;
        std[n] = var.sqrt();
    }
    let overall = mean.iter().sum::<f64>() / steps as f64;
    Ok(EntropyProfile { mean, std, overall })
}

pub fn write_profile_csv(mut w: impl Write, profile: &EntropyProfile) -> Result<()> {
    writeln!(w, "step,mean,std")?;
    for (n, (m, s)) in profile.mean.iter().zip(&profile.std).enumerate() {
        writeln!(w, "{n},{m},{s}")?;
    }
    Ok(())
}

/// Per-patch entropy difference `H_a - H_b` on the patch grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaHMap {
    pub np: usize,
    /// Row-major over patches.
    pub values: Vec<f64>,
    pub mean: f64,
    /// Population variance over patches.
    pub variance: f64,
}

impl DeltaHMap {
    fn from_values(np: usize, values: Vec<f64>) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let variance = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        Self { np, values, mean, variance }
    }

    /// The map as a single-slice dimensionless grid, ready for RGF1 export.
    pub fn to_field(&self) -> Result<RadioField> {
        RadioField::new(self.np, self.np, 1, Unit::Scalar, self.values.clone())
    }
}

fn check_pair(a: &LogitTrace, b: &LogitTrace) -> Result<()> {
    if a.order().np() != b.order().np() {
        return Err(validation(format!(
            "traces cover different patch grids ({} vs {} per side)",
            a.order().np(),
            b.order().np()
        )));
    }
    Ok(())
}

pub fn delta_h_map(a: &LogitTrace, b: &LogitTrace) -> Result<DeltaHMap> {
    delta_h_map_mean(&[(a, b)])
}

/// Per-patch differences averaged over several trace pairs.
pub fn delta_h_map_mean(pairs: &[(&LogitTrace, &LogitTrace)]) -> Result<DeltaHMap> {
    let (a0, _) = pairs.first().ok_or_else(|| validation("delta-H needs at least one trace pair"))?;
    let np = a0.order().np();
    let mut acc = vec![0.0; np * np];
    for (a, b) in pairs {
        check_pair(a, b)?;
        check_pair(a0, a)?;
        for ((slot, ha), hb) in acc.iter_mut().zip(a.patch_entropies()).zip(b.patch_entropies()) {
            *slot += ha - hb;
        }
    }
    let scale = 1.0 / pairs.len() as f64;
    acc.iter_mut().for_each(|v| *v *= scale);
    Ok(DeltaHMap::from_values(np, acc))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ordering::{hilbert_order, raster_order};

    fn uniform_trace(order: OrderPi, vocab: usize) -> LogitTrace {
        let raw = RawTrace { n_steps: order.len(), vocab, logits: vec![0.0; order.len() * vocab] };
        LogitTrace::new(raw, order).unwrap()
    }

    #[test]
    fn uniform_steps_give_flat_profile() {
        let t = uniform_trace(raster_order(2).unwrap(), 64);
        let p = entropy_profile(&[t]).unwrap();
        for (m, s) in p.mean.iter().zip(&p.std) {
            assert!((m - 64f64.ln()).abs() < 1e-12);
            assert_eq!(*s, 0.0);
        }
    }

    #[test]
    fn profile_mean_of_two_traces() {
        // Step 0: uniform over 4 (ln 4) vs one-hot (0).
        let order = raster_order(1).unwrap();
        let a = LogitTrace::new(RawTrace { n_steps: 1, vocab: 4, logits: vec![0.0; 4] }, order.clone()).unwrap();
        let b = LogitTrace::new(RawTrace { n_steps: 1, vocab: 4, logits: vec![100.0, 0.0, 0.0, 0.0] }, order).unwrap();
        let p = entropy_profile(&[a, b]).unwrap();
        assert!((p.mean[0] - 4f64.ln() / 2.0).abs() < 1e-12);
        assert!((p.std[0] - 4f64.ln() / 2.0).abs() < 1e-12);
    }

    #[test]
    fn mismatched_profile_shapes_rejected() {
        let a = uniform_trace(raster_order(2).unwrap(), 8);
        let b = uniform_trace(raster_order(2).unwrap(), 16);
        assert!(entropy_profile(&[a, b]).is_err());
        assert!(entropy_profile(&[]).is_err());
    }

    #[test]
    fn self_difference_is_zero() {
        let t = uniform_trace(hilbert_order(4).unwrap(), 10);
        let d = delta_h_map(&t, &t).unwrap();
        assert!(d.values.iter().all(|&v| v == 0.0));
        assert_eq!((d.mean, d.variance), (0.0, 0.0));
    }

    #[test]
    fn grid_mismatch_rejected() {
        let a = uniform_trace(raster_order(2).unwrap(), 4);
        let b = uniform_trace(raster_order(4).unwrap(), 4);
        assert!(delta_h_map(&a, &b).is_err());
    }

    #[test]
    fn trace_step_count_must_match_order() {
        let raw = RawTrace { n_steps: 3, vocab: 2, logits: vec![0.0; 6] };
        assert!(LogitTrace::new(raw, raster_order(2).unwrap()).is_err());
    }

    #[test]
    fn truncated_trace_is_length_error() {
        let raw = RawTrace { n_steps: 2, vocab: 3, logits: vec![1.0; 6] };
        let bytes = encode_trace(&raw).unwrap();
        assert!(matches!(decode_trace(&bytes[..bytes.len() - 1]), Err(Error::Length { .. })));
        assert!(matches!(decode_trace(b"RGF1xxxxxxxx"), Err(Error::Format(_))));
    }
}
