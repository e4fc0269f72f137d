use serde::Serialize;

use super::check_pair;
use crate::envmap::RadioField;
use crate::error::{parameter, Result};

/// Penalty applied to each finite-difference gap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GradNorm {
    #[default]
    L1,
    L2,
}

impl GradNorm {
    fn apply(self, gap: f64) -> f64 {
        match self {
            GradNorm::L1 => gap.abs(),
            GradNorm::L2 => gap * gap,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GradLossConfig {
    /// Average-pooling factors for the in-plane term.
    pub scales: Vec<usize>,
    pub lambda_grad: f64,
    pub lambda_z: f64,
    pub norm: GradNorm,
}

impl Default for GradLossConfig {
    fn default() -> Self {
        Self { scales: vec![1, 2, 4], lambda_grad: 1.0, lambda_z: 0.5, norm: GradNorm::L1 }
    }
}

impl GradLossConfig {
    pub fn validate(&self) -> Result<()> {
        if self.scales.is_empty() || self.scales.contains(&0) {
            return Err(parameter("gradient scales must be non-empty and at least 1"));
        }
        if !(self.lambda_grad >= 0.0 && self.lambda_z >= 0.0) {
            return Err(parameter("gradient weights must be non-negative"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GradLoss {
    /// In-plane term per scale, in the order of `GradLossConfig::scales`.
    pub inplane_per_scale: Vec<(usize, f64)>,
    /// Unweighted vertical term; exactly 0 for single-slice fields.
    pub vertical: f64,
    /// Sum of in-plane terms plus `lambda_z * vertical`.
    pub total: f64,
    /// `lambda_grad * total`.
    pub weighted: f64,
}

/// Average-pool one slice by `s`, dropping any remainder.
fn pool(slice: &[f64], width: usize, height: usize, s: usize) -> (Vec<f64>, usize, usize) {
    let (w, h) = (width / s, height / s);
    let scale = 1.0 / (s * s) as f64;
    let mut out = vec![0.0; w * h];
    for r in 0..h {
        for c in 0..w {
            let mut acc = 0.0;
            for dr in 0..s {
                for dc in 0..s {
                    acc += slice[(r * s + dr) * width + c * s + dc];
                }
            }
            out[r * w + c] = acc * scale;
        }
    }
    (out, w, h)
}

/// Mean penalty over all x- and y-differences of one pooled slice pair.
fn inplane_gap(a: &[f64], b: &[f64], w: usize, h: usize, norm: GradNorm) -> (f64, usize) {
    let mut sum = 0.0;
    let mut count = 0;
    for r in 0..h {
        for c in 0..w {
            let i = r * w + c;
            if c + 1 < w {
                sum += norm.apply((a[i + 1] - a[i]) - (b[i + 1] - b[i]));
                count += 1;
            }
            if r + 1 < h {
                sum += norm.apply((a[i + w] - a[i]) - (b[i + w] - b[i]));
                count += 1;
            }
        }
    }
    (sum, count)
}

/// Multi-scale in-plane plus vertical gradient gap between `pred` and `gt`.
///
/// Scales whose pooled slice admits no difference contribute 0.
pub fn grad3d_loss(pred: &RadioField, gt: &RadioField, cfg: &GradLossConfig) -> Result<GradLoss> {
    check_pair(pred, gt)?;
    cfg.validate()?;
    let (width, height, n_z) = (gt.width(), gt.height(), gt.n_z());
    let mut inplane_per_scale = Vec::with_capacity(cfg.scales.len());
    for &s in &cfg.scales {
        let (mut sum, mut count) = (0.0, 0usize);
        for z in 0..n_z {
            let (pa, w, h) = pool(pred.slice(z), width, height, s);
            let (pb, _, _) = pool(gt.slice(z), width, height, s);
            let (sz, cz) = inplane_gap(&pa, &pb, w, h, cfg.norm);
            sum += sz;
            count += cz;
        }
        inplane_per_scale.push((s, if count == 0 { 0.0 } else { sum / count as f64 }));
    }
    let vertical = if n_z < 2 {
        0.0
    } else {
        let diffs = vertical_gaps(pred, gt);
        diffs.iter().map(|&g| cfg.norm.apply(g)).sum::<f64>() / diffs.len() as f64
    };
    let total = inplane_per_scale.iter().map(|(_, v)| v).sum::<f64>() + cfg.lambda_z * vertical;
    Ok(GradLoss { inplane_per_scale, vertical, total, weighted: cfg.lambda_grad * total })
}

/// Signed `dz pred - dz gt` for every voxel pair stacked in z.
fn vertical_gaps(pred: &RadioField, gt: &RadioField) -> Vec<f64> {
    let n = gt.slice_len();
    (0..gt.n_z() - 1)
        .flat_map(|z| {
            let (p0, p1, g0, g1) = (pred.slice(z), pred.slice(z + 1), gt.slice(z), gt.slice(z + 1));
            (0..n).map(move |i| (p1[i] - p0[i]) - (g1[i] - g0[i]))
        })
        .collect()
}

/// Empirical distribution of per-voxel absolute vertical-gradient errors.
#[derive(Debug, Clone, PartialEq)]
pub struct VerticalErrorCdf {
    sorted: Vec<f64>,
}

impl VerticalErrorCdf {
    pub fn values(&self) -> &[f64] {
        &self.sorted
    }

    /// Nearest-rank percentile, `q` in `[0, 100]`.
    pub fn percentile(&self, q: f64) -> f64 {
        let n = self.sorted.len();
        let rank = ((q.clamp(0.0, 100.0) / 100.0) * n as f64).ceil() as usize;
        self.sorted[rank.clamp(1, n) - 1]
    }

    /// Fraction of errors `<= x`.
    pub fn cdf(&self, x: f64) -> f64 {
        self.sorted.partition_point(|&v| v <= x) as f64 / self.sorted.len() as f64
    }

    /// `(value, cumulative fraction)` at every sample.
    pub fn table(&self) -> Vec<(f64, f64)> {
        let n = self.sorted.len() as f64;
        self.sorted.iter().enumerate().map(|(i, &v)| (v, (i + 1) as f64 / n)).collect()
    }
}

pub fn vertical_grad_error_cdf(pred: &RadioField, gt: &RadioField) -> Result<VerticalErrorCdf> {
    check_pair(pred, gt)?;
    if gt.n_z() < 2 {
        return Err(parameter("vertical gradient error needs at least two height slices"));
    }
    let mut sorted: Vec<f64> = vertical_gaps(pred, gt).into_iter().map(f64::abs).collect();
    sorted.sort_by(f64::total_cmp);
    Ok(VerticalErrorCdf { sorted })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envmap::Unit;

    fn field(w: usize, h: usize, nz: usize, v: Vec<f64>) -> RadioField {
        RadioField::new(w, h, nz, Unit::Scalar, v).unwrap()
    }

    #[test]
    fn identical_and_offset_fields_have_no_gap() {
        let a = field(8, 8, 3, (0..192).map(|i| (i as f64 * 0.37).sin()).collect());
        let b = a.map_values(Unit::Scalar, |v| v + 4.0).unwrap();
        for other in [&a, &b] {
            let g = grad3d_loss(other, &a, &GradLossConfig::default()).unwrap();
            assert!(g.total.abs() < 1e-12);
        }
    }

    #[test]
    fn single_slice_drops_vertical() {
        let a = field(4, 4, 1, vec![0.0; 16]);
        let mut v = vec![0.0; 16];
        v[5] = 1.0;
        let g = grad3d_loss(&field(4, 4, 1, v), &a, &GradLossConfig::default()).unwrap();
        assert_eq!(g.vertical, 0.0);
        assert!(g.total > 0.0);
    }

    #[test]
    fn two_by_two_by_two_by_hand() {
        // One voxel (z 0, row 0, col 0) raised by 1. At scale 1 there are 4 x- and
        // 4 y-differences, one of each touched: 2/8. Scales 2 and 4 pool to one
        // pixel or less. Vertically 1 of 4 differences is touched: 1/4.
        let gt = field(2, 2, 2, vec![0.0; 8]);
        let mut v = vec![0.0; 8];
        v[0] = 1.0;
        let g = grad3d_loss(&field(2, 2, 2, v), &gt, &GradLossConfig::default()).unwrap();
        assert_eq!(g.inplane_per_scale, vec![(1, 0.25), (2, 0.0), (4, 0.0)]);
        assert_eq!(g.vertical, 0.25);
        assert!((g.total - 0.375).abs() < 1e-12);
        assert!((g.weighted - 0.375).abs() < 1e-12);
    }

    #[test]
    fn pooled_scale_sees_block_edges() {
        // 4x4 with the left half raised by 2: at scale 2 the pooled 2x2 has one
        // x-difference of 2 out of 4 differences.
        let gt = field(4, 4, 1, vec![0.0; 16]);
        let v: Vec<f64> = (0..16).map(|i| if i % 4 < 2 { 2.0 } else { 0.0 }).collect();
        let cfg = GradLossConfig { scales: vec![2], ..Default::default() };
        let g = grad3d_loss(&field(4, 4, 1, v), &gt, &cfg).unwrap();
        assert_eq!(g.inplane_per_scale, vec![(2, 2.0 * 2.0 / 4.0)]);
    }

    #[test]
    fn l2_squares_gaps() {
        let gt = field(2, 1, 1, vec![0.0, 0.0]);
        let p = field(2, 1, 1, vec![0.0, 3.0]);
        let cfg = GradLossConfig { scales: vec![1], norm: GradNorm::L2, ..Default::default() };
        assert_eq!(grad3d_loss(&p, &gt, &cfg).unwrap().total, 9.0);
    }

    #[test]
    fn cdf_percentiles_match_sort() {
        let gt = field(5, 1, 2, vec![0.0; 10]);
        let p = field(5, 1, 2, vec![0.0, 0.0, 0.0, 0.0, 0.0, 0.5, -0.1, 0.3, 0.2, -0.4]);
        let cdf = vertical_grad_error_cdf(&p, &gt).unwrap();
        assert_eq!(cdf.values(), &[0.1, 0.2, 0.3, 0.4, 0.5]);
        assert_eq!(cdf.percentile(90.0), 0.5);
        assert_eq!(cdf.percentile(50.0), 0.3);
        assert_eq!(cdf.cdf(0.25), 0.4);
        assert_eq!(cdf.table().last().unwrap().1, 1.0);
        assert!(vertical_grad_error_cdf(&field(2, 1, 1, vec![0.0; 2]), &field(2, 1, 1, vec![0.0; 2])).is_err());
    }

    #[test]
    fn cdf_of_identical_is_step_at_zero() {
        let a = field(3, 3, 4, vec![1.0; 36]);
        let cdf = vertical_grad_error_cdf(&a, &a).unwrap();
        assert_eq!(cdf.cdf(0.0), 1.0);
    }
}
