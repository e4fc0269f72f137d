use super::check_pair;
use crate::envmap::RadioField;
use crate::error::{parameter, Result};

/// Gaussian-window SSIM settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SsimParams {
    pub window: usize,
    pub sigma: f64,
    pub k1: f64,
    pub k2: f64,
    pub data_range: f64,
}

impl Default for SsimParams {
    fn default() -> Self {
        Self { window: 11, sigma: 1.5, k1: 0.01, k2: 0.03, data_range: 1.0 }
    }
}

fn gaussian_kernel(window: usize, sigma: f64) -> Vec<f64> {
    let mid = (window as f64 - 1.0) / 2.0;
    let w: Vec<f64> = (0..window).map(|i| (-(i as f64 - mid).powi(2) / (2.0 * sigma * sigma)).exp()).collect();
    let total: f64 = w.iter().sum();
    w.into_iter().map(|v| v / total).collect()
}

/// Separable valid-mode filtering of a `width x height` image.
fn filter_valid(img: &[f64], width: usize, height: usize, k: &[f64]) -> Vec<f64> {
    let n = k.len();
    let (ow, oh) = (width - n + 1, height - n + 1);
    let mut rows = vec![0.0; ow * height];
    for r in 0..height {
        let line = &img[r * width..(r + 1) * width];
        for c in 0..ow {
            rows[r * ow + c] = k.iter().zip(&line[c..c + n]).map(|(a, b)| a * b).sum();
        }
    }
    let mut out = vec![0.0; ow * oh];
    for r in 0..oh {
        for c in 0..ow {
            out[r * ow + c] = k.iter().enumerate().map(|(i, a)| a * rows[(r + i) * ow + c]).sum();
        }
    }
    out
}

/// Mean SSIM of two single-slice images over all valid window positions.
pub fn ssim_slice(a: &[f64], b: &[f64], width: usize, height: usize, p: &SsimParams) -> Result<f64> {
    if p.window == 0 || width < p.window || height < p.window {
        return Err(parameter(format!("{width}x{height} image is smaller than the {0}x{0} SSIM window", p.window)));
    }
    let k = gaussian_kernel(p.window, p.sigma);
    let prod = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(u, v)| u * v).collect::<Vec<f64>>();
    let mu_a = filter_valid(a, width, height, &k);
    let mu_b = filter_valid(b, width, height, &k);
    let aa = filter_valid(&prod(a, a), width, height, &k);
    let bb = filter_valid(&prod(b, b), width, height, &k);
    let ab = filter_valid(&prod(a, b), width, height, &k);
    let c1 = (p.k1 * p.data_range).powi(2);
    let c2 = (p.k2 * p.data_range).powi(2);
    let total: f64 = (0..mu_a.len())
        .map(|i| {
            let (ma, mb) = (mu_a[i], mu_b[i]);
            let va = aa[i] - ma * ma;
            let vb = bb[i] - mb * mb;
            let cov = ab[i] - ma * mb;
            ((2.0 * ma * mb + c1) * (2.0 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2))
        })
        .sum();
    Ok(total / mu_a.len() as f64)
}

/// SSIM averaged over height slices.
pub fn ssim(pred: &RadioField, gt: &RadioField, p: &SsimParams) -> Result<f64> {
    check_pair(pred, gt)?;
    let mut total = 0.0;
    for z in 0..gt.n_z() {
        total += ssim_slice(pred.slice(z), gt.slice(z), gt.width(), gt.height(), p)?;
    }
    Ok(total / gt.n_z() as f64)
}
