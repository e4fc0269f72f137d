//! Evaluation metrics for predicted radio fields.
//!
//! NMSE, PSNR and SSIM are computed in the normalized domain; RMSE in dB.

mod grad;
mod hist;
mod ssim;

pub use grad::{grad3d_loss, vertical_grad_error_cdf, GradLoss, GradLossConfig, GradNorm, VerticalErrorCdf};
pub use hist::{hist_stats, HistStats, HistSummary};
pub use ssim::{ssim, ssim_slice, SsimParams};

use serde::Serialize;

use crate::envmap::{denormalize_db, normalize_db, DbRange, RadioField, Unit};
use crate::error::{validation, Error, Result};

fn check_pair(pred: &RadioField, gt: &RadioField) -> Result<()> {
    if !pred.same_shape(gt) {
        return Err(Error::Shape(format!(
            "prediction {}x{}x{} vs ground truth {}x{}x{}",
            pred.width(),
            pred.height(),
            pred.n_z(),
            gt.width(),
            gt.height(),
            gt.n_z()
        )));
    }
    if pred.unit() != gt.unit() {
        return Err(validation(format!("unit mismatch: {:?} vs {:?}", pred.unit(), gt.unit())));
    }
    Ok(())
}

fn check_mask(mask: &[bool], gt: &RadioField) -> Result<()> {
    if mask.len() != gt.values().len() {
        return Err(Error::Shape(format!("mask has {} entries for {} voxels", mask.len(), gt.values().len())));
    }
    if !mask.iter().any(|&m| m) {
        return Err(validation("mask selects no voxels"));
    }
    Ok(())
}

fn nmse_over(pred: &[f64], gt: &[f64], keep: impl Fn(usize) -> bool) -> Result<f64> {
    let (mut num, mut den) = (0.0, 0.0);
    for (_, (p, g)) in pred.iter().zip(gt).enumerate().filter(|(i, _)| keep(*i)) {
        num += (p - g) * (p - g);
        den += g * g;
    }
    if den == 0.0 {
        return Err(Error::Domain("ground truth has zero energy; NMSE undefined".into()));
    }
    Ok(num / den)
}

/// `sum (pred - gt)^2 / sum gt^2`.
pub fn nmse(pred: &RadioField, gt: &RadioField) -> Result<f64> {
    check_pair(pred, gt)?;
    nmse_over(pred.values(), gt.values(), |_| true)
}

/// NMSE over voxels where `mask` is true.
pub fn nmse_masked(pred: &RadioField, gt: &RadioField, mask: &[bool]) -> Result<f64> {
    check_pair(pred, gt)?;
    check_mask(mask, gt)?;
    nmse_over(pred.values(), gt.values(), |i| mask[i])
}

fn mse(pred: &[f64], gt: &[f64]) -> f64 {
    pred.iter().zip(gt).map(|(p, g)| (p - g) * (p - g)).sum::<f64>() / gt.len() as f64
}

/// Root mean squared error of two dB fields.
pub fn rmse_db(pred: &RadioField, gt: &RadioField) -> Result<f64> {
    check_pair(pred, gt)?;
    if gt.unit() != Unit::Db {
        return Err(validation(format!("rmse_db expects dB fields, got {:?}", gt.unit())));
    }
    Ok(mse(pred.values(), gt.values()).sqrt())
}

/// RMSE in dB over voxels where `mask` is true.
pub fn rmse_db_masked(pred: &RadioField, gt: &RadioField, mask: &[bool]) -> Result<f64> {
    check_pair(pred, gt)?;
    check_mask(mask, gt)?;
    if gt.unit() != Unit::Db {
        return Err(validation(format!("rmse_db expects dB fields, got {:?}", gt.unit())));
    }
    let (sum, n) = pred
        .values()
        .iter()
        .zip(gt.values())
        .zip(mask)
        .filter(|(_, &m)| m)
        .fold((0.0, 0usize), |(s, n), ((p, g), _)| (s + (p - g) * (p - g), n + 1));
    Ok((sum / n as f64).sqrt())
}

/// PSNR with data range 1; identical inputs give `f64::INFINITY`.
pub fn psnr(pred: &RadioField, gt: &RadioField) -> Result<f64> {
    check_pair(pred, gt)?;
    let m = mse(pred.values(), gt.values());
    Ok(if m == 0.0 { f64::INFINITY } else { -10.0 * m.log10() })
}

/// The four headline metrics for one prediction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MetricReport {
    pub nmse: f64,
    pub rmse_db: f64,
    pub ssim: f64,
    pub psnr: f64,
}

impl MetricReport {
    /// Accepts dB or normalized fields (both the same unit) and converts with `range`.
    pub fn evaluate(pred: &RadioField, gt: &RadioField, range: DbRange) -> Result<Self> {
        check_pair(pred, gt)?;
        let (norm_p, norm_g, db_p, db_g) = match gt.unit() {
            Unit::Db => (normalize_db(pred, range)?, normalize_db(gt, range)?, pred.clone(), gt.clone()),
            Unit::Normalized01 => (pred.clone(), gt.clone(), denormalize_db(pred, range)?, denormalize_db(gt, range)?),
            other => return Err(validation(format!("metrics need dB or normalized fields, got {other:?}"))),
        };
        Ok(Self {
            nmse: nmse(&norm_p, &norm_g)?,
            rmse_db: rmse_db(&db_p, &db_g)?,
            ssim: ssim(&norm_p, &norm_g, &SsimParams::default())?,
            psnr: psnr(&norm_p, &norm_g)?,
        })
    }

    pub const CSV_HEADER: &'static str = "nmse,rmse_db,ssim,psnr";

    pub fn csv_row(&self) -> String {
        format!("{},{},{},{}", self.nmse, self.rmse_db, self.ssim, self.psnr)
    }
}
