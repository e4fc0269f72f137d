use std::fmt::Write as _;
use std::path::PathBuf;

use anyhow::{bail, Context as _, Result};
use clap::Args;
use radiomap_core::envmap::{normalize_db, DbRange, RadioField, Unit};
use radiomap_core::metrics::{grad3d_loss, nmse_masked, rmse_db_masked, GradLossConfig, MetricReport};

use crate::scene::{load_any_grid, load_field, write_atomic};
use crate::{Context, Status};

#[derive(Args, Debug)]
pub struct MetricsArgs {
    /// Predicted field (RGF1, dB or normalized; `.csv` is read as dB).
    #[arg(long)]
    pub pred: PathBuf,
    /// Ground-truth field, same shape and unit as `--pred`.
    #[arg(long)]
    pub gt: PathBuf,
    /// dB value mapped to 1 by normalization.
    #[arg(long, allow_hyphen_values = true)]
    pub range_lo: Option<f64>,
    /// dB value mapped to 0 by normalization.
    #[arg(long, allow_hyphen_values = true)]
    pub range_hi: Option<f64>,
    /// Validity mask (RGF1, nonzero = valid); restricts NMSE and RMSE.
    #[arg(long)]
    pub mask: Option<PathBuf>,
    /// One row per receiver slice after the volume row.
    #[arg(long)]
    pub per_slice: bool,
    /// CSV destination; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn slice_field(f: &RadioField, z: usize) -> Result<RadioField> {
    Ok(RadioField::new(f.width(), f.height(), 1, f.unit(), f.slice(z).to_vec())?)
}

fn to_db(f: &RadioField, range: DbRange) -> Result<RadioField> {
    Ok(match f.unit() {
        Unit::Normalized01 => f.map_values(Unit::Db, |v| range.denormalize(v))?,
        _ => f.clone(),
    })
}

fn to_norm(f: &RadioField, range: DbRange) -> Result<RadioField> {
    Ok(match f.unit() {
        Unit::Db => normalize_db(f, range)?,
        _ => f.clone(),
    })
}

fn row(pred: &RadioField, gt: &RadioField, mask: Option<&[bool]>, range: DbRange) -> Result<String> {
    let mut report = MetricReport::evaluate(pred, gt, range)?;
    if let Some(mask) = mask {
        report.nmse = nmse_masked(&to_norm(pred, range)?, &to_norm(gt, range)?, mask)?;
        report.rmse_db = rmse_db_masked(&to_db(pred, range)?, &to_db(gt, range)?, mask)?;
    }
    let grad = grad3d_loss(&to_db(pred, range)?, &to_db(gt, range)?, &GradLossConfig::default())?;
    Ok(format!("{},{}", report.csv_row(), grad.total))
}

pub fn run(ctx: &Context, args: MetricsArgs) -> Result<Status> {
    let defaults = DbRange::default();
    let range = DbRange::new(
        ctx.cfg.pick(args.range_lo, "range_lo", defaults.lo())?,
        ctx.cfg.pick(args.range_hi, "range_hi", defaults.hi())?,
    )?;
    let pred = load_field(&args.pred)?;
    let gt = load_field(&args.gt)?;
    let mask: Option<Vec<bool>> = match &args.mask {
        Some(p) => {
            let grid = load_any_grid(p, Unit::Scalar)?;
            let view = grid.view();
            let plane: Vec<bool> = view.values.iter().map(|&v| v != 0.0).collect();
            if plane.len() != gt.slice_len() && plane.len() != gt.values().len() {
                bail!("mask {}x{}x{} does not match the fields", view.width, view.height, view.depth);
            }
            let per_voxel = if plane.len() < gt.values().len() {
                plane.iter().copied().cycle().take(plane.len() * gt.n_z()).collect()
            } else {
                plane
            };
            Some(per_voxel)
        }
        None => None,
    };

    let mut csv = format!("slice,{},grad3d\n", MetricReport::CSV_HEADER);
    writeln!(csv, "all,{}", row(&pred, &gt, mask.as_deref(), range).context("volume metrics")?)?;
    if args.per_slice {
        let n = gt.slice_len();
        for z in 0..gt.n_z() {
            let (p, g) = (slice_field(&pred, z)?, slice_field(&gt, z)?);
            let m = mask.as_deref().map(|m| &m[z * n..(z + 1) * n]);
            writeln!(csv, "{z},{}", row(&p, &g, m, range).with_context(|| format!("slice {z}"))?)?;
        }
    }
    match &args.out {
        Some(path) => write_atomic(path, csv)?,
        None => print!("{csv}"),
    }
    Ok(Status::Ok)
}
