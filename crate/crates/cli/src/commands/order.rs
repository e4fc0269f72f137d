use std::fmt::Write as _;
use std::path::PathBuf;

use anyhow::{bail, Context as _, Result};
use clap::{Args, ValueEnum};
use radiomap_core::ordering::{
    alternative_order, bruteforce_costs, euclidean_order, hilbert_order, prior_pl_order, raster_order,
    subsample_order, true_pl_order, verify_predecessor_containment, wavefront_order, write_cost_csv, zcurve_order,
    OrderFile, OrderKind, OrderParams, OrderPi, PatchAggregate, PatchGrid, RankDirection, RankOptions,
};
use radiomap_core::propagation::anchor_map;
use rayon::prelude::*;

use crate::scene::{load_field, thread_pool, write_atomic, LoadedScene, SceneArgs};
use crate::{Context, Status};

/// Largest patch count checked against the Bellman-Ford oracle under `--verify`.
const ORACLE_MAX_PATCHES: usize = 256;

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Aggregate {
    Center,
    Mean,
}

#[derive(Args, Debug)]
pub struct OrderArgs {
    /// Scene manifests; omit to build one scene from `--heightmap` and flags.
    pub scenes: Vec<PathBuf>,
    #[command(flatten)]
    pub scene: SceneArgs,
    /// wavefront, prior_pl, true_pl, raster, hilbert, zcurve, subsample, alternative, euclidean.
    #[arg(long)]
    pub kind: Option<String>,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    #[arg(long)]
    pub patch_px: Option<usize>,
    #[arg(long)]
    pub alpha_los: Option<f64>,
    #[arg(long)]
    pub alpha_nlos: Option<f64>,
    #[arg(long)]
    pub beta_clamp: Option<f64>,
    /// Patch score for ranked orders.
    #[arg(long, value_enum)]
    pub aggregate: Option<Aggregate>,
    /// Rank ascending raw value instead of strongest first.
    #[arg(long)]
    pub ascending: bool,
    /// Ground-truth field for `true_pl` when the manifest names none.
    #[arg(long)]
    pub field: Option<PathBuf>,
    /// Check predecessor containment and, on small grids, the Bellman-Ford oracle.
    #[arg(long)]
    pub verify: bool,
}

enum Kind {
    Order(OrderKind),
    Euclidean,
}

fn parse_kind(s: &str) -> Result<Kind> {
    if s.eq_ignore_ascii_case("euclidean") {
        return Ok(Kind::Euclidean);
    }
    match s.parse::<OrderKind>() {
        Ok(OrderKind::Custom) | Err(_) => bail!("unknown order kind `{s}`"),
        Ok(k) => Ok(Kind::Order(k)),
    }
}

struct Resolved {
    kind: Kind,
    kind_name: String,
    patch_px: usize,
    params: OrderParams,
    rank: RankOptions,
    verify: bool,
}

fn build_order(r: &Resolved, loaded: &LoadedScene, patches: &PatchGrid, field: Option<&PathBuf>) -> Result<OrderPi> {
    let np = patches.np();
    let s = &loaded.scene;
    Ok(match r.kind {
        Kind::Euclidean => euclidean_order(s, patches)?,
        Kind::Order(k) => match k {
            OrderKind::Wavefront => wavefront_order(s, patches, r.params)?.0,
            OrderKind::PriorPl => prior_pl_order(&anchor_map(s)?, patches, r.rank)?,
            OrderKind::TruePl => {
                let path = field.or(loaded.field.as_ref()).context("true_pl needs --field or a manifest `field`")?;
                true_pl_order(&load_field(path)?, patches, r.rank)?
            }
            OrderKind::Raster => raster_order(np)?,
            OrderKind::Hilbert => hilbert_order(np)?,
            OrderKind::Zcurve => zcurve_order(np)?,
            OrderKind::Subsample => subsample_order(np)?,
            OrderKind::Alternative => alternative_order(np)?,
            OrderKind::Custom => unreachable!("rejected while parsing"),
        },
    })
}

/// Runs one scene; returns whether every requested check held.
fn one_scene(r: &Resolved, args: &OrderArgs, ctx: &Context, manifest: Option<&std::path::Path>) -> Result<bool> {
    let loaded = args.scene.resolve(manifest, &ctx.cfg)?;
    let patches = PatchGrid::for_scene(&loaded.scene, r.patch_px)?;
    let (_, costs) = wavefront_order(&loaded.scene, &patches, r.params)?;
    let order = build_order(r, &loaded, &patches, args.field.as_ref())?;
    let base = |suffix: &str| args.out_dir.join(format!("{}.{suffix}", loaded.name));

    let file = OrderFile::new(&order, Some(r.params));
    write_atomic(&base(&format!("{}.order.json", r.kind_name)), file.to_json()? + "\n")?;
    let mut csv = Vec::new();
    write_cost_csv(&mut csv, &costs)?;
    write_atomic(&base("costs.csv"), csv)?;

    let report = verify_predecessor_containment(&order, &costs)?;
    let mut text = format!("holds = {}\nviolations = {}\n", report.holds, report.violations.len());
    for v in &report.violations {
        writeln!(text, "patch {} at step {} needs {} at step {}", v.patch, v.position, v.predecessor, v.predecessor_position)?;
    }
    write_atomic(&base(&format!("{}.containment.txt", r.kind_name)), text)?;

    let mut ok = true;
    let mut line = format!(
        "{}: {} np={} containment={} ({} violations)",
        loaded.name,
        r.kind_name,
        patches.np(),
        report.holds,
        report.violations.len()
    );
    if r.verify {
        ok &= report.holds;
        if patches.len() <= ORACLE_MAX_PATCHES {
            let bf = bruteforce_costs(&loaded.scene, &patches, r.params)?;
            let agree = bf.d.iter().zip(&costs.d).all(|(a, b)| a == b || (a - b).abs() <= 1e-12 * a.abs().max(b.abs()));
            ok &= agree;
            write!(line, " oracle={}", if agree { "agree" } else { "DISAGREE" })?;
        }
    }
    println!("{line}");
    Ok(ok)
}

pub fn run(ctx: &Context, args: OrderArgs) -> Result<Status> {
    let cfg = &ctx.cfg;
    let kind_name = cfg.pick_opt(args.kind.clone(), "kind")?.unwrap_or_else(|| "wavefront".into());
    let kind = parse_kind(&kind_name)?;
    let kind_name = match &kind {
        Kind::Euclidean => "euclidean".to_string(),
        Kind::Order(k) => k.name().to_string(),
    };
    let defaults = OrderParams::default();
    let params = OrderParams {
        alpha_los: cfg.pick(args.alpha_los, "alpha_los", defaults.alpha_los)?,
        alpha_nlos: cfg.pick(args.alpha_nlos, "alpha_nlos", defaults.alpha_nlos)?,
        beta_clamp: cfg.pick(args.beta_clamp, "beta_clamp", defaults.beta_clamp)?,
    };
    params.validate()?;
    let aggregate = match args.aggregate {
        Some(Aggregate::Mean) => PatchAggregate::Mean,
        Some(Aggregate::Center) => PatchAggregate::Center,
        None => match cfg.get_str("aggregate") {
            Some("mean") => PatchAggregate::Mean,
            Some("center") | None => PatchAggregate::Center,
            Some(other) => bail!("config key `aggregate` = `{other}`: expected center or mean"),
        },
    };
    let ascending = args.ascending || cfg.get::<bool>("ascending")?.unwrap_or(false);
    let direction = if ascending { RankDirection::AscendingValue } else { RankDirection::StrongestFirst };
    let resolved = Resolved {
        kind,
        kind_name,
        patch_px: cfg.pick(args.patch_px, "patch_px", PatchGrid::DEFAULT_PATCH_PX)?,
        params,
        rank: RankOptions { aggregate, direction },
        verify: args.verify || cfg.get::<bool>("verify")?.unwrap_or(false),
    };
    let manifests: Vec<Option<PathBuf>> =
        if args.scenes.is_empty() { vec![None] } else { args.scenes.iter().cloned().map(Some).collect() };
    let results: Vec<bool> = thread_pool(ctx.jobs)?.install(|| {
        manifests.par_iter().map(|m| one_scene(&resolved, &args, ctx, m.as_deref())).collect::<Result<_>>()
    })?;
    Ok(if results.iter().all(|&ok| ok) { Status::Ok } else { Status::VerificationFailed })
}
