use std::path::PathBuf;

use anyhow::{Context as _, Result};
use clap::Args;
use radiomap_core::envmap::{encode_grid, write_csv_grid};
use radiomap_core::propagation::{anchor_map, anchor_volume};
use rayon::prelude::*;

use crate::scene::{thread_pool, write_atomic, SceneArgs};
use crate::{Context, Status};

#[derive(Args, Debug)]
pub struct AnchorArgs {
    /// Scene manifests; omit to build one scene from `--heightmap` and flags.
    pub scenes: Vec<PathBuf>,
    #[command(flatten)]
    pub scene: SceneArgs,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    /// Every receiver slice instead of `z_rx` only.
    #[arg(long)]
    pub volume: bool,
    /// Also write `x,y,z,value` CSV.
    #[arg(long)]
    pub csv: bool,
}

pub fn run(ctx: &Context, args: AnchorArgs) -> Result<Status> {
    let manifests: Vec<Option<PathBuf>> =
        if args.scenes.is_empty() { vec![None] } else { args.scenes.iter().cloned().map(Some).collect() };
    let volume = args.volume || ctx.cfg.get::<bool>("volume")?.unwrap_or(false);
    thread_pool(ctx.jobs)?.install(|| {
        manifests.par_iter().try_for_each(|m| -> Result<()> {
            let loaded = args.scene.resolve(m.as_deref(), &ctx.cfg)?;
            let field = if volume { anchor_volume(&loaded.scene)? } else { anchor_map(&loaded.scene)?.into_field() };
            write_atomic(&args.out_dir.join(format!("{}.anchor.rgf", loaded.name)), encode_grid(&field)?)?;
            if args.csv {
                let mut buf = Vec::new();
                write_csv_grid(&mut buf, &field)?;
                write_atomic(&args.out_dir.join(format!("{}.anchor.csv", loaded.name)), buf)?;
            }
            println!("{}: anchor {}x{}x{}", loaded.name, field.width(), field.height(), field.n_z());
            Ok(())
        })
    })
    .context("anchor")?;
    Ok(Status::Ok)
}
