use std::path::PathBuf;

use anyhow::{Context as _, Result};
use clap::Args;
use radiomap_core::envmap::{encode_grid, DbRange};
use radiomap_core::synth::{gen_field, gen_scene, CityParams, DatasetProfile, FieldParams, Preset};
use rayon::prelude::*;

use crate::scene::{manifest_for, thread_pool, write_atomic};
use crate::{Context, Status};

#[derive(Args, Debug)]
pub struct SynthArgs {
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    #[arg(long)]
    pub count: Option<usize>,
    /// edge_tx, canyon, sparse or random.
    #[arg(long)]
    pub preset: Option<String>,
    /// radiomapseer, radiomap3dseer or urbanradio3d.
    #[arg(long)]
    pub profile: Option<String>,
    /// Map side in pixels.
    #[arg(long)]
    pub side: Option<usize>,
    /// Additive noise on the pseudo ground truth, dB.
    #[arg(long)]
    pub noise_db: Option<f64>,
    /// Box-filter radius in pixels.
    #[arg(long)]
    pub smoothing: Option<usize>,
    /// Clip the field to the profile's pathloss range.
    #[arg(long)]
    pub clamp: bool,
    /// Building count for `random`.
    #[arg(long)]
    pub n_buildings: Option<usize>,
}

pub fn run(ctx: &Context, args: SynthArgs) -> Result<Status> {
    let cfg = &ctx.cfg;
    let count = cfg.pick(args.count, "count", 1)?;
    let side = cfg.pick(args.side, "side", 256)?;
    let preset_name = cfg.pick(args.preset.clone(), "preset", "random".to_string())?;
    let preset = if preset_name.eq_ignore_ascii_case("random") { None } else { Some(Preset::by_name(&preset_name)?) };
    let profile = DatasetProfile::by_name(&cfg.pick(args.profile.clone(), "profile", "radiomapseer".to_string())?)?;
    let n_buildings = cfg.pick(args.n_buildings, "n_buildings", CityParams::default().n_buildings)?;
    let clamp = args.clamp || cfg.get::<bool>("clamp")?.unwrap_or(false);
    let field_params = FieldParams {
        noise_sigma_db: cfg.pick(args.noise_db, "noise_db", 0.0)?,
        smoothing_radius: cfg.pick(args.smoothing, "smoothing", 0)?,
        clamp: clamp.then(|| DbRange::new(profile.pathloss.lo(), profile.pathloss.hi())).transpose()?,
    };

    thread_pool(ctx.jobs)?.install(|| {
        (0..count).into_par_iter().try_for_each(|i| -> Result<()> {
            let seed = ctx.seed.wrapping_add(i as u64);
            let scene = match preset {
                Some(p) => p.scene(side, &profile, seed)?,
                None => gen_scene(&CityParams { side_px: side, n_buildings, seed, ..Default::default() }, &profile, None)?,
            };
            let field = gen_field(&scene, field_params, seed)?;
            let stem = format!("scene_{i:04}");
            let (hm_name, field_name) = (format!("{stem}.height.rgf"), format!("{stem}.field.rgf"));
            write_atomic(&args.out_dir.join(&hm_name), encode_grid(&scene.heightmap)?)?;
            write_atomic(&args.out_dir.join(&field_name), encode_grid(&field)?)?;
            let manifest = manifest_for(&scene, &hm_name, Some(&field_name));
            let header = format!("synthetic scene {i}: preset {preset_name}, profile {}, seed {seed}", profile.name);
            write_atomic(&args.out_dir.join(format!("{stem}.txt")), manifest.render(&header))?;
            Ok(())
        })
    })
    .context("synth")?;
    println!("wrote {count} scenes to {}", args.out_dir.display());
    Ok(Status::Ok)
}
