//! Scene manifests and shared scene flags.

use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::Args;
use radiomap_core::envmap::{load_grid, read_csv_grid, Grid, Point3, RadioField, RxConfig, Scene, TxConfig, Unit};

use crate::config::KeyValues;

/// Transmitter and receiver overrides applied on top of a manifest or config.
#[derive(Args, Debug, Clone, Default)]
pub struct SceneArgs {
    /// Height map (RGF1, meters); used instead of a manifest.
    #[arg(long)]
    pub heightmap: Option<PathBuf>,
    /// Pixel size in meters for `--heightmap`.
    #[arg(long)]
    pub resolution: Option<f64>,
    #[arg(long)]
    pub tx_x: Option<f64>,
    #[arg(long)]
    pub tx_y: Option<f64>,
    #[arg(long)]
    pub tx_z: Option<f64>,
    #[arg(long)]
    pub frequency_hz: Option<f64>,
    #[arg(long)]
    pub power_dbm: Option<f64>,
    #[arg(long)]
    pub bandwidth_hz: Option<f64>,
    #[arg(long)]
    pub noise_figure_db: Option<f64>,
    #[arg(long)]
    pub d0: Option<f64>,
    #[arg(long)]
    pub z_rx: Option<f64>,
    #[arg(long)]
    pub n_z: Option<usize>,
    #[arg(long)]
    pub dz: Option<f64>,
}

/// A resolved scene plus the optional ground-truth field named by its manifest.
pub struct LoadedScene {
    pub name: String,
    pub scene: Scene,
    pub field: Option<PathBuf>,
}

impl SceneArgs {
    /// Resolve with precedence flags > manifest > run config > defaults.
    pub fn resolve(&self, manifest: Option<&Path>, cfg: &KeyValues) -> Result<LoadedScene> {
        let doc = match manifest {
            Some(p) => KeyValues::load(p)?,
            None => KeyValues::default(),
        };
        let num = |flag: Option<f64>, key: &str, default: Option<f64>| -> Result<f64> {
            if let Some(v) = flag {
                return Ok(v);
            }
            if let Some(v) = doc.get::<f64>(key)? {
                return Ok(v);
            }
            if let Some(v) = cfg.get::<f64>(key)? {
                return Ok(v);
            }
            default.with_context(|| format!("scene parameter `{key}` not given"))
        };
        let hm_path = match (&self.heightmap, doc.get_path("heightmap"), cfg.get_path("heightmap")) {
            (Some(p), _, _) => p.clone(),
            (None, Some(p), _) => p,
            (None, None, Some(p)) => p,
            _ => bail!("no height map: pass a scene manifest or --heightmap"),
        };
        let resolution = num(self.resolution, "resolution", Some(1.0))?;
        let hm = load_any_grid(&hm_path, Unit::Meters)?
            .into_height_map()?
            .with_resolution(resolution)?;
        let defaults = TxConfig::at(Point3::new(0.0, 0.0, 0.0));
        let (ex, ey) = hm.extent();
        let tx = TxConfig {
            position: Point3::new(
                num(self.tx_x, "tx_x", Some(ex / 2.0))?,
                num(self.tx_y, "tx_y", Some(ey / 2.0))?,
                num(self.tx_z, "tx_z", Some(1.5))?,
            ),
            frequency_hz: num(self.frequency_hz, "frequency_hz", Some(defaults.frequency_hz))?,
            power_dbm: num(self.power_dbm, "power_dbm", Some(defaults.power_dbm))?,
            bandwidth_hz: num(self.bandwidth_hz, "bandwidth_hz", Some(defaults.bandwidth_hz))?,
            noise_figure_db: num(self.noise_figure_db, "noise_figure_db", Some(defaults.noise_figure_db))?,
            d0: num(self.d0, "d0", Some(defaults.d0))?,
        };
        let n_z = match self.n_z {
            Some(n) => n,
            None => doc.get("n_z")?.or(cfg.get("n_z")?).unwrap_or(1),
        };
        let rx = RxConfig {
            z_rx: num(self.z_rx, "z_rx", Some(1.5))?,
            n_z,
            dz: num(self.dz, "dz", Some(if n_z > 1 { 1.0 } else { 0.0 }))?,
        };
        let name = manifest
            .or(self.heightmap.as_deref())
            .and_then(|p| p.file_stem())
            .map(|s| s.to_string_lossy().trim_end_matches(".height").to_string())
            .unwrap_or_else(|| "scene".into());
        Ok(LoadedScene { name, scene: Scene::new(hm, tx, rx)?, field: doc.get_path("field") })
    }
}

pub fn manifest_for(scene: &Scene, heightmap: &str, field: Option<&str>) -> KeyValues {
    let mut kv = KeyValues::default();
    let tx = &scene.tx;
    kv.insert("heightmap", heightmap);
    if let Some(f) = field {
        kv.insert("field", f);
    }
    kv.insert("resolution", scene.heightmap.resolution());
    kv.insert("tx_x", tx.position.x);
    kv.insert("tx_y", tx.position.y);
    kv.insert("tx_z", tx.position.z);
    kv.insert("frequency_hz", tx.frequency_hz);
    kv.insert("power_dbm", tx.power_dbm);
    kv.insert("bandwidth_hz", tx.bandwidth_hz);
    kv.insert("noise_figure_db", tx.noise_figure_db);
    kv.insert("d0", tx.d0);
    kv.insert("z_rx", scene.rx.z_rx);
    kv.insert("n_z", scene.rx.n_z);
    kv.insert("dz", scene.rx.dz);
    kv
}

/// RGF1, or `x,y,z,value` CSV when the extension is `.csv` (read with `csv_unit`).
pub fn load_any_grid(path: &Path, csv_unit: Unit) -> Result<Grid> {
    let is_csv = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    let grid = if is_csv {
        let file = fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
        read_csv_grid(BufReader::new(file), csv_unit)
    } else {
        load_grid(path)
    };
    grid.with_context(|| format!("loading {}", path.display()))
}

pub fn load_field(path: &Path) -> Result<RadioField> {
    Ok(load_any_grid(path, Unit::Db)?.into_radio_field()?)
}

/// Write to a sibling temporary file, then rename over `path`.
pub fn write_atomic(path: &Path, bytes: impl AsRef<[u8]>) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, bytes).with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(&tmp, path).with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}

pub fn thread_pool(jobs: usize) -> Result<rayon::ThreadPool> {
    Ok(rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build()?)
}
