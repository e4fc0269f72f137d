//! Procedural cities and pseudo ground-truth fields.
//!
//! Cities are axis-aligned rectangular buildings on a flat ground plane.
//! Pseudo ground truth is the anchor volume, optionally box-smoothed, plus
//! Gaussian noise in dB and an optional clamp to a pathloss range.

use rand::Rng;
use rand_distr::Normal;

use crate::envmap::{DbRange, HeightMap, Point3, RadioField, RxConfig, Scene, TxConfig, Unit};
use crate::error::{parameter, Error, Result};
use crate::propagation::anchor_volume;
use crate::seeded_rng;

/// How buildings are laid out.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Layout {
    /// Independently placed rectangles; overlaps merge at the taller height.
    Scattered,
    /// Regular blocks separated by streets; `n_buildings` is ignored.
    Blocks { block_px: usize, street_px: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct CityParams {
    pub side_px: usize,
    pub resolution: f64,
    pub n_buildings: usize,
    pub layout: Layout,
    /// Building heights in meters, inclusive.
    pub height_range: (f64, f64),
    /// Footprint width and depth in pixels, inclusive.
    pub footprint_range: (usize, usize),
    /// Accepted fraction of covered pixels, inclusive.
    pub coverage: (f64, f64),
    /// Pixels within this Chebyshev radius of `keep_clear` stay at ground level.
    pub clear_radius: usize,
    pub keep_clear: Option<(usize, usize)>,
    pub max_retries: usize,
    pub seed: u64,
}

impl Default for CityParams {
    fn default() -> Self {
        Self {
            side_px: 256,
            resolution: 1.0,
            n_buildings: 40,
            layout: Layout::Scattered,
            height_range: (6.6, 19.8),
            footprint_range: (8, 32),
            coverage: (0.0, 1.0),
            clear_radius: 2,
            keep_clear: None,
            max_retries: 64,
            seed: 0,
        }
    }
}

impl CityParams {
    pub fn validate(&self) -> Result<()> {
        if self.side_px == 0 {
            return Err(parameter("city side must be positive"));
        }
        if !(self.resolution > 0.0 && self.resolution.is_finite()) {
            return Err(parameter(format!("resolution {} must be positive", self.resolution)));
        }
        let (h0, h1) = self.height_range;
        if !(h0.is_finite() && h1.is_finite() && 0.0 <= h0 && h0 <= h1) {
            return Err(parameter(format!("height range {:?} invalid", self.height_range)));
        }
        let (f0, f1) = self.footprint_range;
        if f0 == 0 || f0 > f1 || f0 > self.side_px {
            return Err(parameter(format!("footprint range {:?} invalid", self.footprint_range)));
        }
        let (c0, c1) = self.coverage;
        if !(0.0 <= c0 && c0 <= c1 && c1 <= 1.0) {
            return Err(parameter(format!("coverage bounds {:?} invalid", self.coverage)));
        }
        if let Layout::Blocks { block_px, .. } = self.layout {
            if block_px == 0 {
                return Err(parameter("block size must be positive"));
            }
        }
        if let Some((r, c)) = self.keep_clear {
            if r >= self.side_px || c >= self.side_px {
                return Err(parameter(format!("keep-clear pixel ({r}, {c}) outside the map")));
            }
        }
        Ok(())
    }

    fn clear(&self, row: usize, col: usize) -> bool {
        self.keep_clear.is_some_and(|(r, c)| r.abs_diff(row) <= self.clear_radius && c.abs_diff(col) <= self.clear_radius)
    }

    fn rect_hits_clear(&self, r0: usize, c0: usize, h: usize, w: usize) -> bool {
        self.keep_clear.is_some_and(|(r, c)| {
            let rad = self.clear_radius;
            r + rad >= r0 && r <= r0 + h - 1 + rad && c + rad >= c0 && c <= c0 + w - 1 + rad
        })
    }
}

const PLACEMENT_ATTEMPTS: usize = 100;

fn sample_height<R: Rng>(rng: &mut R, (h0, h1): (f64, f64)) -> f64 {
    if h0 == h1 {
        h0
    } else {
        rng.random_range(h0..=h1)
    }
}

fn scattered<R: Rng>(p: &CityParams, rng: &mut R) -> Result<Vec<f64>> {
    let n = p.side_px;
    let mut values = vec![0.0; n * n];
    let (f0, f1) = p.footprint_range;
    for b in 0..p.n_buildings {
        let placed = (0..PLACEMENT_ATTEMPTS).find_map(|_| {
            let w = rng.random_range(f0..=f1.min(n));
            let h = rng.random_range(f0..=f1.min(n));
            let r0 = rng.random_range(0..=n - h);
            let c0 = rng.random_range(0..=n - w);
            (!p.rect_hits_clear(r0, c0, h, w)).then_some((r0, c0, h, w))
        });
        let (r0, c0, h, w) =
            placed.ok_or_else(|| Error::Generation(format!("no room for building {b} after {PLACEMENT_ATTEMPTS} attempts")))?;
        let height = sample_height(rng, p.height_range);
        for row in r0..r0 + h {
            for v in &mut values[row * n + c0..row * n + c0 + w] {
                *v = f64::max(*v, height);
            }
        }
    }
    Ok(values)
}

fn blocks<R: Rng>(p: &CityParams, rng: &mut R, block_px: usize, street_px: usize) -> Vec<f64> {
    let n = p.side_px;
    let mut values = vec![0.0; n * n];
    let pitch = block_px + street_px;
    let offset = street_px / 2;
    let mut r0 = offset;
    while r0 < n {
        let mut c0 = offset;
        while c0 < n {
            let height = sample_height(rng, p.height_range);
            for row in r0..(r0 + block_px).min(n) {
                for col in c0..(c0 + block_px).min(n) {
                    if !p.clear(row, col) {
                        values[row * n + col] = height;
                    }
                }
            }
            c0 += pitch;
        }
        r0 += pitch;
    }
    values
}

/// Seeded height map. Redraws the whole layout until the covered fraction lies
/// within `coverage`, up to `max_retries` times.
pub fn gen_city(p: &CityParams) -> Result<HeightMap> {
    p.validate()?;
    let mut rng = seeded_rng(p.seed);
    let n = p.side_px;
    for _ in 0..=p.max_retries {
        let values = match p.layout {
            Layout::Scattered => scattered(p, &mut rng)?,
            Layout::Blocks { block_px, street_px } => blocks(p, &mut rng, block_px, street_px),
        };
        let covered = values.iter().filter(|&&v| v > 0.0).count() as f64 / (n * n) as f64;
        if (p.coverage.0..=p.coverage.1).contains(&covered) {
            return HeightMap::new(n, n, p.resolution, values);
        }
    }
    Err(Error::Generation(format!(
        "coverage stayed outside {:?} after {} retries",
        p.coverage, p.max_retries
    )))
}

/// Transmitter height rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TxHeight {
    Fixed(f64),
    /// Clearance above the tallest building the profile can generate.
    AboveRooftop(f64),
}

/// Dataset envelope emulated by synthetic scenes.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetProfile {
    pub name: &'static str,
    pub frequency_hz: f64,
    pub height_range: (f64, f64),
    pub tx_height: TxHeight,
    pub rx: RxConfig,
    pub pathloss: DbRange,
}

impl DatasetProfile {
    pub fn radio_map_seer() -> Self {
        Self {
            name: "radiomapseer",
            frequency_hz: 5.9e9,
            height_range: (25.0, 25.0),
            tx_height: TxHeight::Fixed(1.5),
            rx: RxConfig::single(1.5),
            pathloss: DbRange::new(-47.0, -147.0).expect("static range"),
        }
    }

    pub fn radio_map_3d_seer() -> Self {
        Self {
            name: "radiomap3dseer",
            frequency_hz: 3.5e9,
            height_range: (6.6, 19.8),
            tx_height: TxHeight::AboveRooftop(3.0),
            rx: RxConfig::single(1.5),
            pathloss: DbRange::new(-75.0, -111.0).expect("static range"),
        }
    }

    /// Twenty receiver slices from 1 m to 20 m.
    pub fn urban_radio_3d() -> Self {
        Self {
            name: "urbanradio3d",
            frequency_hz: 5.9e9,
            height_range: (6.6, 19.8),
            tx_height: TxHeight::Fixed(1.5),
            rx: RxConfig { z_rx: 10.5, n_z: 20, dz: 1.0 },
            pathloss: DbRange::new(-92.0, -169.0).expect("static range"),
        }
    }

    pub fn all() -> [DatasetProfile; 3] {
        [Self::radio_map_seer(), Self::radio_map_3d_seer(), Self::urban_radio_3d()]
    }

    pub fn by_name(name: &str) -> Result<Self> {
        let norm = name.to_ascii_lowercase().replace(['-', '_'], "");
        Self::all().into_iter().find(|p| p.name == norm).ok_or_else(|| parameter(format!("unknown dataset profile `{name}`")))
    }

    pub fn tx_z(&self) -> f64 {
        match self.tx_height {
            TxHeight::Fixed(z) => z,
            TxHeight::AboveRooftop(dz) => self.height_range.1 + dz,
        }
    }
}

/// City plus transmitter. The transmitter sits at the center of `tx_pixel`
/// (drawn uniformly when `None`), which is kept clear of buildings.
pub fn gen_scene(city: &CityParams, profile: &DatasetProfile, tx_pixel: Option<(usize, usize)>) -> Result<Scene> {
    let n = city.side_px;
    if n == 0 {
        return Err(parameter("city side must be positive"));
    }
    let (row, col) = match tx_pixel {
        Some(px) => px,
        None => {
            let mut rng = seeded_rng(city.seed ^ 0x7f4a_7c15_9e37_79b9);
            (rng.random_range(0..n), rng.random_range(0..n))
        }
    };
    let params = CityParams { keep_clear: Some((row, col)), ..city.clone() };
    let hm = gen_city(&params)?;
    let (x, y) = hm.pixel_center(row, col);
    let tx = TxConfig { frequency_hz: profile.frequency_hz, ..TxConfig::at(Point3::new(x, y, profile.tx_z())) };
    Scene::new(hm, tx, profile.rx.clone())
}

/// Named scene regimes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// Transmitter near a map edge in a moderately dense city.
    EdgeTransmitter,
    /// Tall blocks separated by narrow streets.
    UrbanCanyon,
    /// A handful of small, low obstacles.
    Sparse,
}

impl Preset {
    pub const ALL: [Preset; 3] = [Preset::EdgeTransmitter, Preset::UrbanCanyon, Preset::Sparse];

    pub fn name(self) -> &'static str {
        match self {
            Preset::EdgeTransmitter => "edge_tx",
            Preset::UrbanCanyon => "canyon",
            Preset::Sparse => "sparse",
        }
    }

    pub fn by_name(name: &str) -> Result<Self> {
        let norm = name.to_ascii_lowercase().replace('-', "_");
        Self::ALL
            .into_iter()
            .find(|p| p.name() == norm || (norm == "edge" && *p == Preset::EdgeTransmitter))
            .ok_or_else(|| parameter(format!("unknown preset `{name}`")))
    }

    pub fn city(self, side_px: usize, seed: u64) -> CityParams {
        let scale = |px: usize| (px * side_px / 256).max(1);
        let base = CityParams { side_px, seed, ..Default::default() };
        match self {
            Preset::EdgeTransmitter => CityParams { n_buildings: 40, footprint_range: (scale(10), scale(30)), ..base },
            Preset::UrbanCanyon => CityParams {
                layout: Layout::Blocks { block_px: scale(28), street_px: scale(6).max(2) },
                height_range: (15.0, 30.0),
                ..base
            },
            Preset::Sparse => CityParams {
                n_buildings: 6,
                footprint_range: (scale(6), scale(14)),
                height_range: (3.0, 8.0),
                ..base
            },
        }
    }

    /// Transmitter pixel: near the left edge for the edge preset, on a street
    /// crossing for the canyon, otherwise drawn from the seed.
    pub fn tx_pixel(self, side_px: usize, seed: u64) -> Option<(usize, usize)> {
        let mut rng = seeded_rng(seed ^ 0x5bd1_e995);
        match self {
            Preset::EdgeTransmitter => Some((rng.random_range(0..side_px), (side_px / 64).min(side_px - 1))),
            Preset::UrbanCanyon => {
                if let Layout::Blocks { block_px, street_px } = self.city(side_px, seed).layout {
                    let pitch = block_px + street_px;
                    let crossings = side_px.div_ceil(pitch);
                    let pick = |k: usize| ((k * pitch) + street_px.saturating_sub(1) / 2).min(side_px - 1);
                    Some((pick(rng.random_range(0..crossings)), pick(rng.random_range(0..crossings))))
                } else {
                    None
                }
            }
            Preset::Sparse => None,
        }
    }

    pub fn scene(self, side_px: usize, profile: &DatasetProfile, seed: u64) -> Result<Scene> {
        gen_scene(&self.city(side_px, seed), profile, self.tx_pixel(side_px, seed))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldParams {
    /// Standard deviation of additive dB noise; 0 disables noise.
    pub noise_sigma_db: f64,
    /// Box-filter radius in pixels; 0 disables smoothing.
    pub smoothing_radius: usize,
    pub clamp: Option<DbRange>,
}

impl Default for FieldParams {
    fn default() -> Self {
        Self { noise_sigma_db: 0.0, smoothing_radius: 0, clamp: None }
    }
}

fn box_smooth(slice: &[f64], w: usize, h: usize, r: usize) -> Vec<f64> {
    let mut out = vec![0.0; w * h];
    for row in 0..h {
        let (r0, r1) = (row.saturating_sub(r), (row + r).min(h - 1));
        for col in 0..w {
            let (c0, c1) = (col.saturating_sub(r), (col + r).min(w - 1));
            let mut acc = 0.0;
            for rr in r0..=r1 {
                acc += slice[rr * w + c0..=rr * w + c1].iter().sum::<f64>();
            }
            out[row * w + col] = acc / ((r1 - r0 + 1) * (c1 - c0 + 1)) as f64;
        }
    }
    out
}

/// Pseudo ground truth for every receiver slice of `scene`, in dB.
pub fn gen_field(scene: &Scene, params: FieldParams, seed: u64) -> Result<RadioField> {
    if !(params.noise_sigma_db >= 0.0 && params.noise_sigma_db.is_finite()) {
        return Err(parameter(format!("noise sigma {} must be non-negative", params.noise_sigma_db)));
    }
    let anchor = anchor_volume(scene)?;
    let (w, h, n_z) = (anchor.width(), anchor.height(), anchor.n_z());
    let mut values: Vec<f64> = if params.smoothing_radius == 0 {
        anchor.values().to_vec()
    } else {
        (0..n_z).flat_map(|z| box_smooth(anchor.slice(z), w, h, params.smoothing_radius)).collect()
    };
    if params.noise_sigma_db > 0.0 {
        let noise = Normal::new(0.0, params.noise_sigma_db).map_err(|e| parameter(e.to_string()))?;
        let mut rng = seeded_rng(seed);
        values.iter_mut().for_each(|v| *v += rng.sample(noise));
    }
    if let Some(range) = params.clamp {
        let (lo, hi) = range.bounds();
        values.iter_mut().for_each(|v| *v = v.clamp(lo, hi));
    }
    RadioField::new(w, h, n_z, Unit::Db, values)
}
