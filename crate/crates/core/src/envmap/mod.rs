//! Grid data model: building height maps, radio fields, scene configuration
//! and transmitter rasterization.
//!
//! Pixel `(i, j)` (row `i`, column `j`) has its center at
//! `((j + 0.5) * res, (i + 0.5) * res)`; `x` runs along columns and `y` along
//! rows. Values are stored row-major, and radio fields stack height slices
//! outermost.

mod csv;
mod rgf;

pub use self::csv::{read_csv_grid, write_csv_grid};
pub use self::rgf::{decode_grid, encode_grid, load_grid, save_grid, Grid, GridView, HEADER_LEN, MAGIC};

use crate::error::{parameter, validation, Error, Result};

/// A point in scene coordinates, meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn distance(&self, other: &Point3) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        let dz = self.z - other.z;
        (dx * dx + dy * dy + dz * dz).sqrt()
    }

    /// Length of the ground-plane projection of the segment to `other`.
    pub fn ground_distance(&self, other: &Point3) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Unit tag carried by every grid file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Unit {
    Meters,
    Db,
    Normalized01,
    /// Dimensionless values such as entropy differences.
    Scalar,
}

impl Unit {
    pub fn tag(self) -> u8 {
        match self {
            Unit::Meters => 0,
            Unit::Db => 1,
            Unit::Normalized01 => 2,
            Unit::Scalar => 3,
        }
    }

    pub fn from_tag(tag: u8) -> Result<Self> {
        match tag {
            0 => Ok(Unit::Meters),
            1 => Ok(Unit::Db),
            2 => Ok(Unit::Normalized01),
            3 => Ok(Unit::Scalar),
            other => Err(Error::Format(format!("unknown unit tag {other}"))),
        }
    }
}

/// Building heights in meters over a regular pixel grid.
#[derive(Debug, Clone, PartialEq)]
pub struct HeightMap {
    width: usize,
    height: usize,
    resolution: f64,
    values: Vec<f64>,
}

impl HeightMap {
    pub fn new(width: usize, height: usize, resolution: f64, values: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(validation("height map must be at least 1x1"));
        }
        if width * height != values.len() {
            return Err(validation(format!(
                "height map {width}x{height} needs {} values, got {}",
                width * height,
                values.len()
            )));
        }
        if !(resolution > 0.0 && resolution.is_finite()) {
            return Err(validation(format!("resolution must be positive, got {resolution}")));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(validation(format!("building heights must be finite and >= 0, found {bad}")));
        }
        Ok(Self { width, height, resolution, values })
    }

    /// A map with no buildings.
    pub fn flat(width: usize, height: usize, resolution: f64) -> Result<Self> {
        Self::new(width, height, resolution, vec![0.0; width * height])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Same heights, different pixel size. RGF1 files carry no resolution, so
    /// loaders call this with the value from the scene manifest.
    pub fn with_resolution(mut self, resolution: f64) -> Result<Self> {
        if !(resolution > 0.0 && resolution.is_finite()) {
            return Err(validation(format!("resolution must be positive, got {resolution}")));
        }
        self.resolution = resolution;
        Ok(self)
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.width + col]
    }

    pub fn extent(&self) -> (f64, f64) {
        (self.width as f64 * self.resolution, self.height as f64 * self.resolution)
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        let (ex, ey) = self.extent();
        (0.0..=ex).contains(&x) && (0.0..=ey).contains(&y)
    }

    /// Pixel `(row, col)` containing the ground point; points on the far
    /// boundary belong to the last row/column.
    pub fn pixel_of(&self, x: f64, y: f64) -> Option<(usize, usize)> {
        if !self.contains(x, y) {
            return None;
        }
        let col = ((x / self.resolution).floor() as usize).min(self.width - 1);
        let row = ((y / self.resolution).floor() as usize).min(self.height - 1);
        Some((row, col))
    }

    pub fn pixel_center(&self, row: usize, col: usize) -> (f64, f64) {
        ((col as f64 + 0.5) * self.resolution, (row as f64 + 0.5) * self.resolution)
    }

    /// Height of the pixel containing `(x, y)`, clamped to the grid.
    #[inline]
    pub fn height_at(&self, x: f64, y: f64) -> f64 {
        let col = ((x / self.resolution).floor().max(0.0) as usize).min(self.width - 1);
        let row = ((y / self.resolution).floor().max(0.0) as usize).min(self.height - 1);
        self.values[row * self.width + col]
    }
}

/// Pathloss (or mask, or scalar) values over `width x height x n_z` voxels.
#[derive(Debug, Clone, PartialEq)]
pub struct RadioField {
    width: usize,
    height: usize,
    n_z: usize,
    unit: Unit,
    values: Vec<f64>,
}

impl RadioField {
    pub fn new(width: usize, height: usize, n_z: usize, unit: Unit, values: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 || n_z == 0 {
            return Err(validation("radio field dimensions must be non-zero"));
        }
        if unit == Unit::Meters {
            return Err(validation("radio fields cannot carry the meters unit"));
        }
        if width * height * n_z != values.len() {
            return Err(validation(format!(
                "radio field {width}x{height}x{n_z} needs {} values, got {}",
                width * height * n_z,
                values.len()
            )));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(validation(format!("radio field values must be finite, found {bad}")));
        }
        if unit == Unit::Normalized01 {
            if let Some(bad) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
                return Err(validation(format!("normalized value {bad} outside [0, 1]")));
            }
        }
        Ok(Self { width, height, n_z, unit, values })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn n_z(&self) -> usize {
        self.n_z
    }

    pub fn unit(&self) -> Unit {
        self.unit
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn slice_len(&self) -> usize {
        self.width * self.height
    }

    pub fn slice(&self, z: usize) -> &[f64] {
        let n = self.slice_len();
        &self.values[z * n..(z + 1) * n]
    }

    pub fn get(&self, z: usize, row: usize, col: usize) -> f64 {
        self.values[z * self.slice_len() + row * self.width + col]
    }

    pub fn same_shape(&self, other: &RadioField) -> bool {
        self.width == other.width && self.height == other.height && self.n_z == other.n_z
    }

    /// Mean over height slices, as a single-slice field.
    pub fn mean_over_z(&self) -> RadioField {
        if self.n_z == 1 {
            return self.clone();
        }
        let n = self.slice_len();
        let mut out = vec![0.0; n];
        for z in 0..self.n_z {
            for (o, v) in out.iter_mut().zip(self.slice(z)) {
                *o += v;
            }
        }
        let scale = 1.0 / self.n_z as f64;
        out.iter_mut().for_each(|v| *v *= scale);
        RadioField { width: self.width, height: self.height, n_z: 1, unit: self.unit, values: out }
    }

    pub fn map_values(&self, unit: Unit, f: impl Fn(f64) -> f64) -> Result<RadioField> {
        RadioField::new(self.width, self.height, self.n_z, unit, self.values.iter().map(|&v| f(v)).collect())
    }
}

/// Transmitter configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct TxConfig {
    pub position: Point3,
    pub frequency_hz: f64,
    pub power_dbm: f64,
    pub bandwidth_hz: f64,
    pub noise_figure_db: f64,
    /// Near-field reference distance, meters.
    pub d0: f64,
}

impl TxConfig {
    /// 5.9 GHz, 23 dBm over 20 MHz with a 7 dB noise figure and a 1 m reference distance.
    pub fn at(position: Point3) -> Self {
        Self {
            position,
            frequency_hz: 5.9e9,
            power_dbm: 23.0,
            bandwidth_hz: 20e6,
            noise_figure_db: 7.0,
            d0: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.frequency_hz > 0.0 && self.frequency_hz.is_finite()) {
            return Err(validation(format!("carrier frequency must be positive, got {}", self.frequency_hz)));
        }
        if !(self.bandwidth_hz > 0.0 && self.bandwidth_hz.is_finite()) {
            return Err(validation(format!("bandwidth must be positive, got {}", self.bandwidth_hz)));
        }
        if !(self.d0 > 0.0 && self.d0.is_finite()) {
            return Err(validation(format!("reference distance d0 must be positive, got {}", self.d0)));
        }
        if !(self.power_dbm.is_finite() && self.noise_figure_db.is_finite()) {
            return Err(validation("transmit power and noise figure must be finite"));
        }
        let p = self.position;
        if !(p.x.is_finite() && p.y.is_finite() && p.z.is_finite()) || p.z < 0.0 {
            return Err(validation(format!("transmitter position {p:?} invalid")));
        }
        Ok(())
    }
}

/// Receiver heights: `n_z` slices spaced `dz` apart, centered on `z_rx`.
#[derive(Debug, Clone, PartialEq)]
pub struct RxConfig {
    pub z_rx: f64,
    pub n_z: usize,
    pub dz: f64,
}

impl RxConfig {
    pub fn single(z_rx: f64) -> Self {
        Self { z_rx, n_z: 1, dz: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_z == 0 {
            return Err(validation("receiver configuration needs at least one slice"));
        }
        if self.n_z > 1 && !(self.dz > 0.0) {
            return Err(validation(format!("slice spacing must be positive, got {}", self.dz)));
        }
        if !self.z_rx.is_finite() {
            return Err(validation("receiver height must be finite"));
        }
        Ok(())
    }

    /// Height of slice `k`.
    pub fn slice_height(&self, k: usize) -> f64 {
        self.z_rx + (k as f64 - (self.n_z as f64 - 1.0) / 2.0) * self.dz
    }

    pub fn heights(&self) -> Vec<f64> {
        (0..self.n_z).map(|k| self.slice_height(k)).collect()
    }
}

/// Environment input: buildings plus transmitter and receiver configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub heightmap: HeightMap,
    pub tx: TxConfig,
    pub rx: RxConfig,
}

impl Scene {
    pub fn new(heightmap: HeightMap, tx: TxConfig, rx: RxConfig) -> Result<Self> {
        tx.validate()?;
        rx.validate()?;
        if !heightmap.contains(tx.position.x, tx.position.y) {
            let (ex, ey) = heightmap.extent();
            return Err(Error::Bounds(format!(
                "transmitter at ({}, {}) outside map extent {ex} x {ey} m",
                tx.position.x, tx.position.y
            )));
        }
        Ok(Self { heightmap, tx, rx })
    }

    /// Pixel `(row, col)` holding the transmitter.
    pub fn tx_pixel(&self) -> Result<(usize, usize)> {
        let p = self.tx.position;
        self.heightmap
            .pixel_of(p.x, p.y)
            .ok_or_else(|| Error::Bounds(format!("transmitter at ({}, {}) outside map extent", p.x, p.y)))
    }
}

/// Single-channel mask with a one at the transmitter pixel.
pub fn rasterize_tx(scene: &Scene) -> Result<RadioField> {
    let p = scene.tx.position;
    let (ex, ey) = scene.heightmap.extent();
    // Half-open extent: a transmitter on the far edge has no pixel to land on.
    if !(p.x >= 0.0 && p.x < ex && p.y >= 0.0 && p.y < ey) {
        return Err(Error::Bounds(format!("transmitter at ({}, {}) outside map extent {ex} x {ey} m", p.x, p.y)));
    }
    let (row, col) = scene.tx_pixel()?;
    let w = scene.heightmap.width();
    let mut values = vec![0.0; w * scene.heightmap.height()];
    values[row * w + col] = 1.0;
    RadioField::new(w, scene.heightmap.height(), 1, Unit::Normalized01, values)
}

/// Min-max normalization range in dB. `lo` maps to 1 and `hi` maps to 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DbRange {
    lo: f64,
    hi: f64,
}

impl Default for DbRange {
    fn default() -> Self {
        Self { lo: -47.0, hi: -169.0 }
    }
}

impl DbRange {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) {
            return Err(parameter("dB range bounds must be finite"));
        }
        if lo == hi {
            return Err(Error::Domain(format!("degenerate dB range [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    /// Interval bounds in ascending order.
    pub fn bounds(&self) -> (f64, f64) {
        (self.lo.min(self.hi), self.lo.max(self.hi))
    }

    pub fn normalize(&self, db: f64) -> f64 {
        ((db - self.hi) / (self.lo - self.hi)).clamp(0.0, 1.0)
    }

    pub fn denormalize(&self, v: f64) -> f64 {
        self.hi + v * (self.lo - self.hi)
    }
}

pub fn normalize_db(field: &RadioField, range: DbRange) -> Result<RadioField> {
    if field.unit() != Unit::Db {
        return Err(validation(format!("normalize_db expects a dB field, got {:?}", field.unit())));
    }
    field.map_values(Unit::Normalized01, |v| range.normalize(v))
}

pub fn denormalize_db(field: &RadioField, range: DbRange) -> Result<RadioField> {
    if field.unit() != Unit::Normalized01 {
        return Err(validation(format!("denormalize_db expects a normalized field, got {:?}", field.unit())));
    }
    field.map_values(Unit::Db, |v| range.denormalize(v))
}
