//! RGF1 grid files.
//!
//! Little-endian layout: magic `RGF1`, a `u8` unit tag, `u32` width, `u32`
//! height, `u32` depth, then `width * height * depth` IEEE-754 `f32` values,
//! row-major within a slice and slices outermost. Values are held as `f64` in
//! memory and narrowed to `f32` on write, so any grid that came from a file
//! survives a save/load cycle bit for bit.

use std::fs;
use std::path::Path;

use super::{HeightMap, RadioField, Unit};
use crate::error::{validation, Error, Result};

pub const MAGIC: [u8; 4] = *b"RGF1";
/// Magic, unit tag and three `u32` dimensions.
pub const HEADER_LEN: usize = 4 + 1 + 3 * 4;

/// Either kind of grid an RGF1 file can hold.
#[derive(Debug, Clone, PartialEq)]
pub enum Grid {
    Height(HeightMap),
    Radio(RadioField),
}

impl Grid {
    pub fn view(&self) -> GridView<'_> {
        match self {
            Grid::Height(h) => h.into(),
            Grid::Radio(r) => r.into(),
        }
    }

    pub fn into_height_map(self) -> Result<HeightMap> {
        match self {
            Grid::Height(h) => Ok(h),
            Grid::Radio(r) => Err(validation(format!("expected a height map, found a {:?} field", r.unit()))),
        }
    }

    pub fn into_radio_field(self) -> Result<RadioField> {
        match self {
            Grid::Radio(r) => Ok(r),
            Grid::Height(_) => Err(validation("expected a radio field, found a height map")),
        }
    }
}

/// Borrowed grid data in the shape the file format needs.
#[derive(Debug, Clone, Copy)]
pub struct GridView<'a> {
    pub unit: Unit,
    pub width: usize,
    pub height: usize,
    pub depth: usize,
    pub values: &'a [f64],
}

impl<'a> From<&'a HeightMap> for GridView<'a> {
    fn from(h: &'a HeightMap) -> Self {
        GridView { unit: Unit::Meters, width: h.width(), height: h.height(), depth: 1, values: h.values() }
    }
}

impl<'a> From<&'a RadioField> for GridView<'a> {
    fn from(r: &'a RadioField) -> Self {
        GridView { unit: r.unit(), width: r.width(), height: r.height(), depth: r.n_z(), values: r.values() }
    }
}

impl<'a> From<&'a Grid> for GridView<'a> {
    fn from(g: &'a Grid) -> Self {
        g.view()
    }
}

fn dim_u32(name: &str, v: usize) -> Result<u32> {
    u32::try_from(v).map_err(|_| validation(format!("{name} {v} does not fit in u32")))
}

pub fn encode_grid<'a>(grid: impl Into<GridView<'a>>) -> Result<Vec<u8>> {
    let g = grid.into();
    if g.width * g.height * g.depth != g.values.len() {
        return Err(validation("grid dimensions do not match value count"));
    }
    let mut out = Vec::with_capacity(HEADER_LEN + 4 * g.values.len());
    out.extend_from_slice(&MAGIC);
    out.push(g.unit.tag());
    out.extend_from_slice(&dim_u32("width", g.width)?.to_le_bytes());
    out.extend_from_slice(&dim_u32("height", g.height)?.to_le_bytes());
    out.extend_from_slice(&dim_u32("depth", g.depth)?.to_le_bytes());
    for &v in g.values {
        let narrow = v as f32;
        if !narrow.is_finite() {
            return Err(validation(format!("value {v} is not representable as a finite f32")));
        }
        out.extend_from_slice(&narrow.to_le_bytes());
    }
    Ok(out)
}

pub fn decode_grid(bytes: &[u8]) -> Result<Grid> {
    if bytes.len() < HEADER_LEN {
        if bytes.len() < 4 || bytes[..4] != MAGIC {
            return Err(Error::Format("missing RGF1 magic".into()));
        }
        return Err(Error::Format(format!("truncated header: {} of {HEADER_LEN} bytes", bytes.len())));
    }
    if bytes[..4] != MAGIC {
        return Err(Error::Format("missing RGF1 magic".into()));
    }
    let unit = Unit::from_tag(bytes[4])?;
    let read_u32 = |at: usize| u32::from_le_bytes(bytes[at..at + 4].try_into().expect("4-byte slice")) as usize;
    let (width, height, depth) = (read_u32(5), read_u32(9), read_u32(13));
    let count = width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(depth))
        .ok_or_else(|| Error::Format("grid dimensions overflow".into()))?;
    let payload = &bytes[HEADER_LEN..];
    let expected = count * 4;
    if payload.len() != expected {
        return Err(Error::Length { expected, found: payload.len() });
    }
    let values: Vec<f64> = payload
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().expect("4-byte chunk")) as f64)
        .collect();
    if values.iter().any(|v| v.is_nan()) {
        return Err(validation("grid contains NaN values"));
    }
    match unit {
        Unit::Meters => {
            if depth != 1 {
                return Err(Error::Format(format!("height maps have depth 1, header says {depth}")));
            }
            Ok(Grid::Height(HeightMap::new(width, height, 1.0, values)?))
        }
        _ => Ok(Grid::Radio(RadioField::new(width, height, depth, unit, values)?)),
    }
}

/// Reads an RGF1 file. Height maps come back with a 1 m/px resolution; see
/// [`HeightMap::with_resolution`].
pub fn load_grid(path: impl AsRef<Path>) -> Result<Grid> {
    decode_grid(&fs::read(path)?)
}

pub fn save_grid<'a>(grid: impl Into<GridView<'a>>, path: impl AsRef<Path>) -> Result<()> {
    let bytes = encode_grid(grid)?;
    fs::write(path, bytes)?;
    Ok(())
}
