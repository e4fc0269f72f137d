//! Physics layer: free-space pathloss, the link-budget threshold, ray-sampled
//! blockage and the pathloss anchor map.
//!
//! Pathloss is a signed gain in dB (negative numbers), and every power-like
//! term is referenced to dBm so the threshold and the transmit power share a
//! scale.

use rayon::prelude::*;

use crate::envmap::{HeightMap, Point3, RadioField, Scene, TxConfig, Unit};
use crate::error::{Error, Result};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Thermal noise density `k_B * 290 K`, in dBm/Hz.
pub const THERMAL_NOISE_DBM_PER_HZ: f64 = -174.0;

/// Free-space pathloss as a signed gain: `-(20 log10 d + 20 log10 f + 20 log10(4 pi / c))`.
pub fn fspl(d: f64, f: f64) -> Result<f64> {
    if !(d > 0.0) || !d.is_finite() {
        return Err(Error::Domain(format!("fspl needs a positive distance, got {d}")));
    }
    if !(f > 0.0) || !f.is_finite() {
        return Err(Error::Domain(format!("fspl needs a positive frequency, got {f}")));
    }
    Ok(fspl_unchecked(d, f))
}

#[inline]
fn fspl_unchecked(d: f64, f: f64) -> f64 {
    -(20.0 * d.log10() + 20.0 * f.log10() + 20.0 * (4.0 * std::f64::consts::PI / SPEED_OF_LIGHT).log10())
}

/// Noise-floor pathloss limit of a link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget {
    pub l_thr: f64,
}

/// `L_thr = 10 log10(W N0) + NF - P_tx`, with `N0` the thermal noise density.
pub fn link_threshold(tx: &TxConfig) -> LinkBudget {
    let l_thr = THERMAL_NOISE_DBM_PER_HZ + 10.0 * tx.bandwidth_hz.log10() + tx.noise_figure_db - tx.power_dbm;
    LinkBudget { l_thr }
}

/// Number of samples placed along a ray whose ground projection has length `len`.
#[inline]
pub fn ray_samples(len: f64, resolution: f64) -> usize {
    ((len / resolution).ceil() as usize).max(2)
}

/// Fraction of the direct segment from `a` to `b` that passes below building tops.
///
/// `K = max(2, ceil(len / res))` samples sit at the midpoints of `K` equal
/// sub-segments of the ground projection; each sample's height is linearly
/// interpolated between the endpoint heights. Midpoint placement makes the
/// sample set identical for `(a, b)` and `(b, a)`.
pub fn blockage_ratio(h: &HeightMap, a: &Point3, b: &Point3) -> Result<f64> {
    for p in [a, b] {
        if !h.contains(p.x, p.y) || !p.z.is_finite() {
            let (ex, ey) = h.extent();
            return Err(Error::Bounds(format!("ray endpoint ({}, {}) outside map extent {ex} x {ey} m", p.x, p.y)));
        }
    }
    Ok(blockage_ratio_unchecked(h, a, b))
}

#[inline]
pub(crate) fn blockage_ratio_unchecked(h: &HeightMap, a: &Point3, b: &Point3) -> f64 {
    let k = ray_samples(a.ground_distance(b), h.resolution());
    let (dx, dy, dz) = (b.x - a.x, b.y - a.y, b.z - a.z);
    let inv = 1.0 / k as f64;
    let blocked = (0..k)
        .filter(|&s| {
            let t = (s as f64 + 0.5) * inv;
            a.z + t * dz < h.height_at(a.x + t * dx, a.y + t * dy)
        })
        .count();
    blocked as f64 * inv
}

/// Single-slice anchor map in dB at the receiver height `z_rx`.
#[derive(Debug, Clone, PartialEq)]
pub struct AnchorMap {
    field: RadioField,
}

impl AnchorMap {
    pub fn field(&self) -> &RadioField {
        &self.field
    }

    pub fn into_field(self) -> RadioField {
        self.field
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.field.get(0, row, col)
    }
}

/// Anchor value at an arbitrary receiver point:
/// `fspl(max(d, d0), f) + beta(tx, u) * (fspl(d0, f) - L_thr)`, with `d` the 3D distance.
pub fn anchor_value(scene: &Scene, budget: LinkBudget, point: &Point3) -> Result<f64> {
    if !scene.heightmap.contains(point.x, point.y) {
        return Err(Error::Bounds(format!("anchor point ({}, {}) outside map extent", point.x, point.y)));
    }
    Ok(anchor_value_unchecked(scene, shadow_range(scene, budget), point))
}

fn shadow_range(scene: &Scene, budget: LinkBudget) -> f64 {
    fspl_unchecked(scene.tx.d0, scene.tx.frequency_hz) - budget.l_thr
}

#[inline]
fn anchor_value_unchecked(scene: &Scene, shadow_range: f64, point: &Point3) -> f64 {
    let tx = &scene.tx;
    let d = tx.position.distance(point).max(tx.d0);
    let beta = blockage_ratio_unchecked(&scene.heightmap, &tx.position, point);
    fspl_unchecked(d, tx.frequency_hz) + beta * shadow_range
}

fn anchor_slice(scene: &Scene, z: f64, out: &mut [f64]) {
    let hm = &scene.heightmap;
    let w = hm.width();
    let range = shadow_range(scene, link_threshold(&scene.tx));
    out.par_chunks_mut(w).enumerate().for_each(|(row, chunk)| {
        for (col, slot) in chunk.iter_mut().enumerate() {
            let (x, y) = hm.pixel_center(row, col);
            *slot = anchor_value_unchecked(scene, range, &Point3::new(x, y, z));
        }
    });
}

/// Anchor map over every pixel center at the receiver height `z_rx`.
pub fn anchor_map(scene: &Scene) -> Result<AnchorMap> {
    scene.tx.validate()?;
    let hm = &scene.heightmap;
    let mut values = vec![0.0; hm.width() * hm.height()];
    anchor_slice(scene, scene.rx.z_rx, &mut values);
    Ok(AnchorMap { field: RadioField::new(hm.width(), hm.height(), 1, Unit::Db, values)? })
}

/// Anchor values for every receiver slice of the scene.
pub fn anchor_volume(scene: &Scene) -> Result<RadioField> {
    scene.tx.validate()?;
    let hm = &scene.heightmap;
    let n = hm.width() * hm.height();
    let mut values = vec![0.0; n * scene.rx.n_z];
    for (k, chunk) in values.chunks_mut(n).enumerate() {
        anchor_slice(scene, scene.rx.slice_height(k), chunk);
    }
    RadioField::new(hm.width(), hm.height(), scene.rx.n_z, Unit::Db, values)
}
