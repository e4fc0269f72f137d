//! Rotary position embeddings.
//!
//! Pairs are interleaved: block `j` rotates elements `(2j, 2j + 1)` by
//! `m * phi_j` with `phi_j = base^(-2j / d)`. The 3D variant splits the head
//! dimension into x, y and z sub-vectors and applies an independent 1D rotation
//! to each, with frequencies computed from the sub-vector's own length.

use crate::error::{parameter, Error, Result};

pub const DEFAULT_THETA_BASE: f64 = 10_000.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RopeConfig {
    head_dim: usize,
    axis_dims: (usize, usize, usize),
    theta_base: f64,
}

impl RopeConfig {
    pub fn new(head_dim: usize, axis_dims: (usize, usize, usize), theta_base: f64) -> Result<Self> {
        let (dx, dy, dz) = axis_dims;
        if [dx, dy, dz].iter().any(|&a| a < 2 || a % 2 != 0) {
            return Err(parameter(format!("axis dims {axis_dims:?} must be even and at least 2")));
        }
        if dx + dy + dz != head_dim {
            return Err(parameter(format!("axis dims {axis_dims:?} do not sum to head dim {head_dim}")));
        }
        if !(theta_base.is_finite() && theta_base > 0.0) {
            return Err(parameter(format!("theta base {theta_base} must be positive")));
        }
        Ok(Self { head_dim, axis_dims, theta_base })
    }

    /// Near-even split of `head_dim` with the default base.
    pub fn for_head_dim(head_dim: usize) -> Result<Self> {
        Self::new(head_dim, split_axis_dims(head_dim)?, DEFAULT_THETA_BASE)
    }

    pub fn head_dim(&self) -> usize {
        self.head_dim
    }

    pub fn axis_dims(&self) -> (usize, usize, usize) {
        self.axis_dims
    }

    pub fn theta_base(&self) -> f64 {
        self.theta_base
    }
}

/// Split an even head dimension into three even parts differing by at most 2,
/// giving spare pairs to x, then y.
pub fn split_axis_dims(d: usize) -> Result<(usize, usize, usize)> {
    if d < 6 || d % 2 != 0 {
        return Err(parameter(format!("head dim {d} must be even and at least 6")));
    }
    let pairs = d / 2;
    let (base, extra) = (pairs / 3, pairs % 3);
    let x = base + usize::from(extra >= 1);
    let y = base + usize::from(extra >= 2);
    Ok((2 * x, 2 * y, 2 * base))
}

fn rotate_in_place(v: &mut [f64], m: f64, theta_base: f64) {
    let d = v.len() as f64;
    for (j, pair) in v.chunks_exact_mut(2).enumerate() {
        let phi = theta_base.powf(-2.0 * j as f64 / d);
        let (s, c) = (m * phi).sin_cos();
        let (a, b) = (pair[0], pair[1]);
        pair[0] = a * c - b * s;
        pair[1] = a * s + b * c;
    }
}

/// 1D rotation of `q` at position `m`.
pub fn rope_rotate_1d(q: &[f64], m: f64, theta_base: f64) -> Result<Vec<f64>> {
    if q.len() % 2 != 0 {
        return Err(Error::Shape(format!("rotary input length {} is odd", q.len())));
    }
    let mut out = q.to_vec();
    rotate_in_place(&mut out, m, theta_base);
    Ok(out)
}

/// 3D rotation of `q` at grid index `(x, y, z)`; 2D use keeps `z` fixed.
pub fn rope_rotate_3d(q: &[f64], x: i64, y: i64, z: i64, config: &RopeConfig) -> Result<Vec<f64>> {
    if q.len() != config.head_dim {
        return Err(Error::Shape(format!("rotary input length {} != head dim {}", q.len(), config.head_dim)));
    }
    let (dx, dy, _) = config.axis_dims;
    let mut out = q.to_vec();
    let (qx, rest) = out.split_at_mut(dx);
    let (qy, qz) = rest.split_at_mut(dy);
    rotate_in_place(qx, x as f64, config.theta_base);
    rotate_in_place(qy, y as f64, config.theta_base);
    rotate_in_place(qz, z as f64, config.theta_base);
    Ok(out)
}
