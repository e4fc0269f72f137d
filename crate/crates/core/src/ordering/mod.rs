//! Generation orders over the patch grid.
//!
//! Patches are indexed row-major from 0. A patch's node position is the center
//! of its representative pixel `(row * p + p / 2, col * p + p / 2)` at the
//! receiver height, except for the patch holding the transmitter, whose node is
//! the transmitter itself. Anchoring the source node at the transmitter gives it
//! cost 0 and keeps the triangle inequality intact, so on a building-free map
//! the relaxed costs are exactly the Euclidean distances from the transmitter.

mod containment;
mod curves;
mod file;
mod oracle;
mod ranked;
mod sampling;
mod wavefront;

pub use containment::{verify_predecessor_containment, ContainmentReport, Violation};
pub use curves::{alternative_order, hilbert_order, raster_order, subsample_order, zcurve_order};
pub use file::{load_order, save_order, write_cost_csv, OrderFile};
pub use oracle::bruteforce_costs;
pub use ranked::{prior_pl_order, true_pl_order, PatchAggregate, RankDirection, RankOptions};
pub use sampling::sample_training_order;
pub use wavefront::{euclidean_order, init_costs, order_by_cost, wavefront_order, CostGraph};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::envmap::{Point3, Scene};
use crate::error::{parameter, validation, Error, Result};

/// Which construction produced an order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrderKind {
    Wavefront,
    #[serde(rename = "prior_pl")]
    PriorPl,
    #[serde(rename = "true_pl")]
    TruePl,
    Raster,
    Hilbert,
    Zcurve,
    Subsample,
    Alternative,
    Custom,
}

impl OrderKind {
    pub const ALL: [OrderKind; 9] = [
        OrderKind::Wavefront,
        OrderKind::PriorPl,
        OrderKind::TruePl,
        OrderKind::Raster,
        OrderKind::Hilbert,
        OrderKind::Zcurve,
        OrderKind::Subsample,
        OrderKind::Alternative,
        OrderKind::Custom,
    ];

    pub fn name(self) -> &'static str {
        match self {
            OrderKind::Wavefront => "wavefront",
            OrderKind::PriorPl => "prior_pl",
            OrderKind::TruePl => "true_pl",
            OrderKind::Raster => "raster",
            OrderKind::Hilbert => "hilbert",
            OrderKind::Zcurve => "zcurve",
            OrderKind::Subsample => "subsample",
            OrderKind::Alternative => "alternative",
            OrderKind::Custom => "custom",
        }
    }

    /// Orders that depend only on the grid size.
    pub fn is_geometric(self) -> bool {
        matches!(
            self,
            OrderKind::Raster | OrderKind::Hilbert | OrderKind::Zcurve | OrderKind::Subsample | OrderKind::Alternative
        )
    }
}

impl fmt::Display for OrderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OrderKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.to_ascii_lowercase().replace('-', "_");
        let norm = match norm.as_str() {
            "priorpl" => "prior_pl",
            "truepl" => "true_pl",
            "z_curve" | "morton" => "zcurve",
            "serpentine" => "alternative",
            other => other,
        }
        .to_string();
        OrderKind::ALL
            .into_iter()
            .find(|k| k.name() == norm)
            .ok_or_else(|| parameter(format!("unknown order kind `{s}`")))
    }
}

/// A generation order: `perm[n]` is the patch generated at step `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderPi {
    kind: OrderKind,
    np: usize,
    perm: Vec<usize>,
}

impl OrderPi {
    pub fn new(kind: OrderKind, np: usize, perm: Vec<usize>) -> Result<Self> {
        let n = np * np;
        if perm.len() != n {
            return Err(validation(format!("order over {np}x{np} patches needs {n} entries, got {}", perm.len())));
        }
        let mut seen = vec![false; n];
        for &p in &perm {
            if p >= n || seen[p] {
                return Err(validation(format!("order is not a permutation of 0..{n} (entry {p})")));
            }
            seen[p] = true;
        }
        Ok(Self { kind, np, perm })
    }

    pub fn kind(&self) -> OrderKind {
        self.kind
    }

    pub fn np(&self) -> usize {
        self.np
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    /// `positions()[patch]` is the step at which `patch` is generated.
    pub fn positions(&self) -> Vec<usize> {
        let mut pos = vec![0; self.perm.len()];
        for (n, &p) in self.perm.iter().enumerate() {
            pos[p] = n;
        }
        pos
    }

    pub fn with_kind(mut self, kind: OrderKind) -> Self {
        self.kind = kind;
        self
    }
}

/// Blockage exponents for the initial and relaxation costs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrderParams {
    pub alpha_los: f64,
    pub alpha_nlos: f64,
    /// Lower clamp on `1 - beta`, keeping fully blocked edges finite.
    pub beta_clamp: f64,
}

impl Default for OrderParams {
    fn default() -> Self {
        Self { alpha_los: 2.0, alpha_nlos: 2.0, beta_clamp: 1e-6 }
    }
}

impl OrderParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha_los >= 0.0 && self.alpha_los.is_finite()) {
            return Err(parameter(format!("alpha_los must be >= 0, got {}", self.alpha_los)));
        }
        if !(self.alpha_nlos >= 0.0 && self.alpha_nlos.is_finite()) {
            return Err(parameter(format!("alpha_nlos must be >= 0, got {}", self.alpha_nlos)));
        }
        if !(self.beta_clamp > 0.0 && self.beta_clamp < 1.0) {
            return Err(parameter(format!("beta_clamp must lie in (0, 1), got {}", self.beta_clamp)));
        }
        Ok(())
    }

    /// `dist / max(1 - beta, clamp)^alpha`.
    #[inline]
    pub fn penalized(&self, dist: f64, beta: f64, alpha: f64) -> f64 {
        let open = (1.0 - beta).max(self.beta_clamp);
        if alpha == 0.0 {
            dist
        } else {
            dist / open.powf(alpha)
        }
    }
}

/// Square tiling of the map into `np x np` patches of `patch_px` pixels.
#[derive(Debug, Clone, PartialEq)]
pub struct PatchGrid {
    patch_px: usize,
    np: usize,
    resolution: f64,
    z: f64,
}

impl PatchGrid {
    pub const DEFAULT_PATCH_PX: usize = 16;

    pub fn new(side_px: usize, patch_px: usize, resolution: f64, z: f64) -> Result<Self> {
        if patch_px == 0 || side_px == 0 || side_px % patch_px != 0 {
            return Err(parameter(format!("patch size {patch_px} does not tile a {side_px}-pixel side")));
        }
        if !(resolution > 0.0) {
            return Err(parameter("patch grid needs a positive resolution"));
        }
        Ok(Self { patch_px, np: side_px / patch_px, resolution, z })
    }

    /// Patch grid over a square scene, at the receiver height `z_rx`.
    pub fn for_scene(scene: &Scene, patch_px: usize) -> Result<Self> {
        let hm = &scene.heightmap;
        if hm.width() != hm.height() {
            return Err(parameter(format!("patch grids need a square map, got {}x{}", hm.width(), hm.height())));
        }
        Self::new(hm.width(), patch_px, hm.resolution(), scene.rx.z_rx)
    }

    /// Grid with `np` patches per side over a square scene.
    pub fn with_patches_per_side(scene: &Scene, np: usize) -> Result<Self> {
        let side = scene.heightmap.width();
        if np == 0 || side % np != 0 {
            return Err(parameter(format!("{np} patches per side do not tile a {side}-pixel side")));
        }
        Self::for_scene(scene, side / np)
    }

    pub fn patch_px(&self) -> usize {
        self.patch_px
    }

    pub fn np(&self) -> usize {
        self.np
    }

    pub fn len(&self) -> usize {
        self.np * self.np
    }

    pub fn is_empty(&self) -> bool {
        self.np == 0
    }

    pub fn side_px(&self) -> usize {
        self.np * self.patch_px
    }

    pub fn row_col(&self, patch: usize) -> (usize, usize) {
        (patch / self.np, patch % self.np)
    }

    pub fn index(&self, row: usize, col: usize) -> usize {
        row * self.np + col
    }

    pub fn patch_of_pixel(&self, row: usize, col: usize) -> usize {
        self.index(row / self.patch_px, col / self.patch_px)
    }

    /// Pixel whose center serves as the patch's node position.
    pub fn representative_pixel(&self, patch: usize) -> (usize, usize) {
        let (r, c) = self.row_col(patch);
        let half = self.patch_px / 2;
        (r * self.patch_px + half, c * self.patch_px + half)
    }

    pub fn center(&self, patch: usize) -> Point3 {
        let (row, col) = self.representative_pixel(patch);
        Point3::new((col as f64 + 0.5) * self.resolution, (row as f64 + 0.5) * self.resolution, self.z)
    }

    /// The 8-connected neighbors of `patch`, in ascending index order.
    pub fn neighbors(&self, patch: usize) -> impl Iterator<Item = usize> + '_ {
        let (r, c) = self.row_col(patch);
        let np = self.np as isize;
        (-1isize..=1).flat_map(move |dr| {
            (-1isize..=1).filter_map(move |dc| {
                let (nr, nc) = (r as isize + dr, c as isize + dc);
                ((dr, dc) != (0, 0) && (0..np).contains(&nr) && (0..np).contains(&nc))
                    .then(|| (nr * np + nc) as usize)
            })
        })
    }

    /// All pixels `(row, col)` covered by `patch`.
    pub fn pixels(&self, patch: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        let (r, c) = self.row_col(patch);
        let p = self.patch_px;
        (r * p..(r + 1) * p).flat_map(move |row| (c * p..(c + 1) * p).map(move |col| (row, col)))
    }
}

/// Accumulated propagation cost per patch with shortest-path predecessors.
#[derive(Debug, Clone, PartialEq)]
pub struct CostField {
    pub d: Vec<f64>,
    pub pred: Vec<Option<usize>>,
    pub source: usize,
}

impl CostField {
    pub fn len(&self) -> usize {
        self.d.len()
    }

    pub fn is_empty(&self) -> bool {
        self.d.is_empty()
    }

    /// Predecessor chain of `patch`, nearest first, ending at the source.
    /// Stops early if the pointers loop.
    pub fn chain(&self, patch: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut cur = self.pred[patch];
        while let Some(p) = cur {
            if out.len() >= self.d.len() {
                break;
            }
            out.push(p);
            cur = self.pred[p];
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_rejects_non_bijection() {
        assert!(OrderPi::new(OrderKind::Custom, 2, vec![0, 1, 1, 3]).is_err());
        assert!(OrderPi::new(OrderKind::Custom, 2, vec![0, 1, 2]).is_err());
        assert!(OrderPi::new(OrderKind::Custom, 2, vec![0, 1, 2, 4]).is_err());
        let o = OrderPi::new(OrderKind::Custom, 2, vec![3, 1, 0, 2]).unwrap();
        assert_eq!(o.positions(), vec![2, 1, 3, 0]);
    }

    #[test]
    fn neighbors_are_eight_connected() {
        let g = PatchGrid::new(48, 16, 1.0, 1.5).unwrap();
        assert_eq!(g.neighbors(4).collect::<Vec<_>>(), vec![0, 1, 2, 3, 5, 6, 7, 8]);
        assert_eq!(g.neighbors(0).collect::<Vec<_>>(), vec![1, 3, 4]);
        assert_eq!(g.neighbors(8).collect::<Vec<_>>(), vec![4, 5, 7]);
    }

    #[test]
    fn default_grid_has_256_patches() {
        let g = PatchGrid::new(256, PatchGrid::DEFAULT_PATCH_PX, 1.0, 1.5).unwrap();
        assert_eq!((g.np(), g.len()), (16, 256));
        assert_eq!(g.representative_pixel(17), (24, 24));
        assert_eq!(g.center(0), Point3::new(8.5, 8.5, 1.5));
        assert_eq!(g.pixels(255).count(), 256);
        assert!(PatchGrid::new(250, 16, 1.0, 1.5).is_err());
    }

    #[test]
    fn kind_parsing() {
        assert_eq!("prior-pl".parse::<OrderKind>().unwrap(), OrderKind::PriorPl);
        assert_eq!("Wavefront".parse::<OrderKind>().unwrap(), OrderKind::Wavefront);
        assert!("spiral".parse::<OrderKind>().is_err());
    }

    #[test]
    fn params_validate() {
        assert!(OrderParams::default().validate().is_ok());
        let bad = OrderParams { beta_clamp: 1.0, ..Default::default() };
        assert!(bad.validate().is_err());
        let p = OrderParams::default();
        assert_eq!(p.penalized(3.0, 0.0, 2.0), 3.0);
        assert_eq!(p.penalized(3.0, 1.0, 1.0), 3.0 / 1e-6);
    }
}
