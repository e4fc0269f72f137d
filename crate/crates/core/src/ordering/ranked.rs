//! Orders ranked by a pathloss raster: the anchor map (prior) or the ground
//! truth field (oracle).

use super::{OrderKind, OrderPi, PatchGrid};
use crate::envmap::RadioField;
use crate::error::{parameter, Result};
use crate::propagation::AnchorMap;

/// How a patch's pixels reduce to one score.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PatchAggregate {
    /// Value at the patch's representative pixel, the same point the cost
    /// graph uses as the patch node.
    #[default]
    Center,
    /// Mean over all pixels of the patch.
    Mean,
}

/// Which end of the value range is generated first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RankDirection {
    /// Highest signed-dB value (strongest signal) first.
    #[default]
    StrongestFirst,
    /// Lowest raw value first.
    AscendingValue,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RankOptions {
    pub aggregate: PatchAggregate,
    pub direction: RankDirection,
}

fn patch_scores(field: &RadioField, patches: &PatchGrid, aggregate: PatchAggregate) -> Result<Vec<f64>> {
    let side = patches.side_px();
    if field.width() != side || field.height() != side {
        return Err(parameter(format!(
            "field {}x{} does not cover the {side}x{side} patch grid",
            field.width(),
            field.height()
        )));
    }
    let field = field.mean_over_z();
    let scores = (0..patches.len())
        .map(|i| match aggregate {
            PatchAggregate::Center => {
                let (row, col) = patches.representative_pixel(i);
                field.get(0, row, col)
            }
            PatchAggregate::Mean => {
                let (sum, count) = patches.pixels(i).fold((0.0, 0usize), |(s, n), (row, col)| (s + field.get(0, row, col), n + 1));
                sum / count as f64
            }
        })
        .collect();
    Ok(scores)
}

fn rank(scores: &[f64], np: usize, direction: RankDirection, kind: OrderKind) -> Result<OrderPi> {
    let mut perm: Vec<usize> = (0..scores.len()).collect();
    perm.sort_by(|&a, &b| {
        let by_value = match direction {
            RankDirection::StrongestFirst => scores[b].total_cmp(&scores[a]),
            RankDirection::AscendingValue => scores[a].total_cmp(&scores[b]),
        };
        by_value.then(a.cmp(&b))
    });
    OrderPi::new(kind, np, perm)
}

/// Patches ranked by the anchor map.
pub fn prior_pl_order(anchor: &AnchorMap, patches: &PatchGrid, opts: RankOptions) -> Result<OrderPi> {
    let scores = patch_scores(anchor.field(), patches, opts.aggregate)?;
    rank(&scores, patches.np(), opts.direction, OrderKind::PriorPl)
}

/// Patches ranked by the ground-truth field; multi-slice fields are averaged over height first.
pub fn true_pl_order(field: &RadioField, patches: &PatchGrid, opts: RankOptions) -> Result<OrderPi> {
    let scores = patch_scores(field, patches, opts.aggregate)?;
    rank(&scores, patches.np(), opts.direction, OrderKind::TruePl)
}
