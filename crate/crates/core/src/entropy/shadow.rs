use super::joint::{JointDist, MAX_VARS};
use crate::envmap::Scene;
use crate::error::{parameter, validation, Result};
use crate::ordering::{wavefront_order, CostField, OrderParams, PatchGrid};

/// Flip probability used when none is given.
pub const DEFAULT_FLIP_PROB: f64 = 0.1;

/// Binary shadow-chain joint over the patches of a small scene.
///
/// The source patch is 1 with probability 1. Every other patch copies its
/// predecessor's token with probability `1 - epsilon` and flips it otherwise.
pub fn build_shadow_joint(scene: &Scene, patches: &PatchGrid, params: OrderParams, epsilon: f64) -> Result<JointDist> {
    if patches.len() > MAX_VARS {
        return Err(parameter(format!("shadow joint needs at most {MAX_VARS} patches, got {}", patches.len())));
    }
    let (_, costs) = wavefront_order(scene, patches, params)?;
    shadow_joint_from_costs(&costs, epsilon)
}

/// Shadow-chain joint for an existing predecessor tree.
pub fn shadow_joint_from_costs(costs: &CostField, epsilon: f64) -> Result<JointDist> {
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(parameter(format!("flip probability {epsilon} outside [0, 1]")));
    }
    let n = costs.len();
    if n == 0 || n > MAX_VARS {
        return Err(parameter(format!("shadow joint needs 1..={MAX_VARS} patches, got {n}")));
    }
    if costs.pred[costs.source].is_some() || (0..n).any(|i| i != costs.source && costs.pred[i].is_none()) {
        return Err(validation("cost field is not a tree rooted at its source"));
    }
    let probs = (0..1usize << n)
        .map(|x| {
            let bit = |i: usize| x >> i & 1;
            if bit(costs.source) != 1 {
                return 0.0;
            }
            (0..n)
                .filter_map(|i| costs.pred[i].map(|p| if bit(i) == bit(p) { 1.0 - epsilon } else { epsilon }))
                .product()
        })
        .collect();
    JointDist::new(n, 2, probs)
}
