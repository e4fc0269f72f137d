use super::{CostField, CostGraph, OrderParams, PatchGrid};
use crate::envmap::Scene;
use crate::error::Result;

/// Bellman-Ford over the same patch graph as [`super::wavefront_order`].
///
/// Sweeps every directed 8-neighbor edge until no cost improves. Quadratic in
/// the patch count, meant as an oracle for small grids.
pub fn bruteforce_costs(scene: &Scene, patches: &PatchGrid, params: OrderParams) -> Result<CostField> {
    let graph = CostGraph::new(scene, patches, params)?;
    let n = graph.len();
    let edges: Vec<(usize, usize, f64)> = (0..n)
        .flat_map(|i| patches.neighbors(i).map(move |j| (i, j)))
        .map(|(i, j)| (i, j, graph.edge_weight(i, j)))
        .collect();

    let mut field = graph.initial_field();
    for _ in 0..n {
        let mut changed = false;
        for &(i, j, w) in &edges {
            let cand = field.d[i] + w;
            if cand < field.d[j] {
                field.d[j] = cand;
                field.pred[j] = Some(i);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    Ok(field)
}
