use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::{CostField, OrderKind, OrderParams, OrderPi, PatchGrid};
use crate::envmap::{Point3, Scene};
use crate::error::{parameter, Result};
use crate::propagation::blockage_ratio_unchecked;

/// The patch graph of a scene: node positions, initial costs and edge weights.
pub struct CostGraph<'a> {
    scene: &'a Scene,
    patches: &'a PatchGrid,
    params: OrderParams,
    source: usize,
    nodes: Vec<Point3>,
}

impl<'a> CostGraph<'a> {
    pub fn new(scene: &'a Scene, patches: &'a PatchGrid, params: OrderParams) -> Result<Self> {
        params.validate()?;
        let hm = &scene.heightmap;
        if hm.width() != patches.side_px() || hm.height() != patches.side_px() {
            return Err(parameter(format!(
                "patch grid covers {} px but the map is {}x{}",
                patches.side_px(),
                hm.width(),
                hm.height()
            )));
        }
        let (row, col) = scene.tx_pixel()?;
        let source = patches.patch_of_pixel(row, col);
        let nodes = (0..patches.len())
            .map(|i| if i == source { scene.tx.position } else { patches.center(i) })
            .collect();
        Ok(Self { scene, patches, params, source, nodes })
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, i: usize) -> &Point3 {
        &self.nodes[i]
    }

    pub fn patches(&self) -> &PatchGrid {
        self.patches
    }

    /// Direct-path cost from the transmitter; zero for the source patch.
    pub fn initial_cost(&self, i: usize) -> f64 {
        if i == self.source {
            return 0.0;
        }
        let tx = &self.scene.tx.position;
        let node = &self.nodes[i];
        let beta = blockage_ratio_unchecked(&self.scene.heightmap, tx, node);
        self.params.penalized(tx.distance(node), beta, self.params.alpha_los)
    }

    /// Hop cost between neighboring patches. Evaluated with the endpoints in
    /// index order so both directions see the same blockage samples.
    pub fn edge_weight(&self, i: usize, j: usize) -> f64 {
        let (a, b) = if i < j { (&self.nodes[i], &self.nodes[j]) } else { (&self.nodes[j], &self.nodes[i]) };
        let beta = blockage_ratio_unchecked(&self.scene.heightmap, a, b);
        self.params.penalized(a.distance(b), beta, self.params.alpha_nlos)
    }

    /// Initial costs, every non-source patch pointing at the source.
    pub fn initial_field(&self) -> CostField {
        let n = self.len();
        let d = (0..n).map(|i| self.initial_cost(i)).collect();
        let pred = (0..n).map(|i| (i != self.source).then_some(self.source)).collect();
        CostField { d, pred, source: self.source }
    }
}

/// `D_i = ||u_tx - u_i|| / max(1 - beta(u_tx, u_i), clamp)^alpha_los`, with the
/// source patch at 0.
pub fn init_costs(scene: &Scene, patches: &PatchGrid, params: OrderParams) -> Result<CostField> {
    Ok(CostGraph::new(scene, patches, params)?.initial_field())
}

#[derive(Clone, Copy)]
struct Frontier {
    cost: f64,
    patch: usize,
}

impl PartialEq for Frontier {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Frontier {}

impl Ord for Frontier {
    // Reversed for a min-heap; equal costs pop in ascending patch order.
    fn cmp(&self, other: &Self) -> Ordering {
        other.cost.total_cmp(&self.cost).then_with(|| other.patch.cmp(&self.patch))
    }
}

impl PartialOrd for Frontier {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Settles patches in order of increasing cost, relaxing 8-connected neighbors.
fn relax(graph: &CostGraph<'_>) -> CostField {
    let mut field = graph.initial_field();
    let n = graph.len();
    let mut settled = vec![false; n];
    let mut heap: BinaryHeap<Frontier> =
        field.d.iter().enumerate().map(|(patch, &cost)| Frontier { cost, patch }).collect();

    while let Some(Frontier { cost, patch }) = heap.pop() {
        if settled[patch] || cost > field.d[patch] {
            continue;
        }
        settled[patch] = true;
        for j in graph.patches().neighbors(patch) {
            if settled[j] {
                continue;
            }
            let cand = cost + graph.edge_weight(patch, j);
            if cand < field.d[j] {
                field.d[j] = cand;
                field.pred[j] = Some(patch);
                heap.push(Frontier { cost: cand, patch: j });
            }
        }
    }
    field
}

/// Argsort of the costs, ascending, ties broken by patch index.
pub fn order_by_cost(costs: &[f64], np: usize, kind: OrderKind) -> Result<OrderPi> {
    let mut perm: Vec<usize> = (0..costs.len()).collect();
    perm.sort_by(|&a, &b| costs[a].total_cmp(&costs[b]).then(a.cmp(&b)));
    OrderPi::new(kind, np, perm)
}

/// Wavefront generation order with its relaxed cost field.
pub fn wavefront_order(scene: &Scene, patches: &PatchGrid, params: OrderParams) -> Result<(OrderPi, CostField)> {
    let graph = CostGraph::new(scene, patches, params)?;
    let field = relax(&graph);
    let order = order_by_cost(&field.d, patches.np(), OrderKind::Wavefront)?;
    Ok((order, field))
}

/// Patches by ascending Euclidean distance from the transmitter to their node
/// positions (the source patch's node is the transmitter, at distance 0).
pub fn euclidean_order(scene: &Scene, patches: &PatchGrid) -> Result<OrderPi> {
    let graph = CostGraph::new(scene, patches, OrderParams::default())?;
    let tx = scene.tx.position;
    let d: Vec<f64> = (0..graph.len()).map(|i| tx.distance(graph.node(i))).collect();
    order_by_cost(&d, patches.np(), OrderKind::Custom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envmap::{HeightMap, RxConfig, TxConfig};

    fn scene(hm: HeightMap, tx: Point3) -> Scene {
        Scene::new(hm, TxConfig::at(tx), RxConfig::single(1.5)).unwrap()
    }

    #[test]
    fn flat_initial_costs_are_distances() {
        let s = scene(HeightMap::flat(64, 64, 1.0).unwrap(), Point3::new(20.3, 40.1, 1.5));
        let g = PatchGrid::for_scene(&s, 16).unwrap();
        for alpha in [0.0, 1.0, 3.5] {
            let p = OrderParams { alpha_los: alpha, ..Default::default() };
            let c = init_costs(&s, &g, p).unwrap();
            for i in 0..g.len() {
                let want = if i == c.source { 0.0 } else { s.tx.position.distance(&g.center(i)) };
                assert_eq!(c.d[i], want);
            }
        }
    }

    #[test]
    fn half_blocked_patch_doubles_cost() {
        // A wall over the middle half of the ray from the tx to patch 2.
        let mut values = vec![0.0; 48 * 48];
        for row in 0..48 {
            for col in 0..48 {
                if (17..33).contains(&col) && row < 16 {
                    values[row * 48 + col] = 30.0;
                }
            }
        }
        let s = scene(HeightMap::new(48, 48, 1.0, values).unwrap(), Point3::new(8.5, 8.5, 1.5));
        let g = PatchGrid::for_scene(&s, 16).unwrap();
        let graph = CostGraph::new(&s, &g, OrderParams { alpha_los: 1.0, ..Default::default() }).unwrap();
        let beta = blockage_ratio_unchecked(&s.heightmap, &s.tx.position, &g.center(2));
        assert_eq!(beta, 0.5);
        let dist = s.tx.position.distance(&g.center(2));
        assert_eq!(graph.initial_cost(2), 2.0 * dist);
    }

    #[test]
    fn source_patch_costs_zero_even_inside_building() {
        let s = scene(HeightMap::new(32, 32, 1.0, vec![50.0; 1024]).unwrap(), Point3::new(3.0, 3.0, 1.5));
        let g = PatchGrid::for_scene(&s, 16).unwrap();
        let (order, c) = wavefront_order(&s, &g, OrderParams::default()).unwrap();
        assert_eq!(c.source, 0);
        assert_eq!(c.d[0], 0.0);
        assert_eq!(order.perm()[0], 0);
    }

    #[test]
    fn flat_map_center_tx_matches_distance_sort() {
        let s = scene(HeightMap::flat(256, 256, 1.0).unwrap(), Point3::new(128.0, 128.0, 1.5));
        let g = PatchGrid::for_scene(&s, 16).unwrap();
        let (order, costs) = wavefront_order(&s, &g, OrderParams::default()).unwrap();
        assert_eq!(order, euclidean_order(&s, &g).unwrap().with_kind(OrderKind::Wavefront));
        assert_eq!(order.perm()[0], costs.source);
    }

    #[test]
    fn relaxed_costs_increase_along_chains() {
        let mut values = vec![0.0; 64 * 64];
        for row in 8..56 {
            for col in 28..36 {
                values[row * 64 + col] = 20.0;
            }
        }
        let s = scene(HeightMap::new(64, 64, 1.0, values).unwrap(), Point3::new(10.5, 32.5, 1.5));
        let g = PatchGrid::for_scene(&s, 8).unwrap();
        let (_, c) = wavefront_order(&s, &g, OrderParams::default()).unwrap();
        for i in 0..g.len() {
            if let Some(p) = c.pred[i] {
                assert!(c.d[p] < c.d[i], "patch {i}: pred {p} cost {} !< {}", c.d[p], c.d[i]);
            } else {
                assert_eq!(i, c.source);
            }
        }
    }
}
