use proptest::prelude::*;
use radiomap_core::envmap::{HeightMap, Point3, RxConfig, Scene, TxConfig};
use radiomap_core::ordering::{
    alternative_order, bruteforce_costs, hilbert_order, init_costs, raster_order, subsample_order, verify_predecessor_containment,
    wavefront_order, zcurve_order, OrderParams, PatchGrid,
};

fn scene_from(blocks: &[(usize, usize, usize, f64)], tx: (f64, f64, f64)) -> Scene {
    let side = 32;
    let mut v = vec![0.0; side * side];
    for &(r, c, s, z) in blocks {
        for rr in r..(r + s).min(side) {
            for cc in c..(c + s).min(side) {
                v[rr * side + cc] = z;
            }
        }
    }
    let hm = HeightMap::new(side, side, 1.0, v).unwrap();
    Scene::new(hm, TxConfig::at(Point3::new(tx.0, tx.1, tx.2)), RxConfig::single(1.5)).unwrap()
}

fn blocks() -> impl Strategy<Value = Vec<(usize, usize, usize, f64)>> {
    prop::collection::vec((0usize..32, 0usize..32, 1usize..12, 2.0f64..30.0), 0..5)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn wavefront_matches_bellman_ford(b in blocks(), x in 0.0f64..32.0, y in 0.0f64..32.0, z in 1.5f64..40.0) {
        let scene = scene_from(&b, (x, y, z));
        let patches = PatchGrid::for_scene(&scene, 4).unwrap();
        let (_, fast) = wavefront_order(&scene, &patches, OrderParams::default()).unwrap();
        let slow = bruteforce_costs(&scene, &patches, OrderParams::default()).unwrap();
        for (a, s) in fast.d.iter().zip(&slow.d) {
            prop_assert!((a - s).abs() <= 1e-9 * a.abs().max(1.0));
        }
    }

    #[test]
    fn wavefront_always_contains_predecessors(b in blocks(), x in 0.0f64..32.0, y in 0.0f64..32.0, z in 1.5f64..40.0) {
        let scene = scene_from(&b, (x, y, z));
        let patches = PatchGrid::for_scene(&scene, 4).unwrap();
        let (order, costs) = wavefront_order(&scene, &patches, OrderParams::default()).unwrap();
        prop_assert!(verify_predecessor_containment(&order, &costs).unwrap().holds);
        prop_assert_eq!(order.perm()[0], costs.source);
        for w in order.perm().windows(2) {
            prop_assert!(costs.d[w[0]] <= costs.d[w[1]]);
        }
    }

    #[test]
    fn alpha_monotone_costs(b in blocks(), a1 in 1.0f64..3.0, extra in 0.0f64..3.0) {
        let scene = scene_from(&b, (16.0, 16.0, 2.0));
        let patches = PatchGrid::for_scene(&scene, 4).unwrap();
        let p = |alpha: f64| OrderParams { alpha_nlos: alpha, ..OrderParams::default() };
        let (_, lo) = wavefront_order(&scene, &patches, p(a1)).unwrap();
        let (_, hi) = wavefront_order(&scene, &patches, p(a1 + extra)).unwrap();
        for (l, h) in lo.d.iter().zip(&hi.d) {
            prop_assert!(*l <= h + 1e-9);
        }
    }
}

#[test]
fn geometric_orders_are_permutations() {
    for np in [1usize, 2, 3, 4, 7, 8, 16] {
        let mut orders = vec![raster_order(np), subsample_order(np), alternative_order(np)];
        if np.is_power_of_two() {
            orders.extend([hilbert_order(np), zcurve_order(np)]);
        } else {
            assert!(hilbert_order(np).is_err() && zcurve_order(np).is_err());
        }
        for order in orders {
            let order = order.unwrap();
            let mut seen = order.perm().to_vec();
            seen.sort_unstable();
            assert_eq!(seen, (0..np * np).collect::<Vec<_>>());
        }
    }
}

#[test]
fn hilbert_steps_are_adjacent() {
    let order = hilbert_order(16).unwrap();
    for w in order.perm().windows(2) {
        let (r0, c0) = (w[0] / 16, w[0] % 16);
        let (r1, c1) = (w[1] / 16, w[1] % 16);
        assert_eq!(r0.abs_diff(r1) + c0.abs_diff(c1), 1);
    }
}

#[test]
fn flat_scene_costs_are_direct() {
    let scene = scene_from(&[], (13.0, 20.0, 1.5));
    let patches = PatchGrid::for_scene(&scene, 4).unwrap();
    let (_, costs) = wavefront_order(&scene, &patches, OrderParams::default()).unwrap();
    let direct = init_costs(&scene, &patches, OrderParams::default()).unwrap();
    for (c, d) in costs.d.iter().zip(&direct.d) {
        assert!((c - d).abs() < 1e-12);
    }
    assert!(costs.pred.iter().enumerate().all(|(i, p)| i == costs.source || *p == Some(costs.source)));
}
