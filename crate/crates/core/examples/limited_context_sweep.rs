//! Mean k-context entropy of shadow-chain joints under wavefront and raster
//! orders on small random cities, across cost exponents, tx heights and k.
//!
//! cargo run --release -p radiomap-core --example limited_context_sweep

use radiomap_core::entropy::{limited_context_entropy, shadow_joint_from_costs};
use radiomap_core::ordering::{raster_order, wavefront_order, OrderParams, PatchGrid};
use radiomap_core::synth::{gen_scene, CityParams, DatasetProfile, TxHeight};

fn main() {
    let raster = raster_order(3).unwrap();
    println!("k,alpha,z_tx,wf_le_raster,wf_lt_raster,mean_wf,mean_raster");
    for k in [1, 2, 3] {
        for (alpha, z_tx) in [(2.0, 1.5), (1.0, 1.5), (4.0, 1.5), (2.0, 22.8)] {
            let (mut le, mut lt, mut sum_wf, mut sum_raster) = (0, 0, 0.0, 0.0);
            for seed in 0..50 {
                let profile = DatasetProfile {
                    tx_height: TxHeight::Fixed(z_tx),
                    height_range: (6.6, 19.8),
                    ..DatasetProfile::radio_map_seer()
                };
                let city = CityParams {
                    side_px: 48,
                    n_buildings: 4,
                    footprint_range: (6, 16),
                    height_range: profile.height_range,
                    seed,
                    ..Default::default()
                };
                let scene = gen_scene(&city, &profile, None).unwrap();
                let patches = PatchGrid::for_scene(&scene, 16).unwrap();
                let params = OrderParams { alpha_los: alpha, alpha_nlos: alpha, ..Default::default() };
                let (wf, costs) = wavefront_order(&scene, &patches, params).unwrap();
                let joint = shadow_joint_from_costs(&costs, 0.1).unwrap();
                let a = limited_context_entropy(&joint, wf.perm(), k).unwrap();
                let b = limited_context_entropy(&joint, raster.perm(), k).unwrap();
                sum_wf += a;
                sum_raster += b;
                le += usize::from(a <= b + 1e-12);
                lt += usize::from(a < b - 1e-12);
            }
            println!("{k},{alpha},{z_tx},{le},{lt},{:.4},{:.4}", sum_wf / 50.0, sum_raster / 50.0);
        }
    }
}
