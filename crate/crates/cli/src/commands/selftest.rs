//! Oracle suites runnable from the command line.

use anyhow::{bail, Result};
use clap::Args;
use rand::seq::SliceRandom;
use rand::Rng;
use radiomap_core::entropy::{exact_conditional_entropies, JointDist};
use radiomap_core::envmap::{HeightMap, Point3, RadioField, RxConfig, Scene, TxConfig, Unit};
use radiomap_core::metrics::{psnr, ssim, SsimParams};
use radiomap_core::ordering::{
    bruteforce_costs, hilbert_order, raster_order, verify_predecessor_containment, wavefront_order, OrderParams,
    PatchGrid,
};
use radiomap_core::propagation::anchor_map;
use radiomap_core::rope::{rope_rotate_1d, rope_rotate_3d, RopeConfig, DEFAULT_THETA_BASE};
use radiomap_core::seeded_rng;

use crate::{Context, Status};

pub const SUITES: [&str; 6] = ["wavefront-vs-bellman-ford", "containment", "chain-rule", "rope", "metrics", "anchor-flat"];

#[derive(Args, Debug)]
pub struct SelftestArgs {
    /// Run only these suites.
    #[arg(long = "suite")]
    pub suites: Vec<String>,
    /// Perturb the named suite's result so it must fail.
    #[arg(long)]
    pub inject_fault: Option<String>,
    /// Random cases per suite.
    #[arg(long, default_value_t = 8)]
    pub cases: usize,
}

/// Largest absolute deviation of a suite from its oracle, with its tolerance.
struct Outcome {
    error: f64,
    tol: f64,
    detail: String,
}

fn random_scene(rng: &mut impl Rng, side: usize) -> Result<Scene> {
    let mut values = vec![0.0; side * side];
    for _ in 0..rng.random_range(1..=6) {
        let (r0, c0) = (rng.random_range(0..side), rng.random_range(0..side));
        let (h, w) = (rng.random_range(1..=side / 3), rng.random_range(1..=side / 3));
        let z = rng.random_range(5.0..25.0);
        for r in r0..(r0 + h).min(side) {
            for c in c0..(c0 + w).min(side) {
                values[r * side + c] = z;
            }
        }
    }
    let hm = HeightMap::new(side, side, 1.0, values)?;
    let (x, y) = (rng.random_range(0.0..side as f64), rng.random_range(0.0..side as f64));
    Ok(Scene::new(hm, TxConfig::at(Point3::new(x, y, rng.random_range(1.5..30.0))), RxConfig::single(1.5))?)
}

fn wavefront_vs_bf(seed: u64, cases: usize) -> Result<Outcome> {
    let mut rng = seeded_rng(seed);
    let mut worst = 0.0f64;
    for _ in 0..cases {
        let scene = random_scene(&mut rng, 48)?;
        let patches = PatchGrid::for_scene(&scene, 8)?;
        let (_, fast) = wavefront_order(&scene, &patches, OrderParams::default())?;
        let slow = bruteforce_costs(&scene, &patches, OrderParams::default())?;
        for (a, b) in fast.d.iter().zip(&slow.d) {
            worst = worst.max((a - b).abs() / a.abs().max(1.0));
        }
    }
    Ok(Outcome { error: worst, tol: 1e-12, detail: format!("{cases} scenes, 6x6 patches, max rel cost gap") })
}

fn containment(seed: u64, cases: usize) -> Result<Outcome> {
    let mut rng = seeded_rng(seed);
    let mut violations = 0usize;
    let mut baseline = 0usize;
    for _ in 0..cases {
        let scene = random_scene(&mut rng, 64)?;
        let patches = PatchGrid::for_scene(&scene, 8)?;
        let (order, costs) = wavefront_order(&scene, &patches, OrderParams::default())?;
        violations += verify_predecessor_containment(&order, &costs)?.violations.len();
        baseline += verify_predecessor_containment(&raster_order(patches.np())?, &costs)?.violations.len()
            + verify_predecessor_containment(&hilbert_order(patches.np())?, &costs)?.violations.len();
    }
    Ok(Outcome {
        error: violations as f64,
        tol: 0.0,
        detail: format!("{cases} scenes: wavefront violations (raster + hilbert had {baseline})"),
    })
}

fn chain_rule(seed: u64, cases: usize) -> Result<Outcome> {
    let mut rng = seeded_rng(seed);
    let mut worst = 0.0f64;
    for _ in 0..cases {
        let n = rng.random_range(2..=6);
        let joint = JointDist::random(&mut rng, n, 2)?;
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng);
        let total: f64 = exact_conditional_entropies(&joint, &order)?.iter().sum();
        worst = worst.max((total - joint.entropy()).abs());
    }
    Ok(Outcome { error: worst, tol: 1e-9, detail: format!("{cases} random joints, |sum H(step) - H(joint)|") })
}

fn rope(seed: u64, cases: usize) -> Result<Outcome> {
    let mut rng = seeded_rng(seed);
    let cfg = RopeConfig::for_head_dim(12)?;
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let mut worst = 0.0f64;
    for _ in 0..cases {
        let q: Vec<f64> = (0..12).map(|_| rng.random_range(-1.0..1.0)).collect();
        let k: Vec<f64> = (0..12).map(|_| rng.random_range(-1.0..1.0)).collect();
        let (m, n, shift) = (rng.random_range(-50.0..50.0), rng.random_range(-50.0..50.0), rng.random_range(-50.0..50.0));
        let base = dot(&rope_rotate_1d(&q, m, DEFAULT_THETA_BASE)?, &rope_rotate_1d(&k, n, DEFAULT_THETA_BASE)?);
        let moved = dot(&rope_rotate_1d(&q, m + shift, DEFAULT_THETA_BASE)?, &rope_rotate_1d(&k, n + shift, DEFAULT_THETA_BASE)?);
        worst = worst.max((base - moved).abs());
        let p: [i64; 3] = std::array::from_fn(|_| rng.random_range(-20..20));
        let s: [i64; 3] = std::array::from_fn(|_| rng.random_range(-20..20));
        let a = dot(&rope_rotate_3d(&q, p[0], p[1], p[2], &cfg)?, &rope_rotate_3d(&k, 0, 0, 0, &cfg)?);
        let b = dot(&rope_rotate_3d(&q, p[0] + s[0], p[1] + s[1], p[2] + s[2], &cfg)?, &rope_rotate_3d(&k, s[0], s[1], s[2], &cfg)?);
        worst = worst.max((a - b).abs());
    }
    Ok(Outcome { error: worst, tol: 1e-9, detail: format!("{cases} vectors, relative-position invariance in 1D and 3D") })
}

fn metrics(seed: u64, cases: usize) -> Result<Outcome> {
    let mut rng = seeded_rng(seed);
    let mut worst = 0.0f64;
    for _ in 0..cases {
        let values: Vec<f64> = (0..32 * 32).map(|_| rng.random::<f64>()).collect();
        let f = RadioField::new(32, 32, 1, Unit::Normalized01, values)?;
        worst = worst.max((ssim(&f, &f, &SsimParams::default())? - 1.0).abs());
        if psnr(&f, &f)? != f64::INFINITY {
            worst = f64::INFINITY;
        }
    }
    Ok(Outcome { error: worst, tol: 1e-12, detail: format!("{cases} fields, SSIM(x, x) = 1 and PSNR(x, x) = inf") })
}

fn anchor_flat(seed: u64, cases: usize) -> Result<Outcome> {
    let mut rng = seeded_rng(seed);
    let mut worst = 0.0f64;
    for _ in 0..cases {
        let side = 32;
        let tx = TxConfig::at(Point3::new(rng.random_range(0.0..32.0), rng.random_range(0.0..32.0), rng.random_range(1.5..20.0)));
        let scene = Scene::new(HeightMap::flat(side, side, 1.0)?, tx.clone(), RxConfig::single(1.5))?;
        let anchor = anchor_map(&scene)?;
        let c = 299_792_458.0f64;
        for row in 0..side {
            for col in 0..side {
                let (x, y) = scene.heightmap.pixel_center(row, col);
                let d = tx.position.distance(&Point3::new(x, y, 1.5)).max(tx.d0);
                let friis = 20.0 * (c / (4.0 * std::f64::consts::PI * d * tx.frequency_hz)).log10();
                worst = worst.max((anchor.get(row, col) - friis).abs());
            }
        }
    }
    Ok(Outcome { error: worst, tol: 1e-9, detail: format!("{cases} flat scenes, max |anchor - Friis| dB") })
}

pub fn run(ctx: &Context, args: SelftestArgs) -> Result<Status> {
    for s in args.suites.iter().chain(&args.inject_fault) {
        if !SUITES.contains(&s.as_str()) {
            bail!("unknown suite `{s}` (known: {})", SUITES.join(", "));
        }
    }
    let selected: Vec<&str> =
        SUITES.iter().copied().filter(|s| args.suites.is_empty() || args.suites.iter().any(|a| a == s)).collect();
    let mut failed = Vec::new();
    for (i, &name) in selected.iter().enumerate() {
        let seed = ctx.seed.wrapping_add(i as u64);
        let mut out = match name {
            "wavefront-vs-bellman-ford" => wavefront_vs_bf(seed, args.cases),
            "containment" => containment(seed, args.cases),
            "chain-rule" => chain_rule(seed, args.cases),
            "rope" => rope(seed, args.cases),
            "metrics" => metrics(seed, args.cases),
            "anchor-flat" => anchor_flat(seed, args.cases),
            _ => unreachable!("suite list is closed"),
        }?;
        if args.inject_fault.as_deref() == Some(name) {
            out.error += 1.0;
            out.detail.push_str(" [fault injected]");
        }
        let pass = out.error <= out.tol;
        println!("[{}] {name}: {} = {:.3e} (tol {:.0e})", if pass { "PASS" } else { "FAIL" }, out.detail, out.error, out.tol);
        if !pass {
            failed.push(name);
        }
    }
    if failed.is_empty() {
        println!("{} suites passed", selected.len());
        Ok(Status::Ok)
    } else {
        eprintln!("failed suites: {}", failed.join(", "));
        Ok(Status::VerificationFailed)
    }
}
