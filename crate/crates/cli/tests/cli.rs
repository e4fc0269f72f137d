use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use radiomap_core::entropy::{load_trace, save_trace, RawTrace};
use radiomap_core::envmap::{load_grid, save_grid, HeightMap};
use radiomap_core::ordering::{load_order, OrderKind};
use tempfile::TempDir;

fn radiomap(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_radiomap"))
        .current_dir(dir)
        .env_remove("RADIOMAP_CONFIG")
        .args(args)
        .output()
        .expect("spawn radiomap")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn synth(dir: &Path, extra: &[&str]) {
    let mut args = vec!["--seed", "7", "synth", "--out-dir", "s", "--count", "2", "--side", "64"];
    args.extend_from_slice(extra);
    let o = radiomap(dir, &args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn synth_writes_scene_triples() {
    let tmp = TempDir::new().unwrap();
    synth(tmp.path(), &["--preset", "canyon", "--noise-db", "2"]);
    for i in 0..2 {
        let stem = tmp.path().join(format!("s/scene_{i:04}"));
        let hm = load_grid(stem.with_extension("height.rgf")).unwrap().into_height_map().unwrap();
        let field = load_grid(stem.with_extension("field.rgf")).unwrap().into_radio_field().unwrap();
        assert_eq!((hm.width(), field.width()), (64, 64));
        assert!(fs::read_to_string(stem.with_extension("txt")).unwrap().contains("heightmap = "));
    }
}

#[test]
fn synth_is_seed_deterministic() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    synth(a.path(), &["--noise-db", "3"]);
    synth(b.path(), &["--noise-db", "3"]);
    let read = |d: &TempDir| fs::read(d.path().join("s/scene_0001.field.rgf")).unwrap();
    assert_eq!(read(&a), read(&b));
}

#[test]
fn wavefront_verifies_and_raster_fails() {
    let tmp = TempDir::new().unwrap();
    synth(tmp.path(), &["--preset", "edge_tx"]);
    let ok = radiomap(tmp.path(), &["order", "s/scene_0000.txt", "--patch-px", "8", "--out-dir", "o", "--verify"]);
    assert_eq!(ok.status.code(), Some(0), "{}", stdout(&ok));
    assert!(stdout(&ok).contains("oracle=agree"));
    let order = load_order(tmp.path().join("o/scene_0000.wavefront.order.json")).unwrap().order().unwrap();
    assert_eq!((order.kind(), order.np()), (OrderKind::Wavefront, 8));
    let csv = fs::read_to_string(tmp.path().join("o/scene_0000.costs.csv")).unwrap();
    assert_eq!(csv.lines().count(), 65);

    let bad = radiomap(tmp.path(), &["order", "s/scene_0000.txt", "--kind", "raster", "--patch-px", "8", "--out-dir", "o", "--verify"]);
    assert_eq!(bad.status.code(), Some(1));
    let report = fs::read_to_string(tmp.path().join("o/scene_0000.raster.containment.txt")).unwrap();
    assert!(report.starts_with("holds = false"));
}

#[test]
fn every_order_kind_runs() {
    let tmp = TempDir::new().unwrap();
    synth(tmp.path(), &[]);
    for kind in ["wavefront", "prior_pl", "true_pl", "raster", "hilbert", "zcurve", "subsample", "alternative", "euclidean"] {
        let o = radiomap(tmp.path(), &["order", "s/scene_0000.txt", "--kind", kind, "--patch-px", "8", "--out-dir", "o"]);
        assert!(o.status.success(), "{kind}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(tmp.path().join(format!("o/scene_0000.{kind}.order.json")).exists());
    }
}

#[test]
fn usage_errors_exit_two() {
    let tmp = TempDir::new().unwrap();
    synth(tmp.path(), &[]);
    let o = radiomap(tmp.path(), &["order", "s/scene_0000.txt", "--kind", "spiral"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("spiral"));
    let o = radiomap(tmp.path(), &["anchor", "missing.txt"]);
    assert_eq!(o.status.code(), Some(2));
    let o = radiomap(tmp.path(), &["selftest", "--suite", "nope"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn config_file_supplies_defaults_and_flags_override() {
    let tmp = TempDir::new().unwrap();
    synth(tmp.path(), &[]);
    fs::write(tmp.path().join("run.cfg"), "# run\nkind = hilbert\npatch_px = 16\n").unwrap();
    let o = radiomap(tmp.path(), &["--config", "run.cfg", "order", "s/scene_0000.txt", "--out-dir", "o"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("hilbert np=4"));
    let o = radiomap(tmp.path(), &["--config", "run.cfg", "order", "s/scene_0000.txt", "--out-dir", "o", "--patch-px", "8"]);
    assert!(stdout(&o).contains("hilbert np=8"), "{}", stdout(&o));
}

#[test]
fn anchor_from_heightmap_flags() {
    let tmp = TempDir::new().unwrap();
    save_grid(&HeightMap::flat(16, 16, 2.0).unwrap(), tmp.path().join("flat.height.rgf")).unwrap();
    let o = radiomap(tmp.path(), &["anchor", "--heightmap", "flat.height.rgf", "--resolution", "2", "--tx-z", "10", "--csv"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let field = load_grid(tmp.path().join("flat.anchor.rgf")).unwrap().into_radio_field().unwrap();
    assert_eq!(field.width(), 16);
    assert!(field.values().iter().all(|&v| v < 0.0));
    let csv = fs::read_to_string(tmp.path().join("flat.anchor.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 256);
}

#[test]
fn metrics_self_comparison() {
    let tmp = TempDir::new().unwrap();
    synth(tmp.path(), &["--profile", "urbanradio3d"]);
    let o = radiomap(
        tmp.path(),
        &["metrics", "--pred", "s/scene_0000.field.rgf", "--gt", "s/scene_0000.field.rgf", "--per-slice", "--out", "m.csv"],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(tmp.path().join("m.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "slice,nmse,rmse_db,ssim,psnr,grad3d");
    assert_eq!(lines.len(), 2 + 20);
    assert_eq!(lines[1], "all,0,0,1,inf,0");
}

#[test]
fn metrics_against_different_field() {
    let tmp = TempDir::new().unwrap();
    synth(tmp.path(), &["--noise-db", "4"]);
    let o = radiomap(tmp.path(), &["metrics", "--pred", "s/scene_0000.field.rgf", "--gt", "s/scene_0001.field.rgf"]);
    let out = stdout(&o);
    let row: Vec<f64> = out.lines().nth(1).unwrap().split(',').skip(1).map(|v| v.parse().unwrap()).collect();
    assert!(row[0] > 0.0 && row[1] > 0.0 && row[2] < 1.0 && row[3].is_finite() && row[4] > 0.0, "{out}");
}

#[test]
fn entropy_profile_and_delta() {
    let tmp = TempDir::new().unwrap();
    synth(tmp.path(), &[]);
    for kind in ["wavefront", "raster"] {
        let o = radiomap(tmp.path(), &["order", "s/scene_0000.txt", "--kind", kind, "--out-dir", "o"]);
        assert!(o.status.success());
    }
    // 16 steps over 4 symbols: uniform logits for A, sharp logits for B.
    save_trace(&RawTrace { n_steps: 16, vocab: 4, logits: vec![0.0; 64] }, tmp.path().join("a.ltr")).unwrap();
    let sharp: Vec<f32> = (0..64).map(|i| if i % 4 == 0 { 50.0 } else { 0.0 }).collect();
    save_trace(&RawTrace { n_steps: 16, vocab: 4, logits: sharp }, tmp.path().join("b.ltr")).unwrap();
    assert_eq!(load_trace(tmp.path().join("a.ltr")).unwrap().n_steps, 16);
    let o = radiomap(
        tmp.path(),
        &[
            "entropy", "--trace", "a.ltr", "--order", "o/scene_0000.wavefront.order.json", "--against-trace", "b.ltr",
            "--against-order", "o/scene_0000.raster.order.json", "--profile-out", "p.csv", "--delta-out", "d.rgf",
            "--bits",
        ],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("mean_entropy_bits = 2"), "{}", stdout(&o));
    let profile = fs::read_to_string(tmp.path().join("p.csv")).unwrap();
    assert_eq!(profile.lines().count(), 17);
    let delta = load_grid(tmp.path().join("d.rgf")).unwrap().into_radio_field().unwrap();
    assert!(delta.values().iter().all(|&v| (v - 2.0).abs() < 1e-6));
}

#[test]
fn entropy_rejects_mismatched_pairs() {
    let tmp = TempDir::new().unwrap();
    synth(tmp.path(), &[]);
    radiomap(tmp.path(), &["order", "s/scene_0000.txt", "--out-dir", "o"]);
    save_trace(&RawTrace { n_steps: 9, vocab: 2, logits: vec![0.0; 18] }, tmp.path().join("a.ltr")).unwrap();
    let o = radiomap(tmp.path(), &["entropy", "--trace", "a.ltr", "--order", "o/scene_0000.wavefront.order.json"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn selftest_passes_and_fault_injection_fails() {
    let tmp = TempDir::new().unwrap();
    let o = radiomap(tmp.path(), &["selftest", "--cases", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert_eq!(stdout(&o).matches("[PASS]").count(), 6);
    let o = radiomap(tmp.path(), &["selftest", "--cases", "2", "--inject-fault", "chain-rule"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("chain-rule"));
}

#[test]
fn csv_fields_match_rgf_metrics() {
    let tmp = TempDir::new().unwrap();
    synth(tmp.path(), &["--noise-db", "2"]);
    let o = radiomap(tmp.path(), &["anchor", "s/scene_0000.txt", "--csv", "--out-dir", "a"]);
    assert!(o.status.success());
    let run = |pred: &str| stdout(&radiomap(tmp.path(), &["metrics", "--pred", pred, "--gt", "s/scene_0000.field.rgf"]));
    let (rgf, csv) = (run("a/scene_0000.anchor.rgf"), run("a/scene_0000.anchor.csv"));
    let row = |s: &str| s.lines().nth(1).unwrap().split(',').map(str::to_owned).collect::<Vec<_>>();
    for (a, b) in row(&rgf).iter().zip(row(&csv)).skip(1) {
        let (a, b): (f64, f64) = (a.parse().unwrap(), b.parse().unwrap());
        assert!((a - b).abs() <= 1e-6 * a.abs().max(1.0), "{rgf} vs {csv}");
    }
}

#[test]
fn reruns_are_byte_identical() {
    let tmp = TempDir::new().unwrap();
    synth(tmp.path(), &["--preset", "sparse"]);
    let mut first = Vec::new();
    for pass in 0..2 {
        radiomap(tmp.path(), &["order", "s/scene_0000.txt", "s/scene_0001.txt", "--jobs", "2", "--out-dir", "o"]);
        radiomap(tmp.path(), &["anchor", "s/scene_0001.txt", "--out-dir", "o"]);
        let mut files: Vec<_> = fs::read_dir(tmp.path().join("o")).unwrap().map(|e| e.unwrap().path()).collect();
        files.sort();
        let bytes: Vec<Vec<u8>> = files.iter().map(|f| fs::read(f).unwrap()).collect();
        if pass == 0 {
            first = bytes;
        } else {
            assert_eq!(first, bytes);
        }
    }
    assert!(!tmp.path().join("o").read_dir().unwrap().any(|e| e.unwrap().path().extension().is_some_and(|x| x == "tmp")));
}
