use proptest::prelude::*;
use radiomap_core::entropy::{decode_trace, encode_trace, RawTrace};
use radiomap_core::envmap::{decode_grid, encode_grid, read_csv_grid, write_csv_grid, Grid, HeightMap, RadioField, Unit};
use radiomap_core::ordering::{load_order, save_order, OrderFile, OrderKind, OrderParams, OrderPi};
use radiomap_core::Error;
use tempfile::TempDir;

fn f32_exact(v: f32) -> f64 {
    v as f64
}

proptest! {
    #[test]
    fn rgf_field_roundtrip(w in 1usize..8, h in 1usize..8, nz in 1usize..4, seed in any::<u64>()) {
        let n = w * h * nz;
        let values: Vec<f64> = (0..n).map(|i| f32_exact(((seed.wrapping_add(i as u64) % 1000) as f32) * -0.125)).collect();
        let field = RadioField::new(w, h, nz, Unit::Db, values).unwrap();
        let back = decode_grid(&encode_grid(&field).unwrap()).unwrap();
        prop_assert_eq!(back, Grid::Radio(field));
    }

    #[test]
    fn rgf_truncation_never_panics(w in 1usize..6, h in 1usize..6, cut in 0usize..200) {
        let hm = HeightMap::flat(w, h, 1.0).unwrap();
        let bytes = encode_grid(&hm).unwrap();
        let cut = cut.min(bytes.len() - 1);
        prop_assert!(decode_grid(&bytes[..cut]).is_err());
    }

    #[test]
    fn trace_roundtrip(n in 1usize..20, v in 1usize..10, scale in -10.0f32..10.0) {
        let logits: Vec<f32> = (0..n * v).map(|i| i as f32 * scale).collect();
        let raw = RawTrace { n_steps: n, vocab: v, logits };
        prop_assert_eq!(decode_trace(&encode_trace(&raw).unwrap()).unwrap(), raw);
    }

    #[test]
    fn csv_grid_roundtrip(w in 1usize..6, h in 1usize..6) {
        let values: Vec<f64> = (0..w * h).map(|i| i as f64 * 0.5 - 3.0).collect();
        let field = RadioField::new(w, h, 1, Unit::Db, values).unwrap();
        let mut buf = Vec::new();
        write_csv_grid(&mut buf, &field).unwrap();
        let back = read_csv_grid(buf.as_slice(), Unit::Db).unwrap();
        prop_assert_eq!(back, Grid::Radio(field));
    }
}

#[test]
fn trailing_bytes_are_a_length_error() {
    let mut bytes = encode_grid(&HeightMap::flat(2, 2, 1.0).unwrap()).unwrap();
    bytes.push(0);
    assert!(matches!(decode_grid(&bytes), Err(Error::Length { .. })));
}

#[test]
fn order_file_roundtrip_on_disk() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("o.json");
    let order = OrderPi::new(OrderKind::Custom, 2, vec![3, 1, 0, 2]).unwrap();
    save_order(&OrderFile::new(&order, Some(OrderParams::default())), &path).unwrap();
    let file = load_order(&path).unwrap();
    assert_eq!(file.order().unwrap(), order);
}

#[test]
fn corrupt_order_file_rejected() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("o.json");
    std::fs::write(&path, r#"{"kind":"raster","np":2,"perm":[0,1,1,3]}"#).unwrap();
    assert!(load_order(&path).and_then(|f| f.order()).is_err());
}
