//! Scene-independent scan orders.

use super::{OrderKind, OrderPi};
use crate::error::{parameter, Result};

fn require_power_of_two(np: usize, what: &str) -> Result<()> {
    if np == 0 || !np.is_power_of_two() {
        return Err(parameter(format!("{what} order needs a power-of-two grid side, got {np}")));
    }
    Ok(())
}

/// Row-major scan.
pub fn raster_order(np: usize) -> Result<OrderPi> {
    OrderPi::new(OrderKind::Raster, np, (0..np * np).collect())
}

/// Hilbert-curve position `d` to `(x, y)` on an `n x n` grid.
fn hilbert_d2xy(n: usize, d: usize) -> (usize, usize) {
    let (mut x, mut y) = (0, 0);
    let mut t = d;
    let mut s = 1;
    while s < n {
        let rx = 1 & (t / 2);
        let ry = 1 & (t ^ rx);
        if ry == 0 {
            if rx == 1 {
                x = s - 1 - x;
                y = s - 1 - y;
            }
            std::mem::swap(&mut x, &mut y);
        }
        x += s * rx;
        y += s * ry;
        t /= 4;
        s *= 2;
    }
    (x, y)
}

/// Hilbert-curve visit order starting at the top-left patch.
pub fn hilbert_order(np: usize) -> Result<OrderPi> {
    require_power_of_two(np, "hilbert")?;
    let perm = (0..np * np)
        .map(|d| {
            let (x, y) = hilbert_d2xy(np, d);
            y * np + x
        })
        .collect();
    OrderPi::new(OrderKind::Hilbert, np, perm)
}

/// De-interleave the even bits of a Morton code.
fn compact_bits(mut v: u64) -> u64 {
    v &= 0x5555_5555_5555_5555;
    v = (v | (v >> 1)) & 0x3333_3333_3333_3333;
    v = (v | (v >> 2)) & 0x0f0f_0f0f_0f0f_0f0f;
    v = (v | (v >> 4)) & 0x00ff_00ff_00ff_00ff;
    v = (v | (v >> 8)) & 0x0000_ffff_0000_ffff;
    v = (v | (v >> 16)) & 0x0000_0000_ffff_ffff;
    v
}

/// Morton (Z-curve) order; the column supplies the low bit of each pair.
pub fn zcurve_order(np: usize) -> Result<OrderPi> {
    require_power_of_two(np, "zcurve")?;
    let perm = (0..(np * np) as u64)
        .map(|code| {
            let x = compact_bits(code) as usize;
            let y = compact_bits(code >> 1) as usize;
            y * np + x
        })
        .collect();
    OrderPi::new(OrderKind::Zcurve, np, perm)
}

/// Coarse-to-fine passes: every `s`-th row and column for `s = np/2, np/4, ..., 1`,
/// row-major within a pass, skipping patches already emitted.
pub fn subsample_order(np: usize) -> Result<OrderPi> {
    if np == 0 {
        return Err(parameter("subsample order needs a non-empty grid"));
    }
    let mut seen = vec![false; np * np];
    let mut perm = Vec::with_capacity(np * np);
    let mut stride = (np / 2).max(1);
    loop {
        for r in (0..np).step_by(stride) {
            for c in (0..np).step_by(stride) {
                let i = r * np + c;
                if !seen[i] {
                    seen[i] = true;
                    perm.push(i);
                }
            }
        }
        if stride == 1 {
            break;
        }
        stride /= 2;
    }
    OrderPi::new(OrderKind::Subsample, np, perm)
}

/// Serpentine scan: even rows left to right, odd rows right to left.
pub fn alternative_order(np: usize) -> Result<OrderPi> {
    let perm = (0..np)
        .flat_map(|r| {
            let row: Box<dyn Iterator<Item = usize>> =
                if r % 2 == 0 { Box::new(0..np) } else { Box::new((0..np).rev()) };
            row.map(move |c| r * np + c)
        })
        .collect();
    OrderPi::new(OrderKind::Alternative, np, perm)
}
