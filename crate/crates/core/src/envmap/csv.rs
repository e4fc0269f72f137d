//! `x,y,z,value` CSV bridge for external datasets. `x` is the column, `y` the
//! row and `z` the slice, all zero-based.

use std::io::{BufRead, Write};

use super::rgf::{Grid, GridView};
use super::{HeightMap, RadioField, Unit};
use crate::error::{validation, Error, Result};

const HEADER: &str = "x,y,z,value";

pub fn read_csv_grid(reader: impl BufRead, unit: Unit) -> Result<Grid> {
    let mut lines = reader.lines();
    let header = lines.next().transpose()?.unwrap_or_default();
    if header.trim() != HEADER {
        return Err(Error::Format(format!("expected CSV header `{HEADER}`, found `{}`", header.trim())));
    }
    let mut cells = Vec::new();
    let (mut w, mut h, mut d) = (0usize, 0usize, 0usize);
    for (lineno, line) in lines.enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 4 {
            return Err(Error::Format(format!("line {}: expected 4 fields", lineno + 2)));
        }
        let idx = |s: &str| {
            s.parse::<usize>()
                .map_err(|e| Error::Format(format!("line {}: bad index `{s}`: {e}", lineno + 2)))
        };
        let (x, y, z) = (idx(fields[0])?, idx(fields[1])?, idx(fields[2])?);
        let v: f64 = fields[3]
            .parse()
            .map_err(|e| Error::Format(format!("line {}: bad value `{}`: {e}", lineno + 2, fields[3])))?;
        w = w.max(x + 1);
        h = h.max(y + 1);
        d = d.max(z + 1);
        cells.push((x, y, z, v));
    }
    if cells.is_empty() {
        return Err(validation("CSV grid has no cells"));
    }
    let mut values = vec![f64::NAN; w * h * d];
    for (x, y, z, v) in cells {
        let slot = &mut values[z * w * h + y * w + x];
        if !slot.is_nan() {
            return Err(validation(format!("duplicate cell ({x}, {y}, {z})")));
        }
        *slot = v;
    }
    if values.iter().any(|v| v.is_nan()) {
        return Err(validation("CSV grid is missing cells or contains NaN"));
    }
    match unit {
        Unit::Meters => {
            if d != 1 {
                return Err(validation("height map CSV must have a single z slice"));
            }
            Ok(Grid::Height(HeightMap::new(w, h, 1.0, values)?))
        }
        _ => Ok(Grid::Radio(RadioField::new(w, h, d, unit, values)?)),
    }
}

pub fn write_csv_grid<'a>(mut writer: impl Write, grid: impl Into<GridView<'a>>) -> Result<()> {
    let g = grid.into();
    writeln!(writer, "{HEADER}")?;
    let n = g.width * g.height;
    for (i, v) in g.values.iter().enumerate() {
        let (z, rem) = (i / n, i % n);
        writeln!(writer, "{},{},{},{}", rem % g.width, rem / g.width, z, v)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_roundtrip_preserves_values() {
        let field = RadioField::new(3, 2, 2, Unit::Db, (0..12).map(|i| -50.0 - i as f64 * 1.25).collect()).unwrap();
        let mut buf = Vec::new();
        write_csv_grid(&mut buf, &field).unwrap();
        let back = read_csv_grid(buf.as_slice(), Unit::Db).unwrap().into_radio_field().unwrap();
        assert_eq!(back, field);
    }

    #[test]
    fn missing_cell_rejected() {
        let csv = "x,y,z,value\n0,0,0,1\n1,1,0,2\n";
        assert!(read_csv_grid(csv.as_bytes(), Unit::Db).is_err());
    }

    #[test]
    fn wrong_header_rejected() {
        assert!(matches!(read_csv_grid("a,b\n".as_bytes(), Unit::Db), Err(Error::Format(_))));
    }
}
