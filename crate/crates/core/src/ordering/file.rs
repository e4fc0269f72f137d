//! Order files (one JSON object: `kind`, `np`, `perm`, `params`) and cost dumps.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{CostField, OrderKind, OrderParams, OrderPi};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderFile {
    pub kind: OrderKind,
    pub np: usize,
    pub perm: Vec<usize>,
    pub params: Option<OrderParams>,
}

impl OrderFile {
    pub fn new(order: &OrderPi, params: Option<OrderParams>) -> Self {
        Self { kind: order.kind(), np: order.np(), perm: order.perm().to_vec(), params }
    }

    pub fn order(&self) -> Result<OrderPi> {
        OrderPi::new(self.kind, self.np, self.perm.clone())
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Format(e.to_string()))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let file: OrderFile = serde_json::from_str(s).map_err(|e| Error::Format(format!("order file: {e}")))?;
        file.order()?;
        if let Some(p) = &file.params {
            p.validate()?;
        }
        Ok(file)
    }
}

pub fn save_order(file: &OrderFile, path: impl AsRef<Path>) -> Result<()> {
    let mut text = file.to_json()?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

pub fn load_order(path: impl AsRef<Path>) -> Result<OrderFile> {
    OrderFile::from_json(&fs::read_to_string(path)?)
}

/// `patch_index,D,pred` rows; the source has an empty predecessor.
pub fn write_cost_csv(mut w: impl Write, costs: &CostField) -> Result<()> {
    writeln!(w, "patch_index,D,pred")?;
    for (i, (d, p)) in costs.d.iter().zip(&costs.pred).enumerate() {
        match p {
            Some(p) => writeln!(w, "{i},{d},{p}")?,
            None => writeln!(w, "{i},{d},")?,
        }
    }
    Ok(())
}
