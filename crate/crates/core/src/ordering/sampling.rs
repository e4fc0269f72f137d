use rand::Rng;

use super::OrderPi;
use crate::error::{parameter, Result};

/// Uniform choice among the candidate training orders.
pub fn sample_training_order<'a, R: Rng + ?Sized>(rng: &mut R, candidates: &'a [OrderPi]) -> Result<&'a OrderPi> {
    if candidates.is_empty() {
        return Err(parameter("no candidate orders to sample from"));
    }
    Ok(&candidates[rng.random_range(0..candidates.len())])
}
