use super::{CostField, OrderPi};
use crate::error::{validation, Result};

/// A chain member generated no earlier than the patch that depends on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Violation {
    pub patch: usize,
    pub position: usize,
    pub predecessor: usize,
    pub predecessor_position: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContainmentReport {
    pub holds: bool,
    pub violations: Vec<Violation>,
}

/// Checks that every patch's full predecessor chain precedes it in `order`.
pub fn verify_predecessor_containment(order: &OrderPi, costs: &CostField) -> Result<ContainmentReport> {
    if order.len() != costs.len() {
        return Err(validation(format!("order has {} patches but the cost field {}", order.len(), costs.len())));
    }
    let pos = order.positions();
    let mut violations = Vec::new();
    for (n, &patch) in order.perm().iter().enumerate() {
        for pred in costs.chain(patch) {
            if pos[pred] >= n {
                violations.push(Violation { patch, position: n, predecessor: pred, predecessor_position: pos[pred] });
            }
        }
    }
    Ok(ContainmentReport { holds: violations.is_empty(), violations })
}
