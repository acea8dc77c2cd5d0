use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::quotient::QuotientModel;
use super::space::Resolution;

/// Size data of a model.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexSummary {
    pub dim: usize,
    pub resolution: Resolution,
    pub cells_per_dim: Vec<usize>,
    pub euler: i64,
}

impl ComplexSummary {
    pub fn of(model: &QuotientModel) -> Self {
        Self {
            dim: model.dim(),
            resolution: model.resolution(),
            cells_per_dim: model.complex().cells_per_dim(),
            euler: model.complex().euler_characteristic(),
        }
    }
}

/// One `simplex <k> <v0> … <vk>` line per simplex, then one
/// `holonomy <v0> <v1> <bit>` line per edge, in index order.
pub fn export_text(model: &QuotientModel) -> String {
    let k = model.complex();
    let mut out = String::new();
    for dim in 0..=k.dim() {
        for i in 0..k.count(dim) {
            out.push_str("simplex ");
            out.push_str(&dim.to_string());
            for v in k.vertices(dim, i) {
                write!(out, " {v}").expect("writing to a string");
            }
            out.push('\n');
        }
    }
    let parities = model.edge_parities();
    for e in 0..k.count(1) {
        let (a, b) = k.edge_endpoints(e);
        writeln!(out, "holonomy {a} {b} {}", u8::from(parities.get(e))).expect("writing to a string");
    }
    out
}
