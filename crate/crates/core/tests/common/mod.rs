#![allow(dead_code)]

use std::sync::OnceLock;

use nontidy::complex::{build_quotient_model, QuotientModel, Resolution};

/// Deck-group models at resolution 1/4, built once per test binary.
pub fn model(dim: usize) -> &'static QuotientModel {
    static MODELS: [OnceLock<QuotientModel>; 3] = [OnceLock::new(), OnceLock::new(), OnceLock::new()];
    MODELS[dim - 1].get_or_init(|| build_quotient_model(dim, Resolution::QUARTER).expect("model builds"))
}

/// Deck-group models at resolution 1/8.
pub fn fine_model(dim: usize) -> &'static QuotientModel {
    static MODELS: [OnceLock<QuotientModel>; 3] = [OnceLock::new(), OnceLock::new(), OnceLock::new()];
    MODELS[dim - 1].get_or_init(|| build_quotient_model(dim, Resolution::EIGHTH).expect("model builds"))
}
