//! The deck group of the twisted flat manifolds, as exact affine maps of `Rⁿ`.
//!
//! Conventions: groups act on the left and `(g⋆h)(u) = g(h(u))`. A right
//! action `x·g` corresponds to the left action of `g⁻¹`; parity, element
//! order and fixed points are unchanged by that translation.

mod affine;
mod dyadic;
mod gamma;
mod generated;
pub mod lattice;
mod torsion;

use thiserror::Error;

pub use affine::{AffineMap, ElementOrder, FixedCoord, FixedSet, Sign};
pub use dyadic::Dyadic;
pub use gamma::{coindex_one_witness, lattice_and_point_group, GammaElement, LatticeAndPointGroup};
pub use generated::{GeneratedGroup, GroupStructure, TaggedMap};
pub use torsion::{
    admissible_patterns, find_odd_involution, torsion_free_certificate, ChainStep, Constraint, GroupKind, Outcome,
    PatternEntry, Rule, TorsionCertificate, Verdict,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CrystalError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("dimension must be positive")]
    ZeroDimension,
    #[error("not an element of the deck group: {0}")]
    NotInGroup(String),
    #[error("declared parities do not define a homomorphism")]
    InconsistentParity,
    #[error("integer overflow in lattice arithmetic")]
    Overflow,
    #[error("certificate replay failed: {0}")]
    CertificateReplay(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}
