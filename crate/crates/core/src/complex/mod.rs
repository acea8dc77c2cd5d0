//! Finite Δ-complex models of `Rⁿ/Γ`: a triangulated torus, the point-group
//! action on it, and the quotient with holonomy labels on edges.

mod delta;
mod equivariant;
mod export;
mod quotient;
mod space;

use thiserror::Error;

use crate::crystal::CrystalError;
use crate::gf2::Gf2Error;

pub use delta::DeltaComplex;
pub use equivariant::{EquivariantComplex, GroupActionOnComplex, Regularity};
pub use export::{export_text, ComplexSummary};
pub use quotient::{
    boundary_matrices, build_quotient_model, build_quotient_model_with, holonomy_cocycle, BuildOptions, EdgeHolonomy,
    LiftRule, QuotientModel,
};
pub use space::{FlatSpace, Resolution};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ComplexError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("resolution {resolution} is incompatible with the group: {reason}")]
    IncompatibleResolution { resolution: Resolution, reason: String },
    #[error("the point group does not map the triangulation to itself")]
    NotInvariant,
    #[error(
        "point-group action not regular after {cap} subdivisions \
         ({} fixed vertices, {} fixed simplices, {} edges inside an orbit)",
        .regularity.fixed_vertices, .regularity.fixed_simplices, .regularity.adjacent_orbit_mates
    )]
    RegularityNotAchieved { cap: usize, regularity: Regularity },
    #[error("integrity failure: {0}")]
    Integrity(String),
    #[error(transparent)]
    Crystal(#[from] CrystalError),
    #[error(transparent)]
    Gf2(#[from] Gf2Error),
}
