//! Exact computations on the free `Z₂`-manifolds `Xₙ` built by iterated twisted
//! products with the reflected circle: the deck group of `X̄ₙ` as affine maps
//! of `Rⁿ`, finite Δ-complex models of `X̄ₙ`, and their mod-2 cohomology.

pub mod cohomology;
pub mod complex;
pub mod crystal;
pub mod gf2;
