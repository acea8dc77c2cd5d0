use std::fmt;

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use super::affine::{AffineMap, ElementOrder, Sign};
use super::dyadic::Dyadic;
use super::CrystalError;

/// A deck transformation of `Rⁿ` for the twisted flat manifold of dimension `n`,
/// in half-integer normal form.
///
/// The element is determined by its translation parts `c ∈ ((1/2)Z)ⁿ`; the
/// linear part is derived: `s₁ = +1`, and for `i ≥ 2`, `sᵢ = +1` iff `c_{i−1}`
/// is an integer. It acts by `uᵢ ↦ sᵢ·uᵢ + cᵢ`. Each extra circle factor is
/// reflected exactly when the loop in the previous factor is odd, which is
/// how the twisted product with the reflected circle unwinds.
///
/// Composition uses the left convention `(g⋆h)(u) = g(h(u))`.
///
/// JSON form: the array of twice-values, so `(1/2, 0)` is `[1, 0]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "Vec<i64>", try_from = "Vec<i64>")]
pub struct GammaElement {
    c: Vec<Dyadic>,
}

impl GammaElement {
    pub fn new(c: Vec<Dyadic>) -> Result<Self, CrystalError> {
        if c.is_empty() {
            return Err(CrystalError::ZeroDimension);
        }
        Ok(Self { c })
    }

    pub fn from_twice(twice: &[i64]) -> Result<Self, CrystalError> {
        Self::new(twice.iter().copied().map(Dyadic::from_twice).collect())
    }

    pub fn identity(dim: usize) -> Self {
        assert!(dim > 0, "dimension must be positive");
        Self {
            c: vec![Dyadic::ZERO; dim],
        }
    }

    /// The element with translation `1/2` in coordinate `slot` (0-based) and zero elsewhere.
    pub fn half_step(dim: usize, slot: usize) -> Self {
        let mut g = Self::identity(dim);
        g.c[slot] = Dyadic::HALF;
        g
    }

    /// Reads an affine map back into normal form, rejecting maps outside the group.
    pub fn from_affine(m: &AffineMap) -> Result<Self, CrystalError> {
        let c = m
            .shift()
            .iter()
            .map(|v| Dyadic::from_rational(*v))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| CrystalError::NotInGroup(format!("translation of {m} is not half-integral")))?;
        let g = Self::new(c)?;
        if g.signs() != m.signs() {
            return Err(CrystalError::NotInGroup(format!(
                "linear part of {m} violates the sign rule"
            )));
        }
        Ok(g)
    }

    pub fn dim(&self) -> usize {
        self.c.len()
    }

    pub fn translation(&self) -> &[Dyadic] {
        &self.c
    }

    pub fn twice_values(&self) -> Vec<i64> {
        self.c.iter().map(|d| d.twice_value()).collect()
    }

    pub fn sign(&self, i: usize) -> Sign {
        if i == 0 || self.c[i - 1].is_integral() {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    pub fn signs(&self) -> Vec<Sign> {
        (0..self.dim()).map(|i| self.sign(i)).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.c.iter().all(|d| d.is_zero())
    }

    pub fn is_translation(&self) -> bool {
        self.c[..self.dim() - 1].iter().all(|d| d.is_integral())
    }

    /// Image in `Z₂` of the parity homomorphism: 1 iff `cₙ` is not an integer.
    pub fn parity(&self) -> u8 {
        u8::from(!self.c[self.dim() - 1].is_integral())
    }

    pub fn is_odd(&self) -> bool {
        self.parity() == 1
    }

    fn check_dim(&self, other: usize) -> Result<(), CrystalError> {
        if self.dim() == other {
            Ok(())
        } else {
            Err(CrystalError::DimensionMismatch {
                left: self.dim(),
                right: other,
            })
        }
    }

    /// `(self ⋆ other)(u) = self(other(u))`, so `cᵢ = sᵢ(self)·cᵢ(other) + cᵢ(self)`.
    pub fn compose(&self, other: &GammaElement) -> Result<GammaElement, CrystalError> {
        self.check_dim(other.dim())?;
        let c = (0..self.dim())
            .map(|i| match self.sign(i) {
                Sign::Plus => other.c[i] + self.c[i],
                Sign::Minus => self.c[i] - other.c[i],
            })
            .collect();
        let out = GammaElement { c };
        debug_assert_eq!(
            out.signs(),
            self.signs()
                .iter()
                .zip(other.signs())
                .map(|(a, b)| *a * b)
                .collect::<Vec<_>>(),
            "sign rule not closed under composition"
        );
        Ok(out)
    }

    pub fn inverse(&self) -> GammaElement {
        let c = (0..self.dim())
            .map(|i| match self.sign(i) {
                Sign::Plus => -self.c[i],
                Sign::Minus => self.c[i],
            })
            .collect();
        GammaElement { c }
    }

    pub fn act(&self, x: &[Rational64]) -> Result<Vec<Rational64>, CrystalError> {
        self.check_dim(x.len())?;
        Ok(x.iter()
            .enumerate()
            .map(|(i, xi)| self.sign(i).apply(*xi) + self.c[i].to_rational())
            .collect())
    }

    pub fn to_affine(&self) -> AffineMap {
        AffineMap::new(self.signs(), self.c.iter().map(|d| d.to_rational()).collect())
            .expect("normal form is well-formed")
    }

    /// Squares are pure translations (`cᵢ` doubles where `sᵢ = +1` and cancels
    /// where `sᵢ = −1`), so the order is 1, 2, or infinite, decided by one
    /// squaring.
    pub fn element_order(&self) -> ElementOrder {
        if self.is_identity() {
            return ElementOrder::One;
        }
        let square = self.compose(self).expect("same dimension");
        assert!(square.is_translation(), "square of {self} is not a translation");
        if square.is_identity() {
            ElementOrder::Two
        } else {
            ElementOrder::Infinite
        }
    }
}

impl From<GammaElement> for Vec<i64> {
    fn from(g: GammaElement) -> Vec<i64> {
        g.twice_values()
    }
}

impl TryFrom<Vec<i64>> for GammaElement {
    type Error = CrystalError;
    fn try_from(twice: Vec<i64>) -> Result<Self, CrystalError> {
        GammaElement::from_twice(&twice)
    }
}

impl fmt::Display for GammaElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, d) in self.c.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{d}")?;
        }
        write!(f, ")")
    }
}

/// Canonical odd element `(0, …, 0, 1/2)`. Its lift from a base point ends at
/// the antipodal partner, giving an equivariant map from the antipodal circle.
pub fn coindex_one_witness(dim: usize) -> Result<GammaElement, CrystalError> {
    if dim == 0 {
        return Err(CrystalError::ZeroDimension);
    }
    let w = GammaElement::half_step(dim, dim - 1);
    debug_assert!(w.is_odd());
    Ok(w)
}

/// Translation lattice and point group of the deck group.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeAndPointGroup {
    pub dim: usize,
    /// `e₁, …, e_{n−1}, eₙ/2`.
    pub lattice_basis: Vec<GammaElement>,
    /// One representative per coset of the lattice: translation `1/2` on any
    /// subset of the first `n−1` slots, identity first.
    pub coset_reps: Vec<GammaElement>,
    /// `cⱼ = 1/2` in slot `j ≤ n−1`; these generate the point group `(Z₂)^{n−1}`.
    pub point_group_generators: Vec<GammaElement>,
}

impl LatticeAndPointGroup {
    pub fn point_group_order(&self) -> usize {
        self.coset_reps.len()
    }
}

pub fn lattice_and_point_group(dim: usize) -> Result<LatticeAndPointGroup, CrystalError> {
    if dim == 0 {
        return Err(CrystalError::ZeroDimension);
    }
    let lattice_basis = (0..dim)
        .map(|i| {
            let mut twice = vec![0; dim];
            twice[i] = if i + 1 == dim { 1 } else { 2 };
            GammaElement::from_twice(&twice).expect("positive dimension")
        })
        .collect();
    let free = dim - 1;
    let coset_reps = (0u64..1 << free)
        .map(|mask| {
            let twice: Vec<i64> = (0..dim).map(|i| i64::from(i < free && mask >> i & 1 == 1)).collect();
            GammaElement::from_twice(&twice).expect("positive dimension")
        })
        .collect();
    let point_group_generators = (0..free).map(|j| GammaElement::half_step(dim, j)).collect();
    Ok(LatticeAndPointGroup {
        dim,
        lattice_basis,
        coset_reps,
        point_group_generators,
    })
}
