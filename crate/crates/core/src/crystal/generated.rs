use std::collections::{BTreeMap, VecDeque};

use num_rational::Rational64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::affine::{ratio_str, AffineMap, Sign};
use super::lattice::solve_rational_combination;
use super::torsion::{Constraint, GroupKind, Outcome, PatternEntry, TorsionCertificate, Verdict};
use super::CrystalError;

/// An affine map together with its declared parity.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TaggedMap {
    pub map: AffineMap,
    pub odd: bool,
}

impl TaggedMap {
    pub fn new(map: AffineMap, odd: bool) -> Self {
        Self { map, odd }
    }

    pub fn compose(&self, other: &TaggedMap) -> Result<TaggedMap, CrystalError> {
        Ok(TaggedMap {
            map: self.map.compose(&other.map)?,
            odd: self.odd ^ other.odd,
        })
    }

    fn key(&self) -> (Vec<Sign>, bool) {
        (self.map.signs().to_vec(), self.odd)
    }
}

/// A group generated by diagonal-sign affine maps, each tagged with a parity.
///
/// Used for control inputs with genuine torsion and as an independent route
/// for the deck group itself (via [`GeneratedGroup::deck_group`]).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratedGroup {
    dim: usize,
    generators: Vec<TaggedMap>,
}

/// Coset representatives of the even translation subgroup and generators of
/// that subgroup (Schreier generators).
#[derive(Debug, Clone)]
pub struct GroupStructure {
    pub reps: Vec<TaggedMap>,
    pub translations: Vec<Vec<Rational64>>,
}

impl GeneratedGroup {
    pub fn new(generators: Vec<TaggedMap>) -> Result<Self, CrystalError> {
        let dim = generators
            .first()
            .map(|g| g.map.dim())
            .ok_or_else(|| CrystalError::InvalidInput("a generated group needs a generator".into()))?;
        if let Some(g) = generators.iter().find(|g| g.map.dim() != dim) {
            return Err(CrystalError::DimensionMismatch {
                left: dim,
                right: g.map.dim(),
            });
        }
        Ok(Self { dim, generators })
    }

    /// The deck group presented by the half steps `(1/2)eⱼ`, only the last odd.
    pub fn deck_group(dim: usize) -> Result<Self, CrystalError> {
        if dim == 0 {
            return Err(CrystalError::ZeroDimension);
        }
        let generators = (0..dim)
            .map(|j| {
                let g = super::gamma::GammaElement::half_step(dim, j);
                TaggedMap::new(g.to_affine(), g.is_odd())
            })
            .collect();
        Self::new(generators)
    }

    /// The single generator `u ↦ −u + 1` on the line, tagged odd.
    pub fn reflection_control() -> Self {
        let m = AffineMap::new(vec![Sign::Minus], vec![Rational64::from_integer(1)]).expect("1-dimensional");
        Self::new(vec![TaggedMap::new(m, true)]).expect("one generator")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[TaggedMap] {
        &self.generators
    }

    /// Enumerates the finite quotient by even translations breadth-first and
    /// collects Schreier generators `(g·r)·r'⁻¹` of the translation subgroup.
    pub fn structure(&self) -> Result<GroupStructure, CrystalError> {
        let mut index: BTreeMap<(Vec<Sign>, bool), usize> = BTreeMap::new();
        let mut reps = vec![TaggedMap::new(AffineMap::identity(self.dim), false)];
        index.insert(reps[0].key(), 0);
        let mut queue = VecDeque::from([0usize]);
        let mut translations = Vec::new();
        while let Some(r) = queue.pop_front() {
            for g in &self.generators {
                let product = g.compose(&reps[r])?;
                let slot = match index.get(&product.key()) {
                    Some(&slot) => slot,
                    None => {
                        reps.push(product.clone());
                        index.insert(product.key(), reps.len() - 1);
                        queue.push_back(reps.len() - 1);
                        reps.len() - 1
                    }
                };
                let t = product.map.compose(&reps[slot].map.inverse())?;
                debug_assert!(t.is_translation());
                if !t.is_identity() {
                    translations.push(t.shift().to_vec());
                }
            }
        }
        Ok(GroupStructure { reps, translations })
    }

    /// Looks for `t` in the translation subgroup with `(t ∘ r)² = id`, i.e.
    /// `tᵢ = −vᵢ` on every coordinate where `r` has sign `+1`.
    fn involution_in_coset(
        &self,
        rep: &TaggedMap,
        translations: &[Vec<Rational64>],
    ) -> Result<(Vec<Constraint>, Option<TaggedMap>), CrystalError> {
        let plus: Vec<usize> = (0..self.dim).filter(|&i| rep.map.signs()[i].is_plus()).collect();
        let target: Vec<Rational64> = plus.iter().map(|&i| -rep.map.shift()[i]).collect();
        let constraints = plus
            .iter()
            .zip(&target)
            .map(|(&i, v)| Constraint::LatticeCoordinate {
                coord: i + 1,
                value: ratio_str::format(v),
            })
            .collect();
        let columns: Vec<Vec<Rational64>> = translations
            .iter()
            .map(|t| plus.iter().map(|&i| t[i]).collect())
            .collect();
        let Some(coeffs) = solve_rational_combination(&columns, &target)? else {
            return Ok((constraints, None));
        };
        let mut t = vec![Rational64::zero(); self.dim];
        for (c, col) in coeffs.iter().zip(translations) {
            for (ti, v) in t.iter_mut().zip(col) {
                *ti += *v * Rational64::from_integer(*c);
            }
        }
        let alpha = TaggedMap::new(AffineMap::translation(t).compose(&rep.map)?, rep.odd);
        assert!(
            alpha.map.compose(&alpha.map)?.is_identity(),
            "{} does not square to the identity",
            alpha.map
        );
        Ok((constraints, Some(alpha)))
    }

    /// Decides whether an odd element of order two exists.
    ///
    /// Fails with [`CrystalError::InconsistentParity`] when the declared
    /// parities do not define a homomorphism (the identity would be odd).
    pub fn find_odd_involution(&self) -> Result<Option<TaggedMap>, CrystalError> {
        let GroupStructure { reps, translations } = self.structure()?;
        let mut found = None;
        for rep in reps.iter().filter(|r| r.odd) {
            let (_, alpha) = self.involution_in_coset(rep, &translations)?;
            match alpha {
                Some(a) if a.map.is_identity() => return Err(CrystalError::InconsistentParity),
                Some(a) => {
                    found.get_or_insert(a);
                }
                None => {}
            }
        }
        Ok(found)
    }

    /// One entry per coset of the even translations; an entry with
    /// nontrivial linear part either has no lattice solution or yields an
    /// explicit element of order two.
    pub fn torsion_certificate(&self) -> Result<TorsionCertificate, CrystalError> {
        let GroupStructure { reps, translations } = self.structure()?;
        let mut entries = Vec::with_capacity(reps.len());
        let mut witness = None;
        for rep in &reps {
            let (constraints, alpha) = self.involution_in_coset(rep, &translations)?;
            let outcome = match alpha {
                Some(a) if a.map.is_identity() => {
                    if a.odd {
                        return Err(CrystalError::InconsistentParity);
                    }
                    Outcome::Identity
                }
                Some(a) => {
                    witness.get_or_insert(a.map.clone());
                    Outcome::Counterexample {
                        element: a.map,
                        odd: a.odd,
                    }
                }
                None => Outcome::NoLatticeSolution,
            };
            entries.push(PatternEntry {
                pattern: rep.map.signs().to_vec(),
                parity: Some(u8::from(rep.odd)),
                constraints,
                chain: Vec::new(),
                outcome,
            });
        }
        Ok(TorsionCertificate {
            dim: self.dim,
            group: GroupKind::Generated,
            entries,
            verdict: match witness {
                None => Verdict::TorsionFree,
                Some(witness) => Verdict::Torsion { witness },
            },
        })
    }
}
