use std::fmt;
use std::str::FromStr;

use num_rational::Rational64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::crystal::{lattice_and_point_group, AffineMap, GammaElement, Sign, TaggedMap};

use super::ComplexError;

/// Grid spacing `2^{−k}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct Resolution {
    log2_denominator: u32,
}

impl Resolution {
    pub const QUARTER: Resolution = Resolution { log2_denominator: 2 };
    pub const EIGHTH: Resolution = Resolution { log2_denominator: 3 };

    pub fn from_denominator(denominator: u64) -> Result<Self, ComplexError> {
        if !denominator.is_power_of_two() || denominator > 1 << 20 {
            return Err(ComplexError::InvalidInput(format!(
                "resolution 1/{denominator} is not a supported power of two"
            )));
        }
        Ok(Self {
            log2_denominator: denominator.trailing_zeros(),
        })
    }

    pub fn denominator(self) -> i64 {
        1 << self.log2_denominator
    }

    pub fn finer(self) -> Self {
        Self {
            log2_denominator: self.log2_denominator + 1,
        }
    }
}

impl Default for Resolution {
    fn default() -> Self {
        Self::QUARTER
    }
}

impl fmt::Display for Resolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "1/{}", self.denominator())
    }
}

impl FromStr for Resolution {
    type Err = ComplexError;

    /// Accepts `1/8`, `8` or `0.125`.
    fn from_str(s: &str) -> Result<Self, ComplexError> {
        let s = s.trim();
        let bad = || ComplexError::InvalidInput(format!("cannot parse resolution {s:?}"));
        let denominator = if let Some(rest) = s.strip_prefix("1/") {
            rest.parse::<u64>().map_err(|_| bad())?
        } else if let Ok(d) = s.parse::<u64>() {
            d
        } else {
            let x: f64 = s.parse().map_err(|_| bad())?;
            if !(x > 0.0 && x <= 1.0) {
                return Err(bad());
            }
            let d = (1.0 / x).round();
            if (1.0 / d - x).abs() > 1e-12 {
                return Err(bad());
            }
            d as u64
        };
        Self::from_denominator(denominator)
    }
}

impl From<Resolution> for String {
    fn from(r: Resolution) -> String {
        r.to_string()
    }
}

impl TryFrom<String> for Resolution {
    type Error = ComplexError;
    fn try_from(s: String) -> Result<Self, ComplexError> {
        s.parse()
    }
}

/// A flat manifold `Rⁿ/Γ` with `Γ` an extension of a diagonal lattice by a
/// finite group of diagonal-sign maps, together with a parity `Γ → Z₂`.
///
/// The parity of `t ∘ r` (lattice step `t = Σ mᵢ·periodᵢ·eᵢ`, coset
/// representative `r`) is `parity(r) + Σ mᵢ·period_parityᵢ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlatSpace {
    dim: usize,
    periods: Vec<Rational64>,
    period_parity: Vec<bool>,
    reps: Vec<TaggedMap>,
    deck_normal_form: bool,
}

impl FlatSpace {
    pub fn new(periods: Vec<Rational64>, period_parity: Vec<bool>, reps: Vec<TaggedMap>) -> Result<Self, ComplexError> {
        let dim = periods.len();
        if dim == 0 {
            return Err(ComplexError::InvalidInput("dimension must be positive".into()));
        }
        if period_parity.len() != dim {
            return Err(ComplexError::InvalidInput("one parity per period is required".into()));
        }
        if periods.iter().any(|p| *p <= Rational64::zero()) {
            return Err(ComplexError::InvalidInput("periods must be positive".into()));
        }
        if reps.first().map(|r| r.map.is_identity() && !r.odd) != Some(true) {
            return Err(ComplexError::InvalidInput(
                "the first coset representative must be the identity".into(),
            ));
        }
        for (i, r) in reps.iter().enumerate() {
            if r.map.dim() != dim {
                return Err(ComplexError::InvalidInput(format!(
                    "representative {i} has the wrong dimension"
                )));
            }
            if reps[..i].iter().any(|q| q.map.signs() == r.map.signs()) {
                return Err(ComplexError::InvalidInput(format!(
                    "representatives {i} repeats a linear part; the holonomy must be faithful"
                )));
            }
        }
        Ok(Self {
            dim,
            periods,
            period_parity,
            reps,
            deck_normal_form: false,
        })
    }

    /// The deck group of `X̄ₙ`: lattice `Zⁿ⁻¹ × (1/2)Z` with the odd step
    /// `eₙ/2`, point group `(Z₂)^{n−1}`.
    pub fn deck(dim: usize) -> Result<Self, ComplexError> {
        let lp = lattice_and_point_group(dim)?;
        let periods = lp
            .lattice_basis
            .iter()
            .enumerate()
            .map(|(i, b)| b.translation()[i].to_rational())
            .collect();
        let period_parity = lp.lattice_basis.iter().map(GammaElement::is_odd).collect();
        let reps = lp
            .coset_reps
            .iter()
            .map(|g| TaggedMap::new(g.to_affine(), g.is_odd()))
            .collect();
        let mut space = Self::new(periods, period_parity, reps)?;
        space.deck_normal_form = true;
        Ok(space)
    }

    /// The flat torus `Rⁿ/Zⁿ` with trivial point group and trivial parity.
    pub fn torus(dim: usize) -> Result<Self, ComplexError> {
        Self::new(
            vec![Rational64::from_integer(1); dim],
            vec![false; dim],
            vec![TaggedMap::new(AffineMap::identity(dim.max(1)), false)],
        )
    }

    /// `R/Z` modulo `u ↦ −u`. The action has fixed points, so no subdivision
    /// makes it free; used to exercise the failure path.
    pub fn reflected_circle() -> Self {
        let reflection = AffineMap::new(vec![Sign::Minus], vec![Rational64::zero()]).expect("1-dimensional");
        Self::new(
            vec![Rational64::from_integer(1)],
            vec![false],
            vec![
                TaggedMap::new(AffineMap::identity(1), false),
                TaggedMap::new(reflection, false),
            ],
        )
        .expect("valid control space")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn periods(&self) -> &[Rational64] {
        &self.periods
    }

    pub fn reps(&self) -> &[TaggedMap] {
        &self.reps
    }

    pub fn point_group_order(&self) -> usize {
        self.reps.len()
    }

    /// Whether elements can be read back as deck-group normal forms.
    pub fn is_deck_group(&self) -> bool {
        self.deck_normal_form
    }

    fn ticks(value: Rational64, scale: i64) -> Option<i64> {
        let t = value * scale;
        t.is_integer().then(|| t.to_integer())
    }

    /// Lattice periods in ticks of length `1/scale`.
    pub fn period_ticks(&self, scale: i64) -> Option<Vec<i64>> {
        self.periods.iter().map(|p| Self::ticks(*p, scale)).collect()
    }

    /// A representative acting on tick coordinates: `(signs, shift in ticks)`.
    pub fn rep_ticks(&self, rep: usize, scale: i64) -> Option<(Vec<Sign>, Vec<i64>)> {
        let r = &self.reps[rep].map;
        let shift = r
            .shift()
            .iter()
            .map(|v| Self::ticks(*v, scale))
            .collect::<Option<Vec<_>>>()?;
        Some((r.signs().to_vec(), shift))
    }

    pub fn apply_rep_ticks(&self, rep: usize, scale: i64, x: &[i64]) -> Vec<i64> {
        let (signs, shift) = self
            .rep_ticks(rep, scale)
            .expect("grid compatible with the point group");
        signs
            .iter()
            .zip(&shift)
            .zip(x)
            .map(|((s, v), xi)| s.apply_int(*xi) + v)
            .collect()
    }

    /// The unique group element `γ` with `γ(from) = to`, positions in ticks.
    /// Returns `None` when the points lie in different orbits.
    pub fn locate(&self, from: &[i64], to: &[i64], scale: i64) -> Option<TaggedMap> {
        let periods = self.period_ticks(scale)?;
        for (r, rep) in self.reps.iter().enumerate() {
            let image = self.apply_rep_ticks(r, scale, from);
            let mut steps = Vec::with_capacity(self.dim);
            for ((t, x), p) in to.iter().zip(&image).zip(&periods) {
                let diff = t - x;
                if diff % p != 0 {
                    break;
                }
                steps.push(diff / p);
            }
            if steps.len() != self.dim {
                continue;
            }
            let shift: Vec<Rational64> = steps
                .iter()
                .zip(&self.periods)
                .map(|(m, p)| *p * Rational64::from_integer(*m))
                .collect();
            let odd = steps
                .iter()
                .zip(&self.period_parity)
                .fold(rep.odd, |acc, (m, par)| acc ^ (*par && m.rem_euclid(2) == 1));
            let map = AffineMap::translation(shift).compose(&rep.map).expect("same dimension");
            return Some(TaggedMap::new(map, odd));
        }
        None
    }

    /// Parity of an element, recomputed from its linear part and lattice offset.
    pub fn parity_of(&self, element: &AffineMap) -> Option<bool> {
        let rep = self.reps.iter().find(|r| r.map.signs() == element.signs())?;
        let mut odd = rep.odd;
        for i in 0..self.dim {
            let steps = (element.shift()[i] - rep.map.shift()[i]) / self.periods[i];
            if !steps.is_integer() {
                return None;
            }
            if self.period_parity[i] {
                odd ^= steps.to_integer().rem_euclid(2) == 1;
            }
        }
        Some(odd)
    }
}
