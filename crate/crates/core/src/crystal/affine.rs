use std::fmt;
use std::ops::Mul;

use num_rational::Rational64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::CrystalError;

/// A diagonal entry of a sign matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "i8", try_from = "i8")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn apply(self, x: Rational64) -> Rational64 {
        match self {
            Sign::Plus => x,
            Sign::Minus => -x,
        }
    }

    pub fn apply_int(self, x: i64) -> i64 {
        match self {
            Sign::Plus => x,
            Sign::Minus => -x,
        }
    }

    pub fn is_plus(self) -> bool {
        self == Sign::Plus
    }
}

impl Mul for Sign {
    type Output = Sign;
    fn mul(self, rhs: Sign) -> Sign {
        if self == rhs {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

impl From<Sign> for i8 {
    fn from(s: Sign) -> i8 {
        match s {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

impl TryFrom<i8> for Sign {
    type Error = String;
    fn try_from(v: i8) -> Result<Self, String> {
        match v {
            1 => Ok(Sign::Plus),
            -1 => Ok(Sign::Minus),
            other => Err(format!("sign must be 1 or -1, got {other}")),
        }
    }
}

/// Order of a group element. Diagonal-sign affine maps square to
/// translations, so no finite order above two can occur.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ElementOrder {
    One,
    Two,
    Infinite,
}

/// Serde adapter writing rationals as `"p/q"` strings.
pub(crate) mod ratio_str {
    use num_rational::Rational64;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn format(r: &Rational64) -> String {
        if r.is_integer() {
            r.numer().to_string()
        } else {
            format!("{}/{}", r.numer(), r.denom())
        }
    }

    pub fn parse(s: &str) -> Result<Rational64, String> {
        let parse_int = |t: &str| t.trim().parse::<i64>().map_err(|e| format!("{s:?}: {e}"));
        match s.split_once('/') {
            None => Ok(Rational64::from_integer(parse_int(s)?)),
            Some((n, d)) => {
                let d = parse_int(d)?;
                if d == 0 {
                    return Err(format!("{s:?}: zero denominator"));
                }
                Ok(Rational64::new(parse_int(n)?, d))
            }
        }
    }

    pub fn serialize<S: Serializer>(v: &[Rational64], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(format))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational64>, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        raw.iter().map(|s| parse(s).map_err(D::Error::custom)).collect()
    }
}

/// The affine map `u ↦ D u + v` with `D` a diagonal sign matrix and `v`
/// an exact rational vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AffineMap {
    signs: Vec<Sign>,
    #[serde(with = "ratio_str")]
    shift: Vec<Rational64>,
}

impl AffineMap {
    pub fn new(signs: Vec<Sign>, shift: Vec<Rational64>) -> Result<Self, CrystalError> {
        if signs.len() != shift.len() {
            return Err(CrystalError::DimensionMismatch {
                left: signs.len(),
                right: shift.len(),
            });
        }
        if signs.is_empty() {
            return Err(CrystalError::ZeroDimension);
        }
        Ok(Self { signs, shift })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            signs: vec![Sign::Plus; dim],
            shift: vec![Rational64::zero(); dim],
        }
    }

    pub fn translation(shift: Vec<Rational64>) -> Self {
        Self {
            signs: vec![Sign::Plus; shift.len()],
            shift,
        }
    }

    pub fn dim(&self) -> usize {
        self.signs.len()
    }

    pub fn signs(&self) -> &[Sign] {
        &self.signs
    }

    pub fn shift(&self) -> &[Rational64] {
        &self.shift
    }

    pub fn is_identity(&self) -> bool {
        self.is_translation() && self.shift.iter().all(Zero::is_zero)
    }

    pub fn is_translation(&self) -> bool {
        self.signs.iter().all(|s| s.is_plus())
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

    pub fn apply(&self, x: &[Rational64]) -> Result<Vec<Rational64>, CrystalError> {
        self.check_dim(x.len())?;
        Ok(self
            .signs
            .iter()
            .zip(&self.shift)
            .zip(x)
            .map(|((s, v), xi)| s.apply(*xi) + v)
            .collect())
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &AffineMap) -> Result<AffineMap, CrystalError> {
        self.check_dim(other.dim())?;
        let signs = self.signs.iter().zip(&other.signs).map(|(a, b)| *a * *b).collect();
        let shift = self
            .signs
            .iter()
            .zip(&other.shift)
            .zip(&self.shift)
            .map(|((s, w), v)| s.apply(*w) + v)
            .collect();
        Ok(AffineMap { signs, shift })
    }

    pub fn inverse(&self) -> AffineMap {
        // D^{-1} = D, so u = D(x - v) = Dx - Dv.
        AffineMap {
            signs: self.signs.clone(),
            shift: self.signs.iter().zip(&self.shift).map(|(s, v)| -s.apply(*v)).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> AffineMap {
        let mut acc = AffineMap::identity(self.dim());
        for _ in 0..k {
            acc = self.compose(&acc).expect("same dimension");
        }
        acc
    }

    /// Order by iterated powers, capped at `2·dim`. The linear part is a
    /// diagonal ±1 matrix and has order dividing 2, so `m²` is a translation:
    /// either it vanishes or every further power is a nonzero translation or
    /// has a nontrivial linear part.
    pub fn order(&self) -> ElementOrder {
        let cap = (2 * self.dim()).max(2) as u32;
        let mut power = self.clone();
        for k in 1..=cap {
            if power.is_identity() {
                return match k {
                    1 => ElementOrder::One,
                    2 => ElementOrder::Two,
                    _ => unreachable!("diagonal-sign affine map of order {k}"),
                };
            }
            power = self.compose(&power).expect("same dimension");
        }
        ElementOrder::Infinite
    }

    /// Solves `D y + v = y` coordinatewise.
    pub fn fixed_points(&self) -> FixedSet {
        let mut coords = Vec::with_capacity(self.dim());
        for (s, v) in self.signs.iter().zip(&self.shift) {
            match s {
                Sign::Plus if v.is_zero() => coords.push(FixedCoord::Free),
                Sign::Plus => return FixedSet::Empty,
                Sign::Minus => coords.push(FixedCoord::Pinned(*v / 2)),
            }
        }
        FixedSet::Subspace(coords)
    }

    /// `y = (1/k) Σ_{i=1..k} mⁱ(x)`. When `mᵏ = id` the result is fixed by `m`.
    pub fn average_orbit(&self, x: &[Rational64], k: u32) -> Result<Vec<Rational64>, CrystalError> {
        self.check_dim(x.len())?;
        if k == 0 {
            return Err(CrystalError::InvalidInput("orbit length must be positive".into()));
        }
        let mut sum = vec![Rational64::zero(); x.len()];
        let mut point = x.to_vec();
        for _ in 0..k {
            point = self.apply(&point)?;
            for (acc, p) in sum.iter_mut().zip(&point) {
                *acc += p;
            }
        }
        let scale = Rational64::new(1, i64::from(k));
        let y: Vec<Rational64> = sum.into_iter().map(|s| s * scale).collect();
        debug_assert!(
            !self.pow(k).is_identity() || self.apply(&y).as_deref() == Ok(&y[..]),
            "averaged orbit point is not fixed"
        );
        Ok(y)
    }
}

impl fmt::Display for AffineMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "u ↦ (")?;
        for (i, (s, v)) in self.signs.iter().zip(&self.shift).enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            let sign = if s.is_plus() { "" } else { "-" };
            if v.is_zero() {
                write!(f, "{sign}u{}", i + 1)?;
            } else {
                write!(f, "{sign}u{} + {}", i + 1, ratio_str::format(v))?;
            }
        }
        write!(f, ")")
    }
}

/// One coordinate of an affine fixed subspace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FixedCoord {
    Free,
    Pinned(Rational64),
}

/// Fixed-point set of a diagonal-sign affine map: empty, or a coordinate
/// subspace with some coordinates pinned.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FixedSet {
    Empty,
    Subspace(Vec<FixedCoord>),
}

impl FixedSet {
    pub fn is_empty(&self) -> bool {
        matches!(self, FixedSet::Empty)
    }

    pub fn free_dim(&self) -> usize {
        match self {
            FixedSet::Empty => 0,
            FixedSet::Subspace(c) => c.iter().filter(|c| **c == FixedCoord::Free).count(),
        }
    }

    /// Realizes a point of the subspace, filling free coordinates in order
    /// from `free_values`.
    pub fn point(&self, free_values: &[Rational64]) -> Option<Vec<Rational64>> {
        let FixedSet::Subspace(coords) = self else {
            return None;
        };
        let mut free = free_values.iter();
        coords
            .iter()
            .map(|c| match c {
                FixedCoord::Free => free.next().copied(),
                FixedCoord::Pinned(v) => Some(*v),
            })
            .collect()
    }

    pub fn contains(&self, x: &[Rational64]) -> bool {
        match self {
            FixedSet::Empty => false,
            FixedSet::Subspace(coords) => {
                coords.len() == x.len()
                    && coords.iter().zip(x).all(|(c, xi)| match c {
                        FixedCoord::Free => true,
                        FixedCoord::Pinned(v) => v == xi,
                    })
            }
        }
    }
}
