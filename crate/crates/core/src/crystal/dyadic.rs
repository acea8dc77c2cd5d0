use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

/// A half-integer `c`, stored as the integer `2c`.
///
/// Every translation part of the deck group lives in `(1/2)Z`, so integrality
/// and parity questions reduce to bit tests on `twice_value`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Dyadic {
    twice_value: i64,
}

impl Dyadic {
    pub const ZERO: Dyadic = Dyadic { twice_value: 0 };
    pub const HALF: Dyadic = Dyadic { twice_value: 1 };

    pub const fn from_twice(twice_value: i64) -> Self {
        Self { twice_value }
    }

    pub const fn from_int(value: i64) -> Self {
        Self { twice_value: 2 * value }
    }

    /// Converts an exact rational, returning `None` unless it lies in `(1/2)Z`.
    pub fn from_rational(value: Rational64) -> Option<Self> {
        let twice = value * 2;
        twice.is_integer().then(|| Self::from_twice(twice.to_integer()))
    }

    pub const fn twice_value(self) -> i64 {
        self.twice_value
    }

    pub const fn is_integral(self) -> bool {
        self.twice_value % 2 == 0
    }

    pub const fn is_zero(self) -> bool {
        self.twice_value == 0
    }

    pub fn to_rational(self) -> Rational64 {
        Rational64::new(self.twice_value, 2)
    }
}

impl Add for Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: Dyadic) -> Dyadic {
        Dyadic::from_twice(self.twice_value + rhs.twice_value)
    }
}

impl Sub for Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: Dyadic) -> Dyadic {
        Dyadic::from_twice(self.twice_value - rhs.twice_value)
    }
}

impl Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic::from_twice(-self.twice_value)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integral() {
            write!(f, "{}", self.twice_value / 2)
        } else {
            write!(f, "{}/2", self.twice_value)
        }
    }
}
