//! Exact rational probabilities.
//!
//! Branch weights in this protocol are all dyadic (power-of-two
//! denominators), so the enumeration oracle can stay exact end to end.
//! Arbitrary-precision integers keep closed forms like 1 − (7/8)^m exact
//! for any exponent.

use std::fmt;

use num_bigint::BigUint;
use num_rational::Ratio;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

/// A probability as a reduced fraction.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExactProbability(Ratio<BigUint>);

impl ExactProbability {
    pub fn zero() -> Self {
        Self(Ratio::zero())
    }

    pub fn one() -> Self {
        Self(Ratio::one())
    }

    pub fn new(numerator: u64, denominator: u64) -> Self {
        assert!(denominator > 0, "zero denominator");
        assert!(numerator <= denominator, "probability above 1");
        Self(Ratio::new(
            BigUint::from(numerator),
            BigUint::from(denominator),
        ))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn numerator(&self) -> &BigUint {
        self.0.numer()
    }

    pub fn denominator(&self) -> &BigUint {
        self.0.denom()
    }

    /// True if the reduced denominator is a power of two.
    pub fn is_dyadic(&self) -> bool {
        let d = self.0.denom();
        match d.trailing_zeros() {
            Some(tz) => (d >> tz).is_one(),
            // trailing_zeros is None only for zero, and a reduced
            // denominator is never zero; 1 has tz = 0.
            None => false,
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self(&self.0 * &other.0)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self(&self.0 + &other.0)
    }

    /// 1 − p.
    pub fn complement(&self) -> Self {
        Self(Ratio::one() - &self.0)
    }

    /// |p − q|.
    pub fn abs_diff(&self, other: &Self) -> Self {
        if self.0 >= other.0 {
            Self(&self.0 - &other.0)
        } else {
            Self(&other.0 - &self.0)
        }
    }

    pub fn pow(&self, exponent: u32) -> Self {
        Self(self.0.pow(exponent as i32))
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().expect("ratio fits f64")
    }
}

impl fmt::Display for ExactProbability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl Serialize for ExactProbability {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduces_and_displays() {
        let p = ExactProbability::new(2, 8);
        assert_eq!(p.to_string(), "1/4");
        assert_eq!(p, ExactProbability::new(1, 4));
    }

    #[test]
    fn dyadic_detection() {
        assert!(ExactProbability::new(3, 8).is_dyadic());
        assert!(ExactProbability::new(1, 1).is_dyadic());
        assert!(ExactProbability::zero().is_dyadic());
        assert!(!ExactProbability::new(1, 3).is_dyadic());
        assert!(!ExactProbability::new(1, 63).is_dyadic());
    }

    #[test]
    fn arithmetic() {
        let half = ExactProbability::new(1, 2);
        let quarter = half.mul(&half);
        assert_eq!(quarter, ExactProbability::new(1, 4));
        assert_eq!(quarter.complement(), ExactProbability::new(3, 4));
        assert_eq!(half.add(&quarter), ExactProbability::new(3, 4));
        assert_eq!(quarter.pow(2), ExactProbability::new(1, 16));
        assert_eq!(
            ExactProbability::new(3, 4).pow(16).to_f64(),
            (3.0f64 / 4.0).powi(16)
        );
    }

    #[test]
    fn serializes_as_fraction_string() {
        let json = serde_json::to_string(&ExactProbability::new(1, 8)).unwrap();
        assert_eq!(json, "\"1/8\"");
    }
}
