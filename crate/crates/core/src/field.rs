//! Coefficient fields for exact linear algebra.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

/// Exact rational numbers.
pub type Rational = BigRational;

pub trait Field: Clone + PartialEq + Debug + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Multiplicative inverse. Panics on zero.
    fn inv(&self) -> Self;
    fn to_f64(&self) -> f64;
}

impl Field for Rational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Self {
        assert!(!Zero::is_zero(self), "inverse of zero");
        self.recip()
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

/// The two-element field.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default, Hash)]
pub struct F2(pub bool);

impl Field for F2 {
    fn zero() -> Self {
        F2(false)
    }
    fn one() -> Self {
        F2(true)
    }
    fn from_i64(v: i64) -> Self {
        F2(v.rem_euclid(2) == 1)
    }
    fn is_zero(&self) -> bool {
        !self.0
    }
    fn add(&self, other: &Self) -> Self {
        F2(self.0 ^ other.0)
    }
    fn sub(&self, other: &Self) -> Self {
        F2(self.0 ^ other.0)
    }
    fn mul(&self, other: &Self) -> Self {
        F2(self.0 & other.0)
    }
    fn neg(&self) -> Self {
        *self
    }
    fn inv(&self) -> Self {
        assert!(self.0, "inverse of zero");
        *self
    }
    fn to_f64(&self) -> f64 {
        if self.0 {
            1.0
        } else {
            0.0
        }
    }
}

/// Runtime choice of coefficient field.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum Coefficients {
    #[default]
    Rational,
    /// Faster, but torsion can change ranks.
    F2,
}

impl std::str::FromStr for Coefficients {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "q" | "Q" | "rational" => Ok(Self::Rational),
            "f2" | "F2" | "z2" => Ok(Self::F2),
            other => Err(format!("unknown coefficient field {other:?} (expected q or f2)")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_arithmetic() {
        let a = Rational::from_i64(3);
        let b = Rational::from_i64(-4);
        assert_eq!(Field::to_f64(&a.mul(&b.inv())), -0.75);
        assert_eq!(a.add(&b), Rational::from_i64(-1));
        assert_eq!(Field::to_f64(&Rational::new(BigInt::from(-7), BigInt::from(2))), -3.5);
    }

    #[test]
    fn f2_arithmetic() {
        assert_eq!(F2::from_i64(-1), F2::one());
        assert_eq!(F2::one().add(&F2::one()), F2::zero());
        assert!(F2::from_i64(2).is_zero());
    }
}
