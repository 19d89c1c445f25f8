//! Exact rational probabilities.
//!
//! Every probability in the engine is a reduced big-integer rational in
//! `[0, 1]`. There is no floating point anywhere on a computation path;
//! `to_f64` exists for display only. This is what makes the equivalence
//! theorems testable with zero tolerance: two semantics either agree
//! bit-for-bit or they do not.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// An exact probability: a rational number in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExactProb(BigRational);

impl ExactProb {
    pub fn zero() -> Self {
        ExactProb(BigRational::zero())
    }

    pub fn one() -> Self {
        ExactProb(BigRational::one())
    }

    /// Builds `numer/denom`, rejecting values outside `[0, 1]`.
    pub fn new(numer: i64, denom: i64) -> Result<Self> {
        if denom == 0 {
            return Err(Error::InvalidProbability("zero denominator".into()));
        }
        Self::from_ratio(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    pub fn from_ratio(r: BigRational) -> Result<Self> {
        if r.is_negative() || r > BigRational::one() {
            return Err(Error::InvalidProbability(format!(
                "{} is outside [0, 1]",
                r
            )));
        }
        Ok(ExactProb(r))
    }

    /// The underlying rational, unconstrained.
    pub fn ratio(&self) -> &BigRational {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    /// Whether the value is 0 or 1.
    pub fn is_extremal(&self) -> bool {
        self.is_zero() || self.is_one()
    }

    pub fn complement(&self) -> ExactProb {
        ExactProb(BigRational::one() - &self.0)
    }

    /// Exact division; `None` when the divisor is zero.
    pub fn checked_div(&self, rhs: &ExactProb) -> Option<ExactProb> {
        if rhs.is_zero() {
            None
        } else {
            Some(ExactProb(&self.0 / &rhs.0))
        }
    }

    /// Decimal approximation for display.
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }
}

impl fmt::Display for ExactProb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

/// Parses `"a"` or `"a/b"` with `b > 0`.
impl FromStr for ExactProb {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = |m: &str| Error::InvalidProbability(format!("`{}`: {}", s, m));
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), Some(d.trim())),
            None => (s, None),
        };
        let numer: BigInt = n.parse().map_err(|_| bad("bad numerator"))?;
        let denom: BigInt = match d {
            Some(d) => d.parse().map_err(|_| bad("bad denominator"))?,
            None => BigInt::one(),
        };
        if denom <= BigInt::zero() {
            return Err(bad("denominator must be positive"));
        }
        Self::from_ratio(BigRational::new(numer, denom))
    }
}

// Arithmetic stays on the raw rationals; sums of probabilities routinely
// pass through intermediate values that only land back in [0, 1] at the
// end, so the operators do not re-validate. Normalization invariants are
// enforced where distributions are built.
impl Add for ExactProb {
    type Output = ExactProb;
    fn add(self, rhs: ExactProb) -> ExactProb {
        ExactProb(self.0 + rhs.0)
    }
}

impl Add<&ExactProb> for ExactProb {
    type Output = ExactProb;
    fn add(self, rhs: &ExactProb) -> ExactProb {
        ExactProb(self.0 + &rhs.0)
    }
}

impl AddAssign<&ExactProb> for ExactProb {
    fn add_assign(&mut self, rhs: &ExactProb) {
        self.0 += &rhs.0;
    }
}

impl AddAssign for ExactProb {
    fn add_assign(&mut self, rhs: ExactProb) {
        self.0 += rhs.0;
    }
}

impl Sub for ExactProb {
    type Output = ExactProb;
    fn sub(self, rhs: ExactProb) -> ExactProb {
        ExactProb(self.0 - rhs.0)
    }
}

impl Mul for ExactProb {
    type Output = ExactProb;
    fn mul(self, rhs: ExactProb) -> ExactProb {
        ExactProb(self.0 * rhs.0)
    }
}

impl Mul<&ExactProb> for ExactProb {
    type Output = ExactProb;
    fn mul(self, rhs: &ExactProb) -> ExactProb {
        ExactProb(self.0 * &rhs.0)
    }
}

impl Mul<&ExactProb> for &ExactProb {
    type Output = ExactProb;
    fn mul(self, rhs: &ExactProb) -> ExactProb {
        ExactProb(&self.0 * &rhs.0)
    }
}

impl Div for ExactProb {
    type Output = ExactProb;
    fn div(self, rhs: ExactProb) -> ExactProb {
        ExactProb(self.0 / rhs.0)
    }
}

impl Sum for ExactProb {
    fn sum<I: Iterator<Item = ExactProb>>(iter: I) -> ExactProb {
        iter.fold(ExactProb::zero(), |a, b| a + b)
    }
}
