//! Numeric modes.
//!
//! Paths, matrices and reports are generic over [`Real`], which is
//! implemented by [`Dyadic`] (exact mode) and `f64` (float mode). A path can
//! therefore never mix modes. [`Scalar`] is the tagged form used at the I/O
//! boundary where the mode is only known at run time.

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::dyadic::Dyadic;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Float,
}

/// Relative spacing below which float-mode crossing points are merged with
/// an existing breakpoint, and the width of float-mode regime boundaries.
pub const FLOAT_EPS: f64 = 1.0 / (1u64 << 40) as f64;

pub trait Real:
    Clone
    + PartialOrd
    + PartialEq
    + Debug
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    const MODE: Mode;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;
    fn to_f64(&self) -> f64;
    fn half(&self) -> Self;
    fn abs(&self) -> Self;

    /// Quotient; `None` on division by zero or, in exact mode, when the
    /// quotient is not dyadic.
    fn checked_div(&self, rhs: &Self) -> Option<Self>;

    /// Square root when exactly representable.
    fn exact_sqrt(&self) -> Option<Self>;

    fn to_scalar(&self) -> Scalar;
    fn from_scalar(s: &Scalar) -> Result<Self>;

    fn is_zero(&self) -> bool {
        *self == Self::zero()
    }

    fn min_of(a: &Self, b: &Self) -> Self {
        if a <= b {
            a.clone()
        } else {
            b.clone()
        }
    }

    fn max_of(a: &Self, b: &Self) -> Self {
        if a >= b {
            a.clone()
        } else {
            b.clone()
        }
    }

    fn div_or(&self, rhs: &Self, what: &'static str) -> Result<Self> {
        self.checked_div(rhs).ok_or(Error::Inexact(what))
    }
}

impl Real for Dyadic {
    const MODE: Mode = Mode::Exact;

    fn zero() -> Self {
        Dyadic::zero()
    }
    fn one() -> Self {
        Dyadic::one()
    }
    fn from_i64(v: i64) -> Self {
        Dyadic::from_i64(v)
    }
    fn to_f64(&self) -> f64 {
        Dyadic::to_f64(self)
    }
    fn half(&self) -> Self {
        Dyadic::half(self)
    }
    fn abs(&self) -> Self {
        Dyadic::abs(self)
    }
    fn checked_div(&self, rhs: &Self) -> Option<Self> {
        Dyadic::checked_div(self, rhs)
    }
    fn exact_sqrt(&self) -> Option<Self> {
        Dyadic::exact_sqrt(self)
    }
    fn to_scalar(&self) -> Scalar {
        Scalar::Exact(self.clone())
    }
    fn from_scalar(s: &Scalar) -> Result<Self> {
        match s {
            Scalar::Exact(d) => Ok(d.clone()),
            Scalar::Float(_) => Err(Error::ModeMismatch),
        }
    }
    fn is_zero(&self) -> bool {
        Dyadic::is_zero(self)
    }
}

impl Real for f64 {
    const MODE: Mode = Mode::Float;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn half(&self) -> Self {
        self * 0.5
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn checked_div(&self, rhs: &Self) -> Option<Self> {
        if *rhs == 0.0 {
            None
        } else {
            Some(self / rhs)
        }
    }
    fn exact_sqrt(&self) -> Option<Self> {
        if *self < 0.0 {
            None
        } else {
            Some(self.sqrt())
        }
    }
    fn to_scalar(&self) -> Scalar {
        Scalar::Float(*self)
    }
    fn from_scalar(s: &Scalar) -> Result<Self> {
        match s {
            Scalar::Float(v) => Ok(*v),
            Scalar::Exact(_) => Err(Error::ModeMismatch),
        }
    }
}

/// A number whose mode is decided at run time.
#[derive(Debug, Clone, PartialEq)]
pub enum Scalar {
    Exact(Dyadic),
    Float(f64),
}

impl Scalar {
    pub fn mode(&self) -> Mode {
        match self {
            Scalar::Exact(_) => Mode::Exact,
            Scalar::Float(_) => Mode::Float,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(d) => d.to_f64(),
            Scalar::Float(v) => *v,
        }
    }

    /// Parses a decimal or `p/q` literal in the requested mode.
    pub fn parse(s: &str, mode: Mode) -> Result<Scalar> {
        match mode {
            Mode::Exact => Ok(Scalar::Exact(s.parse()?)),
            Mode::Float => {
                if let Ok(d) = s.parse::<Dyadic>() {
                    return Ok(Scalar::Float(d.to_f64()));
                }
                if let Some((n, q)) = s.split_once('/') {
                    let n: f64 = n.trim().parse().map_err(|_| Error::Parse(s.into()))?;
                    let q: f64 = q.trim().parse().map_err(|_| Error::Parse(s.into()))?;
                    return Ok(Scalar::Float(n / q));
                }
                s.trim()
                    .parse::<f64>()
                    .map(Scalar::Float)
                    .map_err(|_| Error::Parse(format!("not a number: {s:?}")))
            }
        }
    }
}

impl std::fmt::Display for Scalar {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Scalar::Exact(d) => write!(f, "{d}"),
            Scalar::Float(v) => write!(f, "{v}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_modes() {
        assert_eq!(
            Scalar::parse("-0.5", Mode::Exact).unwrap(),
            Scalar::Exact(Dyadic::new(-1, -1))
        );
        assert!(Scalar::parse("0.1", Mode::Exact).is_err());
        assert_eq!(Scalar::parse("0.1", Mode::Float).unwrap(), Scalar::Float(0.1));
        assert_eq!(Scalar::parse("1/3", Mode::Float).unwrap(), Scalar::Float(1.0 / 3.0));
        assert_eq!(Scalar::parse("1e-3", Mode::Float).unwrap(), Scalar::Float(1e-3));
    }

    #[test]
    fn mode_mismatch() {
        assert_eq!(f64::from_scalar(&Scalar::Exact(Dyadic::one())), Err(Error::ModeMismatch));
        assert_eq!(Dyadic::from_scalar(&Scalar::Float(1.0)), Err(Error::ModeMismatch));
    }
}
