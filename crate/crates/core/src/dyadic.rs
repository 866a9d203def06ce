//! Exact dyadic rationals `mantissa * 2^exp2`.
//!
//! Values are kept in canonical form: the mantissa is odd, or the value is
//! zero with `exp2 == 0`. Canonical form makes structural equality coincide
//! with numerical equality, so `Eq` and `Hash` are derived.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Dyadic {
    mantissa: BigInt,
    exp2: i64,
}

impl Dyadic {
    pub fn new(mantissa: impl Into<BigInt>, exp2: i64) -> Self {
        let mut d = Dyadic {
            mantissa: mantissa.into(),
            exp2,
        };
        d.canonicalize();
        d
    }

    pub fn zero() -> Self {
        Dyadic {
            mantissa: BigInt::zero(),
            exp2: 0,
        }
    }

    pub fn one() -> Self {
        Dyadic {
            mantissa: BigInt::one(),
            exp2: 0,
        }
    }

    pub fn from_i64(v: i64) -> Self {
        Dyadic::new(v, 0)
    }

    /// `2^k`.
    pub fn pow2(k: i64) -> Self {
        Dyadic {
            mantissa: BigInt::one(),
            exp2: k,
        }
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mantissa
    }

    pub fn exp2(&self) -> i64 {
        self.exp2
    }

    fn canonicalize(&mut self) {
        if self.mantissa.is_zero() {
            self.exp2 = 0;
            return;
        }
        let tz = self.mantissa.trailing_zeros().unwrap_or(0);
        if tz > 0 {
            self.mantissa >>= tz as usize;
            self.exp2 += tz as i64;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mantissa.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.mantissa.is_positive()
    }

    pub fn signum(&self) -> i32 {
        match self.mantissa.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    pub fn abs(&self) -> Self {
        Dyadic {
            mantissa: self.mantissa.abs(),
            exp2: self.exp2,
        }
    }

    /// Multiplication by `2^k`; always exact.
    pub fn scale_pow2(&self, k: i64) -> Self {
        if self.is_zero() {
            return Dyadic::zero();
        }
        Dyadic {
            mantissa: self.mantissa.clone(),
            exp2: self.exp2 + k,
        }
    }

    pub fn half(&self) -> Self {
        self.scale_pow2(-1)
    }

    /// Exact quotient, or `None` when the divisor is zero or the quotient is
    /// not a dyadic rational.
    pub fn checked_div(&self, rhs: &Dyadic) -> Option<Dyadic> {
        if rhs.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Dyadic::zero());
        }
        // rhs.mantissa is odd, so the quotient is dyadic iff it divides ours.
        let (q, r) = self.mantissa.div_rem(&rhs.mantissa);
        if !r.is_zero() {
            return None;
        }
        Some(Dyadic::new(q, self.exp2 - rhs.exp2))
    }

    /// Exact square root when the value is the square of a dyadic rational.
    pub fn exact_sqrt(&self) -> Option<Dyadic> {
        if self.is_negative() {
            return None;
        }
        if self.is_zero() {
            return Some(Dyadic::zero());
        }
        if self.exp2 % 2 != 0 {
            // odd mantissa times an odd power of two is never a square
            return None;
        }
        let root = self.mantissa.sqrt();
        if &root * &root == self.mantissa {
            Some(Dyadic::new(root, self.exp2 / 2))
        } else {
            None
        }
    }

    /// Nearest-ish `f64`. Mantissas wider than 64 bits are truncated first,
    /// which costs at most a couple of ulps.
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.mantissa.bits();
        let (m, e) = if bits > 64 {
            let shift = bits - 64;
            (&self.mantissa >> shift as usize, self.exp2 + shift as i64)
        } else {
            (self.mantissa.clone(), self.exp2)
        };
        let mf = m.to_f64().unwrap_or(f64::NAN);
        ldexp(mf, e)
    }

    /// Exact conversion of a finite `f64`.
    pub fn from_f64(v: f64) -> Result<Dyadic> {
        if !v.is_finite() {
            return Err(Error::Parse(format!("non-finite value {v}")));
        }
        if v == 0.0 {
            return Ok(Dyadic::zero());
        }
        let bits = v.to_bits();
        let sign = if bits >> 63 == 1 { -1i64 } else { 1 };
        let exp_bits = ((bits >> 52) & 0x7ff) as i64;
        let frac = (bits & ((1u64 << 52) - 1)) as i64;
        let (m, e) = if exp_bits == 0 {
            (frac, -1074)
        } else {
            (frac | (1i64 << 52), exp_bits - 1075)
        };
        Ok(Dyadic::new(sign * m, e))
    }

    /// Exact decimal expansion (every dyadic rational has a finite one).
    pub fn to_decimal_string(&self) -> String {
        if self.exp2 >= 0 {
            return (&self.mantissa << self.exp2 as usize).to_string();
        }
        let k = (-self.exp2) as u32;
        // m / 2^k = m * 5^k / 10^k
        let scaled = &self.mantissa * num_traits::pow(BigInt::from(5), k as usize);
        let neg = scaled.is_negative();
        let digits = scaled.abs().to_string();
        let k = k as usize;
        let (int_part, frac_part) = if digits.len() > k {
            let (a, b) = digits.split_at(digits.len() - k);
            (a.to_string(), b.to_string())
        } else {
            ("0".to_string(), format!("{}{}", "0".repeat(k - digits.len()), digits))
        };
        let frac_part = frac_part.trim_end_matches('0');
        let mut s = String::new();
        if neg {
            s.push('-');
        }
        s.push_str(&int_part);
        if !frac_part.is_empty() {
            s.push('.');
            s.push_str(frac_part);
        }
        s
    }
}

fn ldexp(x: f64, e: i64) -> f64 {
    let mut x = x;
    let mut e = e;
    // step in chunks that keep 2^step a normal f64
    while e > 1000 {
        x *= 2f64.powi(1000);
        e -= 1000;
        if x.is_infinite() {
            return x;
        }
    }
    while e < -1000 {
        x *= 2f64.powi(-1000);
        e += 1000;
        if x == 0.0 {
            return x;
        }
    }
    x * 2f64.powi(e as i32)
}

impl Default for Dyadic {
    fn default() -> Self {
        Dyadic::zero()
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b) = (self.signum(), other.signum());
        if a != b {
            return a.cmp(&b);
        }
        if a == 0 {
            return Ordering::Equal;
        }
        (self - other).signum().cmp(&0)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for &Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: &Dyadic) -> Dyadic {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        let e = self.exp2.min(rhs.exp2);
        let a = &self.mantissa << (self.exp2 - e) as usize;
        let b = &rhs.mantissa << (rhs.exp2 - e) as usize;
        Dyadic::new(a + b, e)
    }
}

impl Sub for &Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: &Dyadic) -> Dyadic {
        self + &(-rhs)
    }
}

impl Mul for &Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: &Dyadic) -> Dyadic {
        if self.is_zero() || rhs.is_zero() {
            return Dyadic::zero();
        }
        // product of odd mantissas is odd: already canonical
        Dyadic {
            mantissa: &self.mantissa * &rhs.mantissa,
            exp2: self.exp2 + rhs.exp2,
        }
    }
}

impl Neg for &Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic {
            mantissa: -&self.mantissa,
            exp2: self.exp2,
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Dyadic {
            type Output = Dyadic;
            fn $m(self, rhs: Dyadic) -> Dyadic {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Dyadic> for Dyadic {
            type Output = Dyadic;
            fn $m(self, rhs: &Dyadic) -> Dyadic {
                (&self).$m(rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        -&self
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}*2^{}", self.mantissa, self.exp2)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal_string())
    }
}

/// Parses integers, plain decimals (`"0.375"`) and fractions (`"-5/8"`).
/// Fails when the value is not dyadic.
impl FromStr for Dyadic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Dyadic> {
        let s = s.trim();
        let bad = || Error::Parse(format!("not a dyadic number: {s:?}"));
        if let Some((num, den)) = s.split_once('/') {
            let n: BigInt = num.trim().parse().map_err(|_| bad())?;
            let d: BigInt = den.trim().parse().map_err(|_| bad())?;
            return Dyadic::new(n, 0)
                .checked_div(&Dyadic::new(d, 0))
                .ok_or_else(bad);
        }
        let (neg, body) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s.strip_prefix('+').unwrap_or(s)),
        };
        let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(bad());
        }
        if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let digits = format!("{int_part}{frac_part}");
        let mut n: BigInt = if digits.is_empty() {
            BigInt::zero()
        } else {
            digits.parse().map_err(|_| bad())?
        };
        if neg {
            n = -n;
        }
        let ten_k = num_traits::pow(BigInt::from(10), frac_part.len());
        Dyadic::new(n, 0)
            .checked_div(&Dyadic::new(ten_k, 0))
            .ok_or_else(bad)
    }
}
