//! Reflection matrices: normalization to unit diagonal, the completely-S
//! test, the spectral radius of `|I - R|`, the five-way uniqueness regime and
//! the diagonal rescaling that maps one problem onto an equivalent one.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::path::{PLPath2, Vec2};
use crate::scalar::{Mode, Real, FLOAT_EPS};
use crate::verifier::SolutionTriple;

/// A 2x2 matrix before normalization.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralMatrix2<T> {
    pub r11: T,
    pub r12: T,
    pub r21: T,
    pub r22: T,
}

/// `R = [[1, a1], [a2, 1]]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ReflectionMatrix2<T> {
    pub a1: T,
    pub a2: T,
}

impl<T: Real> ReflectionMatrix2<T> {
    pub fn new(a1: T, a2: T) -> Self {
        ReflectionMatrix2 { a1, a2 }
    }

    pub fn identity() -> Self {
        ReflectionMatrix2::new(T::zero(), T::zero())
    }

    /// The critical matrix `[[1, -1], [1, 1]]`.
    pub fn critical() -> Self {
        ReflectionMatrix2::new(-T::one(), T::one())
    }

    pub fn as_array(&self) -> [[T; 2]; 2] {
        [
            [T::one(), self.a1.clone()],
            [self.a2.clone(), T::one()],
        ]
    }

    /// Off-diagonal entry `R_{j i}` acting on coordinate `i != j`.
    pub fn coupling(&self, j: usize) -> &T {
        if j == 0 {
            &self.a1
        } else {
            &self.a2
        }
    }

    pub fn product(&self) -> T {
        self.a1.clone() * self.a2.clone()
    }

    pub fn apply(&self, v: &Vec2<T>) -> Vec2<T> {
        Vec2::new(
            v.x1.clone() + self.a1.clone() * v.x2.clone(),
            self.a2.clone() * v.x1.clone() + v.x2.clone(),
        )
    }

    pub fn apply_path(&self, p: &PLPath2<T>) -> PLPath2<T> {
        p.map(|v| self.apply(v))
    }

    pub fn to_f64(&self) -> ReflectionMatrix2<f64> {
        ReflectionMatrix2::new(self.a1.to_f64(), self.a2.to_f64())
    }
}

/// Divides out the diagonal: `a1 = r12 / r22`, `a2 = r21 / r11`. Returns the
/// scale factors `(r11, r22)`; the regulator of the normalized problem is
/// `(r11 m1, r22 m2)`.
pub fn normalize<T: Real>(m: &GeneralMatrix2<T>) -> Result<(ReflectionMatrix2<T>, T, T)> {
    if !(m.r11 > T::zero()) || !(m.r22 > T::zero()) {
        return Err(Error::InvalidMatrix(format!(
            "diagonal entries must be positive, got {:?} and {:?}",
            m.r11, m.r22
        )));
    }
    let a1 = m.r12.div_or(&m.r22, "normalization")?;
    let a2 = m.r21.div_or(&m.r11, "normalization")?;
    Ok((ReflectionMatrix2::new(a1, a2), m.r11.clone(), m.r22.clone()))
}

fn near_one<T: Real>(x: &T) -> bool {
    T::MODE == Mode::Float && (x.to_f64() - 1.0).abs() <= FLOAT_EPS
}

/// Some `x >= 0` has `Rx > 0`; in two dimensions with unit diagonal this is
/// `a1 > 0 || a2 > 0 || a1 a2 < 1`.
pub fn is_completely_s<T: Real>(r: &ReflectionMatrix2<T>) -> bool {
    let zero = T::zero();
    if r.a1 > zero || r.a2 > zero {
        return true;
    }
    let p = r.product();
    p < T::one() && !near_one(&p)
}

/// Spectral radius of `|I - R|`, that is `sqrt(|a1 a2|)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralRadius<T> {
    pub value: f64,
    /// Present in exact mode when the radius is itself dyadic.
    pub exact: Option<T>,
}

impl<T: Real> SpectralRadius<T> {
    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }
}

pub fn spectral_radius_abs_q<T: Real>(r: &ReflectionMatrix2<T>) -> SpectralRadius<T> {
    let p = r.product().abs();
    let exact = match T::MODE {
        Mode::Exact => p.exact_sqrt(),
        Mode::Float => None,
    };
    let value = match &exact {
        Some(e) => e.to_f64(),
        None => p.to_f64().sqrt(),
    };
    SpectralRadius { value, exact }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regime {
    NotCompletelyS,
    /// `|a1 a2| < 1`.
    Case1UniqueContraction,
    /// `|a1 a2| = 1`, opposite signs.
    Case2UniqueCritical,
    /// `|a1 a2| = 1`, both positive.
    Case3CriticalPositive,
    /// `|a1 a2| > 1`, opposite signs.
    Case4NonUniqueOpposite,
    /// `|a1 a2| > 1`, both positive.
    Case5NonUniquePositive,
}

impl Regime {
    pub fn label(self) -> &'static str {
        match self {
            Regime::NotCompletelyS => "NotCompletelyS",
            Regime::Case1UniqueContraction => "Case1",
            Regime::Case2UniqueCritical => "Case2",
            Regime::Case3CriticalPositive => "Case3",
            Regime::Case4NonUniqueOpposite => "Case4",
            Regime::Case5NonUniquePositive => "Case5",
        }
    }

    pub fn uniqueness_note(self) -> &'static str {
        match self {
            Regime::NotCompletelyS => "no solution for some driving functions",
            Regime::Case1UniqueContraction => "unique (contraction)",
            Regime::Case2UniqueCritical => "unique (critical case)",
            Regime::Case3CriticalPositive => "uniqueness for g but not m",
            Regime::Case4NonUniqueOpposite => "non-unique",
            Regime::Case5NonUniquePositive => "non-unique",
        }
    }

    pub fn is_unique(self) -> bool {
        matches!(
            self,
            Regime::Case1UniqueContraction | Regime::Case2UniqueCritical
        )
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

pub fn classify_regime<T: Real>(r: &ReflectionMatrix2<T>) -> Regime {
    if !is_completely_s(r) {
        return Regime::NotCompletelyS;
    }
    let p = r.product();
    let abs = p.abs();
    let negative = p < T::zero();
    let one = T::one();
    if near_one(&abs) || abs == one {
        if negative {
            Regime::Case2UniqueCritical
        } else {
            Regime::Case3CriticalPositive
        }
    } else if abs < one {
        Regime::Case1UniqueContraction
    } else if negative {
        Regime::Case4NonUniqueOpposite
    } else {
        Regime::Case5NonUniquePositive
    }
}

/// Everything [`classify_regime`] knows about a matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Classification<T> {
    pub regime: Regime,
    pub completely_s: bool,
    pub radius: SpectralRadius<T>,
    /// Float mode only: `|a1 a2|` was within `2^-40` of 1, so the label
    /// depends on that convention.
    pub near_boundary: bool,
}

pub fn classify<T: Real>(r: &ReflectionMatrix2<T>) -> Classification<T> {
    Classification {
        regime: classify_regime(r),
        completely_s: is_completely_s(r),
        radius: spectral_radius_abs_q(r),
        near_boundary: near_one(&r.product().abs()),
    }
}

fn divide_second<T: Real>(p: &PLPath2<T>, c: &T) -> Result<PLPath2<T>> {
    let values = p
        .values()
        .iter()
        .map(|v| Ok(Vec2::new(v.x1.clone(), v.x2.div_or(c, "diagonal rescaling")?)))
        .collect::<Result<Vec<_>>>()?;
    PLPath2::new(p.times().to_vec(), values)
}

/// Multiplies the second coordinate equation by `1/c`: the matrix becomes
/// `S = [[1, c a1], [a2 / c, 1]]` and `f2, g2, m2` are divided by `c`.
pub fn diagonal_rescale<T: Real>(
    r: &ReflectionMatrix2<T>,
    c: &T,
    triple: Option<&SolutionTriple<T>>,
) -> Result<(ReflectionMatrix2<T>, Option<SolutionTriple<T>>)> {
    if !(*c > T::zero()) {
        return Err(Error::Usage(format!("rescaling constant must be positive, got {c:?}")));
    }
    let s = ReflectionMatrix2::new(
        c.clone() * r.a1.clone(),
        r.a2.div_or(c, "diagonal rescaling")?,
    );
    let triple = match triple {
        None => None,
        Some(tr) => {
            let tail_bound = match &tr.tail_bound {
                None => None,
                Some(b) => {
                    let inv = T::one().div_or(c, "diagonal rescaling")?;
                    Some(b.clone() * T::max_of(&T::one(), &inv))
                }
            };
            Some(SolutionTriple {
                r: s.clone(),
                f: divide_second(&tr.f, c)?,
                g: divide_second(&tr.g, c)?,
                m: divide_second(&tr.m, c)?,
                tail_bound,
            })
        }
    };
    Ok((s, triple))
}

/// The constant `c` taking a critical matrix with `a1 < 0 < a2` to
/// `[[1, -1], [1, 1]]` under [`diagonal_rescale`]; this is `c = a2`.
pub fn critical_canonical_scale<T: Real>(r: &ReflectionMatrix2<T>) -> Result<T> {
    if classify_regime(r) != Regime::Case2UniqueCritical {
        return Err(Error::Usage("matrix is not in the critical opposite-sign case".into()));
    }
    if !(r.a1 < T::zero() && r.a2 > T::zero()) {
        return Err(Error::Usage(
            "canonical scaling needs a1 < 0 < a2; swap the coordinates first".into(),
        ));
    }
    Ok(r.a2.clone())
}
