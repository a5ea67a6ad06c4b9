//! Scalars of the max-plus semiring.
//!
//! Finite values live behind the [`Scalar`] trait, which has three
//! implementations: exact 64-bit integers (the default), exact rationals, and
//! tolerance-compared floats. [`Ext`] adjoins the absorbing zero `eps = -inf`.

use std::fmt;

use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Exact rational time values.
pub type Rational = Ratio<i64>;

/// Default comparison tolerance for [`Real`] values.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Wire form of a finite scalar or the `"eps"` sentinel.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RawScalar {
    Int(i64),
    Ratio { num: i64, den: i64 },
    Float(f64),
    Tag(String),
}

/// A finite time quantity.
pub trait Scalar:
    Copy + fmt::Debug + fmt::Display + PartialEq + PartialOrd + Send + Sync + 'static
{
    /// The type used once division is needed (cycle means, normalisation).
    type Field: Field;

    const MODE: &'static str;

    fn zero() -> Self;
    fn from_i64(v: i64) -> Self;
    fn checked_add(self, rhs: Self) -> Option<Self>;
    fn checked_sub(self, rhs: Self) -> Option<Self>;
    fn checked_mul_int(self, k: i64) -> Option<Self>;
    fn to_field(self) -> Self::Field;
    fn to_f64(self) -> f64;
    /// Equality; exact types ignore `tol`.
    fn close(self, other: Self, tol: f64) -> bool;
    fn to_raw(self) -> RawScalar;
    fn from_raw(raw: &RawScalar) -> Result<Self>;
    /// Exact `(numerator, denominator)` for hashing; `None` for floats.
    fn exact_key(self) -> Option<(i64, i64)>;

    fn checked_neg(self) -> Option<Self> {
        Self::zero().checked_sub(self)
    }
}

/// Scalars closed under division by a positive integer.
pub trait Field: Scalar<Field = Self> {
    fn checked_div_int(self, k: i64) -> Option<Self>;
}

impl Scalar for i64 {
    type Field = Rational;
    const MODE: &'static str = "int";

    fn zero() -> Self {
        0
    }
    fn from_i64(v: i64) -> Self {
        v
    }
    fn checked_add(self, rhs: Self) -> Option<Self> {
        i64::checked_add(self, rhs)
    }
    fn checked_sub(self, rhs: Self) -> Option<Self> {
        i64::checked_sub(self, rhs)
    }
    fn checked_mul_int(self, k: i64) -> Option<Self> {
        i64::checked_mul(self, k)
    }
    fn to_field(self) -> Rational {
        Rational::from_integer(self)
    }
    fn to_f64(self) -> f64 {
        self as f64
    }
    fn close(self, other: Self, _tol: f64) -> bool {
        self == other
    }
    fn exact_key(self) -> Option<(i64, i64)> {
        Some((self, 1))
    }
    fn to_raw(self) -> RawScalar {
        RawScalar::Int(self)
    }
    fn from_raw(raw: &RawScalar) -> Result<Self> {
        match *raw {
            RawScalar::Int(v) => Ok(v),
            RawScalar::Ratio { num, den } if den != 0 && num % den == 0 => Ok(num / den),
            RawScalar::Float(f) if f.fract() == 0.0 && f.abs() < 9.0e15 => Ok(f as i64),
            _ => Err(Error::InvalidScalar(format!(
                "{raw:?} is not an integer; use rational or float mode"
            ))),
        }
    }
}

impl Scalar for Rational {
    type Field = Rational;
    const MODE: &'static str = "rational";

    fn zero() -> Self {
        <Rational as Zero>::zero()
    }
    fn from_i64(v: i64) -> Self {
        Rational::from_integer(v)
    }
    fn checked_add(self, rhs: Self) -> Option<Self> {
        CheckedAdd::checked_add(&self, &rhs)
    }
    fn checked_sub(self, rhs: Self) -> Option<Self> {
        CheckedSub::checked_sub(&self, &rhs)
    }
    fn checked_mul_int(self, k: i64) -> Option<Self> {
        CheckedMul::checked_mul(&self, &Rational::from_integer(k))
    }
    fn to_field(self) -> Rational {
        self
    }
    fn to_f64(self) -> f64 {
        ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }
    fn close(self, other: Self, _tol: f64) -> bool {
        self == other
    }
    fn exact_key(self) -> Option<(i64, i64)> {
        Some((*self.numer(), *self.denom()))
    }
    fn to_raw(self) -> RawScalar {
        if *self.denom() == 1 {
            RawScalar::Int(*self.numer())
        } else {
            RawScalar::Ratio {
                num: *self.numer(),
                den: *self.denom(),
            }
        }
    }
    fn from_raw(raw: &RawScalar) -> Result<Self> {
        match *raw {
            RawScalar::Int(v) => Ok(Rational::from_integer(v)),
            RawScalar::Ratio { num, den } if den != 0 => Ok(Rational::new(num, den)),
            RawScalar::Float(f) if f.fract() == 0.0 && f.abs() < 9.0e15 => {
                Ok(Rational::from_integer(f as i64))
            }
            _ => Err(Error::InvalidScalar(format!(
                "{raw:?} is not an exact rational; write it as {{\"num\":p,\"den\":q}}"
            ))),
        }
    }
}

impl Field for Rational {
    fn checked_div_int(self, k: i64) -> Option<Self> {
        if k == 0 {
            return None;
        }
        CheckedDiv::checked_div(&self, &Rational::from_integer(k))
    }
}

/// A finite float compared with a tolerance.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Default)]
pub struct Real(f64);

impl Real {
    pub fn new(v: f64) -> Result<Self> {
        if v.is_finite() {
            Ok(Real(v))
        } else {
            Err(Error::InvalidScalar(format!("{v} is not a finite real")))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }

    fn finite(v: f64) -> Option<Self> {
        v.is_finite().then_some(Real(v))
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

impl Scalar for Real {
    type Field = Real;
    const MODE: &'static str = "float";

    fn zero() -> Self {
        Real(0.0)
    }
    fn from_i64(v: i64) -> Self {
        Real(v as f64)
    }
    fn checked_add(self, rhs: Self) -> Option<Self> {
        Real::finite(self.0 + rhs.0)
    }
    fn checked_sub(self, rhs: Self) -> Option<Self> {
        Real::finite(self.0 - rhs.0)
    }
    fn checked_mul_int(self, k: i64) -> Option<Self> {
        Real::finite(self.0 * k as f64)
    }
    fn to_field(self) -> Real {
        self
    }
    fn to_f64(self) -> f64 {
        self.0
    }
    fn close(self, other: Self, tol: f64) -> bool {
        (self.0 - other.0).abs() <= tol * (1.0 + self.0.abs().max(other.0.abs()))
    }
    fn exact_key(self) -> Option<(i64, i64)> {
        None
    }
    fn to_raw(self) -> RawScalar {
        RawScalar::Float(self.0)
    }
    fn from_raw(raw: &RawScalar) -> Result<Self> {
        match *raw {
            RawScalar::Int(v) => Ok(Real(v as f64)),
            RawScalar::Ratio { num, den } if den != 0 => Real::new(num as f64 / den as f64),
            RawScalar::Float(f) => Real::new(f),
            _ => Err(Error::InvalidScalar(format!(
                "{raw:?} is not a real number"
            ))),
        }
    }
}

impl Field for Real {
    fn checked_div_int(self, k: i64) -> Option<Self> {
        if k == 0 {
            None
        } else {
            Real::finite(self.0 / k as f64)
        }
    }
}

/// An element of `R ∪ {eps}`.
///
/// The derived order puts `Eps` below every finite value, so `max` on `Ext`
/// is the semiring addition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Ext<T> {
    Eps,
    Fin(T),
}

impl<T: Scalar> Ext<T> {
    /// The unit `e = 0`.
    pub fn e() -> Self {
        Ext::Fin(T::zero())
    }

    pub fn int(v: i64) -> Self {
        Ext::Fin(T::from_i64(v))
    }

    pub fn is_eps(self) -> bool {
        matches!(self, Ext::Eps)
    }

    pub fn finite(self) -> Option<T> {
        match self {
            Ext::Eps => None,
            Ext::Fin(v) => Some(v),
        }
    }

    /// `a ⊕ b = max(a, b)`.
    pub fn oplus(self, rhs: Self) -> Self {
        match (self, rhs) {
            (Ext::Eps, x) | (x, Ext::Eps) => x,
            (Ext::Fin(a), Ext::Fin(b)) => {
                if b > a {
                    Ext::Fin(b)
                } else {
                    Ext::Fin(a)
                }
            }
        }
    }

    /// `a ⊗ b = a + b`, with `eps` absorbing.
    pub fn otimes(self, rhs: Self) -> Result<Self> {
        match (self, rhs) {
            (Ext::Fin(a), Ext::Fin(b)) => a
                .checked_add(b)
                .map(Ext::Fin)
                .ok_or(Error::Overflow("scalar otimes")),
            _ => Ok(Ext::Eps),
        }
    }

    pub fn close(self, other: Self, tol: f64) -> bool {
        match (self, other) {
            (Ext::Eps, Ext::Eps) => true,
            (Ext::Fin(a), Ext::Fin(b)) => a.close(b, tol),
            _ => false,
        }
    }

    pub fn to_field(self) -> Ext<T::Field> {
        match self {
            Ext::Eps => Ext::Eps,
            Ext::Fin(v) => Ext::Fin(v.to_field()),
        }
    }

    pub fn to_raw(self) -> RawScalar {
        match self {
            Ext::Eps => RawScalar::Tag("eps".to_owned()),
            Ext::Fin(v) => v.to_raw(),
        }
    }

    pub fn from_raw(raw: &RawScalar) -> Result<Self> {
        match raw {
            RawScalar::Tag(t) if t == "eps" => Ok(Ext::Eps),
            RawScalar::Tag(t) => Err(Error::InvalidScalar(format!(
                "unknown tag {t:?}; the only symbolic entry is \"eps\""
            ))),
            other => T::from_raw(other).map(Ext::Fin),
        }
    }
}

impl<T: Scalar> From<T> for Ext<T> {
    fn from(v: T) -> Self {
        Ext::Fin(v)
    }
}

impl<T: Scalar> fmt::Display for Ext<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ext::Eps => f.write_str("eps"),
            Ext::Fin(v) => fmt::Display::fmt(v, f),
        }
    }
}

impl<T: Scalar> Serialize for Ext<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_raw().serialize(serializer)
    }
}

impl<'de, T: Scalar> Deserialize<'de> for Ext<T> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = RawScalar::deserialize(deserializer)?;
        Ext::from_raw(&raw).map_err(serde::de::Error::custom)
    }
}

/// `a ⊕ b`.
pub fn scalar_oplus<T: Scalar>(a: Ext<T>, b: Ext<T>) -> Ext<T> {
    a.oplus(b)
}

/// `a ⊗ b`.
pub fn scalar_otimes<T: Scalar>(a: Ext<T>, b: Ext<T>) -> Result<Ext<T>> {
    a.otimes(b)
}
