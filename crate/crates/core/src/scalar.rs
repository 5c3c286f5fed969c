//! Scalars over a field of characteristic zero: exact rationals or binary64.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// Absolute tolerance used when comparing float scalars.
pub const EPS_CMP: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum ScalarMode {
    #[default]
    Exact,
    Float,
}

/// A field element. Exact values are always canonical (reduced, positive
/// denominator). Mixed arithmetic promotes to float.
#[derive(Clone, Debug)]
pub enum Scalar {
    Exact(BigRational),
    Float(f64),
}

impl Scalar {
    pub fn zero(mode: ScalarMode) -> Self {
        match mode {
            ScalarMode::Exact => Scalar::Exact(BigRational::zero()),
            ScalarMode::Float => Scalar::Float(0.0),
        }
    }

    pub fn one(mode: ScalarMode) -> Self {
        Self::int(1, mode)
    }

    pub fn int(v: i64, mode: ScalarMode) -> Self {
        match mode {
            ScalarMode::Exact => Scalar::Exact(BigRational::from_integer(BigInt::from(v))),
            ScalarMode::Float => Scalar::Float(v as f64),
        }
    }

    /// `p/q` in the given mode. Panics if `q == 0`.
    pub fn ratio(p: i64, q: i64, mode: ScalarMode) -> Self {
        assert!(q != 0, "zero denominator");
        match mode {
            ScalarMode::Exact => Scalar::Exact(BigRational::new(p.into(), q.into())),
            ScalarMode::Float => Scalar::Float(p as f64 / q as f64),
        }
    }

    pub fn mode(&self) -> ScalarMode {
        match self {
            Scalar::Exact(_) => ScalarMode::Exact,
            Scalar::Float(_) => ScalarMode::Float,
        }
    }

    /// Literal zero: an exact 0 or a float equal to 0.0.
    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_zero(),
            Scalar::Float(f) => *f == 0.0,
        }
    }

    /// Zero up to the comparison tolerance (exact zero in exact mode).
    pub fn is_negligible(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_zero(),
            Scalar::Float(f) => f.abs() <= EPS_CMP,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_one(),
            Scalar::Float(f) => (f - 1.0).abs() <= EPS_CMP,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
            Scalar::Float(f) => *f,
        }
    }

    pub fn abs_f64(&self) -> f64 {
        self.to_f64().abs()
    }

    pub fn to_mode(&self, mode: ScalarMode) -> Scalar {
        match (self, mode) {
            (Scalar::Exact(_), ScalarMode::Exact) | (Scalar::Float(_), ScalarMode::Float) => self.clone(),
            (Scalar::Exact(_), ScalarMode::Float) => Scalar::Float(self.to_f64()),
            (Scalar::Float(f), ScalarMode::Exact) => {
                Scalar::Exact(BigRational::from_float(*f).unwrap_or_else(BigRational::zero))
            }
        }
    }

    pub fn checked_inv(&self) -> Option<Scalar> {
        if self.is_zero() {
            return None;
        }
        Some(match self {
            Scalar::Exact(r) => Scalar::Exact(r.recip()),
            Scalar::Float(f) => Scalar::Float(1.0 / f),
        })
    }

    fn binop(
        a: &Scalar,
        b: &Scalar,
        exact: impl FnOnce(&BigRational, &BigRational) -> BigRational,
        float: impl FnOnce(f64, f64) -> f64,
    ) -> Scalar {
        match (a, b) {
            (Scalar::Exact(x), Scalar::Exact(y)) => Scalar::Exact(exact(x, y)),
            _ => Scalar::Float(float(a.to_f64(), b.to_f64())),
        }
    }
}

impl PartialEq for Scalar {
    /// Exact pairs compare literally; anything involving a float compares
    /// within [`EPS_CMP`].
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a == b,
            _ => (self.to_f64() - other.to_f64()).abs() <= EPS_CMP,
        }
    }
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        Scalar::binop(self, rhs, |x, y| x + y, |x, y| x + y)
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        Scalar::binop(self, rhs, |x, y| x - y, |x, y| x - y)
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        Scalar::binop(self, rhs, |x, y| x * y, |x, y| x * y)
    }
}

impl<'a> Div<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    /// Panics on exact division by zero.
    fn div(self, rhs: &Scalar) -> Scalar {
        Scalar::binop(self, rhs, |x, y| x / y, |x, y| x / y)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(-r),
            Scalar::Float(f) => Scalar::Float(-f),
        }
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, rhs: Scalar) -> Scalar {
        &self + &rhs
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, rhs: Scalar) -> Scalar {
        &self - &rhs
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        &self * &rhs
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        match (&mut *self, rhs) {
            (Scalar::Exact(x), Scalar::Exact(y)) => *x += y,
            (Scalar::Float(x), _) => *x += rhs.to_f64(),
            (Scalar::Exact(_), Scalar::Float(y)) => *self = Scalar::Float(self.to_f64() + y),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Scalar::Float(x) => write!(f, "{x}"),
        }
    }
}

impl FromStr for Scalar {
    type Err = Error;

    /// Parses `"p/q"` or `"p"` as an exact rational.
    fn from_str(s: &str) -> Result<Self, Error> {
        let bad = || Error::Schema(format!("invalid rational {s:?}"));
        let (p, q) = match s.split_once('/') {
            Some((p, q)) => (p.trim(), q.trim()),
            None => (s.trim(), "1"),
        };
        let p: BigInt = p.parse().map_err(|_| bad())?;
        let q: BigInt = q.parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(Error::Schema(format!("zero denominator in {s:?}")));
        }
        Ok(Scalar::Exact(BigRational::new(p, q)))
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        match self {
            Scalar::Exact(_) => ser.serialize_str(&self.to_string()),
            Scalar::Float(x) => ser.serialize_f64(*x),
        }
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Number(f64),
        }
        match Raw::deserialize(de)? {
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
            Raw::Number(x) => Ok(Scalar::Float(x)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print_are_canonical() {
        let s: Scalar = "6/-4".parse().unwrap();
        assert_eq!(s.to_string(), "-3/2");
        let t: Scalar = "5".parse().unwrap();
        assert_eq!(t.to_string(), "5/1");
        assert!("1/0".parse::<Scalar>().is_err());
        assert!("x".parse::<Scalar>().is_err());
    }

    #[test]
    fn exact_arithmetic_is_literal() {
        let a = Scalar::ratio(1, 3, ScalarMode::Exact);
        let b = Scalar::ratio(2, 3, ScalarMode::Exact);
        assert_eq!(&a + &b, Scalar::one(ScalarMode::Exact));
        assert!((&a - &a).is_zero());
        assert_eq!(&a / &b, Scalar::ratio(1, 2, ScalarMode::Exact));
    }

    #[test]
    fn float_comparison_uses_tolerance() {
        let a = Scalar::Float(1.0);
        let b = Scalar::Float(1.0 + 1e-12);
        assert_eq!(a, b);
        assert_ne!(Scalar::Float(1.0), Scalar::Float(1.0 + 1e-6));
        assert!(Scalar::Float(1e-11).is_negligible());
        assert!(!Scalar::Float(1e-11).is_zero());
    }

    #[test]
    fn mixed_arithmetic_promotes_to_float() {
        let a = Scalar::ratio(1, 2, ScalarMode::Exact);
        let b = Scalar::Float(0.25);
        assert_eq!((&a + &b).mode(), ScalarMode::Float);
        let mut c = a.clone();
        c += &b;
        assert_eq!(c, Scalar::Float(0.75));
    }

    #[test]
    fn serde_round_trip() {
        let v = vec![Scalar::ratio(-7, 3, ScalarMode::Exact), Scalar::Float(0.5)];
        let json = serde_json::to_string(&v).unwrap();
        assert_eq!(json, r#"["-7/3",0.5]"#);
        let back: Vec<Scalar> = serde_json::from_str(&json).unwrap();
        assert_eq!(back, v);
    }
}
