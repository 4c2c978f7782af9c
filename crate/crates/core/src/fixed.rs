//! Exact decimal quantities.
//!
//! Times, durations, costs and metric values are all stored as integer
//! micro-units so that epsilon arithmetic (`30.000 + 0.002`) and metric
//! comparisons are exact. Six fractional digits are accepted on input.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

/// Number of micro-units per whole unit.
pub const SCALE: i64 = 1_000_000;

/// A fixed-point decimal with six fractional digits.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Fixed(i64);

impl Fixed {
    pub const ZERO: Fixed = Fixed(0);
    pub const ONE: Fixed = Fixed(SCALE);
    pub const MAX: Fixed = Fixed(i64::MAX / 4);

    pub const fn from_micros(micros: i64) -> Self {
        Fixed(micros)
    }

    pub const fn from_millis(millis: i64) -> Self {
        Fixed(millis * 1_000)
    }

    pub const fn from_int(value: i64) -> Self {
        Fixed(value * SCALE)
    }

    /// Rounds to the nearest micro-unit.
    pub fn from_f64(value: f64) -> Self {
        Fixed((value * SCALE as f64).round() as i64)
    }

    pub const fn micros(self) -> i64 {
        self.0
    }

    pub fn as_f64(self) -> f64 {
        self.0 as f64 / SCALE as f64
    }

    pub const fn is_positive(self) -> bool {
        self.0 > 0
    }

    pub const fn is_negative(self) -> bool {
        self.0 < 0
    }

    /// Product of two fixed-point values, truncated towards zero.
    pub fn mul(self, other: Fixed) -> Fixed {
        Fixed(((self.0 as i128 * other.0 as i128) / SCALE as i128) as i64)
    }

    /// Saturating addition, used for heuristic values near [`Fixed::MAX`].
    pub fn saturating_add(self, other: Fixed) -> Fixed {
        Fixed(self.0.saturating_add(other.0).min(Self::MAX.0))
    }

    /// Renders with exactly three decimals (half away from zero), the format
    /// used by plan listings.
    pub fn to_millis_string(self) -> String {
        let sign = if self.0 < 0 { "-" } else { "" };
        let abs = self.0.unsigned_abs();
        let millis = (abs + 500) / 1_000;
        format!("{sign}{}.{:03}", millis / 1_000, millis % 1_000)
    }
}

impl fmt::Display for Fixed {
    /// Shortest exact decimal rendering: `30`, `459.992`, `0.002`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.0 < 0 { "-" } else { "" };
        let abs = self.0.unsigned_abs();
        let whole = abs / SCALE as u64;
        let frac = abs % SCALE as u64;
        if frac == 0 {
            write!(f, "{sign}{whole}")
        } else {
            let digits = format!("{frac:06}");
            write!(f, "{sign}{whole}.{}", digits.trim_end_matches('0'))
        }
    }
}

impl fmt::Debug for Fixed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid decimal `{0}`")]
pub struct ParseFixedError(pub String);

impl FromStr for Fixed {
    type Err = ParseFixedError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseFixedError(s.to_string());
        let (negative, body) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s.strip_prefix('+').unwrap_or(s)),
        };
        let (whole, frac) = match body.split_once('.') {
            Some((w, f)) => (w, f),
            None => (body, ""),
        };
        if whole.is_empty() && frac.is_empty() {
            return Err(err());
        }
        if !whole.chars().all(|c| c.is_ascii_digit()) || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(err());
        }
        if frac.len() > 6 {
            return Err(err());
        }
        let whole: i64 = if whole.is_empty() { 0 } else { whole.parse().map_err(|_| err())? };
        let frac_micros: i64 = if frac.is_empty() {
            0
        } else {
            format!("{frac:0<6}").parse().map_err(|_| err())?
        };
        let micros = whole
            .checked_mul(SCALE)
            .and_then(|w| w.checked_add(frac_micros))
            .ok_or_else(err)?;
        Ok(Fixed(if negative { -micros } else { micros }))
    }
}

impl Add for Fixed {
    type Output = Fixed;
    fn add(self, rhs: Fixed) -> Fixed {
        Fixed(self.0 + rhs.0)
    }
}

impl AddAssign for Fixed {
    fn add_assign(&mut self, rhs: Fixed) {
        self.0 += rhs.0;
    }
}

impl Sub for Fixed {
    type Output = Fixed;
    fn sub(self, rhs: Fixed) -> Fixed {
        Fixed(self.0 - rhs.0)
    }
}

impl SubAssign for Fixed {
    fn sub_assign(&mut self, rhs: Fixed) {
        self.0 -= rhs.0;
    }
}

impl Neg for Fixed {
    type Output = Fixed;
    fn neg(self) -> Fixed {
        Fixed(-self.0)
    }
}

impl Sum for Fixed {
    fn sum<I: Iterator<Item = Fixed>>(iter: I) -> Fixed {
        iter.fold(Fixed::ZERO, |a, b| a + b)
    }
}

impl Serialize for Fixed {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_f64(self.as_f64())
    }
}

impl<'de> Deserialize<'de> for Fixed {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct Visitor;
        impl de::Visitor<'_> for Visitor {
            type Value = Fixed;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a decimal number")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Fixed, E> {
                Ok(Fixed::from_f64(v))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Fixed, E> {
                Ok(Fixed::from_int(v))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Fixed, E> {
                Ok(Fixed::from_int(v as i64))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Fixed, E> {
                v.parse().map_err(E::custom)
            }
        }
        deserializer.deserialize_any(Visitor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn epsilon_chaining_is_exact() {
        let t: Fixed = "30".parse().unwrap();
        let eps: Fixed = "0.002".parse().unwrap();
        assert_eq!((t + eps).to_millis_string(), "30.002");
        assert_eq!((Fixed::from_int(600) - "140.008".parse().unwrap()).to_string(), "459.992");
    }

    #[test]
    fn rejects_garbage() {
        for bad in ["", ".", "1.2.3", "abc", "1.0000001", "--1"] {
            assert!(bad.parse::<Fixed>().is_err(), "{bad}");
        }
    }

    #[test]
    fn millis_rendering_rounds() {
        assert_eq!(Fixed::from_micros(1_499).to_millis_string(), "0.001");
        assert_eq!(Fixed::from_micros(1_500).to_millis_string(), "0.002");
        assert_eq!(Fixed::ZERO.to_millis_string(), "0.000");
    }

    proptest! {
        #[test]
        fn display_parse_roundtrip(micros in -10_000_000_000i64..10_000_000_000i64) {
            let v = Fixed::from_micros(micros);
            prop_assert_eq!(v.to_string().parse::<Fixed>().unwrap(), v);
        }
    }
}
