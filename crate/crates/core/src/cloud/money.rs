//! Exact decimal currency amounts with micro-unit resolution, so per-shot
//! fees like 0.00035 accumulate without binary-float drift.

use std::fmt;
use std::str::FromStr;

use serde::{de, Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

const MICROS_PER_UNIT: i64 = 1_000_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MoneyError {
    #[error("cannot parse {0:?} as a decimal amount")]
    Malformed(String),
    #[error("amount {0:?} has more than 6 decimal places")]
    TooPrecise(String),
    #[error("amount overflow")]
    Overflow,
}

/// A currency amount stored as an integer count of 10⁻⁶ units.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Money(i64);

impl Money {
    pub const ZERO: Money = Money(0);

    pub fn from_micros(micros: i64) -> Self {
        Money(micros)
    }

    pub fn micros(self) -> i64 {
        self.0
    }

    pub fn is_negative(self) -> bool {
        self.0 < 0
    }

    pub fn checked_add(self, other: Money) -> Result<Money, MoneyError> {
        self.0.checked_add(other.0).map(Money).ok_or(MoneyError::Overflow)
    }

    pub fn checked_mul(self, factor: u64) -> Result<Money, MoneyError> {
        i64::try_from(factor)
            .ok()
            .and_then(|f| self.0.checked_mul(f))
            .map(Money)
            .ok_or(MoneyError::Overflow)
    }
}

impl std::ops::Add for Money {
    type Output = Money;

    fn add(self, other: Money) -> Money {
        Money(self.0 + other.0)
    }
}

impl std::iter::Sum for Money {
    fn sum<I: Iterator<Item = Money>>(iter: I) -> Money {
        iter.fold(Money::ZERO, |a, b| a + b)
    }
}

impl fmt::Display for Money {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.0 < 0 { "-" } else { "" };
        let abs = self.0.unsigned_abs();
        let whole = abs / MICROS_PER_UNIT as u64;
        let frac = abs % MICROS_PER_UNIT as u64;
        if frac == 0 {
            write!(f, "{sign}{whole}")
        } else {
            let digits = format!("{frac:06}");
            write!(f, "{sign}{whole}.{}", digits.trim_end_matches('0'))
        }
    }
}

impl FromStr for Money {
    type Err = MoneyError;

    fn from_str(s: &str) -> Result<Self, MoneyError> {
        let (sign, body) = match s.strip_prefix('-') {
            Some(rest) => (-1i64, rest),
            None => (1i64, s),
        };
        let (whole, frac) = match body.split_once('.') {
            Some((w, f)) => (w, f),
            None => (body, ""),
        };
        if whole.is_empty() && frac.is_empty() {
            return Err(MoneyError::Malformed(s.to_string()));
        }
        if frac.len() > 6 {
            return Err(MoneyError::TooPrecise(s.to_string()));
        }
        let parse_digits = |d: &str| -> Result<u64, MoneyError> {
            if d.is_empty() {
                Ok(0)
            } else if d.bytes().all(|b| b.is_ascii_digit()) {
                d.parse().map_err(|_| MoneyError::Overflow)
            } else {
                Err(MoneyError::Malformed(s.to_string()))
            }
        };
        let whole_units = parse_digits(whole)?;
        let frac_micros = parse_digits(&format!("{frac:0<6}"))?;
        let micros = whole_units
            .checked_mul(MICROS_PER_UNIT as u64)
            .and_then(|w| w.checked_add(frac_micros))
            .and_then(|total| i64::try_from(total).ok())
            .ok_or(MoneyError::Overflow)?;
        Ok(Money(sign * micros))
    }
}

impl Serialize for Money {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Money {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct Visitor;

        impl de::Visitor<'_> for Visitor {
            type Value = Money;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a decimal amount as string or number")
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Money, E> {
                v.parse().map_err(de::Error::custom)
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Money, E> {
                let micros = v * MICROS_PER_UNIT as f64;
                if !micros.is_finite() || micros.abs() > i64::MAX as f64 {
                    return Err(de::Error::custom(MoneyError::Overflow));
                }
                Ok(Money(micros.round() as i64))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Money, E> {
                v.checked_mul(MICROS_PER_UNIT)
                    .map(Money)
                    .ok_or_else(|| de::Error::custom(MoneyError::Overflow))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Money, E> {
                i64::try_from(v)
                    .ok()
                    .and_then(|v| v.checked_mul(MICROS_PER_UNIT))
                    .map(Money)
                    .ok_or_else(|| de::Error::custom(MoneyError::Overflow))
            }
        }

        deserializer.deserialize_any(Visitor)
    }
}
