//! Exact simulated time.
//!
//! Plan timestamps, durations and makespans are kept as reduced rationals so
//! that graph construction, scheduling and metric comparisons never suffer
//! from floating point drift. Conversion to `f64` happens only when a value is
//! printed or exported.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, Sub};

use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};
use serde::{Serialize, Serializer};

/// A point in (or span of) simulated time, in the plan's time unit.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Time(Ratio<i64>);

impl Time {
    pub const ZERO: Time = Time(Ratio::new_raw(0, 1));

    /// One millisecond; the resolution of sampled durations.
    pub const MILLI: Time = Time(Ratio::new_raw(1, 1000));

    pub fn new(numer: i64, denom: i64) -> Time {
        Time(Ratio::new(numer, denom))
    }

    pub fn from_int(value: i64) -> Time {
        Time(Ratio::from_integer(value))
    }

    pub fn from_millis(ms: i64) -> Time {
        Time::new(ms, 1000)
    }

    /// Rounds a float to the nearest millisecond.
    pub fn from_f64_millis(value: f64) -> Option<Time> {
        if !value.is_finite() {
            return None;
        }
        let ms = (value * 1000.0).round();
        if ms.abs() > (i64::MAX / 2) as f64 {
            return None;
        }
        Some(Time::from_millis(ms as i64))
    }

    /// Parses an unsigned or signed decimal literal such as `5`, `0.00` or
    /// `12.375` exactly.
    pub fn parse_decimal(text: &str) -> Option<Time> {
        let (negative, body) = match text.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, text.strip_prefix('+').unwrap_or(text)),
        };
        let (int_part, frac_part) = match body.split_once('.') {
            Some((i, f)) => (i, f),
            None => (body, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return None;
        }
        if !int_part.bytes().all(|b| b.is_ascii_digit())
            || !frac_part.bytes().all(|b| b.is_ascii_digit())
        {
            return None;
        }
        let frac_part = frac_part.trim_end_matches('0');
        if frac_part.len() > 12 {
            return None;
        }
        let int_value: i64 = if int_part.is_empty() {
            0
        } else {
            int_part.parse().ok()?
        };
        let denom = 10i64.checked_pow(frac_part.len() as u32)?;
        let frac_value: i64 = if frac_part.is_empty() {
            0
        } else {
            frac_part.parse().ok()?
        };
        let numer = int_value.checked_mul(denom)?.checked_add(frac_value)?;
        let numer = if negative { -numer } else { numer };
        Some(Time::new(numer, denom))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0 < Ratio::zero()
    }

    pub fn ratio(&self) -> Ratio<i64> {
        self.0
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    /// Decimal rendering with exactly three fractional digits, rounding half
    /// away from zero. This is the format used by every exported table.
    pub fn fixed3(&self) -> String {
        let ms = (self.0 * Ratio::from_integer(1000)).round().to_integer();
        let sign = if ms < 0 { "-" } else { "" };
        let ms = ms.unsigned_abs();
        format!("{sign}{}.{:03}", ms / 1000, ms % 1000)
    }

    pub fn max(self, other: Time) -> Time {
        if other > self {
            other
        } else {
            self
        }
    }

    pub fn min(self, other: Time) -> Time {
        if other < self {
            other
        } else {
            self
        }
    }
}

impl From<i64> for Time {
    fn from(value: i64) -> Self {
        Time::from_int(value)
    }
}

impl Add for Time {
    type Output = Time;
    fn add(self, rhs: Time) -> Time {
        Time(self.0 + rhs.0)
    }
}

impl AddAssign for Time {
    fn add_assign(&mut self, rhs: Time) {
        self.0 += rhs.0;
    }
}

impl Sub for Time {
    type Output = Time;
    fn sub(self, rhs: Time) -> Time {
        Time(self.0 - rhs.0)
    }
}

impl Mul<i64> for Time {
    type Output = Time;
    fn mul(self, rhs: i64) -> Time {
        Time(self.0 * rhs)
    }
}

impl Div<i64> for Time {
    type Output = Time;
    fn div(self, rhs: i64) -> Time {
        Time(self.0 / rhs)
    }
}

impl Div for Time {
    type Output = Ratio<i64>;
    fn div(self, rhs: Time) -> Ratio<i64> {
        self.0 / rhs.0
    }
}

impl Sum for Time {
    fn sum<I: Iterator<Item = Time>>(iter: I) -> Time {
        iter.fold(Time::ZERO, Add::add)
    }
}

impl<'a> Sum<&'a Time> for Time {
    fn sum<I: Iterator<Item = &'a Time>>(iter: I) -> Time {
        iter.copied().sum()
    }
}

/// Integers print bare, terminating decimals print exactly, anything else
/// prints as `p/q`.
impl fmt::Display for Time {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let numer = *self.0.numer();
        let denom = *self.0.denom();
        if denom == 1 {
            return write!(f, "{numer}");
        }
        let mut d = denom;
        let (mut twos, mut fives) = (0u32, 0u32);
        while d % 2 == 0 {
            d /= 2;
            twos += 1;
        }
        while d % 5 == 0 {
            d /= 5;
            fives += 1;
        }
        if d != 1 {
            return write!(f, "{numer}/{denom}");
        }
        let digits = twos.max(fives);
        let scale = 10i128.pow(digits);
        let scaled = numer as i128 * (scale / denom as i128);
        let sign = if scaled < 0 { "-" } else { "" };
        let scaled = scaled.unsigned_abs();
        let scale = scale as u128;
        write!(
            f,
            "{sign}{}.{:0width$}",
            scaled / scale,
            scaled % scale,
            width = digits as usize
        )
    }
}

impl fmt::Debug for Time {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Time({self})")
    }
}

impl Serialize for Time {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_f64(self.to_f64())
    }
}
