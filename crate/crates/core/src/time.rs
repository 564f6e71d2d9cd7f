//! Tick arithmetic.
//!
//! Inputs are integer ticks. Internally every value is stored in half-ticks so
//! that half of any integer duration is exactly representable.

use std::fmt;
use std::ops::{Add, Sub};

use num_rational::Ratio;
use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

/// An instant on the half-tick scale.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TimePoint(i64);

/// A non-negative length of time on the half-tick scale.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Duration(i64);

impl TimePoint {
    pub const fn from_ticks(ticks: i64) -> Self {
        Self(ticks * 2)
    }

    pub const fn from_half_ticks(half: i64) -> Self {
        Self(half)
    }

    pub const fn half_ticks(self) -> i64 {
        self.0
    }

    /// Value in input ticks, exact.
    pub fn ticks(self) -> Ratio<i64> {
        Ratio::new(self.0, 2)
    }

    pub fn is_whole_tick(self) -> bool {
        self.0 % 2 == 0
    }

    /// The next point on the input tick grid.
    pub fn next_tick(self) -> Self {
        Self(self.0 + 2)
    }

    /// The earliest whole tick at or after this instant.
    pub fn ceil_tick(self) -> Self {
        Self((self.0 + 1).div_euclid(2) * 2)
    }

    pub fn scaled(self, k: i64) -> Self {
        Self(self.0 * k)
    }
}

impl Duration {
    pub const ZERO: Duration = Duration(0);

    pub const fn from_ticks(ticks: i64) -> Self {
        Self(ticks * 2)
    }

    pub const fn from_half_ticks(half: i64) -> Self {
        Self(half)
    }

    pub const fn half_ticks(self) -> i64 {
        self.0
    }

    pub fn ticks(self) -> Ratio<i64> {
        Ratio::new(self.0, 2)
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    pub fn scaled(self, k: i64) -> Self {
        Self(self.0 * k)
    }
}

impl Add<Duration> for TimePoint {
    type Output = TimePoint;

    fn add(self, rhs: Duration) -> TimePoint {
        TimePoint(self.0 + rhs.0)
    }
}

impl Sub for TimePoint {
    type Output = Duration;

    fn sub(self, rhs: TimePoint) -> Duration {
        debug_assert!(self.0 >= rhs.0, "negative duration {} - {}", self.0, rhs.0);
        Duration(self.0 - rhs.0)
    }
}

impl Add for Duration {
    type Output = Duration;

    fn add(self, rhs: Duration) -> Duration {
        Duration(self.0 + rhs.0)
    }
}

/// Renders a half-tick count in input ticks: `60`, `60.5`, `-0.5`.
pub fn format_half_ticks(half: i64) -> String {
    let whole = half / 2;
    match half % 2 {
        0 => whole.to_string(),
        _ if half < 0 && whole == 0 => "-0.5".to_string(),
        _ => format!("{whole}.5"),
    }
}

/// Renders an exact tick value, rounding to the nearest half-tick when the
/// value is not itself a half-tick multiple (ties round away from zero).
pub fn format_ticks(value: Ratio<i64>) -> String {
    let doubled = value * 2;
    let half = if doubled.is_integer() { doubled.to_integer() } else { doubled.round().to_integer() };
    format_half_ticks(half)
}

impl fmt::Display for TimePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_half_ticks(self.0))
    }
}

impl fmt::Display for Duration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_half_ticks(self.0))
    }
}

pub(crate) fn serialize_half<S: Serializer>(half: i64, s: S) -> Result<S::Ok, S::Error> {
    if half % 2 == 0 {
        s.serialize_i64(half / 2)
    } else {
        s.serialize_f64(half as f64 / 2.0)
    }
}

impl Serialize for TimePoint {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        serialize_half(self.0, s)
    }
}

impl Serialize for Duration {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        serialize_half(self.0, s)
    }
}

struct HalfTickVisitor;

impl Visitor<'_> for HalfTickVisitor {
    type Value = i64;

    fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("a whole or half tick count")
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<i64, E> {
        v.checked_mul(2).ok_or_else(|| E::custom("tick count out of range"))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<i64, E> {
        i64::try_from(v).map_err(|_| E::custom("tick count out of range")).and_then(|v| self.visit_i64(v))
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> Result<i64, E> {
        let doubled = v * 2.0;
        if doubled.fract() != 0.0 || !doubled.is_finite() || doubled.abs() > (1u64 << 52) as f64 {
            return Err(E::custom(format!("{v} is not a multiple of half a tick")));
        }
        Ok(doubled as i64)
    }
}

pub(crate) fn deserialize_half<'de, D: Deserializer<'de>>(d: D) -> Result<i64, D::Error> {
    d.deserialize_any(HalfTickVisitor)
}

impl<'de> Deserialize<'de> for TimePoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        deserialize_half(d).map(TimePoint)
    }
}

impl<'de> Deserialize<'de> for Duration {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        deserialize_half(d).map(Duration)
    }
}
