//! Integer-microsecond simulation clock.
//!
//! All event timestamps are whole microseconds. Conversions from real-valued
//! milliseconds or seconds round half up, so two different call sites that
//! compute the same instant from the same floats land on the same tick.

use std::fmt;
use std::ops::{Add, AddAssign, Sub};

use serde::{Deserialize, Serialize};

/// A point in simulated time, in microseconds since the start of the run.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SimTime(u64);

impl SimTime {
    pub const ZERO: SimTime = SimTime(0);

    pub const fn from_us(us: u64) -> Self {
        SimTime(us)
    }

    /// Rounds half up to the nearest microsecond. Negative and non-finite
    /// inputs clamp to zero; scenario validation rejects them upstream.
    pub fn from_ms(ms: f64) -> Self {
        Self::from_us_f64(ms * 1_000.0)
    }

    /// Same rounding rule as [`SimTime::from_ms`].
    pub fn from_secs(secs: f64) -> Self {
        Self::from_us_f64(secs * 1_000_000.0)
    }

    pub fn from_us_f64(us: f64) -> Self {
        if !us.is_finite() || us <= 0.0 {
            return SimTime(0);
        }
        SimTime((us + 0.5).floor() as u64)
    }

    pub const fn as_us(self) -> u64 {
        self.0
    }

    pub fn as_ms(self) -> f64 {
        self.0 as f64 / 1_000.0
    }

    pub fn as_secs(self) -> f64 {
        self.0 as f64 / 1_000_000.0
    }

    pub fn saturating_sub(self, rhs: SimTime) -> SimTime {
        SimTime(self.0.saturating_sub(rhs.0))
    }

    /// Millisecond rendering with fixed microsecond precision ("12.345").
    /// Used by the CSV exporters so timestamps are exact decimals.
    pub fn ms_string(self) -> String {
        format!("{}.{:03}", self.0 / 1_000, self.0 % 1_000)
    }
}

impl Add for SimTime {
    type Output = SimTime;

    fn add(self, rhs: SimTime) -> SimTime {
        SimTime(self.0 + rhs.0)
    }
}

impl AddAssign for SimTime {
    fn add_assign(&mut self, rhs: SimTime) {
        self.0 += rhs.0;
    }
}

impl Sub for SimTime {
    type Output = SimTime;

    fn sub(self, rhs: SimTime) -> SimTime {
        SimTime(self.0 - rhs.0)
    }
}

impl fmt::Debug for SimTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}us", self.0)
    }
}

impl fmt::Display for SimTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}ms", self.ms_string())
    }
}
