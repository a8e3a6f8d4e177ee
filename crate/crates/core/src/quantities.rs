//! Unit-tagged scalar quantities and decibel arithmetic.
//!
//! Byte sizes use **decimal** gigabytes: `1 GB = 1e9 bytes`. The mission
//! budget chain (216 images, 0.425 GB per run, 1.274 GB per mission) only
//! lines up with decimal units, so every `*_gb` accessor in this crate
//! divides by `1e9`, never by `2^30`.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::ops::{Add, Neg, Sub};

use crate::error::DomainError;

/// Bytes per (decimal) gigabyte.
pub const BYTES_PER_GB: f64 = 1e9;

/// A power ratio expressed in decibels.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Decibel(pub f64);

impl Decibel {
    pub const ZERO: Decibel = Decibel(0.0);

    pub fn new(value: f64) -> Self {
        Decibel(value)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Power ratio `10^(dB/10)`.
    pub fn to_linear(self) -> f64 {
        db_to_linear(self)
    }

    pub fn from_linear(x: f64) -> Result<Self, DomainError> {
        linear_to_db(x)
    }
}

impl Add for Decibel {
    type Output = Decibel;
    fn add(self, rhs: Decibel) -> Decibel {
        Decibel(self.0 + rhs.0)
    }
}

impl Sub for Decibel {
    type Output = Decibel;
    fn sub(self, rhs: Decibel) -> Decibel {
        Decibel(self.0 - rhs.0)
    }
}

impl Neg for Decibel {
    type Output = Decibel;
    fn neg(self) -> Decibel {
        Decibel(-self.0)
    }
}

impl fmt::Display for Decibel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.2} dB", self.0)
    }
}

/// `10^(d/10)`.
pub fn db_to_linear(d: Decibel) -> f64 {
    if d.0 == 0.0 {
        return 1.0;
    }
    10f64.powf(d.0 / 10.0)
}

/// `10·log10(x)`; `x` must be strictly positive and finite.
pub fn linear_to_db(x: f64) -> Result<Decibel, DomainError> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(DomainError::NonPositiveRatio(x));
    }
    if x == 1.0 {
        return Ok(Decibel::ZERO);
    }
    Ok(Decibel(10.0 * x.log10()))
}

/// Whole-byte data size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DataSize(u64);

impl DataSize {
    pub const ZERO: DataSize = DataSize(0);

    pub const fn from_bytes(bytes: u64) -> Self {
        DataSize(bytes)
    }

    pub const fn bytes(self) -> u64 {
        self.0
    }

    pub fn bits(self) -> f64 {
        self.0 as f64 * 8.0
    }

    /// Decimal gigabytes.
    pub fn gb(self) -> f64 {
        self.0 as f64 / BYTES_PER_GB
    }

    pub fn checked_add(self, rhs: DataSize) -> Option<DataSize> {
        self.0.checked_add(rhs.0).map(DataSize)
    }

    pub fn checked_mul(self, factor: u64) -> Option<DataSize> {
        self.0.checked_mul(factor).map(DataSize)
    }
}

impl fmt::Display for DataSize {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} B ({:.4} GB)", self.0, self.gb())
    }
}

/// Elapsed time in seconds (real-valued, non-negative).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Duration(f64);

impl Duration {
    pub const ZERO: Duration = Duration(0.0);

    pub fn from_secs(seconds: f64) -> Result<Self, DomainError> {
        if !(seconds >= 0.0) || !seconds.is_finite() {
            return Err(DomainError::NegativeDuration(seconds));
        }
        Ok(Duration(seconds))
    }

    /// Panicking constructor for literals known to be valid.
    pub fn secs(seconds: f64) -> Self {
        Self::from_secs(seconds).expect("duration must be finite and non-negative")
    }

    pub fn minutes(m: f64) -> Self {
        Self::secs(m * 60.0)
    }

    pub fn hours(h: f64) -> Self {
        Self::secs(h * 3600.0)
    }

    pub fn as_secs(self) -> f64 {
        self.0
    }

    pub fn as_days(self) -> f64 {
        self.0 / 86_400.0
    }
}

impl Add for Duration {
    type Output = Duration;
    fn add(self, rhs: Duration) -> Duration {
        Duration(self.0 + rhs.0)
    }
}

/// Bit rate in bits per second.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Rate(f64);

impl Rate {
    pub fn from_bps(bps: f64) -> Result<Self, DomainError> {
        if !(bps >= 0.0) || !bps.is_finite() {
            return Err(DomainError::NegativeRate(bps));
        }
        Ok(Rate(bps))
    }

    pub fn kbps(kbps: f64) -> Result<Self, DomainError> {
        Self::from_bps(kbps * 1e3)
    }

    pub fn bps(self) -> f64 {
        self.0
    }

    pub fn as_kbps(self) -> f64 {
        self.0 / 1e3
    }
}

/// Carrier frequency in hertz; always strictly positive.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Frequency(f64);

impl Frequency {
    pub fn from_hz(hz: f64) -> Result<Self, DomainError> {
        if !(hz > 0.0) || !hz.is_finite() {
            return Err(DomainError::NonPositiveFrequency(hz));
        }
        Ok(Frequency(hz))
    }

    pub fn mhz(mhz: f64) -> Result<Self, DomainError> {
        Self::from_hz(mhz * 1e6)
    }

    pub fn ghz(ghz: f64) -> Result<Self, DomainError> {
        Self::from_hz(ghz * 1e9)
    }

    pub fn hz(self) -> f64 {
        self.0
    }

    pub fn as_mhz(self) -> f64 {
        self.0 / 1e6
    }
}

impl TryFrom<f64> for Frequency {
    type Error = DomainError;
    fn try_from(hz: f64) -> Result<Self, Self::Error> {
        Frequency::from_hz(hz)
    }
}

impl From<Frequency> for f64 {
    fn from(f: Frequency) -> f64 {
        f.0
    }
}

/// Temperature in degrees Celsius.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TemperatureC(pub f64);

impl TemperatureC {
    pub fn celsius(self) -> f64 {
        self.0
    }
}

impl fmt::Display for TemperatureC {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.1} °C", self.0)
    }
}
