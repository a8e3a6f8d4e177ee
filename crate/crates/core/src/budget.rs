//! Mission data budget: images → raw bytes → coded bytes → downlink time or
//! required rate.
//!
//! Coding overhead is applied to the mission total as the pure ratio
//! `codeword_bits / data_bits`; no per-image codeword padding unless
//! [`MissionDataProfile::pad_to_codeword`] is set.

use serde::{Deserialize, Serialize};

use crate::error::DomainError;
use crate::quantities::{DataSize, Duration, Rate};

/// Tolerance for `run_duration / cadence` landing a hair below an integer.
const IMAGE_COUNT_EPS: f64 = 1e-9;

/// Imaging payload geometry, cadence and channel-coding parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MissionDataProfile {
    pub image_width: u32,
    pub image_height: u32,
    pub channels: u32,
    pub bit_depth: u32,
    pub compression_ratio: f64,
    pub cadence: Duration,
    pub run_duration: Duration,
    pub runs: u32,
    pub code_data_bits: u32,
    pub code_codeword_bits: u32,
    /// Round each image up to whole codewords instead of applying the
    /// pure code-rate ratio. What-if option; off for the mission defaults.
    pub pad_to_codeword: bool,
}

impl Default for MissionDataProfile {
    /// 1280×1024 8-bit RGB, compression 2, one image every 20 min over a
    /// 72 h run, three runs, 3952 data bits per 5184-bit codeword.
    fn default() -> Self {
        Self {
            image_width: 1280,
            image_height: 1024,
            channels: 3,
            bit_depth: 8,
            compression_ratio: 2.0,
            cadence: Duration::minutes(20.0),
            run_duration: Duration::hours(72.0),
            runs: 3,
            code_data_bits: 3952,
            code_codeword_bits: 5184,
            pad_to_codeword: false,
        }
    }
}

impl MissionDataProfile {
    pub fn validate(&self) -> Result<(), DomainError> {
        if self.code_data_bits == 0 || self.code_codeword_bits == 0 {
            return Err(DomainError::invalid("code_data_bits", "code block sizes must be positive"));
        }
        if self.code_data_bits > self.code_codeword_bits {
            return Err(DomainError::invalid(
                "code_data_bits",
                format!("data bits ({}) exceed codeword bits ({})", self.code_data_bits, self.code_codeword_bits),
            ));
        }
        if !(self.compression_ratio >= 1.0) || !self.compression_ratio.is_finite() {
            return Err(DomainError::invalid(
                "compression_ratio",
                format!("must be >= 1, got {}", self.compression_ratio),
            ));
        }
        if self.cadence.as_secs() <= 0.0 {
            return Err(DomainError::ZeroCadence);
        }
        if self.cadence > self.run_duration {
            return Err(DomainError::invalid("cadence", "cadence exceeds run duration"));
        }
        Ok(())
    }

    /// `codeword_bits / data_bits` (≥ 1).
    pub fn code_expansion(&self) -> f64 {
        self.code_codeword_bits as f64 / self.code_data_bits as f64
    }

    /// Compressed size of one image, rounded to whole bytes.
    pub fn image_bytes(&self) -> u64 {
        let bits = self.image_width as f64 * self.image_height as f64 * self.channels as f64 * self.bit_depth as f64;
        (bits / 8.0 / self.compression_ratio).round() as u64
    }
}

/// Daily contact time, mission length and the link's information rate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DownlinkContext {
    pub window_per_day: Duration,
    pub mission_days: u32,
    pub link_rate: Rate,
}

impl Default for DownlinkContext {
    fn default() -> Self {
        Self {
            window_per_day: Duration::secs(458.86),
            mission_days: 365,
            link_rate: Rate::kbps(184.8).expect("positive literal"),
        }
    }
}

impl DownlinkContext {
    pub fn validate(&self) -> Result<(), DomainError> {
        let w = self.window_per_day.as_secs();
        if !(w > 0.0 && w <= 86_400.0) {
            return Err(DomainError::invalid("window_per_day", format!("must be in (0, 86400] s, got {w}")));
        }
        if self.mission_days == 0 {
            return Err(DomainError::invalid("mission_days", "must be positive"));
        }
        if self.link_rate.bps() <= 0.0 {
            return Err(DomainError::invalid("link_rate", "must be positive"));
        }
        Ok(())
    }
}

/// `floor(run_duration / cadence)`.
pub fn images_per_run(profile: &MissionDataProfile) -> Result<u64, DomainError> {
    let cadence = profile.cadence.as_secs();
    if cadence <= 0.0 {
        return Err(DomainError::ZeroCadence);
    }
    Ok((profile.run_duration.as_secs() / cadence + IMAGE_COUNT_EPS).floor() as u64)
}

/// Compressed payload bytes produced by a single experiment run.
pub fn raw_run_bytes(profile: &MissionDataProfile) -> Result<DataSize, DomainError> {
    let images = images_per_run(profile)?;
    DataSize::from_bytes(profile.image_bytes()).checked_mul(images).ok_or(DomainError::Overflow)
}

/// Compressed payload bytes over all runs.
pub fn raw_mission_bytes(profile: &MissionDataProfile) -> Result<DataSize, DomainError> {
    raw_run_bytes(profile)?.checked_mul(profile.runs as u64).ok_or(DomainError::Overflow)
}

/// Bytes on the air after channel coding, as a real number.
pub fn coded_mission_bytes(profile: &MissionDataProfile) -> Result<f64, DomainError> {
    if profile.code_data_bits == 0 {
        return Err(DomainError::invalid("code_data_bits", "must be positive"));
    }
    if profile.pad_to_codeword {
        let image_bits = profile.image_bytes() * 8;
        let codewords = image_bits.div_ceil(profile.code_data_bits as u64);
        let per_image_bits = codewords as f64 * profile.code_codeword_bits as f64;
        let images = images_per_run(profile)? as f64 * profile.runs as f64;
        return Ok(images * per_image_bits / 8.0);
    }
    Ok(raw_mission_bytes(profile)?.bytes() as f64 * profile.code_expansion())
}

/// Days of contact needed to move the coded mission volume at `ctx.link_rate`.
pub fn days_to_downlink(profile: &MissionDataProfile, ctx: &DownlinkContext) -> Result<f64, DomainError> {
    let per_day_bits = ctx.link_rate.bps() * ctx.window_per_day.as_secs();
    if !(per_day_bits > 0.0) {
        return Err(DomainError::invalid("link_rate", "rate and window must be positive"));
    }
    Ok(coded_mission_bytes(profile)? * 8.0 / per_day_bits)
}

/// Rate needed to downlink the coded mission volume in `available_days`.
pub fn required_rate(
    profile: &MissionDataProfile,
    window_per_day: Duration,
    available_days: u32,
) -> Result<Rate, DomainError> {
    let seconds = window_per_day.as_secs() * available_days as f64;
    if !(seconds > 0.0) {
        return Err(DomainError::invalid("window_per_day", "window and days must be positive"));
    }
    Rate::from_bps(coded_mission_bytes(profile)? * 8.0 / seconds)
}
