//! TOML run configuration.
//!
//! Every section and key is optional; omitted values fall back to the
//! mission defaults, so an empty file (or no file) is a valid config.
//! Unknown keys are rejected. Schema:
//!
//! ```toml
//! [mission]
//! image_width = 1280            # pixels
//! image_height = 1024
//! channels = 3
//! bit_depth = 8
//! compression_ratio = 2.0
//! cadence_min = 20.0
//! run_duration_h = 72.0
//! runs = 3
//! code_data_bits = 3952
//! code_codeword_bits = 5184
//! pad_to_codeword = false
//!
//! [downlink]
//! window_s = 458.86             # average contact per day
//! available_days = 365
//! link_rate_kbps = 184.8
//!
//! [link]
//! tx_preset = "patch-measured"  # patch-measured | patch-simulated | turnstile-ideal | dipole-linear
//! rx_preset = "patch-measured"
//! frequency_mhz = 2430.0        # defaults to the TX preset's nominal frequency
//! distance_km = 500.0           # required, no default
//! tx_power_dbw = 0.0
//! tx_off_boresight_deg = 0.0
//! rx_off_boresight_deg = 0.0
//! polarization_tilt_deg = 0.0
//! misc_losses_db = 0.0
//! required_cn_db = 0.0
//!
//! [adm]                         # see AdmConfig
//! burn_max_s = 30.0
//!
//! [scenario]
//! ambient_c = 20.0
//! horizon_h = 2.0
//! rng_seed = 0
//! jitter = 0.0                  # relative sigma on k, C and melt point
//! battery = [{ t_s = 0.0, volts = 8.2 }]
//! tc = ["confirm@3600"]
//! faults = ["resistor-open:0:0"]
//!
//! [montecarlo]
//! runs = 500
//! jitter = 0.05
//! sweep = "-30:60:5"
//! ```

use serde::{Deserialize, Serialize};
use std::path::Path;
use thiserror::Error;

use crate::adm::{AdmConfig, BatteryPoint, FaultSpec, JitterSpec, Scenario, SweepSpec, TcEvent};
use crate::budget::{DownlinkContext, MissionDataProfile};
use crate::error::DomainError;
use crate::link::{AntennaPreset, LinkBudgetInput};
use crate::quantities::{Decibel, Duration, Frequency, Rate, TemperatureC};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("invalid config: {0}")]
    Parse(String),
    #[error("invalid value: {0}")]
    Domain(#[from] DomainError),
    #[error("missing required key `{0}`")]
    Missing(&'static str),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MissionSection {
    pub image_width: u32,
    pub image_height: u32,
    pub channels: u32,
    pub bit_depth: u32,
    pub compression_ratio: f64,
    pub cadence_min: f64,
    pub run_duration_h: f64,
    pub runs: u32,
    pub code_data_bits: u32,
    pub code_codeword_bits: u32,
    pub pad_to_codeword: bool,
}

impl Default for MissionSection {
    fn default() -> Self {
        let p = MissionDataProfile::default();
        Self {
            image_width: p.image_width,
            image_height: p.image_height,
            channels: p.channels,
            bit_depth: p.bit_depth,
            compression_ratio: p.compression_ratio,
            cadence_min: p.cadence.as_secs() / 60.0,
            run_duration_h: p.run_duration.as_secs() / 3600.0,
            runs: p.runs,
            code_data_bits: p.code_data_bits,
            code_codeword_bits: p.code_codeword_bits,
            pad_to_codeword: p.pad_to_codeword,
        }
    }
}

impl MissionSection {
    pub fn profile(&self) -> Result<MissionDataProfile, ConfigError> {
        let p = MissionDataProfile {
            image_width: self.image_width,
            image_height: self.image_height,
            channels: self.channels,
            bit_depth: self.bit_depth,
            compression_ratio: self.compression_ratio,
            cadence: Duration::from_secs(self.cadence_min * 60.0)?,
            run_duration: Duration::from_secs(self.run_duration_h * 3600.0)?,
            runs: self.runs,
            code_data_bits: self.code_data_bits,
            code_codeword_bits: self.code_codeword_bits,
            pad_to_codeword: self.pad_to_codeword,
        };
        p.validate()?;
        Ok(p)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DownlinkSection {
    pub window_s: f64,
    pub available_days: u32,
    pub link_rate_kbps: f64,
}

impl Default for DownlinkSection {
    fn default() -> Self {
        let d = DownlinkContext::default();
        Self {
            window_s: d.window_per_day.as_secs(),
            available_days: d.mission_days,
            link_rate_kbps: d.link_rate.as_kbps(),
        }
    }
}

impl DownlinkSection {
    pub fn context(&self) -> Result<DownlinkContext, ConfigError> {
        let ctx = DownlinkContext {
            window_per_day: Duration::from_secs(self.window_s)?,
            mission_days: self.available_days,
            link_rate: Rate::kbps(self.link_rate_kbps)?,
        };
        ctx.validate()?;
        Ok(ctx)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LinkSection {
    pub tx_preset: AntennaPreset,
    pub rx_preset: AntennaPreset,
    pub frequency_mhz: Option<f64>,
    pub distance_km: Option<f64>,
    pub tx_power_dbw: f64,
    pub tx_off_boresight_deg: f64,
    pub rx_off_boresight_deg: f64,
    pub polarization_tilt_deg: f64,
    pub misc_losses_db: f64,
    pub required_cn_db: f64,
}

impl Default for LinkSection {
    fn default() -> Self {
        Self {
            tx_preset: AntennaPreset::PatchMeasured,
            rx_preset: AntennaPreset::PatchMeasured,
            frequency_mhz: None,
            distance_km: None,
            tx_power_dbw: 0.0,
            tx_off_boresight_deg: 0.0,
            rx_off_boresight_deg: 0.0,
            polarization_tilt_deg: 0.0,
            misc_losses_db: 0.0,
            required_cn_db: 0.0,
        }
    }
}

impl LinkSection {
    pub fn frequency(&self) -> Result<Frequency, ConfigError> {
        match self.frequency_mhz {
            Some(mhz) => Ok(Frequency::mhz(mhz)?),
            None => Ok(self.tx_preset.nominal_frequency()),
        }
    }

    /// Slant range has no default; a missing distance is an error.
    pub fn input(&self) -> Result<LinkBudgetInput, ConfigError> {
        let distance_km = self.distance_km.ok_or(ConfigError::Missing("link.distance_km"))?;
        let input = LinkBudgetInput {
            frequency: self.frequency()?,
            distance_m: distance_km * 1e3,
            tx_power_dbw: Decibel(self.tx_power_dbw),
            tx_pattern: self.tx_preset.pattern(),
            tx_off_boresight_deg: self.tx_off_boresight_deg,
            rx_pattern: self.rx_preset.pattern(),
            rx_off_boresight_deg: self.rx_off_boresight_deg,
            polarization_tilt_deg: self.polarization_tilt_deg,
            misc_losses_db: Decibel(self.misc_losses_db),
            required_cn_db: Decibel(self.required_cn_db),
        };
        if !(input.distance_m > 0.0) {
            return Err(DomainError::NonPositiveDistance(input.distance_m).into());
        }
        Ok(input)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioSection {
    pub ambient_c: f64,
    pub horizon_h: f64,
    pub rng_seed: u64,
    pub jitter: f64,
    pub battery: Vec<BatteryPoint>,
    pub tc: Vec<TcEvent>,
    pub faults: Vec<FaultSpec>,
}

impl Default for ScenarioSection {
    fn default() -> Self {
        let s = Scenario::default();
        Self {
            ambient_c: s.ambient.0,
            horizon_h: s.horizon.as_secs() / 3600.0,
            rng_seed: s.rng_seed,
            jitter: 0.0,
            battery: s.battery_v_timeline,
            tc: s.tc_schedule,
            faults: s.faults,
        }
    }
}

impl ScenarioSection {
    pub fn scenario(&self, cfg: &AdmConfig) -> Result<Scenario, ConfigError> {
        let s = Scenario {
            ambient: TemperatureC(self.ambient_c),
            battery_v_timeline: self.battery.clone(),
            tc_schedule: self.tc.clone(),
            faults: self.faults.clone(),
            rng_seed: self.rng_seed,
            jitter: JitterSpec::uniform(self.jitter),
            horizon: Duration::from_secs(self.horizon_h * 3600.0)?,
        };
        s.validate(cfg)?;
        Ok(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MonteCarloSection {
    pub runs: u32,
    pub jitter: f64,
    /// `start:stop:step` in °C; `None` runs the scenario's ambient only.
    pub sweep: Option<String>,
}

impl Default for MonteCarloSection {
    fn default() -> Self {
        Self { runs: 500, jitter: 0.05, sweep: Some("-30:60:5".into()) }
    }
}

impl MonteCarloSection {
    pub fn sweep_spec(&self) -> Result<Option<SweepSpec>, ConfigError> {
        self.sweep.as_deref().map(|s| s.parse::<SweepSpec>().map_err(ConfigError::Parse)).transpose()
    }
}

/// All sections of a config file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub mission: MissionSection,
    pub downlink: DownlinkSection,
    pub link: LinkSection,
    pub adm: AdmConfig,
    pub scenario: ScenarioSection,
    pub montecarlo: MonteCarloSection,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Read { path: path.display().to_string(), source })?;
        Self::from_toml(&text)
    }

    pub fn adm(&self) -> Result<AdmConfig, ConfigError> {
        self.adm.validate()?;
        Ok(self.adm.clone())
    }
}
