//! Antenna deployment mechanism (ADM) simulation.
//!
//! Four doors are each held shut by a melt line. Every line is routed through
//! one resistor of each of two independently switched thermal knives, so
//! either knife can cut every line. The on-board controller fires one knife
//! set at a time, reads four tactile switches, and retries on timers:
//!
//! * all switches open → wait 6 h for a ground confirmation, then re-attempt;
//! * some switches closed → re-attempt after 15 min if the health check passes;
//! * ground confirms while deployment is partial → a 24 h forced-burn timer
//!   fires the burner regardless of health, unless operators override it.
//!
//! [`run_scenario`] drives the protocol with a continuous-time event queue
//! and records an [`EventTrace`]; [`monte_carlo`] repeats it with per-line
//! parameter jitter.

mod montecarlo;
mod queue;
mod scenario;
mod sim;
mod state;
mod thermal;
mod trace;

pub use montecarlo::{ambient_sweep, monte_carlo, ReliabilityReport, SweepSpec};
pub use queue::EventQueue;
pub use scenario::{BatteryPoint, FaultKind, FaultSpec, JitterSpec, Scenario, TcEvent, TcKind};
pub use sim::{run_scenario, RunSummary, SimRun};
pub use state::{
    health_check, AdmState, ArmedTimer, BurnEndReason, BurnPlan, EvalOutcome, Phase, TcOutcome, TimerId, TimerOutcome,
};
pub use thermal::{knife_power_w, line_temp_step, LineThermal, MeltLine, ResistorRef, StepOutcome, SUBSTEPS_PER_TAU};
pub use trace::{EventKind, EventTrace, TraceRecord};

use serde::{Deserialize, Serialize};

use crate::error::DomainError;
use crate::quantities::{Duration, TemperatureC};

/// Static mechanism parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AdmConfig {
    pub n_doors: usize,
    pub resistor_ohms: f64,
    pub supply_volts: f64,
    pub knife_sets: usize,
    pub resistors_per_knife: usize,
    /// Longest a single knife set is powered per attempt.
    #[serde(rename = "burn_max_s")]
    pub burn_max: Duration,
    #[serde(rename = "retry_partial_s")]
    pub retry_partial: Duration,
    #[serde(rename = "reattempt_full_s")]
    pub reattempt_full: Duration,
    #[serde(rename = "forced_burn_timer_s")]
    pub forced_burn_timer: Duration,
    #[serde(rename = "melt_temp_c")]
    pub melt_temp_c: TemperatureC,
    pub line_conductance_w_per_k: f64,
    pub line_heat_capacity_j_per_k: f64,
    pub health_min_battery_v: f64,
}

impl Default for AdmConfig {
    /// 6.8 Ω knife resistors on a 5 V rail, two knife sets of two resistors,
    /// 15 min / 6 h / 24 h timers.
    ///
    /// The line constants put the steady-state line temperature
    /// `T_amb + P/k` (P = 3.676 W) above the 145 °C melt point at −15 °C
    /// ambient and below it at −25.5 °C: any `k` in `(P/170.5, P/160]`
    /// does that. With `C = 0.078 J/K` a line cuts in about 5 s at 20 °C.
    fn default() -> Self {
        Self {
            n_doors: 4,
            resistor_ohms: 6.8,
            supply_volts: 5.0,
            knife_sets: 2,
            resistors_per_knife: 2,
            burn_max: Duration::secs(30.0),
            retry_partial: Duration::minutes(15.0),
            reattempt_full: Duration::hours(6.0),
            forced_burn_timer: Duration::hours(24.0),
            melt_temp_c: TemperatureC(145.0),
            line_conductance_w_per_k: 0.0225,
            line_heat_capacity_j_per_k: 0.078,
            health_min_battery_v: 7.0,
        }
    }
}

impl AdmConfig {
    pub fn validate(&self) -> Result<(), DomainError> {
        if self.n_doors == 0 {
            return Err(DomainError::invalid("n_doors", "must be at least 1"));
        }
        if self.knife_sets < 2 {
            return Err(DomainError::invalid("knife_sets", "at least two knife sets are required"));
        }
        if self.resistors_per_knife == 0 {
            return Err(DomainError::invalid("resistors_per_knife", "must be at least 1"));
        }
        if !(self.resistor_ohms > 0.0) {
            return Err(DomainError::invalid("resistor_ohms", "must be positive"));
        }
        if !(knife_power_w(self) > 0.0) || !knife_power_w(self).is_finite() {
            return Err(DomainError::invalid("supply_volts", "burn power V²/R must be positive"));
        }
        if !(self.burn_max.as_secs() > 0.0) {
            return Err(DomainError::invalid("burn_max_s", "must be positive"));
        }
        if !(self.retry_partial.as_secs() > 0.0
            && self.retry_partial < self.reattempt_full
            && self.reattempt_full < self.forced_burn_timer)
        {
            return Err(DomainError::invalid(
                "retry_partial_s",
                "timers must satisfy 0 < retry_partial < reattempt_full < forced_burn_timer",
            ));
        }
        if !(self.line_conductance_w_per_k > 0.0) {
            return Err(DomainError::invalid("line_conductance_w_per_k", "must be positive"));
        }
        if !(self.line_heat_capacity_j_per_k > 0.0) {
            return Err(DomainError::invalid("line_heat_capacity_j_per_k", "must be positive"));
        }
        if !self.melt_temp_c.0.is_finite() || !self.health_min_battery_v.is_finite() {
            return Err(DomainError::invalid("melt_temp_c", "must be finite"));
        }
        Ok(())
    }

    pub fn timer_period(&self, id: TimerId) -> Duration {
        match id {
            TimerId::RetryPartial => self.retry_partial,
            TimerId::ReattemptFull => self.reattempt_full,
            TimerId::ForcedBurn => self.forced_burn_timer,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        AdmConfig::default().validate().unwrap();
    }

    #[test]
    fn invalid_configs() {
        let single_knife = AdmConfig { knife_sets: 1, ..Default::default() };
        assert!(single_knife.validate().is_err());
        let no_power = AdmConfig { supply_volts: 0.0, ..Default::default() };
        assert!(no_power.validate().is_err());
        let bad_timers = AdmConfig { retry_partial: Duration::hours(7.0), ..Default::default() };
        assert!(bad_timers.validate().is_err());
        let bad_k = AdmConfig { line_conductance_w_per_k: 0.0, ..Default::default() };
        assert!(bad_k.validate().is_err());
    }

    #[test]
    fn config_keys_round_trip_through_toml() {
        let cfg: AdmConfig = toml::from_str("burn_max_s = 45.0\nmelt_temp_c = 150.0").unwrap();
        assert_eq!(cfg.burn_max.as_secs(), 45.0);
        assert_eq!(cfg.melt_temp_c.0, 150.0);
        assert_eq!(cfg.n_doors, 4);
        let err = toml::from_str::<AdmConfig>("burn_max = 45.0").unwrap_err();
        assert!(err.to_string().contains("burn_max"));
    }
}
