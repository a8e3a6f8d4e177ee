//! Declarative simulation input: environment, battery profile, telecommand
//! schedule and injected faults.
//!
//! Faults and telecommands have compact string forms used by both the CLI
//! and config files:
//!
//! | form                         | meaning                                   |
//! |------------------------------|-------------------------------------------|
//! | `resistor-open:<set>:<r>`    | resistor `r` of knife set `set` is open   |
//! | `door-stuck:<d>`             | door `d` stays shut even if its line cuts |
//! | `switch-stuck-closed:<d>`    | switch `d` always reads closed            |
//! | `switch-stuck-open:<d>`      | switch `d` always reads open              |
//! | `line-precut:<l>`            | line `l` is already severed               |
//! | `confirm@<s>`, `override@<s>`| telecommand at `s` seconds                |
//!
//! Any fault may carry an `@<seconds>` suffix giving its activation time
//! (default 0).

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use super::AdmConfig;
use crate::error::DomainError;
use crate::quantities::{Duration, TemperatureC};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TcKind {
    /// Ground confirms it sees the spacecraft deployed.
    Confirm,
    /// Operators cancel the pending forced-burn timer.
    OverrideForcedTimer,
}

impl fmt::Display for TcKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TcKind::Confirm => "confirm",
            TcKind::OverrideForcedTimer => "override",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct TcEvent {
    pub at: Duration,
    pub kind: TcKind,
}

impl FromStr for TcEvent {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (kind, at) = s
            .split_once('@')
            .ok_or_else(|| format!("telecommand `{s}` must look like `confirm@<seconds>` or `override@<seconds>`"))?;
        let kind = match kind.trim() {
            "confirm" => TcKind::Confirm,
            "override" => TcKind::OverrideForcedTimer,
            other => return Err(format!("unknown telecommand `{other}`")),
        };
        Ok(TcEvent { at: parse_time(at)?, kind })
    }
}

impl TryFrom<String> for TcEvent {
    type Error = String;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<TcEvent> for String {
    fn from(tc: TcEvent) -> String {
        tc.to_string()
    }
}

impl fmt::Display for TcEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.kind, self.at.as_secs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FaultKind {
    DoorStuck { door: usize },
    ResistorOpen { knife_set: usize, resistor: usize },
    SwitchStuckClosed { door: usize },
    SwitchStuckOpen { door: usize },
    LinePreCut { line: usize },
}

impl fmt::Display for FaultKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FaultKind::DoorStuck { door } => write!(f, "door-stuck:{door}"),
            FaultKind::ResistorOpen { knife_set, resistor } => write!(f, "resistor-open:{knife_set}:{resistor}"),
            FaultKind::SwitchStuckClosed { door } => write!(f, "switch-stuck-closed:{door}"),
            FaultKind::SwitchStuckOpen { door } => write!(f, "switch-stuck-open:{door}"),
            FaultKind::LinePreCut { line } => write!(f, "line-precut:{line}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct FaultSpec {
    pub kind: FaultKind,
    pub active_from: Duration,
}

impl FaultSpec {
    pub fn now(kind: FaultKind) -> Self {
        Self { kind, active_from: Duration::ZERO }
    }

    pub fn is_active(&self, t: f64) -> bool {
        t >= self.active_from.as_secs()
    }
}

impl FromStr for FaultSpec {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (body, at) = match s.split_once('@') {
            Some((b, t)) => (b, parse_time(t)?),
            None => (s, Duration::ZERO),
        };
        let parts: Vec<&str> = body.trim().split(':').collect();
        let idx = |i: usize| -> Result<usize, String> {
            parts
                .get(i)
                .ok_or_else(|| format!("fault `{s}` is missing an index"))?
                .parse::<usize>()
                .map_err(|e| format!("fault `{s}`: {e}"))
        };
        let arity = |n: usize| -> Result<(), String> {
            if parts.len() != n + 1 {
                return Err(format!("fault `{s}` expects {n} index(es)"));
            }
            Ok(())
        };
        let kind = match parts[0] {
            "door-stuck" => {
                arity(1)?;
                FaultKind::DoorStuck { door: idx(1)? }
            }
            "resistor-open" => {
                arity(2)?;
                FaultKind::ResistorOpen { knife_set: idx(1)?, resistor: idx(2)? }
            }
            "switch-stuck-closed" => {
                arity(1)?;
                FaultKind::SwitchStuckClosed { door: idx(1)? }
            }
            "switch-stuck-open" => {
                arity(1)?;
                FaultKind::SwitchStuckOpen { door: idx(1)? }
            }
            "line-precut" => {
                arity(1)?;
                FaultKind::LinePreCut { line: idx(1)? }
            }
            other => return Err(format!("unknown fault kind `{other}`")),
        };
        Ok(FaultSpec { kind, active_from: at })
    }
}

impl TryFrom<String> for FaultSpec {
    type Error = String;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<FaultSpec> for String {
    fn from(f: FaultSpec) -> String {
        f.to_string()
    }
}

impl fmt::Display for FaultSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.active_from.as_secs() > 0.0 {
            write!(f, "{}@{}", self.kind, self.active_from.as_secs())
        } else {
            write!(f, "{}", self.kind)
        }
    }
}

fn parse_time(s: &str) -> Result<Duration, String> {
    let secs: f64 = s.trim().parse().map_err(|e| format!("bad time `{s}`: {e}"))?;
    Duration::from_secs(secs).map_err(|e| e.to_string())
}

/// Relative Gaussian spread applied independently to each line's thermal
/// parameters.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct JitterSpec {
    pub conductance: f64,
    pub heat_capacity: f64,
    pub melt_temp: f64,
}

impl JitterSpec {
    pub fn uniform(sigma: f64) -> Self {
        Self { conductance: sigma, heat_capacity: sigma, melt_temp: sigma }
    }

    pub fn is_zero(&self) -> bool {
        self.conductance == 0.0 && self.heat_capacity == 0.0 && self.melt_temp == 0.0
    }

    fn validate(&self) -> Result<(), DomainError> {
        for (name, v) in [
            ("jitter.conductance", self.conductance),
            ("jitter.heat_capacity", self.heat_capacity),
            ("jitter.melt_temp", self.melt_temp),
        ] {
            if !(0.0..1.0).contains(&v) {
                return Err(DomainError::invalid("jitter", format!("{name} must be in [0, 1), got {v}")));
            }
        }
        Ok(())
    }
}

/// Battery voltage sample; the timeline is a step function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BatteryPoint {
    pub t_s: f64,
    pub volts: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub ambient: TemperatureC,
    pub battery_v_timeline: Vec<BatteryPoint>,
    pub tc_schedule: Vec<TcEvent>,
    pub faults: Vec<FaultSpec>,
    pub rng_seed: u64,
    pub jitter: JitterSpec,
    pub horizon: Duration,
}

impl Default for Scenario {
    /// 20 °C, healthy 8.2 V battery, no faults or telecommands, 2 h horizon.
    fn default() -> Self {
        Self {
            ambient: TemperatureC(20.0),
            battery_v_timeline: vec![BatteryPoint { t_s: 0.0, volts: 8.2 }],
            tc_schedule: Vec::new(),
            faults: Vec::new(),
            rng_seed: 0,
            jitter: JitterSpec::default(),
            horizon: Duration::hours(2.0),
        }
    }
}

impl Scenario {
    pub fn at_ambient(celsius: f64) -> Self {
        Self { ambient: TemperatureC(celsius), ..Self::default() }
    }

    /// Battery voltage in force at `t`. Before the first sample the first
    /// sample's value applies.
    pub fn battery_at(&self, t: f64) -> f64 {
        let mut volts = self.battery_v_timeline.first().map(|p| p.volts).unwrap_or(0.0);
        for p in &self.battery_v_timeline {
            if p.t_s <= t {
                volts = p.volts;
            } else {
                break;
            }
        }
        volts
    }

    pub fn validate(&self, cfg: &AdmConfig) -> Result<(), DomainError> {
        if !(self.horizon.as_secs() > 0.0) {
            return Err(DomainError::invalid("horizon", "must be positive"));
        }
        if self.battery_v_timeline.is_empty() {
            return Err(DomainError::invalid("battery", "timeline needs at least one sample"));
        }
        if self.battery_v_timeline.windows(2).any(|w| w[1].t_s < w[0].t_s) {
            return Err(DomainError::invalid("battery", "sample times must be non-decreasing"));
        }
        if self.tc_schedule.windows(2).any(|w| w[1].at < w[0].at) {
            return Err(DomainError::invalid("tc", "telecommand times must be non-decreasing"));
        }
        if !self.ambient.0.is_finite() {
            return Err(DomainError::invalid("ambient_c", "must be finite"));
        }
        self.jitter.validate()?;
        for f in &self.faults {
            let ok = match f.kind {
                FaultKind::DoorStuck { door }
                | FaultKind::SwitchStuckClosed { door }
                | FaultKind::SwitchStuckOpen { door } => door < cfg.n_doors,
                FaultKind::LinePreCut { line } => line < cfg.n_doors,
                FaultKind::ResistorOpen { knife_set, resistor } => {
                    knife_set < cfg.knife_sets && resistor < cfg.resistors_per_knife
                }
            };
            if !ok {
                return Err(DomainError::invalid("faults", format!("`{f}` is out of range for this mechanism")));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_faults() {
        let f: FaultSpec = "resistor-open:0:1".parse().unwrap();
        assert_eq!(f.kind, FaultKind::ResistorOpen { knife_set: 0, resistor: 1 });
        assert_eq!(f.active_from, Duration::ZERO);
        let g: FaultSpec = "door-stuck:2@120".parse().unwrap();
        assert_eq!(g.kind, FaultKind::DoorStuck { door: 2 });
        assert_eq!(g.active_from.as_secs(), 120.0);
        assert_eq!(g.to_string(), "door-stuck:2@120");
        assert!("door-stuck".parse::<FaultSpec>().is_err());
        assert!("door-stuck:1:2".parse::<FaultSpec>().is_err());
        assert!("melt:1".parse::<FaultSpec>().is_err());
        assert!("line-precut:x".parse::<FaultSpec>().is_err());
    }

    #[test]
    fn parse_tcs() {
        let tc: TcEvent = "confirm@3600".parse().unwrap();
        assert_eq!(tc.kind, TcKind::Confirm);
        assert_eq!(tc.at.as_secs(), 3600.0);
        let o: TcEvent = "override@7200.5".parse().unwrap();
        assert_eq!(o.kind, TcKind::OverrideForcedTimer);
        assert!("confirm".parse::<TcEvent>().is_err());
        assert!("reboot@1".parse::<TcEvent>().is_err());
        assert!("confirm@-1".parse::<TcEvent>().is_err());
    }

    #[test]
    fn battery_is_a_step_function() {
        let s = Scenario {
            battery_v_timeline: vec![BatteryPoint { t_s: 10.0, volts: 8.0 }, BatteryPoint { t_s: 100.0, volts: 6.0 }],
            ..Scenario::default()
        };
        assert_eq!(s.battery_at(0.0), 8.0);
        assert_eq!(s.battery_at(99.9), 8.0);
        assert_eq!(s.battery_at(100.0), 6.0);
        assert_eq!(s.battery_at(1e9), 6.0);
    }

    #[test]
    fn validation_catches_bad_input() {
        let cfg = AdmConfig::default();
        assert!(Scenario::default().validate(&cfg).is_ok());
        let bad_fault = Scenario { faults: vec!["door-stuck:4".parse().unwrap()], ..Scenario::default() };
        assert!(bad_fault.validate(&cfg).is_err());
        let bad_resistor = Scenario { faults: vec!["resistor-open:2:0".parse().unwrap()], ..Scenario::default() };
        assert!(bad_resistor.validate(&cfg).is_err());
        let unordered = Scenario {
            tc_schedule: vec!["confirm@10".parse().unwrap(), "confirm@5".parse().unwrap()],
            ..Scenario::default()
        };
        assert!(unordered.validate(&cfg).is_err());
        let no_horizon = Scenario { horizon: Duration::ZERO, ..Scenario::default() };
        assert!(no_horizon.validate(&cfg).is_err());
        let wild = Scenario { jitter: JitterSpec::uniform(1.5), ..Scenario::default() };
        assert!(wild.validate(&cfg).is_err());
    }
}
