//! Lumped first-order thermal model of a melt line routed through a knife
//! resistor.
//!
//! Each line is a single node: `C·dT/dt = P·[heated] − k·(T − T_amb)`.
//! Heated intervals are integrated with RK4 sub-steps of at most
//! `τ / SUBSTEPS_PER_TAU` (τ = C/k); unheated intervals use the exact
//! exponential decay.

use serde::{Deserialize, Serialize};

use super::AdmConfig;
use crate::quantities::TemperatureC;

/// Sub-steps per thermal time constant. Must stay ≥ 20.
pub const SUBSTEPS_PER_TAU: f64 = 50.0;

/// Thermal parameters of one melt line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineThermal {
    /// W/K to the surroundings.
    pub conductance_w_per_k: f64,
    /// J/K.
    pub heat_capacity_j_per_k: f64,
    pub melt_temp_c: f64,
}

impl LineThermal {
    pub fn from_config(cfg: &AdmConfig) -> Self {
        Self {
            conductance_w_per_k: cfg.line_conductance_w_per_k,
            heat_capacity_j_per_k: cfg.line_heat_capacity_j_per_k,
            melt_temp_c: cfg.melt_temp_c.0,
        }
    }

    /// Time constant `C / k` in seconds.
    pub fn tau(&self) -> f64 {
        self.heat_capacity_j_per_k / self.conductance_w_per_k
    }

    /// Temperature the line settles at under constant heating `power_w`.
    pub fn steady_state_c(&self, ambient_c: f64, power_w: f64) -> f64 {
        ambient_c + power_w / self.conductance_w_per_k
    }

    /// Closed-form time to reach the melt point when heated from ambient,
    /// `τ·ln((T∞ − T_amb) / (T∞ − T_melt))`. `None` if it never melts.
    pub fn analytic_cut_time(&self, ambient_c: f64, power_w: f64) -> Option<f64> {
        let t_inf = self.steady_state_c(ambient_c, power_w);
        if ambient_c >= self.melt_temp_c {
            return Some(0.0);
        }
        if t_inf <= self.melt_temp_c {
            return None;
        }
        Some(self.tau() * ((t_inf - ambient_c) / (t_inf - self.melt_temp_c)).ln())
    }
}

/// A (knife set, resistor) pair a line is routed through.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ResistorRef {
    pub knife_set: usize,
    pub resistor: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeltLine {
    pub id: usize,
    pub temp_c: TemperatureC,
    pub cut: bool,
    /// Exactly one resistor per knife set, indexed by knife set.
    pub routed_through: Vec<ResistorRef>,
    pub thermal: LineThermal,
}

impl MeltLine {
    /// Line `id` of `cfg`, at ambient, routed through resistor
    /// `id · resistors_per_knife / n_doors` of every knife set.
    pub fn new(id: usize, cfg: &AdmConfig, ambient: TemperatureC) -> Self {
        let resistor = id * cfg.resistors_per_knife / cfg.n_doors.max(1);
        Self {
            id,
            temp_c: ambient,
            cut: false,
            routed_through: (0..cfg.knife_sets).map(|knife_set| ResistorRef { knife_set, resistor }).collect(),
            thermal: LineThermal::from_config(cfg),
        }
    }

    pub fn resistor_in(&self, knife_set: usize) -> Option<ResistorRef> {
        self.routed_through.get(knife_set).copied()
    }

    /// Free cooling towards ambient over `dt` seconds (exact solution).
    pub fn relax(&mut self, ambient: TemperatureC, dt: f64) {
        if self.cut || dt <= 0.0 {
            return;
        }
        let decay = (-dt / self.thermal.tau()).exp();
        self.temp_c = TemperatureC(ambient.0 + (self.temp_c.0 - ambient.0) * decay);
    }
}

/// Result of advancing one line over an interval.
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub line: MeltLine,
    /// Offset into the interval at which the line reached its melt point.
    pub cut_after: Option<f64>,
}

/// Electrical power dissipated in one knife resistor, `V² / R`.
pub fn knife_power_w(cfg: &AdmConfig) -> f64 {
    cfg.supply_volts * cfg.supply_volts / cfg.resistor_ohms
}

/// Advances `line` by `dt` seconds with constant heating state.
///
/// The line is cut the first instant its temperature reaches the melt point;
/// the crossing is located by linear interpolation inside the sub-step and
/// the temperature is frozen there. A line that is already cut is returned
/// unchanged.
pub fn line_temp_step(line: &MeltLine, heated: bool, cfg: &AdmConfig, ambient: TemperatureC, dt: f64) -> StepOutcome {
    let mut out = line.clone();
    if line.cut || dt <= 0.0 {
        return StepOutcome { line: out, cut_after: None };
    }
    let th = line.thermal;
    let power = if heated { knife_power_w(cfg) } else { 0.0 };
    let melt = th.melt_temp_c;

    if out.temp_c.0 >= melt {
        out.cut = true;
        return StepOutcome { line: out, cut_after: Some(0.0) };
    }

    if !heated {
        out.relax(ambient, dt);
        return StepOutcome { line: out, cut_after: None };
    }

    let k = th.conductance_w_per_k;
    let c = th.heat_capacity_j_per_k;
    let deriv = |t: f64| (power - k * (t - ambient.0)) / c;
    let h_max = th.tau() / SUBSTEPS_PER_TAU;

    let mut elapsed = 0.0;
    let mut temp = out.temp_c.0;
    while elapsed < dt {
        let h = h_max.min(dt - elapsed);
        let k1 = deriv(temp);
        let k2 = deriv(temp + 0.5 * h * k1);
        let k3 = deriv(temp + 0.5 * h * k2);
        let k4 = deriv(temp + h * k3);
        let next = temp + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if next >= melt {
            let frac = (melt - temp) / (next - temp);
            out.temp_c = TemperatureC(melt);
            out.cut = true;
            return StepOutcome { line: out, cut_after: Some(elapsed + frac * h) };
        }
        temp = next;
        elapsed += h;
    }
    out.temp_c = TemperatureC(temp);
    StepOutcome { line: out, cut_after: None }
}
