//! Reference checks: recomputes the headline mission numbers from a config
//! and compares each against its published value.
//!
//! The checks honour the config, so a perturbed config (say a 19 minute
//! cadence) makes the affected rows fail. That is the point: the suite
//! shows which published numbers a given parameter set reproduces.

use serde::Serialize;
use std::fmt;
use std::time::Instant;

use crate::adm::{monte_carlo, run_scenario, JitterSpec, Scenario};
use crate::budget::{
    coded_mission_bytes, days_to_downlink, images_per_run, raw_mission_bytes, raw_run_bytes, required_rate,
};
use crate::config::{ConfigError, RunConfig};
use crate::link::{measure_hpbw, pattern_gain, polarization_loss_db, AntennaPreset};
use crate::quantities::{Decibel, Duration, TemperatureC};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Tolerance {
    Abs(f64),
    /// Relative to the expected value.
    Rel(f64),
    /// Computed must not exceed the expected value.
    AtMost,
    /// Computed must be strictly greater than the expected value.
    Above,
}

impl Tolerance {
    pub fn accepts(self, expected: f64, computed: f64) -> bool {
        match self {
            Tolerance::Abs(t) => (computed - expected).abs() <= t,
            Tolerance::Rel(t) => (computed - expected).abs() <= t * expected.abs(),
            Tolerance::AtMost => computed <= expected,
            Tolerance::Above => computed > expected,
        }
    }
}

impl fmt::Display for Tolerance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tolerance::Abs(t) => write!(f, "±{t}"),
            Tolerance::Rel(t) => write!(f, "±{}%", t * 100.0),
            Tolerance::AtMost => f.write_str("<="),
            Tolerance::Above => f.write_str(">"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRow {
    pub name: String,
    pub expected: f64,
    pub computed: f64,
    pub tolerance: Tolerance,
    pub pass: bool,
}

impl CheckRow {
    fn new(name: impl Into<String>, expected: f64, computed: f64, tolerance: Tolerance) -> Self {
        let pass = computed.is_finite() && tolerance.accepts(expected, computed);
        Self { name: name.into(), expected, computed, tolerance, pass }
    }
}

impl fmt::Display for CheckRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {:<34} expected {:>10} {:<8} computed {:.6}",
            if self.pass { "PASS" } else { "FAIL" },
            self.name,
            self.expected,
            self.tolerance.to_string(),
            self.computed
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub rows: Vec<CheckRow>,
    pub all_pass: bool,
}

/// Ambient temperatures bracketing the lumped model's melt threshold.
pub const COLD_CUT_C: f64 = -15.0;
pub const HOT_CUT_C: f64 = 50.0;
pub const NO_CUT_C: f64 = -25.5;

/// Minimum Monte Carlo size for the partial-deployment check.
pub const MIN_MC_RUNS: u32 = 500;
/// Wall-clock budget for that Monte Carlo.
pub const MC_BUDGET_S: f64 = 5.0;

pub fn run_checks(cfg: &RunConfig) -> Result<CheckReport, ConfigError> {
    let mut rows = Vec::new();
    budget_rows(cfg, &mut rows)?;
    link_rows(&mut rows)?;
    thermal_rows(cfg, &mut rows)?;
    let all_pass = rows.iter().all(|r| r.pass);
    Ok(CheckReport { rows, all_pass })
}

fn budget_rows(cfg: &RunConfig, rows: &mut Vec<CheckRow>) -> Result<(), ConfigError> {
    let profile = cfg.mission.profile()?;
    let ctx = cfg.downlink.context()?;
    let coded = coded_mission_bytes(&profile)?;
    rows.push(CheckRow::new("images_per_run", 216.0, images_per_run(&profile)? as f64, Tolerance::Abs(0.0)));
    rows.push(CheckRow::new("raw_run_gb", 0.425, raw_run_bytes(&profile)?.gb(), Tolerance::Rel(1e-3)));
    rows.push(CheckRow::new("raw_mission_gb", 1.274, raw_mission_bytes(&profile)?.gb(), Tolerance::Rel(1e-3)));
    rows.push(CheckRow::new("coded_mission_gb", 1.671, coded / 1e9, Tolerance::Rel(1e-3)));
    rows.push(CheckRow::new("days_to_downlink", 157.7, days_to_downlink(&profile, &ctx)?, Tolerance::Abs(0.5)));

    let rate = required_rate(&profile, ctx.window_per_day, ctx.mission_days)?;
    rows.push(CheckRow::new("required_rate_kbps", 79.8, rate.as_kbps(), Tolerance::Abs(0.1)));
    let moved = rate.bps() * ctx.window_per_day.as_secs() * ctx.mission_days as f64 / 8.0;
    rows.push(CheckRow::new("rate_inversion_rel_error", 0.0, (moved - coded).abs() / coded, Tolerance::Abs(1e-9)));
    Ok(())
}

fn link_rows(rows: &mut Vec<CheckRow>) -> Result<(), ConfigError> {
    let patch = AntennaPreset::PatchMeasured.pattern();
    rows.push(CheckRow::new("patch_boresight_gain_db", 4.13, pattern_gain(&patch, 0.0)?.0, Tolerance::Abs(1e-9)));
    rows.push(CheckRow::new("patch_gain_52deg_db", 1.13, pattern_gain(&patch, 52.0)?.0, Tolerance::Abs(1e-6)));
    rows.push(CheckRow::new("patch_hpbw_deg", 104.0, measure_hpbw(&patch).unwrap_or(f64::NAN), Tolerance::Abs(0.02)));
    let lin_circ = polarization_loss_db(Decibel(f64::INFINITY), Decibel(0.0), 0.0);
    rows.push(CheckRow::new("pol_loss_linear_circular_db", 3.01, lin_circ.0, Tolerance::Abs(0.01)));
    let matched = polarization_loss_db(Decibel(0.0), Decibel(0.0), 0.0);
    rows.push(CheckRow::new("pol_loss_matched_circular_db", 0.0, matched.0, Tolerance::Abs(1e-9)));
    Ok(())
}

fn thermal_rows(cfg: &RunConfig, rows: &mut Vec<CheckRow>) -> Result<(), ConfigError> {
    let adm = cfg.adm()?;
    let n = adm.n_doors as f64;
    let base = Scenario { ambient: TemperatureC(0.0), rng_seed: cfg.scenario.rng_seed, ..Scenario::default() };
    // horizon at the end of the second burn, so nothing past attempt 2 runs
    let two_attempts = Duration::from_secs(2.0 * adm.burn_max.as_secs() + adm.retry_partial.as_secs())?;

    for (label, ambient) in [("minus15c", COLD_CUT_C), ("plus50c", HOT_CUT_C)] {
        let s = Scenario { ambient: TemperatureC(ambient), horizon: two_attempts, ..base.clone() };
        let run = run_scenario(&s, &adm)?.summary;
        rows.push(CheckRow::new(format!("doors_open_{label}"), n, run.doors_open as f64, Tolerance::Abs(0.0)));
        rows.push(CheckRow::new(format!("attempts_{label}"), 2.0, run.attempts as f64, Tolerance::AtMost));
    }

    let cold = Scenario { ambient: TemperatureC(NO_CUT_C), horizon: two_attempts, ..base.clone() };
    let run = run_scenario(&cold, &adm)?.summary;
    rows.push(CheckRow::new("attempts_minus25_5c", 2.0, run.attempts as f64, Tolerance::Abs(0.0)));
    rows.push(CheckRow::new("lines_cut_minus25_5c", 0.0, run.lines_cut as f64, Tolerance::Abs(0.0)));

    let runs = cfg.montecarlo.runs.max(MIN_MC_RUNS);
    let started = Instant::now();
    let mc = monte_carlo(&cold, &adm, runs, JitterSpec::uniform(cfg.montecarlo.jitter))?;
    let elapsed = started.elapsed().as_secs_f64();
    rows.push(CheckRow::new("mc_partial_prob_minus25_5c", 0.0, mc.partial_probability, Tolerance::Above));
    rows.push(CheckRow::new("mc_runtime_s", MC_BUDGET_S, elapsed, Tolerance::AtMost));
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_pass() {
        let report = run_checks(&RunConfig::default()).unwrap();
        for r in &report.rows {
            assert!(r.pass, "{r}");
        }
        assert!(report.all_pass);
    }

    #[test]
    fn perturbed_cadence_fails_image_row() {
        let mut cfg = RunConfig::default();
        cfg.mission.cadence_min = 19.0;
        let report = run_checks(&cfg).unwrap();
        let row = report.rows.iter().find(|r| r.name == "images_per_run").unwrap();
        assert!(!row.pass);
        assert_eq!(row.computed, 227.0);
        assert!(!report.all_pass);
    }

    #[test]
    fn tolerance_kinds() {
        assert!(Tolerance::Abs(0.5).accepts(157.7, 158.2));
        assert!(!Tolerance::Abs(0.5).accepts(157.7, 158.3));
        assert!(Tolerance::Rel(1e-3).accepts(1000.0, 1001.0));
        assert!(Tolerance::AtMost.accepts(2.0, 2.0));
        assert!(!Tolerance::Above.accepts(0.0, 0.0));
    }
}
