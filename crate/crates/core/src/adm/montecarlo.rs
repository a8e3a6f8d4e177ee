//! Seeded Monte Carlo over per-line thermal parameter jitter.
//!
//! Run `i` uses seed `template.rng_seed + i`, so run 0 reproduces a single
//! deployment simulated with the template's own seed. Runs execute in
//! parallel and are reduced in run-index order.

use rayon::prelude::*;
use serde::Serialize;
use std::str::FromStr;

use super::scenario::{JitterSpec, Scenario};
use super::sim::run_summary_only;
use super::AdmConfig;
use crate::error::DomainError;
use crate::quantities::TemperatureC;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReliabilityReport {
    pub ambient_c: f64,
    pub runs: u32,
    pub seed: u64,
    pub jitter: JitterSpec,
    /// Fraction of runs with every door open at the horizon.
    pub full_deployment_probability: f64,
    /// Fraction of runs with some, but not all, doors open.
    pub partial_probability: f64,
    pub mean_attempts: f64,
    pub mean_doors_open: f64,
    /// `histogram[k]` = runs ending with exactly `k` doors open.
    pub door_open_histogram: Vec<u32>,
}

pub fn monte_carlo(
    template: &Scenario,
    cfg: &AdmConfig,
    runs: u32,
    jitter: JitterSpec,
) -> Result<ReliabilityReport, DomainError> {
    if runs == 0 {
        return Err(DomainError::invalid("runs", "at least one run is required"));
    }
    let base = Scenario { jitter, ..template.clone() };
    base.validate(cfg)?;
    cfg.validate()?;

    let outcomes: Vec<(usize, u32)> = (0..runs)
        .into_par_iter()
        .map(|i| {
            let scenario = Scenario { rng_seed: base.rng_seed.wrapping_add(i as u64), ..base.clone() };
            run_summary_only(&scenario, cfg).map(|s| (s.doors_open, s.attempts))
        })
        .collect::<Result<_, _>>()?;

    let n = cfg.n_doors;
    let mut histogram = vec![0u32; n + 1];
    let mut attempts = 0u64;
    for (doors, a) in &outcomes {
        histogram[*doors] += 1;
        attempts += *a as u64;
    }
    let total = runs as f64;
    let partial: u32 = histogram[1..n].iter().sum();
    let doors: u64 = histogram.iter().enumerate().map(|(k, c)| k as u64 * *c as u64).sum();
    Ok(ReliabilityReport {
        ambient_c: base.ambient.0,
        runs,
        seed: base.rng_seed,
        jitter,
        full_deployment_probability: histogram[n] as f64 / total,
        partial_probability: partial as f64 / total,
        mean_attempts: attempts as f64 / total,
        mean_doors_open: doors as f64 / total,
        door_open_histogram: histogram,
    })
}

/// Inclusive `start:stop:step` range of ambient temperatures.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepSpec {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self { start: -30.0, stop: 60.0, step: 5.0 }
    }
}

impl SweepSpec {
    pub fn values(&self) -> Vec<f64> {
        let count = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        (0..count).map(|i| self.start + i as f64 * self.step).collect()
    }

    pub fn validate(&self) -> Result<(), DomainError> {
        if !(self.step > 0.0) || !self.start.is_finite() || !self.stop.is_finite() {
            return Err(DomainError::invalid("sweep", "step must be positive and bounds finite"));
        }
        if self.stop < self.start {
            return Err(DomainError::invalid("sweep", "stop is below start"));
        }
        if (self.stop - self.start) / self.step > 10_000.0 {
            return Err(DomainError::invalid("sweep", "more than 10000 sweep points"));
        }
        Ok(())
    }
}

impl FromStr for SweepSpec {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("sweep `{s}` must look like `start:stop:step`"));
        }
        let num = |p: &str| p.trim().parse::<f64>().map_err(|e| format!("sweep `{s}`: {e}"));
        let spec = SweepSpec { start: num(parts[0])?, stop: num(parts[1])?, step: num(parts[2])? };
        spec.validate().map_err(|e| e.to_string())?;
        Ok(spec)
    }
}

/// One Monte Carlo report per ambient temperature, all with the template's
/// seed (common random numbers across the sweep).
pub fn ambient_sweep(
    template: &Scenario,
    cfg: &AdmConfig,
    runs: u32,
    jitter: JitterSpec,
    sweep: SweepSpec,
) -> Result<Vec<ReliabilityReport>, DomainError> {
    sweep.validate()?;
    sweep
        .values()
        .into_iter()
        .map(|c| {
            let s = Scenario { ambient: TemperatureC(c), ..template.clone() };
            monte_carlo(&s, cfg, runs, jitter)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_values() {
        let v = SweepSpec::default().values();
        assert_eq!(v.len(), 19);
        assert_eq!(v[0], -30.0);
        assert_eq!(*v.last().unwrap(), 60.0);
        assert_eq!("0:1:0.25".parse::<SweepSpec>().unwrap().values(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert!("1:0:1".parse::<SweepSpec>().is_err());
        assert!("0:1:0".parse::<SweepSpec>().is_err());
        assert!("0:1".parse::<SweepSpec>().is_err());
    }

    #[test]
    fn zero_runs_rejected() {
        let err = monte_carlo(&Scenario::default(), &AdmConfig::default(), 0, JitterSpec::default());
        assert!(err.is_err());
    }

    #[test]
    fn deterministic_extremes() {
        let cfg = AdmConfig::default();
        let warm = monte_carlo(&Scenario::at_ambient(20.0), &cfg, 20, JitterSpec::default()).unwrap();
        assert_eq!(warm.full_deployment_probability, 1.0);
        assert_eq!(warm.door_open_histogram[4], 20);
        let cold = monte_carlo(&Scenario::at_ambient(-25.5), &cfg, 20, JitterSpec::default()).unwrap();
        assert_eq!(cold.full_deployment_probability, 0.0);
        assert_eq!(cold.door_open_histogram[0], 20);
    }
}
